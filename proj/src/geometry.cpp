#include "obt/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace obt {

namespace {

constexpr double kPi = 3.14159265358979323846;

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double len2 = ab.norm2();
    if (len2 == 0.0) return distance(p, a);
    double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

} // namespace

ConvexObstacle ConvexObstacle::make_disk(Vec2 center, double radius) {
    if (!(radius > 0.0)) throw InputError("disk radius must be positive");
    ConvexObstacle obs;
    obs.shape_ = ObstacleShape::Disk;
    obs.center_ = center;
    obs.radius_ = radius;
    obs.boundary_length_ = 2.0 * kPi * radius;
    obs.extent_ = std::max(std::abs(center.x), std::abs(center.y)) + radius;
    return obs;
}

ConvexObstacle ConvexObstacle::make_polygon(std::vector<Vec2> vertices) {
    const size_t n = vertices.size();
    if (n < 3) throw InputError("polygon needs at least 3 vertices");

    double ext = 0.0;
    for (const auto& v : vertices)
        ext = std::max({ext, std::abs(v.x), std::abs(v.y)});
    const double eps = geometry_eps(ext);

    // Strict convexity in counterclockwise order, no repeated vertices.
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = vertices[i];
        const Vec2& b = vertices[(i + 1) % n];
        const Vec2& c = vertices[(i + 2) % n];
        if (distance(a, b) <= eps) throw InputError("polygon has repeated vertices");
        if (cross(b - a, c - b) <= eps * eps)
            throw InputError("polygon vertices must be strictly convex in counterclockwise order");
    }

    ConvexObstacle obs;
    obs.shape_ = ObstacleShape::Polygon;
    obs.vertices_ = std::move(vertices);
    obs.extent_ = ext;

    Vec2 centroid{0.0, 0.0};
    for (const auto& v : obs.vertices_) centroid = centroid + v;
    obs.center_ = centroid / static_cast<double>(n);

    obs.cum_.resize(n + 1, 0.0);
    for (size_t i = 0; i < n; ++i)
        obs.cum_[i + 1] = obs.cum_[i] + distance(obs.vertices_[i], obs.vertices_[(i + 1) % n]);
    obs.boundary_length_ = obs.cum_[n];
    return obs;
}

double ConvexObstacle::radius() const {
    if (shape_ != ObstacleShape::Disk) throw Error("radius() called on a polygon obstacle");
    return radius_;
}

bool ConvexObstacle::strictly_inside(const Vec2& p, double eps) const {
    if (shape_ == ObstacleShape::Disk)
        return distance(p, center_) < radius_ - eps;
    const size_t n = vertices_.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = vertices_[i];
        const Vec2& b = vertices_[(i + 1) % n];
        Vec2 e = b - a;
        double d = cross(e, p - a) / e.norm();  // signed distance, >0 inside
        if (d <= eps) return false;
    }
    return true;
}

double ConvexObstacle::boundary_distance(const Vec2& p) const {
    if (shape_ == ObstacleShape::Disk)
        return std::abs(distance(p, center_) - radius_);
    const size_t n = vertices_.size();
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < n; ++i)
        best = std::min(best, point_segment_distance(p, vertices_[i], vertices_[(i + 1) % n]));
    return best;
}

Vec2 ConvexObstacle::project_to_boundary(const Vec2& p) const {
    if (shape_ == ObstacleShape::Disk) {
        Vec2 d = p - center_;
        double nd = d.norm();
        if (nd == 0.0) return center_ + Vec2{radius_, 0.0};
        return center_ + d * (radius_ / nd);
    }
    const size_t n = vertices_.size();
    double best = std::numeric_limits<double>::infinity();
    Vec2 best_q{};
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = vertices_[i];
        const Vec2& b = vertices_[(i + 1) % n];
        Vec2 ab = b - a;
        double t = std::clamp(dot(p - a, ab) / ab.norm2(), 0.0, 1.0);
        Vec2 q = a + ab * t;
        double d = distance(p, q);
        if (d < best) {
            best = d;
            best_q = q;
        }
    }
    return best_q;
}

double ConvexObstacle::wrap_theta(double theta) const {
    double t = std::fmod(theta, boundary_length_);
    if (t < 0.0) t += boundary_length_;
    if (t >= boundary_length_) t = 0.0;
    return t;
}

double ConvexObstacle::arc_walk_length(double theta_from, double theta_to, int orientation) const {
    double diff = orientation >= 0 ? theta_to - theta_from : theta_from - theta_to;
    diff = std::fmod(diff, boundary_length_);
    if (diff < 0.0) diff += boundary_length_;
    return diff;
}

double ConvexObstacle::boundary_param(const Vec2& q, double eps) const {
    if (boundary_distance(q) > eps)
        throw Error("boundary_param: point is not on the obstacle boundary");
    if (shape_ == ObstacleShape::Disk) {
        Vec2 d = q - center_;
        double phi = std::atan2(d.y, d.x);
        if (phi < 0.0) phi += 2.0 * kPi;
        return wrap_theta(radius_ * phi);
    }
    const size_t n = vertices_.size();
    double best = std::numeric_limits<double>::infinity();
    double best_theta = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = vertices_[i];
        const Vec2& b = vertices_[(i + 1) % n];
        Vec2 ab = b - a;
        double len = ab.norm();
        double t = std::clamp(dot(q - a, ab) / ab.norm2(), 0.0, 1.0);
        double d = distance(q, a + ab * t);
        if (d < best) {
            best = d;
            best_theta = cum_[i] + t * len;
        }
    }
    return wrap_theta(best_theta);
}

Vec2 ConvexObstacle::boundary_point(double theta) const {
    double t = wrap_theta(theta);
    if (shape_ == ObstacleShape::Disk) {
        double phi = t / radius_;
        return center_ + Vec2{radius_ * std::cos(phi), radius_ * std::sin(phi)};
    }
    const size_t n = vertices_.size();
    auto it = std::upper_bound(cum_.begin(), cum_.end(), t);
    size_t i = static_cast<size_t>(std::max<std::ptrdiff_t>(0, (it - cum_.begin()) - 1));
    if (i >= n) i = n - 1;
    const Vec2& a = vertices_[i];
    const Vec2& b = vertices_[(i + 1) % n];
    double seg_len = cum_[i + 1] - cum_[i];
    double u = seg_len > 0.0 ? (t - cum_[i]) / seg_len : 0.0;
    return a + (b - a) * u;
}

namespace {

double pair_eps(const ConvexObstacle& obs, const Vec2& x, const Vec2& y) {
    double scale = std::max({obs.extent(), std::abs(x.x), std::abs(x.y),
                             std::abs(y.x), std::abs(y.y)});
    return geometry_eps(scale);
}

void require_admissible(const ConvexObstacle& obs, const Vec2& p, double eps, const char* who) {
    if (obs.strictly_inside(p, eps))
        throw Error(std::string(who) + ": point is strictly inside the obstacle");
}

} // namespace

bool segment_clear(const ConvexObstacle& obs, const Vec2& x, const Vec2& y) {
    const double eps = pair_eps(obs, x, y);
    require_admissible(obs, x, eps, "segment_clear");
    require_admissible(obs, y, eps, "segment_clear");

    if (obs.shape() == ObstacleShape::Disk) {
        return point_segment_distance(obs.center(), x, y) >= obs.radius() - eps;
    }

    // Clip the segment against the polygon half-planes (inside = left of
    // each ccw edge); the segment is blocked iff the clipped midpoint lies
    // strictly inside.
    const auto& v = obs.vertices();
    const size_t n = v.size();
    Vec2 d = y - x;
    double t0 = 0.0, t1 = 1.0;
    for (size_t i = 0; i < n; ++i) {
        Vec2 e = v[(i + 1) % n] - v[i];
        Vec2 normal = e.perp();  // inward for ccw order
        double denom = dot(normal, d);
        double num = dot(normal, v[i] - x);
        if (std::abs(denom) < 1e-300) {
            if (num > 0.0) return true;  // entirely outside this half-plane
            continue;
        }
        double t = num / denom;
        if (denom > 0.0)
            t0 = std::max(t0, t);
        else
            t1 = std::min(t1, t);
        if (t0 > t1) return true;
    }
    Vec2 mid = x + d * (0.5 * (t0 + t1));
    return !obs.strictly_inside(mid, eps);
}

namespace {

// Tangency contacts from p: the points of M where a segment from p grazes the
// boundary. For p on M this is p itself. Returned ccw-side (left of the ray
// p -> center) first.
std::vector<Vec2> tangency_candidates(const ConvexObstacle& obs, const Vec2& p, double eps) {
    if (obs.on_boundary(p, eps)) return {obs.project_to_boundary(p)};

    if (obs.shape() == ObstacleShape::Disk) {
        Vec2 d = p - obs.center();
        double dist = d.norm();
        double r = obs.radius();
        double beta = std::acos(std::clamp(r / dist, -1.0, 1.0));
        double alpha = std::atan2(d.y, d.x);
        Vec2 q1 = obs.center() + Vec2{r * std::cos(alpha - beta), r * std::sin(alpha - beta)};
        Vec2 q2 = obs.center() + Vec2{r * std::cos(alpha + beta), r * std::sin(alpha + beta)};
        return {q1, q2};
    }

    // Polygon: the angular extremes of the vertex fan as seen from p,
    // measured against the direction towards the interior anchor.
    const auto& v = obs.vertices();
    Vec2 ref = (obs.center() - p).normalized();
    double amin = std::numeric_limits<double>::infinity();
    double amax = -std::numeric_limits<double>::infinity();
    size_t imin = 0, imax = 0;
    for (size_t i = 0; i < v.size(); ++i) {
        Vec2 w = v[i] - p;
        double ang = std::atan2(cross(ref, w), dot(ref, w));
        double dist = w.norm();
        // Prefer the nearer vertex on exact angular ties (p collinear with
        // an edge): the wrap enters at the near end and walks the edge.
        if (ang > amax || (ang == amax && dist < (v[imax] - p).norm())) {
            amax = ang;
            imax = i;
        }
        if (ang < amin || (ang == amin && dist < (v[imin] - p).norm())) {
            amin = ang;
            imin = i;
        }
    }
    return {v[imax], v[imin]};  // left (ccw side) first
}

struct WrapCandidate {
    Vec2 tx, ty;
    double theta_x = 0.0, theta_y = 0.0;
    int orientation = 0;
    double seg1 = 0.0, arc = 0.0, seg2 = 0.0;
    double total = 0.0;
    bool left_side = false;
};

std::vector<WrapCandidate> wrap_candidates(const ConvexObstacle& obs, const Vec2& x,
                                           const Vec2& y, double eps) {
    std::vector<WrapCandidate> out;
    auto tx_cands = tangency_candidates(obs, x, eps);
    auto ty_cands = tangency_candidates(obs, y, eps);
    for (const Vec2& tx : tx_cands) {
        if (!segment_clear(obs, x, tx)) continue;
        double theta_x = obs.boundary_param(tx, eps);
        for (const Vec2& ty : ty_cands) {
            if (!segment_clear(obs, ty, y)) continue;
            double theta_y = obs.boundary_param(ty, eps);
            for (int orientation : {+1, -1}) {
                WrapCandidate c;
                c.tx = tx;
                c.ty = ty;
                c.theta_x = theta_x;
                c.theta_y = theta_y;
                c.orientation = orientation;
                c.seg1 = distance(x, tx);
                c.arc = obs.arc_walk_length(theta_x, theta_y, orientation);
                c.seg2 = distance(ty, y);
                c.total = c.seg1 + c.arc + c.seg2;
                double mid_theta = theta_x + orientation * 0.5 * c.arc;
                Vec2 mid = obs.boundary_point(mid_theta);
                c.left_side = cross(y - x, mid - x) > 0.0;
                out.push_back(c);
            }
        }
    }
    return out;
}

const WrapCandidate& pick_wrap(const std::vector<WrapCandidate>& cands, double eps) {
    if (cands.empty()) throw Error("geodesic: no admissible wrap path found");
    size_t best = 0;
    for (size_t i = 1; i < cands.size(); ++i) {
        double diff = cands[i].total - cands[best].total;
        if (diff < -eps) {
            best = i;
        } else if (std::abs(diff) <= eps && cands[i].left_side && !cands[best].left_side) {
            // Exact side tie: deterministic counterclockwise-side choice,
            // i.e. the wrap to the left of the direction x -> y.
            best = i;
        }
    }
    return cands[best];
}

double wrap_length(const ConvexObstacle& obs, const Vec2& x, const Vec2& y, double eps) {
    auto cands = wrap_candidates(obs, x, y, eps);
    return pick_wrap(cands, eps).total;
}

} // namespace

std::pair<Vec2, Vec2> tangent_points(const ConvexObstacle& obs, const Vec2& p) {
    const double eps = pair_eps(obs, p, p);
    if (obs.strictly_inside(p, eps) || obs.on_boundary(p, eps))
        throw Error("tangent_points: point must be strictly outside the obstacle");
    auto cands = tangency_candidates(obs, p, eps);
    return {cands[0], cands[1]};
}

double geodesic_length(const ConvexObstacle& obs, const Vec2& x, const Vec2& y) {
    // Canonical argument order makes the value bitwise symmetric.
    if (lex_less(y, x)) return geodesic_length(obs, y, x);
    const double eps = pair_eps(obs, x, y);
    require_admissible(obs, x, eps, "geodesic_length");
    require_admissible(obs, y, eps, "geodesic_length");
    if (x == y) return 0.0;
    if (segment_clear(obs, x, y)) return distance(x, y);
    return wrap_length(obs, x, y, eps);
}

GeodesicPath geodesic(const ConvexObstacle& obs, const Vec2& x, const Vec2& y) {
    const double eps = pair_eps(obs, x, y);
    require_admissible(obs, x, eps, "geodesic");
    require_admissible(obs, y, eps, "geodesic");

    GeodesicPath path;
    path.start = x;
    path.end = y;

    auto finish = [&](double total) {
        path.cumulative.clear();
        double acc = 0.0;
        for (const auto& piece : path.pieces) {
            acc += piece.length;
            path.cumulative.push_back(acc);
        }
        path.total_length = total;
    };

    if (x == y) {
        finish(0.0);
        return path;
    }

    if (segment_clear(obs, x, y)) {
        GeodesicPath::Piece seg;
        seg.kind = GeodesicPath::PieceKind::Segment;
        seg.a = x;
        seg.b = y;
        seg.length = distance(x, y);
        path.pieces.push_back(seg);
        finish(geodesic_length(obs, x, y));
        return path;
    }

    auto cands = wrap_candidates(obs, x, y, eps);
    const WrapCandidate& c = pick_wrap(cands, eps);

    if (c.seg1 > eps) {
        GeodesicPath::Piece seg;
        seg.kind = GeodesicPath::PieceKind::Segment;
        seg.a = x;
        seg.b = c.tx;
        seg.length = c.seg1;
        path.pieces.push_back(seg);
    }
    if (c.arc > eps) {
        GeodesicPath::Piece arc;
        arc.kind = GeodesicPath::PieceKind::Arc;
        arc.a = c.tx;
        arc.b = c.ty;
        arc.theta_from = c.theta_x;
        arc.theta_to = c.theta_y;
        arc.orientation = c.orientation;
        arc.length = c.arc;
        path.pieces.push_back(arc);
    }
    if (c.seg2 > eps) {
        GeodesicPath::Piece seg;
        seg.kind = GeodesicPath::PieceKind::Segment;
        seg.a = c.ty;
        seg.b = y;
        seg.length = c.seg2;
        path.pieces.push_back(seg);
    }
    finish(geodesic_length(obs, x, y));
    return path;
}

Vec2 path_point(const ConvexObstacle& obs, const GeodesicPath& path, double s) {
    const double eps = pair_eps(obs, path.start, path.end);
    if (s < -eps || s > path.total_length + eps)
        throw Error("path_point: arc length out of range");
    if (path.pieces.empty()) return path.start;
    s = std::clamp(s, 0.0, path.cumulative.back());

    size_t i = 0;
    while (i + 1 < path.pieces.size() && s > path.cumulative[i]) ++i;
    double before = i == 0 ? 0.0 : path.cumulative[i - 1];
    double local = std::clamp(s - before, 0.0, path.pieces[i].length);

    const auto& piece = path.pieces[i];
    if (piece.kind == GeodesicPath::PieceKind::Segment) {
        if (piece.length == 0.0) return piece.a;
        return piece.a + (piece.b - piece.a) * (local / piece.length);
    }
    return obs.boundary_point(piece.theta_from + piece.orientation * local);
}

bool betweenness(const ConvexObstacle& obs, const Vec2& w, const Vec2& x,
                 const Vec2& y, const Vec2& z, double tol) {
    double lhs = geodesic_length(obs, w, x) + geodesic_length(obs, x, y) +
                 geodesic_length(obs, y, z);
    return std::abs(lhs - geodesic_length(obs, w, z)) <= tol;
}

std::optional<BoundaryContact> first_boundary_contact(const ConvexObstacle& obs,
                                                      const GeodesicPath& path) {
    const double eps = pair_eps(obs, path.start, path.end);
    if (obs.on_boundary(path.start, eps))
        return BoundaryContact{0.0, obs.boundary_param(obs.project_to_boundary(path.start), eps)};
    double acc = 0.0;
    for (const auto& piece : path.pieces) {
        if (piece.kind == GeodesicPath::PieceKind::Arc)
            return BoundaryContact{acc, piece.theta_from};
        acc += piece.length;
    }
    if (obs.on_boundary(path.end, eps))
        return BoundaryContact{path.total_length,
                               obs.boundary_param(obs.project_to_boundary(path.end), eps)};
    return std::nullopt;
}

std::optional<BoundaryContact> last_boundary_contact(const ConvexObstacle& obs,
                                                     const GeodesicPath& path) {
    const double eps = pair_eps(obs, path.start, path.end);
    if (obs.on_boundary(path.end, eps))
        return BoundaryContact{path.total_length,
                               obs.boundary_param(obs.project_to_boundary(path.end), eps)};
    double acc = 0.0;
    std::optional<BoundaryContact> found;
    for (const auto& piece : path.pieces) {
        acc += piece.length;
        if (piece.kind == GeodesicPath::PieceKind::Arc)
            found = BoundaryContact{acc, piece.theta_to};
    }
    if (found) return found;
    if (obs.on_boundary(path.start, eps))
        return BoundaryContact{0.0, obs.boundary_param(obs.project_to_boundary(path.start), eps)};
    return std::nullopt;
}

} // namespace obt
