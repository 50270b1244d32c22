#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "obt/error.hpp"
#include "obt/vec2.hpp"

namespace obt {

// Tolerance used for on-boundary / clearance decisions, scaled so it stays
// meaningful for scenes of any size.
inline double geometry_eps(double scale) { return 1e-9 * (1.0 + scale); }

enum class ObstacleShape { Disk, Polygon };

// Convex obstacle C with boundary M. Either a disk or a strictly convex
// polygon with counterclockwise vertices. Admissible points live in the
// closed complement of the obstacle (the boundary included).
class ConvexObstacle {
public:
    static ConvexObstacle make_disk(Vec2 center, double radius);
    static ConvexObstacle make_polygon(std::vector<Vec2> vertices);

    ObstacleShape shape() const { return shape_; }
    bool is_disk() const { return shape_ == ObstacleShape::Disk; }

    // Disk center, or polygon vertex centroid (used as an interior anchor).
    const Vec2& center() const { return center_; }
    double radius() const;
    const std::vector<Vec2>& vertices() const { return vertices_; }

    double boundary_length() const { return boundary_length_; }
    // Largest coordinate magnitude reached by the obstacle; tolerance scale.
    double extent() const { return extent_; }

    bool strictly_inside(const Vec2& p, double eps) const;
    double boundary_distance(const Vec2& p) const;
    bool on_boundary(const Vec2& p, double eps) const {
        return boundary_distance(p) <= eps;
    }
    Vec2 project_to_boundary(const Vec2& p) const;

    // Arc-length coordinate of a boundary point, measured counterclockwise
    // from the reference point (disk: center + (radius, 0); polygon:
    // vertex 0). Throws if q is farther than eps from M.
    double boundary_param(const Vec2& q, double eps) const;
    // Inverse of boundary_param; theta is wrapped into [0, L_M).
    Vec2 boundary_point(double theta) const;

    double wrap_theta(double theta) const;
    // Arc length of the walk theta_from -> theta_to in direction
    // orientation (+1 counterclockwise, -1 clockwise).
    double arc_walk_length(double theta_from, double theta_to, int orientation) const;

private:
    ConvexObstacle() = default;

    ObstacleShape shape_ = ObstacleShape::Disk;
    Vec2 center_;
    double radius_ = 0.0;
    std::vector<Vec2> vertices_;
    std::vector<double> cum_;  // polygon: cumulative edge lengths, cum_[0] = 0
    double boundary_length_ = 0.0;
    double extent_ = 0.0;
};

// A d_M geodesic: at most segment / boundary-arc / segment, arc-length
// parametrized. For a polygon obstacle the "arc" is a walk along boundary
// edges, addressed by the same arc-length coordinate theta.
struct GeodesicPath {
    enum class PieceKind { Segment, Arc };

    struct Piece {
        PieceKind kind = PieceKind::Segment;
        Vec2 a, b;                // piece endpoints
        double theta_from = 0.0;  // arc only
        double theta_to = 0.0;    // arc only
        int orientation = 0;      // arc only: +1 ccw, -1 cw
        double length = 0.0;
    };

    Vec2 start, end;
    std::vector<Piece> pieces;
    std::vector<double> cumulative;  // cumulative[i] = length through piece i
    double total_length = 0.0;

    bool has_arc() const {
        for (const auto& p : pieces)
            if (p.kind == PieceKind::Arc) return true;
        return false;
    }
};

// True iff the open segment (x, y) misses the obstacle interior. Boundary
// contact is allowed. Throws if an endpoint is strictly inside.
bool segment_clear(const ConvexObstacle& obs, const Vec2& x, const Vec2& y);

// The two tangency points on M seen from p (counterclockwise side first,
// i.e. the contact on the left of the ray p -> obstacle center). Throws if
// p is inside or on M.
std::pair<Vec2, Vec2> tangent_points(const ConvexObstacle& obs, const Vec2& p);

// Shortest path between admissible points: a single clear segment, or
// segment-arc-segment around the shorter boundary side. Exact ties between
// the two sides pick the side to the left of the direction x -> y.
GeodesicPath geodesic(const ConvexObstacle& obs, const Vec2& x, const Vec2& y);

// Length of geodesic(obs, x, y); evaluated on the lexicographically sorted
// pair so the result is bitwise symmetric in (x, y).
double geodesic_length(const ConvexObstacle& obs, const Vec2& x, const Vec2& y);

// Point at arc length s along the path, s in [0, total_length].
Vec2 path_point(const ConvexObstacle& obs, const GeodesicPath& path, double s);

// |d(w,x) + d(x,y) + d(y,z) - d(w,z)| <= tol.
bool betweenness(const ConvexObstacle& obs, const Vec2& w, const Vec2& x,
                 const Vec2& y, const Vec2& z, double tol);

// Contact of the path with the boundary M, if any, as (arc length along the
// path, boundary coordinate theta).
struct BoundaryContact {
    double path_pos = 0.0;
    double theta = 0.0;
};
std::optional<BoundaryContact> first_boundary_contact(const ConvexObstacle& obs,
                                                      const GeodesicPath& path);
std::optional<BoundaryContact> last_boundary_contact(const ConvexObstacle& obs,
                                                     const GeodesicPath& path);

} // namespace obt
