#include "obt/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

namespace obt {

namespace {

const char* kClassPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                               "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                               "#bcbd22", "#17becf"};

struct Frame {
    double xmin, ymin, xmax, ymax;
    double width = 840.0, height = 0.0, margin = 30.0;
    double sc = 1.0;

    void fit() {
        double w = std::max(xmax - xmin, 1e-9);
        double h = std::max(ymax - ymin, 1e-9);
        sc = (width - 2 * margin) / w;
        height = h * sc + 2 * margin;
    }
    double X(double x) const { return margin + (x - xmin) * sc; }
    double Y(double y) const { return height - margin - (y - ymin) * sc; }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::set<std::string> parse_layers(const std::string& spec) {
    std::set<std::string> out;
    if (spec.empty()) {
        out = {"obstacle", "atoms", "geodesics", "g-edges", "classes", "map"};
        return out;
    }
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.insert(item);
    }
    return out;
}

void polyline_path(std::string& svg, const std::vector<Vec2>& pts, const Frame& f,
                   const char* style) {
    if (pts.size() < 2) return;
    svg += "<polyline fill=\"none\" " + std::string(style) + " points=\"";
    for (const auto& p : pts) svg += num(f.X(p.x)) + "," + num(f.Y(p.y)) + " ";
    svg += "\"/>\n";
}

std::vector<Vec2> sample_path(const ConvexObstacle& obs, const GeodesicPath& path,
                              double step) {
    std::vector<Vec2> pts;
    if (path.total_length <= 0.0) return pts;
    int n = std::max(2, static_cast<int>(path.total_length / step) + 1);
    for (int k = 0; k <= n; ++k)
        pts.push_back(path_point(obs, path, path.total_length * k / n));
    return pts;
}

} // namespace

std::string render_svg(const Problem& problem, const PipelineResult& r,
                       const std::string& layers) {
    auto active = parse_layers(layers);
    const auto& obs = problem.obstacle;
    const double eps = geometry_eps(r.nodes.scale);

    Frame f{1e300, 1e300, -1e300, -1e300};
    auto grow = [&](const Vec2& p) {
        f.xmin = std::min(f.xmin, p.x);
        f.ymin = std::min(f.ymin, p.y);
        f.xmax = std::max(f.xmax, p.x);
        f.ymax = std::max(f.ymax, p.y);
    };
    for (const auto& p : r.mu.atoms) grow(p);
    for (const auto& p : r.nu.atoms) grow(p);
    if (obs.is_disk()) {
        grow(obs.center() + Vec2{obs.radius(), obs.radius()});
        grow(obs.center() - Vec2{obs.radius(), obs.radius()});
    } else {
        for (const auto& v : obs.vertices()) grow(v);
    }
    f.fit();
    const double step = std::max(f.xmax - f.xmin, f.ymax - f.ymin) / 400.0;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(f.width) +
           "\" height=\"" + num(f.height) + "\" viewBox=\"0 0 " + num(f.width) + " " +
           num(f.height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    if (active.count("obstacle")) {
        if (obs.is_disk()) {
            svg += "<circle cx=\"" + num(f.X(obs.center().x)) + "\" cy=\"" +
                   num(f.Y(obs.center().y)) + "\" r=\"" + num(obs.radius() * f.sc) +
                   "\" fill=\"#d7dce3\" stroke=\"#555555\" stroke-width=\"1\"/>\n";
        } else {
            svg += "<polygon fill=\"#d7dce3\" stroke=\"#555555\" stroke-width=\"1\" points=\"";
            for (const auto& v : obs.vertices())
                svg += num(f.X(v.x)) + "," + num(f.Y(v.y)) + " ";
            svg += "\"/>\n";
        }
    }

    if (active.count("geodesics"))
        for (const auto& path : r.nodes.coupling_paths)
            polyline_path(svg, sample_path(obs, path, step),
                          f, "stroke=\"#b5b9c2\" stroke-width=\"0.6\"");

    if (active.count("g-edges")) {
        for (int u = 0; u < r.g.n; ++u)
            for (size_t k = 0; k < r.g.succ[u].size(); ++k) {
                if (!r.g.succ_strict[u][k]) continue;
                const Vec2& a = r.nodes.nodes[u].p;
                const Vec2& b = r.nodes.nodes[r.g.succ[u][k]].p;
                svg += "<line x1=\"" + num(f.X(a.x)) + "\" y1=\"" + num(f.Y(a.y)) +
                       "\" x2=\"" + num(f.X(b.x)) + "\" y2=\"" + num(f.Y(b.y)) +
                       "\" stroke=\"#dcd2ea\" stroke-width=\"0.3\"/>\n";
            }
    }

    if (active.count("classes")) {
        for (size_t v = 0; v < r.nodes.size(); ++v) {
            int cls = r.part.attached[v];
            if (cls < 0) continue;
            const char* color = kClassPalette[cls % 10];
            const Vec2& p = r.nodes.nodes[v].p;
            svg += "<circle cx=\"" + num(f.X(p.x)) + "\" cy=\"" + num(f.Y(p.y)) +
                   "\" r=\"1.6\" fill=\"" + color + "\"/>\n";
        }
    }

    if (active.count("map")) {
        for (size_t i = 0; i < r.map.assignment.size(); ++i) {
            const Vec2& a = r.mu.atoms[i];
            const Vec2& b = r.nu.atoms[r.map.assignment[i]];
            if (distance(a, b) <= eps) continue;  // suppress zero-length arrows
            Vec2 dir = (b - a).normalized();
            Vec2 left = b - dir * (6.0 / f.sc) + dir.perp() * (2.5 / f.sc);
            Vec2 right = b - dir * (6.0 / f.sc) - dir.perp() * (2.5 / f.sc);
            svg += "<line x1=\"" + num(f.X(a.x)) + "\" y1=\"" + num(f.Y(a.y)) +
                   "\" x2=\"" + num(f.X(b.x)) + "\" y2=\"" + num(f.Y(b.y)) +
                   "\" stroke=\"#30343c\" stroke-width=\"0.7\"/>\n";
            svg += "<polygon fill=\"#30343c\" points=\"" + num(f.X(b.x)) + "," +
                   num(f.Y(b.y)) + " " + num(f.X(left.x)) + "," + num(f.Y(left.y)) + " " +
                   num(f.X(right.x)) + "," + num(f.Y(right.y)) + "\"/>\n";
        }
    }

    if (active.count("atoms")) {
        for (const auto& p : r.mu.atoms)
            svg += "<circle cx=\"" + num(f.X(p.x)) + "\" cy=\"" + num(f.Y(p.y)) +
                   "\" r=\"2.2\" fill=\"#2458c5\"/>\n";
        for (const auto& p : r.nu.atoms)
            svg += "<circle cx=\"" + num(f.X(p.x)) + "\" cy=\"" + num(f.Y(p.y)) +
                   "\" r=\"2.2\" fill=\"#c53324\"/>\n";
    }

    svg += "</svg>\n";
    return svg;
}

} // namespace obt
