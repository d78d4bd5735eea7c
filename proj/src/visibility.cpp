#include "cpex/visibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cpex {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

EdgeTag tag_of(const EdgeRef& ref) {
    if (ref.is_hole()) return {EdgeTag::Kind::Hole, ref.color};
    return {EdgeTag::Kind::Outer, -1};
}

// Free space lies to the left of travel for outer (ccw) and hole (cw) rings,
// so the inward normal of any boundary edge is the ccw perpendicular.
Point inward_normal(const Segment& e) { return normalized(perp(e.b - e.a)); }

Point nudge_inward(const Scene& s, const Point& p, double eps) {
    double best = std::numeric_limits<double>::infinity();
    Point normal{0, 0};
    for (const auto& se : scene_edges(s)) {
        double d = point_segment_distance(p, se.seg);
        if (d < best) {
            best = d;
            normal = inward_normal(se.seg);
        } else if (d <= best + eps * 0.5) {
            // Near a vertex: blend the incident edges' normals.
            normal = normalized(normal + inward_normal(se.seg));
        }
    }
    Point q = p + normal * eps;
    if (point_location(s, q, eps * 1e-3).where == PointLocation::Interior) return q;
    // Corner fallback: probe a ring of directions.
    for (int k = 0; k < 16; ++k) {
        double a = kTwoPi * k / 16.0;
        Point cand = p + Point{std::cos(a), std::sin(a)} * eps;
        if (point_location(s, cand, eps * 1e-3).where == PointLocation::Interior) return cand;
    }
    return q;
}

struct Hit {
    double t = std::numeric_limits<double>::infinity();
    int edge = -1;
};

Hit first_hit(const Point& origin, const Point& dir, const std::vector<SceneEdge>& edges,
              int skip_edge = -1) {
    Hit h;
    for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
        if (i == skip_edge) continue;
        auto t = ray_segment_hit(origin, dir, edges[i].seg);
        if (t && *t > 0 && *t < h.t) {
            h.t = *t;
            h.edge = i;
        }
    }
    return h;
}

}  // namespace

bool VisibilityPolygon::contains(const Point& p, double eps) const {
    if (!bbox.contains(p, eps)) return false;
    if (point_in_ring(p, boundary)) return true;
    for (std::size_t i = 0; i < boundary.segment_count(); ++i)
        if (point_segment_distance(p, boundary.segment(i)) <= eps) return true;
    return false;
}

VisibilityPolygon visibility_polygon(const Scene& s, const Point& p) {
    auto loc = point_location(s, p).where;
    if (loc == PointLocation::Outside || loc == PointLocation::InHole)
        throw std::invalid_argument("visibility_polygon: point outside free space");

    const double diam = std::max(1.0, s.diameter());
    Point origin = p;
    if (loc != PointLocation::Interior) origin = nudge_inward(s, p, kEpsGeom * diam);

    auto edges = scene_edges(s);
    auto vertices = scene_vertices(s);

    std::vector<double> angles;
    angles.reserve(vertices.size());
    for (const auto& v : vertices) {
        if (dist(v, origin) <= kEpsGeom * diam) continue;
        angles.push_back(std::atan2(v.y - origin.y, v.x - origin.x));
    }
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end(),
                             [](double a, double b) { return std::fabs(a - b) < 1e-13; }),
                 angles.end());
    if (angles.size() >= 2 && (angles.front() + kTwoPi) - angles.back() < 1e-13) angles.pop_back();
    if (angles.empty()) throw std::runtime_error("visibility_polygon: no sweep events");

    const std::size_t n = angles.size();
    auto dir_of = [](double a) { return Point{std::cos(a), std::sin(a)}; };

    // Nearest boundary edge per angular sector; transitions only at events.
    std::vector<int> sector_edge(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        double a0 = angles[i];
        double a1 = angles[(i + 1) % n];
        double span = a1 - a0;
        if (span <= 0) span += kTwoPi;
        Hit h = first_hit(origin, dir_of(a0 + span / 2.0), edges);
        if (h.edge < 0) throw std::runtime_error("visibility_polygon: open scene");
        sector_edge[i] = h.edge;
    }

    const double join_eps = 1e-7 * diam;
    VisibilityPolygon out;
    out.viewpoint = p;
    out.boundary.closed = true;

    auto ray_dist_on_edge = [&](double angle, int edge) -> double {
        auto t = ray_segment_hit(origin, dir_of(angle), edges[edge].seg);
        if (t) return *t;
        // Numerical miss at the sector boundary; use the nearer endpoint.
        const Segment& e = edges[edge].seg;
        return std::min(dist(origin, e.a), dist(origin, e.b));
    };

    auto push_vertex = [&](const Point& q, const EdgeTag& tag) {
        out.boundary.vertices.push_back(q);
        out.edge_tags.push_back(tag);  // tag of the edge leaving q
    };

    for (std::size_t i = 0; i < n; ++i) {
        int e_prev = sector_edge[(i + n - 1) % n];
        int e_next = sector_edge[i];
        double d_prev = ray_dist_on_edge(angles[i], e_prev);
        double d_next = ray_dist_on_edge(angles[i], e_next);
        Point dir = dir_of(angles[i]);

        if (std::fabs(d_prev - d_next) <= join_eps) {
            if (e_prev != e_next || n <= 2)
                push_vertex(origin + dir * std::min(d_prev, d_next), tag_of(edges[e_next].ref));
            // Same edge on both sides: interior event, no polygon vertex needed.
            continue;
        }

        // Radial discontinuity: a window anchored at the nearest event vertex.
        double d_near = std::min(d_prev, d_next);
        Point near_pt = origin + dir * d_near;
        Point far_pt = origin + dir * std::max(d_prev, d_next);

        // Snap the near endpoint to the blocking scene vertex.
        Point blocking = near_pt;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& v : vertices) {
            double dv = dist(v, near_pt);
            if (dv < best) {
                best = dv;
                blocking = v;
            }
        }
        if (best <= 1e-6 * diam) near_pt = blocking;

        Window w;
        w.chord = {near_pt, far_pt};
        w.blocking_vertex = blocking;
        w.side = (d_next > d_prev) ? WindowSide::Left : WindowSide::Right;
        w.connects_colors = {tag_of(edges[e_prev].ref), tag_of(edges[e_next].ref)};
        out.windows.push_back(w);

        Point first = origin + dir * d_prev;
        Point second = origin + dir * d_next;
        push_vertex(first, {EdgeTag::Kind::Window, -1});
        push_vertex(second, tag_of(edges[e_next].ref));
    }

    if (out.boundary.vertices.size() < 3)
        throw std::runtime_error("visibility_polygon: degenerate output");
    out.bbox = bounding_box(out.boundary.vertices);
    return out;
}

bool sees(const Scene& s, const Point& p, const Point& q) {
    if (!in_free_space(s, p) || !in_free_space(s, q))
        throw std::invalid_argument("sees: point outside free space");
    double len = dist(p, q);
    if (len == 0.0) return true;

    Segment pq{p, q};
    std::vector<double> contacts = {0.0, 1.0};
    for (const auto& se : scene_edges(s)) {
        Segment e = se.seg;
        double d1 = orient2d(e.a, e.b, p);
        double d2 = orient2d(e.a, e.b, q);
        double d3 = orient2d(p, q, e.a);
        double d4 = orient2d(p, q, e.b);
        if (((d1 > 0 && d2 > 0) || (d1 < 0 && d2 < 0)) ||
            ((d3 > 0 && d4 > 0) || (d3 < 0 && d4 < 0)))
            continue;
        auto r = segment_intersection(pq, e);
        if (r.kind == SegmentIntersection::Kind::None) continue;
        auto param = [&](const Point& x) { return dot(x - p, q - p) / (len * len); };
        if (r.kind == SegmentIntersection::Kind::Point) {
            contacts.push_back(std::clamp(param(r.p), 0.0, 1.0));
        } else {
            contacts.push_back(std::clamp(param(r.overlap.a), 0.0, 1.0));
            contacts.push_back(std::clamp(param(r.overlap.b), 0.0, 1.0));
        }
    }
    std::sort(contacts.begin(), contacts.end());
    const double tol = kEpsGeom / std::max(1.0, len);
    for (std::size_t i = 0; i + 1 < contacts.size(); ++i) {
        if (contacts[i + 1] - contacts[i] <= tol) continue;
        Point mid = pq.at((contacts[i] + contacts[i + 1]) / 2.0);
        auto loc = point_location(s, mid).where;
        if (loc == PointLocation::Outside || loc == PointLocation::InHole) return false;
    }
    return true;
}

MainWindows main_windows(const VisibilityPolygon& v, Color hole_color) {
    MainWindows mw;
    std::vector<const Window*> found;
    for (const auto& w : v.windows) {
        const EdgeTag& a = w.connects_colors.first;
        const EdgeTag& b = w.connects_colors.second;
        if (a.kind == EdgeTag::Kind::Window || b.kind == EdgeTag::Kind::Window) continue;
        if (a == b) continue;
        bool touches_hole = (a.kind == EdgeTag::Kind::Hole && a.color == hole_color) ||
                            (b.kind == EdgeTag::Kind::Hole && b.color == hole_color);
        if (touches_hole) found.push_back(&w);
    }
    if (found.size() != 2) return mw;
    mw.in_corridor = true;
    mw.first = *found[0];
    mw.second = *found[1];
    return mw;
}

double visibility_distance(const VisibilityPolygon& v, const Point& dir) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.boundary.segment_count(); ++i) {
        auto t = ray_segment_hit(v.viewpoint, dir, v.boundary.segment(i));
        if (t && *t < best) best = *t;
    }
    return best;
}

}  // namespace cpex
