#include "cpex/scene.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace cpex {

std::vector<SceneEdge> scene_edges(const Scene& s) {
    std::vector<SceneEdge> edges;
    for (std::size_t i = 0; i < s.outer.segment_count(); ++i)
        edges.push_back({s.outer.segment(i), {EdgeRef::Owner::Outer, -1, i}});
    for (const auto& h : s.holes)
        for (std::size_t i = 0; i < h.boundary.segment_count(); ++i)
            edges.push_back({h.boundary.segment(i), {EdgeRef::Owner::Hole, h.color, i}});
    return edges;
}

std::vector<Point> scene_vertices(const Scene& s) {
    std::vector<Point> out = s.outer.vertices;
    for (const auto& h : s.holes)
        out.insert(out.end(), h.boundary.vertices.begin(), h.boundary.vertices.end());
    return out;
}

LocationResult point_location(const Scene& s, const Point& p, double eps) {
    for (std::size_t i = 0; i < s.outer.segment_count(); ++i)
        if (point_segment_distance(p, s.outer.segment(i)) <= eps) return {PointLocation::OnOuter, -1};
    for (const auto& h : s.holes)
        for (std::size_t i = 0; i < h.boundary.segment_count(); ++i)
            if (point_segment_distance(p, h.boundary.segment(i)) <= eps)
                return {PointLocation::OnHole, h.color};
    if (!point_in_ring(p, s.outer)) return {PointLocation::Outside, -1};
    for (const auto& h : s.holes)
        if (point_in_ring(p, h.boundary)) return {PointLocation::InHole, h.color};
    return {PointLocation::Interior, -1};
}

namespace {

bool ring_simple(const Polyline& ring, std::string& why) {
    std::size_t n = ring.segment_count();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            Segment a = ring.segment(i), b = ring.segment(j);
            if (adjacent) {
                // Only the shared endpoint may be common.
                auto r = segment_intersection(a, b);
                if (r.kind == SegmentIntersection::Kind::Overlap) {
                    why = "adjacent edges overlap";
                    return false;
                }
                continue;
            }
            if (segments_intersect(a, b)) {
                std::ostringstream os;
                os << "edges " << i << " and " << j << " intersect";
                why = os.str();
                return false;
            }
        }
    }
    return true;
}

bool rings_disjoint(const Polyline& a, const Polyline& b) {
    for (std::size_t i = 0; i < a.segment_count(); ++i)
        for (std::size_t j = 0; j < b.segment_count(); ++j)
            if (segments_intersect(a.segment(i), b.segment(j))) return false;
    if (point_in_ring(a.vertices[0], b)) return false;
    if (point_in_ring(b.vertices[0], a)) return false;
    return true;
}

bool ring_inside(const Polyline& inner, const Polyline& outer) {
    for (const auto& v : inner.vertices) {
        if (!point_in_ring(v, outer)) return false;
        for (std::size_t i = 0; i < outer.segment_count(); ++i)
            if (point_segment_distance(v, outer.segment(i)) <= kEpsGeom) return false;
    }
    for (std::size_t i = 0; i < inner.segment_count(); ++i)
        for (std::size_t j = 0; j < outer.segment_count(); ++j)
            if (segments_intersect(inner.segment(i), outer.segment(j))) return false;
    return true;
}

bool has_duplicate_consecutive(const Polyline& ring) {
    const auto& v = ring.vertices;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (dist(v[i], v[(i + 1) % v.size()]) == 0.0) return true;
    return false;
}

}  // namespace

std::vector<std::string> validate_scene(const Scene& s) {
    std::vector<std::string> bad;
    if (s.outer.vertices.size() < 3) {
        bad.push_back("outer boundary has fewer than 3 vertices");
        return bad;
    }
    for (const auto& v : scene_vertices(s))
        if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
            bad.push_back("non-finite coordinate");
            return bad;
        }
    if (has_duplicate_consecutive(s.outer)) bad.push_back("outer boundary repeats consecutive vertices");
    std::string why;
    if (!ring_simple(s.outer, why)) bad.push_back("outer boundary not simple: " + why);
    if (signed_area(s.outer) <= 0) bad.push_back("outer boundary not counterclockwise");

    std::set<Color> colors;
    for (const auto& h : s.holes) {
        std::ostringstream tag;
        tag << "hole " << h.color;
        if (h.boundary.vertices.size() < 3) {
            bad.push_back(tag.str() + ": fewer than 3 vertices");
            continue;
        }
        if (has_duplicate_consecutive(h.boundary))
            bad.push_back(tag.str() + ": repeats consecutive vertices");
        if (!ring_simple(h.boundary, why)) bad.push_back(tag.str() + ": boundary not simple: " + why);
        if (signed_area(h.boundary) >= 0) bad.push_back(tag.str() + ": boundary not clockwise");
        if (!ring_inside(h.boundary, s.outer)) bad.push_back(tag.str() + ": hole not strictly interior");
        if (!colors.insert(h.color).second) bad.push_back(tag.str() + ": duplicate hole color");
    }
    for (std::size_t i = 0; i < s.holes.size(); ++i)
        for (std::size_t j = i + 1; j < s.holes.size(); ++j)
            if (!rings_disjoint(s.holes[i].boundary, s.holes[j].boundary)) {
                std::ostringstream os;
                os << "holes " << s.holes[i].color << " and " << s.holes[j].color
                   << " not disjoint";
                bad.push_back(os.str());
            }

    bool on_outer = false;
    for (std::size_t i = 0; i < s.outer.segment_count(); ++i)
        if (point_segment_distance(s.start, s.outer.segment(i)) <= kEpsGeom) on_outer = true;
    if (!on_outer) bad.push_back("start not on the outer boundary");
    return bad;
}

bool is_reflex_vertex(const Scene& s, const Point& v, double eps) {
    auto check_ring = [&](const Polyline& ring, bool hole) -> std::optional<bool> {
        const auto& pts = ring.vertices;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (dist(pts[i], v) > eps) continue;
            const Point& prev = pts[(i + pts.size() - 1) % pts.size()];
            const Point& next = pts[(i + 1) % pts.size()];
            double o = orient2d(prev, pts[i], next);
            // Outer ring is ccw: interior angle > pi iff right turn.
            // Hole rings are cw with free space outside, same sign test.
            (void)hole;
            return o < 0;
        }
        return std::nullopt;
    };
    if (auto r = check_ring(s.outer, false)) return *r;
    for (const auto& h : s.holes)
        if (auto r = check_ring(h.boundary, true)) return *r;
    return false;
}

// ---------------------------------------------------------------------------
// JSON I/O
// ---------------------------------------------------------------------------

namespace {

nlohmann::json points_to_json(const std::vector<Point>& pts) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : pts) arr.push_back({p.x, p.y});
    return arr;
}

std::vector<Point> points_from_json(const nlohmann::json& arr) {
    std::vector<Point> pts;
    for (const auto& e : arr) pts.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
    return pts;
}

void normalize_orientation(Polyline& ring, bool want_ccw) {
    double a = signed_area(ring);
    if ((want_ccw && a < 0) || (!want_ccw && a > 0))
        std::reverse(ring.vertices.begin(), ring.vertices.end());
}

}  // namespace

std::string scene_to_json(const Scene& s) {
    nlohmann::json j;
    j["outer"] = points_to_json(s.outer.vertices);
    j["holes"] = nlohmann::json::array();
    for (const auto& h : s.holes)
        j["holes"].push_back({{"color", h.color}, {"vertices", points_to_json(h.boundary.vertices)}});
    j["start"] = {s.start.x, s.start.y};
    return j.dump(2);
}

Scene scene_from_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    Scene s;
    s.outer.vertices = points_from_json(j.at("outer"));
    s.outer.closed = true;
    normalize_orientation(s.outer, true);
    if (j.contains("holes"))
        for (const auto& hj : j.at("holes")) {
            Hole h;
            h.color = hj.at("color").get<int>();
            h.boundary.vertices = points_from_json(hj.at("vertices"));
            h.boundary.closed = true;
            normalize_orientation(h.boundary, false);
            s.holes.push_back(std::move(h));
        }
    s.start = {j.at("start").at(0).get<double>(), j.at("start").at(1).get<double>()};
    auto bad = validate_scene(s);
    if (!bad.empty()) {
        std::string msg = "invalid scene:";
        for (const auto& b : bad) msg += "\n  " + b;
        throw std::invalid_argument(msg);
    }
    return s;
}

Scene load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scene file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return scene_from_json(ss.str());
}

void save_scene(const Scene& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write scene file: " + path);
    out << scene_to_json(s) << "\n";
}

}  // namespace cpex
