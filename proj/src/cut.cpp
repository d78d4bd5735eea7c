#include <boost/geometry.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "cpex/geodesic.hpp"

namespace cpex {

namespace bg = boost::geometry;
using BPoint = bg::model::d2::point_xy<double>;
using BPolygon = bg::model::polygon<BPoint, false, true>;  // ccw outer, closed rings
using BMulti = bg::model::multi_polygon<BPolygon>;

namespace {

BPolygon to_boost(const Scene& s) {
    BPolygon poly;
    for (const auto& v : s.outer.vertices) bg::append(poly.outer(), BPoint(v.x, v.y));
    bg::append(poly.outer(), BPoint(s.outer.vertices[0].x, s.outer.vertices[0].y));
    poly.inners().resize(s.holes.size());
    for (std::size_t h = 0; h < s.holes.size(); ++h) {
        for (const auto& v : s.holes[h].boundary.vertices)
            bg::append(poly.inners()[h], BPoint(v.x, v.y));
        bg::append(poly.inners()[h],
                   BPoint(s.holes[h].boundary.vertices[0].x, s.holes[h].boundary.vertices[0].y));
    }
    bg::correct(poly);
    return poly;
}

Polyline ring_to_polyline(const BPolygon::ring_type& ring, double dedup_eps) {
    Polyline out;
    out.closed = true;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {  // last point repeats the first
        Point p{bg::get<0>(ring[i]), bg::get<1>(ring[i])};
        if (!out.vertices.empty() && dist(out.vertices.back(), p) <= dedup_eps) continue;
        out.vertices.push_back(p);
    }
    while (out.vertices.size() > 3 &&
           dist(out.vertices.front(), out.vertices.back()) <= dedup_eps)
        out.vertices.pop_back();
    return out;
}

// Thin rectangle strip around one segment, slightly extended at both ends.
BPolygon segment_strip(const Point& a, const Point& b, double half_width) {
    Point d = normalized(b - a);
    Point n = perp(d);
    Point a2 = a - d * half_width, b2 = b + d * half_width;
    BPolygon quad;
    for (const Point& p : {a2 + n * half_width, b2 + n * half_width, b2 - n * half_width,
                           a2 - n * half_width, a2 + n * half_width})
        bg::append(quad.outer(), BPoint(p.x, p.y));
    bg::correct(quad);
    return quad;
}

Scene scene_from_boost(const BPolygon& poly, const Scene& original, const Point& start_hint,
                       double dedup_eps) {
    Scene out;
    out.outer = ring_to_polyline(poly.outer(), dedup_eps);
    if (signed_area(out.outer) < 0)
        std::reverse(out.outer.vertices.begin(), out.outer.vertices.end());

    for (const auto& inner : poly.inners()) {
        Polyline ring = ring_to_polyline(inner, dedup_eps);
        if (ring.vertices.size() < 3) continue;
        if (signed_area(ring) > 0) std::reverse(ring.vertices.begin(), ring.vertices.end());
        Hole h;
        h.boundary = ring;
        h.color = -1;
        Point probe = ring_interior_point(ring);
        for (const auto& oh : original.holes) {
            if (point_in_ring(ring_interior_point(oh.boundary), ring) ||
                point_in_ring(probe, oh.boundary)) {
                h.color = oh.color;
                break;
            }
        }
        out.holes.push_back(std::move(h));
    }

    // Snap the start onto the (possibly strip-shifted) outer ring.
    Point best = out.outer.vertices[0];
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < out.outer.segment_count(); ++i) {
        Point c = closest_point_on_segment(start_hint, out.outer.segment(i));
        double d = dist(start_hint, c);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    out.start = best;
    return out;
}

}  // namespace

Point ring_interior_point(const Polyline& ring) {
    const auto& v = ring.vertices;
    Point centroid{0, 0};
    for (const auto& p : v) centroid = centroid + p;
    centroid = centroid * (1.0 / v.size());
    if (point_in_ring(centroid, ring)) return centroid;
    // Ear midpoints as fallback for nonconvex rings.
    for (std::size_t i = 0; i < v.size(); ++i) {
        Point m = Segment{v[(i + v.size() - 1) % v.size()], v[(i + 1) % v.size()]}.midpoint();
        Point c = Segment{m, v[i]}.midpoint();
        if (point_in_ring(c, ring)) return c;
    }
    return centroid;
}

CutResult cut_scene(const Scene& s, const Polyline& path, const Point& anchor,
                    double strip_width) {
    CutResult res;
    const double diam = std::max(1e-12, s.diameter());
    const double half_w = 0.5 * strip_width * diam;
    const double dedup_eps = 1e-12 * diam;

    BPolygon scene_poly = to_boost(s);
    BMulti strips;
    for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i) {
        if (dist(path.vertices[i], path.vertices[i + 1]) <= dedup_eps) continue;
        BMulti merged;
        bg::union_(strips, segment_strip(path.vertices[i], path.vertices[i + 1], half_w), merged);
        strips = std::move(merged);
    }
    if (strips.empty()) {
        res.note = "empty cut path";
        return res;
    }

    BMulti remainder;
    bg::difference(scene_poly, strips, remainder);
    if (remainder.empty()) {
        res.note = "cut removed the whole free space";
        return res;
    }

    std::vector<std::pair<double, Scene>> pieces;
    int anchor_piece = -1;
    for (const auto& comp : remainder) {
        Scene piece = scene_from_boost(comp, s, anchor, dedup_eps);
        double area = std::fabs(bg::area(comp));
        bool has_anchor = bg::covered_by(BPoint(anchor.x, anchor.y), comp) ||
                          dist(piece.start, anchor) <= 2.0 * half_w + kEpsGeom * diam;
        if (has_anchor && anchor_piece < 0) anchor_piece = static_cast<int>(pieces.size());
        pieces.push_back({area, std::move(piece)});
    }
    if (anchor_piece < 0) {
        res.note = "anchor not inside any piece";
        return res;
    }
    res.piece_with_anchor = pieces[anchor_piece].second;
    std::vector<std::pair<double, Scene>> rest;
    for (int i = 0; i < static_cast<int>(pieces.size()); ++i)
        if (i != anchor_piece) rest.push_back(pieces[i]);
    std::sort(rest.begin(), rest.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    for (auto& r : rest) res.other_pieces.push_back(std::move(r.second));
    res.ok = true;
    return res;
}

Fence build_fence(const Scene& s, const EncirclingTour& t, const LambdaWitness& w) {
    Fence f;
    const double diam = std::max(1e-12, s.diameter());
    const auto& loop = t.loop.vertices;
    const std::size_t n = loop.size();
    std::size_t idx = t.apex_indices[w.apex_index];
    Point apex = loop[idx];
    Point prev = loop[(idx + n - 1) % n];
    Point next = loop[(idx + 1) % n];

    Point u = normalized(prev - apex), v = normalized(next - apex);
    f.apex = apex;
    f.apex_angle = std::acos(std::clamp(dot(u, v), -1.0, 1.0));

    Point bisector = normalized(u + v);
    if (norm(u + v) < 1e-12) bisector = perp(normalized(next - prev));
    Point dir = perp(bisector);

    // Clip the perpendicular at the first boundary hits on each side.
    auto edges = scene_edges(s);
    auto clip = [&](Point d) -> std::pair<Point, bool> {
        double best = std::numeric_limits<double>::infinity();
        bool hole_hit = false;
        for (const auto& e : edges) {
            auto hit = ray_segment_hit(apex, d, e.seg);
            if (hit && *hit > 1e-9 * diam && *hit < best) {
                best = *hit;
                hole_hit = e.ref.is_hole();
            }
        }
        if (!std::isfinite(best)) return {apex, false};
        return {apex + d * best, hole_hit};
    };
    auto [end_a, hole_a] = clip(dir);
    auto [end_b, hole_b] = clip(dir * -1.0);
    f.segment = {end_a, end_b};
    f.clipped_by_hole = hole_a || hole_b;
    if (f.clipped_by_hole) f.note = "fence clipped by a hole before the outer boundary";

    if (dist(end_a, apex) <= 1e-9 * diam && dist(end_b, apex) <= 1e-9 * diam) {
        f.valid = false;
        f.note = "fence degenerate at apex";
        return f;
    }

    Polyline fence_path;
    fence_path.vertices = {end_a, apex, end_b};
    CutResult cut = cut_scene(s, fence_path, s.start);
    if (!cut.ok || cut.other_pieces.empty()) {
        f.valid = false;
        f.note = cut.ok ? "fence does not separate a backyard" : ("cut failed: " + cut.note);
        return f;
    }
    f.frontyard = cut.piece_with_anchor;
    f.backyard = cut.other_pieces.front();
    // Anchor the backyard scene at its point nearest the apex.
    Point bstart = f.backyard.outer.vertices[0];
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.backyard.outer.segment_count(); ++i) {
        Point c = closest_point_on_segment(apex, f.backyard.outer.segment(i));
        if (dist(apex, c) < bd) {
            bd = dist(apex, c);
            bstart = c;
        }
    }
    f.backyard.start = bstart;

    // x = 2 * shortest path from start to the fence segment.
    VisGraph g(s);
    std::vector<Point> samples;
    const int kSamples = 65;
    for (int i = 0; i <= kSamples; ++i)
        samples.push_back(f.segment.at(static_cast<double>(i) / kSamples));
    samples.push_back(apex);
    auto dists = g.distances_from(s.start, samples);
    double best = std::numeric_limits<double>::infinity();
    for (double d : dists) best = std::min(best, d);
    f.x = 2.0 * best;
    return f;
}

}  // namespace cpex
