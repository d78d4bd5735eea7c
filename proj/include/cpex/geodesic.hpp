#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cpex/visibility.hpp"

namespace cpex {

// Shortest-path machinery over the visibility graph of scene vertices plus
// query points. A VisGraph may be shared read-only once built.
class VisGraph {
public:
    explicit VisGraph(const Scene& s);

    const Scene& scene() const { return *scene_; }

    Polyline path(const Point& a, const Point& b) const;
    double distance(const Point& a, const Point& b) const;

    // Geodesic distances from src to every target (infinity when unreachable).
    std::vector<double> distances_from(const Point& src, const std::vector<Point>& targets) const;

private:
    const Scene* scene_;
    std::vector<Point> nodes_;
    std::vector<std::vector<std::pair<int, double>>> adj_;

    friend class CoverDijkstra;
    friend EncirclingTour encircling_tour_impl(const VisGraph&, Color);
};

Polyline shortest_path(const Scene& s, const Point& a, const Point& b);

// Shortest closed tour through the start with winding number one around the
// hole; among equal lengths the one enclosing the largest area.
struct EncirclingTour {
    Color hole_color = -1;
    Polyline loop;  // closed, starts at scene start, ccw around the hole
    std::vector<std::size_t> apex_indices;  // interior chain vertices (all but the start)
    double enclosed_area = 0.0;

    double length() const { return polyline_length(loop); }
    Point apex(std::size_t k) const { return loop.vertices[apex_indices[k]]; }
};

EncirclingTour encircling_tour(const Scene& s, Color hole_color);
EncirclingTour encircling_tour(const VisGraph& g, Color hole_color);

struct LambdaWitness {
    std::size_t apex_index = 0;  // index into tour apex_indices
    Point apex;
    Point q_left, q_right;
    double arm_left = 0.0, arm_right = 0.0;
    double value = 0.0;
};

// Sampled approximation of the paper-style lower bound: for each tour apex,
// the least path length from the start that sees the apex from the right
// half-planes of both incident tour segments; maximized over apexes.
std::pair<double, LambdaWitness> lambda_lower_bound(const Scene& s, const EncirclingTour& t,
                                                    int resolution = 256);
std::pair<double, LambdaWitness> lambda_lower_bound(const VisGraph& g, const EncirclingTour& t,
                                                    int resolution = 256);

struct Fence {
    Segment segment;          // chord through the apex, clipped at first boundary hits
    Point apex;
    double apex_angle = 0.0;  // radians between the witness's incident tour segments
    Scene frontyard;          // contains the scene start
    Scene backyard;
    double x = 0.0;           // twice the shortest path length start -> fence
    bool clipped_by_hole = false;
    bool valid = true;
    std::string note;
};

Fence build_fence(const Scene& s, const EncirclingTour& t, const LambdaWitness& w);

// Closed walk of length exactly 2(|t| + 2|b| + |ref_tour|) built from the
// doubled tour, two barrier copies and the reference tour.
Polyline eulerian_safe_tour(const Scene& s, const EncirclingTour& t, const Polyline& b,
                            const Polyline& ref_tour);

struct AngleHullCurve {
    Polyline base_chain;
    Polyline curve;  // discretized circular-arc pieces from chain start to chain end
    double length = 0.0;
};

// Boundary of the right-angle hull of the chain on the given side, clipped to
// the scene; discretized so chord deviation stays within arc_tolerance.
AngleHullCurve angle_hull(const Scene& s, const Polyline& chain, WindowSide side,
                          double arc_tolerance = 1e-3);

// --- scene cutting (shared by fences and safe-hole barriers) ---------------

struct CutResult {
    bool ok = false;
    std::string note;
    Scene piece_with_anchor;          // component containing the anchor point
    std::vector<Scene> other_pieces;  // remaining components, largest first
};

// Removes a thin strip around the path from the free space and decomposes the
// remainder into connected components. Holes touched by the strip merge into
// the boundary of their component. strip_width is relative to the diameter.
CutResult cut_scene(const Scene& s, const Polyline& path, const Point& anchor,
                    double strip_width = 1e-7);

Point ring_interior_point(const Polyline& ring);

}  // namespace cpex
