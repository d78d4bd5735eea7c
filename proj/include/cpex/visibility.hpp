#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "cpex/scene.hpp"

namespace cpex {

enum class WindowSide { Left, Right };

// Edge label of a visibility-polygon edge.
struct EdgeTag {
    enum class Kind { Outer, Hole, Window } kind = Kind::Outer;
    Color color = -1;  // for Kind::Hole

    bool operator==(const EdgeTag& o) const { return kind == o.kind && color == o.color; }
};

// A chord of the visibility polygon across which unseen region lies.
struct Window {
    Segment chord;          // near endpoint first
    Point blocking_vertex;  // reflex scene vertex on the chord
    WindowSide side;        // side of ray viewpoint->blocking_vertex holding the unseen region
    std::pair<EdgeTag, EdgeTag> connects_colors;  // tags adjacent to the chord (before, after)
};

struct VisibilityPolygon {
    Point viewpoint;
    Polyline boundary;                // closed, ccw
    std::vector<EdgeTag> edge_tags;   // one per boundary segment
    std::vector<Window> windows;
    BoundingBox bbox;

    bool contains(const Point& p, double eps = kEpsGeom) const;
    double area() const { return signed_area(boundary); }
};

// Visibility polygon via angular sweep over boundary vertices. Viewpoints on
// the boundary are nudged inward by eps_geom along the inner normal.
// Throws std::invalid_argument when p lies outside the closed free space.
VisibilityPolygon visibility_polygon(const Scene& s, const Point& p);

// True iff the open segment pq stays in free space; grazing contact with
// boundary vertices counts as visible. Throws when an endpoint is outside.
bool sees(const Scene& s, const Point& p, const Point& q);

struct MainWindows {
    bool in_corridor = false;
    Window first, second;
};

// The two windows whose adjacent edge tags have different colors, one side
// being the given hole. in_corridor == false when their count differs from 2.
MainWindows main_windows(const VisibilityPolygon& v, Color hole_color);

// Distance from the viewpoint to the visibility boundary in direction dir.
double visibility_distance(const VisibilityPolygon& v, const Point& dir);

}  // namespace cpex
