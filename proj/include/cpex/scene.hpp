#pragma once

#include <string>
#include <vector>

#include "cpex/geometry.hpp"

namespace cpex {

using Color = int;

struct Hole {
    Color color = 0;
    Polyline boundary;  // clockwise
};

// A polygon with colored holes and a start point on the outer boundary.
struct Scene {
    Polyline outer;  // counterclockwise
    std::vector<Hole> holes;
    Point start;

    BoundingBox bbox() const { return bounding_box(outer.vertices); }
    double diameter() const { return bbox().diameter(); }
    const Hole* hole_by_color(Color c) const {
        for (const auto& h : holes)
            if (h.color == c) return &h;
        return nullptr;
    }
};

// Tag identifying which boundary a scene edge belongs to.
struct EdgeRef {
    enum class Owner { Outer, Hole };
    Owner owner = Owner::Outer;
    Color color = -1;       // valid when owner == Hole
    std::size_t index = 0;  // edge index within its ring

    bool is_hole() const { return owner == Owner::Hole; }
    bool operator==(const EdgeRef& o) const {
        return owner == o.owner && color == o.color && index == o.index;
    }
};

struct SceneEdge {
    Segment seg;
    EdgeRef ref;
};

// All boundary edges of the scene, outer ring first, then holes in order.
std::vector<SceneEdge> scene_edges(const Scene& s);

// All boundary vertices (outer then holes).
std::vector<Point> scene_vertices(const Scene& s);

enum class PointLocation { Interior, OnOuter, OnHole, InHole, Outside };

struct LocationResult {
    PointLocation where = PointLocation::Outside;
    Color color = -1;  // for OnHole / InHole
};

LocationResult point_location(const Scene& s, const Point& p, double eps = kEpsGeom);

inline bool in_free_space(const Scene& s, const Point& p, double eps = kEpsGeom) {
    auto loc = point_location(s, p, eps).where;
    return loc == PointLocation::Interior || loc == PointLocation::OnOuter ||
           loc == PointLocation::OnHole;
}

// Every violated scene invariant, one message per violation. Empty means ok.
std::vector<std::string> validate_scene(const Scene& s);

// JSON (de)serialization, schema:
//   {"outer":[[x,y],...], "holes":[{"color":k,"vertices":[[x,y],...]},...], "start":[x,y]}
// Loading normalizes ring orientations (outer ccw, holes cw) and validates.
std::string scene_to_json(const Scene& s);
Scene scene_from_json(const std::string& json_text);
Scene load_scene(const std::string& path);
void save_scene(const Scene& s, const std::string& path);

// True reflex test in free space: outer-boundary vertices with interior angle
// > pi, and hole vertices that are convex corners of the hole itself.
bool is_reflex_vertex(const Scene& s, const Point& v, double eps = kEpsGeom);

}  // namespace cpex
