#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace cpex {

// Global tolerance for on-boundary tests, in scene units.
inline constexpr double kEpsGeom = 1e-9;

struct Point {
    double x = 0.0;
    double y = 0.0;

    Point() = default;
    Point(double px, double py) : x(px), y(py) {}

    Point operator+(const Point& o) const { return {x + o.x, y + o.y}; }
    Point operator-(const Point& o) const { return {x - o.x, y - o.y}; }
    Point operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Point& o) const { return x == o.x && y == o.y; }
    bool operator!=(const Point& o) const { return !(*this == o); }
};

inline double dot(const Point& a, const Point& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Point& a, const Point& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Point& a) { return std::hypot(a.x, a.y); }
inline double dist(const Point& a, const Point& b) { return norm(b - a); }
inline Point normalized(const Point& a) {
    double n = norm(a);
    return n > 0 ? Point{a.x / n, a.y / n} : Point{0, 0};
}
// CCW rotation by 90 degrees.
inline Point perp(const Point& a) { return {-a.y, a.x}; }

struct Segment {
    Point a, b;
    double length() const { return dist(a, b); }
    Point at(double t) const { return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t}; }
    Point midpoint() const { return at(0.5); }
};

enum class Orientation { Left, Right, Collinear };

// Signed area of triangle pqr, positive iff r lies left of directed line pq.
// Adaptive-precision: exact whenever the fast double result is not reliable.
double orient2d(const Point& p, const Point& q, const Point& r);
Orientation orientation(const Point& p, const Point& q, const Point& r);

struct SegmentIntersection {
    enum class Kind { None, Point, Overlap } kind = Kind::None;
    Point p;          // for Kind::Point
    Segment overlap;  // for Kind::Overlap
};

// Classification of closed-segment intersection. Throws std::invalid_argument
// on degenerate (zero-length) input segments.
SegmentIntersection segment_intersection(const Segment& a, const Segment& b);

// True iff closed segments share at least one point.
bool segments_intersect(const Segment& a, const Segment& b);

double point_segment_distance(const Point& p, const Segment& s);
Point closest_point_on_segment(const Point& p, const Segment& s);

// Intersection of ray origin+t*dir (t>=0) with a segment; returns smallest t.
std::optional<double> ray_segment_hit(const Point& origin, const Point& dir, const Segment& s);

struct Polyline {
    std::vector<Point> vertices;  // closed polylines do not repeat the first vertex
    bool closed = false;

    std::size_t size() const { return vertices.size(); }
    std::size_t segment_count() const {
        if (vertices.size() < 2) return 0;
        return closed ? vertices.size() : vertices.size() - 1;
    }
    Segment segment(std::size_t i) const {
        return {vertices[i], vertices[(i + 1) % vertices.size()]};
    }
};

double polyline_length(const Polyline& p);

// Shoelace area of a closed polyline; positive for ccw orientation.
double signed_area(const Polyline& p);

struct BoundingBox {
    double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
    double diameter() const { return std::hypot(width(), height()); }
    bool contains(const Point& p, double pad = 0.0) const {
        return p.x >= min_x - pad && p.x <= max_x + pad && p.y >= min_y - pad && p.y <= max_y + pad;
    }
    void expand(const Point& p) {
        min_x = std::min(min_x, p.x);
        min_y = std::min(min_y, p.y);
        max_x = std::max(max_x, p.x);
        max_y = std::max(max_y, p.y);
    }
};

BoundingBox bounding_box(const std::vector<Point>& pts);

// Ray-crossing parity test against one closed ring. Boundary points may land
// on either side; callers that care use point_segment_distance first.
bool point_in_ring(const Point& p, const Polyline& ring);

double winding_number(const Point& p, const Polyline& ring);

}  // namespace cpex
