#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cpex/visibility.hpp"

namespace cpex {

// Uniform sample grid over the free space, used for coverage accounting and
// exploration-termination checks. Cells are marked as they fall inside
// observed visibility polygons; marking is idempotent, so the parallel and
// serial kernels produce identical grids.
struct CoverageGrid {
    BoundingBox box;
    double cell = 0.0;
    int nx = 0, ny = 0;
    std::vector<std::uint8_t> free_cell;  // center lies in free space
    std::vector<std::uint8_t> covered;
    std::int64_t free_count = 0;
    std::int64_t covered_count = 0;
    std::vector<int> row_first, row_last;  // uncovered column window per row

    int index(int ix, int iy) const { return iy * nx + ix; }
    Point center(int ix, int iy) const {
        return {box.min_x + (ix + 0.5) * cell, box.min_y + (iy + 0.5) * cell};
    }
    double fraction() const {
        return free_count == 0 ? 1.0 : static_cast<double>(covered_count) / free_count;
    }
    bool complete() const { return covered_count == free_count; }
    std::optional<Point> first_uncovered() const;
    bool cell_of(const Point& p, int& ix, int& iy) const;
    bool covered_at(const Point& p) const;
};

// resolution is the cell size as a fraction of the scene diameter.
CoverageGrid make_coverage_grid(const Scene& s, double resolution = 1e-3);

// Mark every free cell whose center lies in the polygon. The two variants are
// bit-identical; the parallel one splits work across grid rows.
void mark_visible_serial(CoverageGrid& g, const VisibilityPolygon& v);
void mark_visible_parallel(CoverageGrid& g, const VisibilityPolygon& v);

// First boundary hit per direction, by brute force over all scene edges.
// Serves as the independent oracle for the visibility sweep.
std::vector<double> ray_cast_all_serial(const Scene& s, const Point& origin,
                                        const std::vector<Point>& directions);
std::vector<double> ray_cast_all_parallel(const Scene& s, const Point& origin,
                                          const std::vector<Point>& directions);

}  // namespace cpex
