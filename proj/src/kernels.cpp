#include "cpex/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cpex {

std::optional<Point> CoverageGrid::first_uncovered() const {
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            int i = index(ix, iy);
            if (free_cell[i] && !covered[i]) return center(ix, iy);
        }
    return std::nullopt;
}

bool CoverageGrid::cell_of(const Point& p, int& ix, int& iy) const {
    ix = static_cast<int>(std::floor((p.x - box.min_x) / cell));
    iy = static_cast<int>(std::floor((p.y - box.min_y) / cell));
    return ix >= 0 && ix < nx && iy >= 0 && iy < ny;
}

bool CoverageGrid::covered_at(const Point& p) const {
    int ix, iy;
    if (!cell_of(p, ix, iy)) return false;
    int i = index(ix, iy);
    return !free_cell[i] || covered[i];
}

CoverageGrid make_coverage_grid(const Scene& s, double resolution) {
    CoverageGrid g;
    g.box = s.bbox();
    double diam = std::max(g.box.diameter(), 1e-12);
    g.cell = resolution * diam;
    g.nx = std::max(1, static_cast<int>(std::ceil(g.box.width() / g.cell)));
    g.ny = std::max(1, static_cast<int>(std::ceil(g.box.height() / g.cell)));
    g.free_cell.assign(static_cast<std::size_t>(g.nx) * g.ny, 0);
    g.covered.assign(static_cast<std::size_t>(g.nx) * g.ny, 0);
    g.row_first.assign(g.ny, g.nx);
    g.row_last.assign(g.ny, -1);

#pragma omp parallel for schedule(static)
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            Point c = g.center(ix, iy);
            if (!point_in_ring(c, s.outer)) continue;
            bool in_hole = false;
            for (const auto& h : s.holes)
                if (h.boundary.vertices.size() >= 3 && point_in_ring(c, h.boundary)) {
                    in_hole = true;
                    break;
                }
            if (in_hole) continue;
            g.free_cell[g.index(ix, iy)] = 1;
        }
    }
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            if (!g.free_cell[g.index(ix, iy)]) continue;
            ++g.free_count;
            g.row_first[iy] = std::min(g.row_first[iy], ix);
            g.row_last[iy] = std::max(g.row_last[iy], ix);
        }
    }
    return g;
}

namespace {

// Row-local marking; returns number of newly covered cells and shrinks the
// row's uncovered window.
std::int64_t mark_row(CoverageGrid& g, const VisibilityPolygon& v, int iy, int x_lo, int x_hi) {
    if (g.row_first[iy] > g.row_last[iy]) return 0;
    x_lo = std::max(x_lo, g.row_first[iy]);
    x_hi = std::min(x_hi, g.row_last[iy]);
    std::int64_t added = 0;
    for (int ix = x_lo; ix <= x_hi; ++ix) {
        int i = g.index(ix, iy);
        if (!g.free_cell[i] || g.covered[i]) continue;
        if (v.contains(g.center(ix, iy), g.cell * 1e-6)) {
            g.covered[i] = 1;
            ++added;
        }
    }
    // Shrink the uncovered window from both ends.
    while (g.row_first[iy] <= g.row_last[iy]) {
        int i = g.index(g.row_first[iy], iy);
        if (g.free_cell[i] && !g.covered[i]) break;
        ++g.row_first[iy];
    }
    while (g.row_last[iy] >= g.row_first[iy]) {
        int i = g.index(g.row_last[iy], iy);
        if (g.free_cell[i] && !g.covered[i]) break;
        --g.row_last[iy];
    }
    return added;
}

void bbox_cells(const CoverageGrid& g, const BoundingBox& bb, int& x_lo, int& x_hi, int& y_lo,
                int& y_hi) {
    x_lo = std::max(0, static_cast<int>(std::floor((bb.min_x - g.box.min_x) / g.cell)) - 1);
    x_hi = std::min(g.nx - 1, static_cast<int>(std::ceil((bb.max_x - g.box.min_x) / g.cell)) + 1);
    y_lo = std::max(0, static_cast<int>(std::floor((bb.min_y - g.box.min_y) / g.cell)) - 1);
    y_hi = std::min(g.ny - 1, static_cast<int>(std::ceil((bb.max_y - g.box.min_y) / g.cell)) + 1);
}

}  // namespace

void mark_visible_serial(CoverageGrid& g, const VisibilityPolygon& v) {
    int x_lo, x_hi, y_lo, y_hi;
    bbox_cells(g, v.bbox, x_lo, x_hi, y_lo, y_hi);
    std::int64_t added = 0;
    for (int iy = y_lo; iy <= y_hi; ++iy) added += mark_row(g, v, iy, x_lo, x_hi);
    g.covered_count += added;
}

void mark_visible_parallel(CoverageGrid& g, const VisibilityPolygon& v) {
    int x_lo, x_hi, y_lo, y_hi;
    bbox_cells(g, v.bbox, x_lo, x_hi, y_lo, y_hi);
    std::int64_t added = 0;
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : added)
    for (int iy = y_lo; iy <= y_hi; ++iy) added += mark_row(g, v, iy, x_lo, x_hi);
    g.covered_count += added;
}

std::vector<double> ray_cast_all_serial(const Scene& s, const Point& origin,
                                        const std::vector<Point>& directions) {
    auto edges = scene_edges(s);
    std::vector<double> out(directions.size(), std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < directions.size(); ++k) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& e : edges) {
            auto t = ray_segment_hit(origin, directions[k], e.seg);
            if (t && *t > 0 && *t < best) best = *t;
        }
        out[k] = best;
    }
    return out;
}

std::vector<double> ray_cast_all_parallel(const Scene& s, const Point& origin,
                                          const std::vector<Point>& directions) {
    auto edges = scene_edges(s);
    std::vector<double> out(directions.size(), std::numeric_limits<double>::infinity());
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < directions.size(); ++k) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& e : edges) {
            auto t = ray_segment_hit(origin, directions[k], e.seg);
            if (t && *t > 0 && *t < best) best = *t;
        }
        out[k] = best;
    }
    return out;
}

}  // namespace cpex
