#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "cpex/visibility.hpp"

namespace cpex {

struct ProbeResult {
    bool found = false;
    double found_depth = 0.0;  // cumulative depth at which the target appeared
    double walked = 0.0;       // actual robot displacement spent on this probe
    bool exhausted = false;    // ray cannot be advanced any further
};

// One exploration direction. advance(depth) extends the cumulative advancement
// to `depth` (monotone) and reports what happened.
struct SearchRay {
    int id = 0;
    std::function<ProbeResult(double depth)> advance;
};

struct SearchOutcome {
    bool found = false;
    int found_on = -1;
    double target_depth = 0.0;
    double total_traveled = 0.0;
    bool exhausted = false;  // depth cap hit or all rays dead
};

struct SearchOptions {
    double depth_cap = std::numeric_limits<double>::infinity();
    // Replay one more round at the current depths after the first detection
    // before committing (used when learning tours; off for raw schedules).
    bool extra_round = false;
};

// Two-way doubling: depths unit * 2^(k-1), alternating starting with `left`.
SearchOutcome cow_path(SearchRay left, SearchRay right, double unit, SearchOptions opt = {});

// Cyclic m-ray schedule with geometric growth of base m/(m-1).
SearchOutcome star_search(std::vector<SearchRay> rays, int m, double unit, SearchOptions opt = {});

// Discretized circle through `from` with `vertex` as the other diameter
// endpoint, walked toward the vertex on the given side of ray from->vertex.
std::vector<Point> semicircle_arc(const Point& from, const Point& vertex, WindowSide side,
                                  double arc_tolerance);

}  // namespace cpex
