#include "cpex/search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cpex {

namespace {

struct RayState {
    SearchRay ray;
    double depth = 0.0;
    bool dead = false;
};

SearchOutcome run_schedule(std::vector<SearchRay> rays, double unit,
                           const std::function<double(long)>& depth_at, SearchOptions opt) {
    if (rays.empty()) throw std::invalid_argument("search: no rays");
    if (unit <= 0) throw std::invalid_argument("search: unit must be positive");

    SearchOutcome out;
    std::vector<RayState> state;
    for (auto& r : rays) state.push_back({std::move(r), 0.0, false});
    const int m = static_cast<int>(state.size());

    // Cost-free look at depth zero catches targets at the junction.
    for (auto& st : state) {
        ProbeResult pr = st.ray.advance(0.0);
        out.total_traveled += pr.walked;
        if (pr.exhausted) st.dead = true;
        if (pr.found) {
            out.found = true;
            out.found_on = st.ray.id;
            out.target_depth = pr.found_depth;
            return out;
        }
    }

    long visit = 0;
    int found_idx = -1;
    while (true) {
        int idx = static_cast<int>(visit % m);
        double depth = unit * depth_at(visit);
        ++visit;
        RayState& st = state[idx];
        if (st.dead) {
            bool all_dead = std::all_of(state.begin(), state.end(),
                                        [](const RayState& r) { return r.dead; });
            if (all_dead) {
                out.exhausted = true;
                return out;
            }
            continue;
        }
        if (depth > opt.depth_cap) {
            st.dead = true;
            continue;
        }
        if (depth <= st.depth) continue;
        ProbeResult pr = st.ray.advance(depth);
        out.total_traveled += pr.walked;
        st.depth = depth;
        if (pr.found) {
            out.found = true;
            out.found_on = st.ray.id;
            out.target_depth = pr.found_depth;
            found_idx = idx;
            break;
        }
        if (pr.exhausted) st.dead = true;
    }

    if (out.found && opt.extra_round) {
        // Replay the other rays once at their current depths; detection depth
        // may improve if a shorter route was missed.
        for (int k = 0; k < m; ++k) {
            if (k == found_idx || state[k].dead || state[k].depth <= 0) continue;
            ProbeResult pr = state[k].ray.advance(state[k].depth);
            out.total_traveled += pr.walked;
            if (pr.found && pr.found_depth < out.target_depth) {
                out.target_depth = pr.found_depth;
                out.found_on = state[k].ray.id;
            }
        }
    }
    return out;
}

}  // namespace

SearchOutcome cow_path(SearchRay left, SearchRay right, double unit, SearchOptions opt) {
    std::vector<SearchRay> rays;
    rays.push_back(std::move(left));
    rays.push_back(std::move(right));
    return run_schedule(std::move(rays), unit, [](long visit) { return std::pow(2.0, visit); },
                        opt);
}

SearchOutcome star_search(std::vector<SearchRay> rays, int m, double unit, SearchOptions opt) {
    if (m != static_cast<int>(rays.size()))
        throw std::invalid_argument("star_search: m must equal the ray count");
    if (m < 2) throw std::invalid_argument("star_search: need at least two rays");
    double base = static_cast<double>(m) / (m - 1);
    return run_schedule(std::move(rays), unit,
                        [base](long visit) { return std::pow(base, visit); }, opt);
}

std::vector<Point> semicircle_arc(const Point& from, const Point& vertex, WindowSide side,
                                  double arc_tolerance) {
    std::vector<Point> pts;
    double d = dist(from, vertex);
    if (d == 0.0) {
        pts.push_back(from);
        return pts;
    }
    Point center = Segment{from, vertex}.midpoint();
    double radius = d / 2.0;
    double theta0 = std::atan2(from.y - center.y, from.x - center.x);
    double step = M_PI / 8.0;
    if (radius > arc_tolerance)
        step = std::min(step, 2.0 * std::acos(std::max(0.0, 1.0 - arc_tolerance / radius)));
    int n = std::max(2, static_cast<int>(std::ceil(M_PI / step)));
    double dir = (side == WindowSide::Left) ? 1.0 : -1.0;
    for (int k = 0; k <= n; ++k) {
        double a = theta0 + dir * M_PI * k / n;
        pts.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
    }
    pts.back() = vertex;  // land exactly on the blocking vertex
    return pts;
}

}  // namespace cpex
