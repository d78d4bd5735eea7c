#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "cpex/scenarios.hpp"

namespace cpex {

double general_lb_f(double alpha) { return (4.0 * alpha + 2.0) / (2.0 * alpha); }
double general_lb_g(double alpha) { return (2.0 * alpha + 2.0) / 2.0; }

namespace {

// Golden-section minimizer for a unimodal function on [lo, hi].
double golden_min(const std::function<double(double)>& fn, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = fn(c), fd = fn(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = fn(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = fn(d);
        }
    }
    return (a + b) / 2.0;
}

}  // namespace

GoldenRatioResult optimize_general_lb(double tol) {
    auto objective = [](double a) { return std::max(general_lb_f(a), general_lb_g(a)); };
    double alpha = golden_min(objective, 1e-6, 10.0, tol);
    return {alpha, objective(alpha)};
}

// ---------------------------------------------------------------------------
// Chained-gadget oscillation game. The strategy hedges leftward with depths
// d_1 <= d_2 <= ..., checking the shared right vantage at distance 1 after
// each of the first two misses; deeper reveals open up when passing the
// start. The adversary picks the level and side of the final resolution.
//
//   world R     : everything resolves at the right vantage.
//   world L_k   : cuts resolve left, the k-th at depth d_k + eps.
//   world M_k   : k-1 left resolutions, the k-th resolves at the vantage.
//
// Leg accounting mirrors the one-hole proof: L_1 reproduces f, R reproduces g.
// ---------------------------------------------------------------------------

double multihole_game_value(const std::vector<double>& depths) {
    const int h = static_cast<int>(depths.size());
    if (h < 1) throw std::invalid_argument("multihole_game_value: need at least one level");
    for (int k = 0; k < h; ++k)
        if (depths[k] <= 0 || (k > 0 && depths[k] < depths[k - 1]))
            return std::numeric_limits<double>::infinity();

    auto prefix = [&](int k) {  // sum of the first k depths
        double s = 0.0;
        for (int i = 0; i < k; ++i) s += depths[i];
        return s;
    };

    double worst = general_lb_g(depths[0]);  // world R
    for (int k = 1; k <= h; ++k) {
        double sk = prefix(k);
        double dk = depths[k - 1];
        // Vantage trips happen after the first two misses only; deeper levels
        // reveal on the way through the start.
        double trips = std::min(k, 2);
        double cost_left = 2.0 * sk + 2.0 * dk + 2.0 * trips;
        worst = std::max(worst, cost_left / (2.0 * dk));
        if (k >= 2) {
            double dprev = depths[k - 2];
            double cost_right = 2.0 * sk + 2.0 * std::min(k, 3);
            worst = std::max(worst, cost_right / (2.0 * (dprev + 1.0)));
        }
    }
    return worst;
}

namespace {

std::string binding_world_name(const std::vector<double>& depths) {
    const int h = static_cast<int>(depths.size());
    double best = general_lb_g(depths[0]);
    std::string name = "R";
    auto prefix = [&](int k) {
        double s = 0.0;
        for (int i = 0; i < k; ++i) s += depths[i];
        return s;
    };
    for (int k = 1; k <= h; ++k) {
        double sk = prefix(k);
        double dk = depths[k - 1];
        double trips = std::min(k, 2);
        double tl = (2.0 * sk + 2.0 * dk + 2.0 * trips) / (2.0 * dk);
        if (tl > best) {
            best = tl;
            name = "L" + std::to_string(k);
        }
        if (k >= 2) {
            double tm = (2.0 * sk + 2.0 * std::min(k, 3)) / (2.0 * (depths[k - 2] + 1.0));
            if (tm > best) {
                best = tm;
                name = "M" + std::to_string(k);
            }
        }
    }
    return name;
}

}  // namespace

MultiholeGame multihole_maximin(int levels) {
    if (levels < 1) throw std::invalid_argument("multihole_maximin: levels must be positive");
    std::vector<double> depths(levels, 1.0);
    for (int i = 0; i < levels; ++i) depths[i] = 1.5 * (i + 1);

    // Nested golden-section per level, iterated to a fixed point.
    auto eval = [&](const std::vector<double>& d) { return multihole_game_value(d); };
    double best = eval(depths);
    for (int sweep = 0; sweep < 60; ++sweep) {
        double before = best;
        for (int k = 0; k < levels; ++k) {
            double lo = (k == 0) ? 1e-3 : depths[k - 1];
            double hi = std::max(lo * 1.01, 60.0);
            double opt = golden_min(
                [&](double x) {
                    std::vector<double> d = depths;
                    d[k] = x;
                    for (int j = k + 1; j < levels; ++j) d[j] = std::max(d[j], x);
                    return eval(d);
                },
                lo, hi, 1e-10);
            depths[k] = opt;
            for (int j = k + 1; j < levels; ++j) depths[j] = std::max(depths[j], opt);
            best = eval(depths);
        }
        if (std::fabs(before - best) < 1e-12) break;
    }
    MultiholeGame out;
    out.value = best;
    out.depths = depths;
    out.binding_world = binding_world_name(depths);
    return out;
}

}  // namespace cpex
