#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cpex/scene.hpp"

namespace cpex {

struct OptBounds {
    std::optional<double> exact;
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
    bool upper_failed = false;
};

struct ScenarioBundle {
    Scene scene;
    OptBounds opt;
    std::string label;
    nlohmann::json params;
};

std::string bundle_to_json(const ScenarioBundle& b);
ScenarioBundle bundle_from_json(const std::string& text);
ScenarioBundle load_bundle(const std::string& path);
void save_bundle(const ScenarioBundle& b, const std::string& path);

// --- closed-form adversary games ------------------------------------------

// One-hole tradeoff: f decreasing, g increasing; the minimized maximum sits
// at the golden ratio.
double general_lb_f(double alpha);  // (4a + 2) / (2a)
double general_lb_g(double alpha);  // (2a + 2) / 2

struct GoldenRatioResult {
    double alpha = 0.0;
    double value = 0.0;
};
GoldenRatioResult optimize_general_lb(double tol = 1e-9);

// Chained-gadget oscillation game for several holes: per-level hedge depths
// against worlds that resolve left or right at each level.
struct MultiholeGame {
    double value = 0.0;
    std::vector<double> depths;     // optimized hedge depths per level
    std::string binding_world;      // which world attains the maximum
};
double multihole_game_value(const std::vector<double>& depths);
MultiholeGame multihole_maximin(int levels);

// --- scenario generators ----------------------------------------------------

enum class GeneralLbVariant { LeftCut, RightCut };

ScenarioBundle gen_general_lb(double alpha, GeneralLbVariant variant, double eps = 1e-4);
ScenarioBundle gen_orthogonal_lb(double d, int depth);
ScenarioBundle gen_multihole_lb(int h);
ScenarioBundle gen_four_holes();
ScenarioBundle gen_random(int h, int n, std::uint64_t seed);

// Offline bracket of the optimal watchman tour: lower from the lambda bound,
// upper from a constructed feasible tour (greedy witnesses + 2-opt, coverage
// verified and repaired).
std::pair<double, double> opt_bounds(const Scene& s);

// The feasible watchman tour behind opt_bounds' upper value.
struct WatchmanTour {
    Polyline tour;  // closed, through the start
    double length = 0.0;
    bool coverage_ok = false;
};
WatchmanTour construct_watchman_tour(const Scene& s);

}  // namespace cpex
