#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cpex/geodesic.hpp"
#include "cpex/kernels.hpp"
#include "cpex/search.hpp"

namespace cpex {

struct StrategyConfig {
    double c = 5.0;           // safety constant
    double c_classify = 6.0;  // first-classification constant
    double c0 = 26.5;         // base-explorer competitive constant
    std::vector<double> competitive_table;  // overrides C(h) when non-empty
    int lambda_resolution = 256;
    double arc_tolerance_scale = 1e-3;   // arc tolerance = scale * diameter
    double unit_scale = 1e-3;            // search unit = scale * diameter
    double depth_cap_perimeters = 10.0;  // exhaustion guard for searches
    double coverage_resolution = 1e-3;   // grid cell = resolution * diameter
    double coverage_threshold = 0.999;

    // Competitive constant table: C(0) = c0, otherwise (h + 22)! capped.
    double C(int h) const;
};

struct TraceEvent {
    double at_length = 0.0;
    std::string kind;  // HoleDiscovered, Classified, FenceBuilt, PhaseChange, RecursionEnter, RecursionExit
    int color = -1;
    std::string detail;
};

struct Trace {
    Polyline path;  // open polyline from the scene start
    std::vector<TraceEvent> events;
    double total = 0.0;
};

std::string trace_to_json(const Trace& t);

enum class HoleStatus { Discovered, Critical, Safe };

struct HoleRecord {
    Color color = -1;
    HoleStatus status = HoleStatus::Discovered;
    std::optional<EncirclingTour> tour;
    std::optional<double> lambda;
};

// ---------------------------------------------------------------------------
// Per-level map of what the robot has seen: observations, their windows, the
// viewpoint hop graph used for navigation, and the coverage grid.
// ---------------------------------------------------------------------------

struct KnownWindow {
    int id = 0;
    int origin = 0;  // observation index
    Window window;
    Point probe;  // just beyond the chord midpoint, inside the unseen region
    bool resolved = false;
};

class Knowledge {
public:
    Knowledge(const Scene& scene, const StrategyConfig& cfg);

    const Scene& scene() const { return *scene_; }

    // Returns the observation index; updates grid, windows and hop graph.
    int add_observation(const Point& viewpoint, VisibilityPolygon vp);
    bool has_observation_at(const Point& p) const;
    int observation_at(const Point& p) const;  // -1 when absent

    const std::vector<VisibilityPolygon>& polygons() const { return polygons_; }
    const std::vector<Point>& viewpoints() const { return viewpoints_; }
    const CoverageGrid& grid() const { return grid_; }
    std::vector<KnownWindow>& windows() { return windows_; }
    const std::vector<KnownWindow>& windows() const { return windows_; }
    const std::vector<Color>& seen_hole_colors() const { return seen_colors_; }

    bool point_known(const Point& p) const;

    // Star-hop route between known points: every leg stays inside one
    // observed polygon. Empty when unroutable.
    std::vector<Point> route(const Point& from, const Point& to) const;
    double route_length(const Point& from, const Point& to) const;

    // Hop-graph distances from a known point to every viewpoint.
    std::vector<double> viewpoint_distances(const Point& from) const;

private:
    const Scene* scene_;
    const StrategyConfig* cfg_;
    CoverageGrid grid_;
    std::vector<VisibilityPolygon> polygons_;
    std::vector<Point> viewpoints_;
    std::vector<std::vector<std::pair<int, double>>> hop_adj_;
    std::map<std::pair<long long, long long>, int> viewpoint_index_;
    std::vector<KnownWindow> windows_;
    std::vector<Color> seen_colors_;
    int next_window_id_ = 0;
    double probe_offset_ = 0.0;

    std::pair<long long, long long> key(const Point& p) const;
    friend class Environment;
};

// ---------------------------------------------------------------------------
// The environment contract: the scene is hidden behind visibility queries and
// legality-checked moves. Recursion levels restrict the robot to sub-scenes.
// ---------------------------------------------------------------------------

struct BudgetExceededError {
    double limit = 0.0;
};

class Environment {
public:
    Environment(Scene scene, StrategyConfig cfg = {});

    const StrategyConfig& config() const { return cfg_; }
    const Scene& true_scene() const { return levels_.front()->scene(); }
    const Scene& active_scene() const { return levels_.back()->scene(); }
    Knowledge& knowledge() { return *levels_.back(); }
    const Knowledge& knowledge() const { return *levels_.back(); }
    int depth() const { return static_cast<int>(levels_.size()) - 1; }

    const Point& position() const { return position_; }
    double traveled() const { return trace_.total; }
    const Trace& trace() const { return trace_; }
    void add_event(const std::string& kind, int color = -1, const std::string& detail = "");

    // Visibility polygon at the current position in the active scene.
    const VisibilityPolygon& observe();

    // Straight move to a point visible from the current position.
    void move_to(const Point& q);
    bool can_move_to(const Point& q) const;

    // Multi-hop move through the viewpoint graph; observes at the end.
    bool navigate_to(const Point& target);
    double route_length_to(const Point& target) const;

    // Walks a polyline, observing at every vertex; stops early when the
    // predicate returns true or a vertex is not directly reachable.
    // Returns distance walked.
    double walk(const std::vector<Point>& pts, const std::function<bool()>& stop_when = {});

    void push_scene(Scene sub);
    void pop_scene();  // merges the child's observations into the parent

    // Returns the absolute limit; move_to throws BudgetExceededError past it.
    double push_budget(double additional);
    void pop_budget();

    // Chronological log for the move-legality audit.
    struct LogEntry {
        std::size_t path_index;  // trace vertex at which the observation happened
        VisibilityPolygon polygon;
    };
    const std::vector<LogEntry>& observation_log() const { return log_; }

private:
    StrategyConfig cfg_;
    std::vector<std::unique_ptr<Scene>> scenes_;
    std::vector<std::unique_ptr<Knowledge>> levels_;
    Point position_;
    Trace trace_;
    std::vector<double> budget_limits_;
    std::vector<LogEntry> log_;
    int last_observation_ = -1;

    void check_budget(double next_leg);
};

// ---------------------------------------------------------------------------
// Strategy operations
// ---------------------------------------------------------------------------

enum class BaseExploreResult { Explored, BudgetExceeded, HoleSighted };

struct BaseExploreOutcome {
    BaseExploreResult result = BaseExploreResult::Explored;
    Color color = -1;  // for HoleSighted
};

// Greedy window chasing; stops on first hole edge sighting when stop_on_hole.
BaseExploreOutcome base_explore(Environment& env,
                                double budget = std::numeric_limits<double>::infinity(),
                                bool stop_on_hole = true);

// Online learning of the shortest encircling tour via alternating cw/ccw
// corridor search (cow path for one hole, star search otherwise).
EncirclingTour learn_encircling_online(Environment& env, Color color);

HoleStatus classify(const HoleRecord& record, double lambda_global, const StrategyConfig& cfg);

struct RunResult {
    bool ok = false;
    std::string error;
    double coverage = 0.0;
    bool returned_to_start = false;
};

// Full control loop; events and the path accumulate on the environment trace.
RunResult h_cpex(Environment& env, int h_max);

// Exposed phase machinery (shared by h_cpex and the tests).
class CpexStrategy {
public:
    CpexStrategy(Environment& env, int h_max);

    RunResult run();

    enum class FrontyardResult { Explored, PromotedSafe };
    FrontyardResult explore_frontyard(const Fence& fence, int h_remaining);
    void explore_safe(HoleRecord& record, int h_remaining);
    void explore_backyard(const std::vector<std::pair<Fence, std::vector<Color>>>& fences);

    std::map<Color, HoleRecord>& records() { return records_; }
    double lambda_global() const { return lambda_global_; }

private:
    Environment& env_;
    int h_max_;
    std::map<Color, HoleRecord> records_;
    std::vector<Color> discovery_order_;
    double lambda_global_ = 0.0;
    bool finished_by_recursion_ = false;
    int current_h_ = 0;

    void run_level(int h_remaining);
    void run_level_body(int h_remaining);
    void sync_discovered();
    void classify_all(int h_remaining);
    bool backyard_ray_walk(const Fence& fence, WindowSide side, double target_depth,
                           double& progress, bool& touched_fence, bool& exhausted,
                           const std::vector<Point>& curve);
    void sweep_remaining_windows();
    void mop_up_coverage();
    void finalize_level();
};

// Validates the move-legality invariant of a finished run: every trace
// segment lies inside the union of the polygons observed up to that time.
bool trace_moves_legal(const Environment& env);

}  // namespace cpex
