#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "cpex/strategy.hpp"

namespace cpex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Nearest unresolved window by hop-graph distance; ties by window id, which
// follows discovery and angular order.
const KnownWindow* nearest_unresolved_window(Environment& env,
                                             const std::function<bool(const KnownWindow&)>& accept = {}) {
    Knowledge& k = env.knowledge();
    bool any = false;
    for (const auto& w : k.windows())
        if (!w.resolved && (!accept || accept(w))) any = true;
    if (!any) return nullptr;
    auto dv = k.viewpoint_distances(env.position());
    const KnownWindow* best = nullptr;
    double best_d = kInf;
    for (const auto& w : k.windows()) {
        if (w.resolved || (accept && !accept(w))) continue;
        double d = dv[w.origin] + dist(k.viewpoints()[w.origin], w.window.chord.midpoint());
        if (d < best_d) {
            best_d = d;
            best = &w;
        }
    }
    return best;
}

// Walk to a window chord and peek past it. Returns false when unroutable.
bool visit_window(Environment& env, const KnownWindow& w) {
    Point mid = w.window.chord.midpoint();
    if (!env.navigate_to(mid)) {
        // Route via the origin viewpoint if the midpoint itself is unroutable.
        Knowledge& k = env.knowledge();
        if (!env.navigate_to(k.viewpoints()[w.origin])) return false;
        if (!env.can_move_to(mid)) return false;
        env.move_to(mid);
    }
    return true;
}

}  // namespace

BaseExploreOutcome base_explore(Environment& env, double budget, bool stop_on_hole) {
    BaseExploreOutcome out;
    double start_traveled = env.traveled();
    const int cap = 20000;
    for (int iter = 0; iter < cap; ++iter) {
        env.observe();
        if (stop_on_hole && !env.knowledge().seen_hole_colors().empty()) {
            out.result = BaseExploreResult::HoleSighted;
            out.color = env.knowledge().seen_hole_colors().front();
            return out;
        }
        if (env.traveled() - start_traveled > budget) {
            out.result = BaseExploreResult::BudgetExceeded;
            return out;
        }
        const KnownWindow* w = nearest_unresolved_window(env);
        if (!w) {
            out.result = BaseExploreResult::Explored;
            return out;
        }
        if (!visit_window(env, *w)) {
            // Unroutable frontier should not happen; abandon it rather than spin.
            for (auto& kw : env.knowledge().windows())
                if (kw.id == w->id) kw.resolved = true;
        }
    }
    throw std::runtime_error("base_explore: iteration cap exceeded");
}

HoleStatus classify(const HoleRecord& record, double lambda_global, const StrategyConfig& cfg) {
    if (!record.tour || !record.lambda)
        throw std::invalid_argument("classify: record lacks tour or lambda");
    double tour_len = record.tour->length();
    return (tour_len <= cfg.c_classify * lambda_global) ? HoleStatus::Safe : HoleStatus::Critical;
}

// ---------------------------------------------------------------------------
// Online tour learning
// ---------------------------------------------------------------------------

namespace {

struct TourLearner {
    Environment& env;
    Color color;
    const Scene& scene;
    Point pivot;
    EncirclingTour candidate;
    double arc_tol;
    bool fallback_used = false;

    struct Ray {
        int dir;  // +1 ccw, -1 cw
        Point frontier;
        double progress = 0.0;
        bool dead = false;
    };
    std::vector<Ray> rays;

    TourLearner(Environment& e, Color c) : env(e), color(c), scene(e.active_scene()) {
        const Hole* hole = scene.hole_by_color(c);
        if (!hole) throw std::invalid_argument("learn_encircling_online: unknown hole color");
        pivot = ring_interior_point(hole->boundary);
        candidate = encircling_tour(scene, c);
        arc_tol = env.config().arc_tolerance_scale * std::max(1.0, scene.diameter());
        rays.push_back({+1, env.position()});
        rays.push_back({-1, env.position()});
    }

    // The tour counts as learned once every loop segment lies in seen space.
    bool tour_known() const {
        const CoverageGrid& g = env.knowledge().grid();
        const auto& loop = candidate.loop.vertices;
        double step = std::max(g.cell, 1e-6);
        for (std::size_t i = 0; i < loop.size(); ++i) {
            Segment seg{loop[i], loop[(i + 1) % loop.size()]};
            int n = std::max(1, static_cast<int>(std::ceil(seg.length() / step)));
            for (int t = 0; t <= n; ++t)
                if (!g.covered_at(seg.at(static_cast<double>(t) / n))) return false;
        }
        return true;
    }

    double angle_at(const Point& p) const { return std::atan2(p.y - pivot.y, p.x - pivot.x); }

    // Next unresolved window continuing around the hole in the ray direction.
    const KnownWindow* pick_window(const Ray& ray) {
        Knowledge& k = env.knowledge();
        double here = angle_at(env.position());
        const KnownWindow* best = nullptr;
        double best_delta = kInf;
        for (const auto& w : k.windows()) {
            if (w.resolved) continue;
            const EdgeTag& a = w.window.connects_colors.first;
            const EdgeTag& b = w.window.connects_colors.second;
            bool hole_adjacent = (a.kind == EdgeTag::Kind::Hole && a.color == color) ||
                                 (b.kind == EdgeTag::Kind::Hole && b.color == color);
            if (!hole_adjacent) continue;
            double delta = angle_at(w.window.blocking_vertex) - here;
            while (delta <= -M_PI) delta += 2.0 * M_PI;
            while (delta > M_PI) delta -= 2.0 * M_PI;
            double oriented = ray.dir > 0 ? delta : -delta;
            if (oriented < -1e-9) continue;  // behind the travel direction
            if (oriented < best_delta) {
                best_delta = oriented;
                best = &w;
            }
        }
        return best;
    }

    bool window_resolved(int id) const {
        for (const auto& w : env.knowledge().windows())
            if (w.id == id) return w.resolved;
        return true;
    }

    ProbeResult advance(Ray& ray, double depth) {
        ProbeResult pr;
        double walked0 = env.traveled();
        if (tour_known()) {
            pr.found = true;
            pr.found_depth = ray.progress;
            return pr;
        }
        if (!env.navigate_to(ray.frontier)) {
            ray.dead = true;
            pr.exhausted = true;
            return pr;
        }
        int guard = 0;
        while (ray.progress < depth && ++guard < 500) {
            env.observe();
            if (tour_known()) {
                pr.found = true;
                break;
            }
            const KnownWindow* w = pick_window(ray);
            if (!w) {
                // Dead end in this direction: fall back to the globally nearest
                // hole-adjacent frontier, then to any frontier.
                w = nearest_unresolved_window(env, [&](const KnownWindow& kw) {
                    const EdgeTag& a = kw.window.connects_colors.first;
                    const EdgeTag& b = kw.window.connects_colors.second;
                    return (a.kind == EdgeTag::Kind::Hole && a.color == color) ||
                           (b.kind == EdgeTag::Kind::Hole && b.color == color);
                });
                if (!w) w = nearest_unresolved_window(env);
                if (!w) {
                    ray.dead = true;
                    break;
                }
                fallback_used = true;
            }
            int id = w->id;
            Point target_vertex = w->window.blocking_vertex;
            WindowSide side = w->window.side;
            double before = env.traveled();
            // Approach the blocking vertex on a semicircle until the cut is crossed.
            auto arc = semicircle_arc(env.position(), target_vertex, side, arc_tol);
            env.walk(arc, [&]() { return window_resolved(id) || env.traveled() - walked0 +
                                             ray.progress >= depth + arc_tol; });
            if (!window_resolved(id) && env.traveled() == before) {
                // Arc blocked immediately; step to the chord midpoint instead.
                Point mid = w->window.chord.midpoint();
                if (env.can_move_to(mid)) env.move_to(mid);
            }
            double gained = env.traveled() - before;
            ray.progress += gained;
            if (gained <= 0 && !window_resolved(id)) {
                if (!visit_window(env, *w)) {
                    ray.dead = true;
                    break;
                }
                ray.progress += env.traveled() - before;
            }
        }
        ray.frontier = env.position();
        pr.found = pr.found || tour_known();
        pr.found_depth = ray.progress;
        pr.walked = env.traveled() - walked0;
        pr.exhausted = ray.dead;
        return pr;
    }
};

}  // namespace

EncirclingTour learn_encircling_online(Environment& env, Color color) {
    TourLearner learner(env, color);
    const Scene& scene = env.active_scene();
    const double diam = std::max(1.0, scene.diameter());
    double unit = env.config().unit_scale * diam;
    double perimeter = polyline_length(scene.outer);
    for (const auto& h : scene.holes) perimeter += polyline_length(h.boundary);

    SearchOptions opt;
    opt.depth_cap = env.config().depth_cap_perimeters * perimeter;
    opt.extra_round = true;

    auto make_ray = [&](int idx) {
        SearchRay r;
        r.id = idx;
        r.advance = [&learner, idx](double depth) {
            return learner.advance(learner.rays[idx], depth);
        };
        return r;
    };

    int h_active = static_cast<int>(scene.holes.size());
    SearchOutcome out;
    if (h_active <= 1) {
        // cw first: ray 0 is the clockwise direction.
        out = cow_path(make_ray(1), make_ray(0), unit, opt);
    } else {
        int m = std::max(2, 3 * h_active);
        std::vector<SearchRay> rays;
        rays.push_back(make_ray(1));
        rays.push_back(make_ray(0));
        for (int k = 2; k < m; ++k) {
            SearchRay extra;
            extra.id = k;
            extra.advance = [](double) {
                ProbeResult pr;
                pr.exhausted = true;  // unbound corridor slot
                return pr;
            };
            rays.push_back(std::move(extra));
        }
        out = star_search(std::move(rays), m, unit, opt);
    }
    if (!out.found && !learner.tour_known()) {
        // Last resort: chase every remaining frontier until the loop is seen.
        int guard = 0;
        while (!learner.tour_known() && ++guard < 5000) {
            const KnownWindow* w = nearest_unresolved_window(env);
            if (!w) break;
            visit_window(env, *w);
            env.observe();
        }
        learner.fallback_used = true;
        if (!learner.tour_known())
            throw std::runtime_error("learn_encircling_online: tour not learnable");
    }
    if (learner.fallback_used) env.add_event("PhaseChange", color, "learn-tour-fallback");
    return learner.candidate;
}

// ---------------------------------------------------------------------------
// h-CPEX control loop
// ---------------------------------------------------------------------------

namespace {

// Exception-safe scene/budget scoping: budget overruns unwind through
// arbitrarily deep recursion frames.
class SceneGuard {
public:
    SceneGuard(Environment& env, Scene sub) : env_(env) { env_.push_scene(std::move(sub)); }
    ~SceneGuard() {
        try {
            env_.pop_scene();
        } catch (...) {
        }
    }

private:
    Environment& env_;
};

class BudgetGuard {
public:
    BudgetGuard(Environment& env, double additional) : env_(env) {
        limit_ = env_.push_budget(additional);
    }
    ~BudgetGuard() { env_.pop_budget(); }
    double limit() const { return limit_; }

private:
    Environment& env_;
    double limit_ = 0.0;
};

}  // namespace

CpexStrategy::CpexStrategy(Environment& env, int h_max) : env_(env), h_max_(h_max) {}

RunResult h_cpex(Environment& env, int h_max) {
    CpexStrategy strategy(env, h_max);
    return strategy.run();
}

void CpexStrategy::sync_discovered() {
    for (Color c : env_.knowledge().seen_hole_colors()) {
        if (records_.count(c)) continue;
        records_[c] = HoleRecord{c, HoleStatus::Discovered, std::nullopt, std::nullopt};
        discovery_order_.push_back(c);
        env_.add_event("HoleDiscovered", c);
    }
}

RunResult CpexStrategy::run() {
    RunResult res;
    const Scene& root = env_.true_scene();
    try {
        if (static_cast<int>(root.holes.size()) > h_max_)
            throw std::runtime_error("h_cpex: scene has more holes than h_max");
        run_level(h_max_);
        finalize_level();
        res.coverage = env_.knowledge().grid().fraction();
        res.returned_to_start = dist(env_.position(), root.start) <= kEpsGeom;
        if (res.coverage < env_.config().coverage_threshold)
            throw std::runtime_error("h_cpex: coverage incomplete at claimed termination");
        res.ok = res.returned_to_start;
        if (!res.ok) res.error = "did not return to start";
    } catch (const std::exception& e) {
        res.ok = false;
        res.error = e.what();
        res.coverage = env_.knowledge().grid().fraction();
    }
    return res;
}

void CpexStrategy::finalize_level() {
    env_.add_event("PhaseChange", -1, "return-to-start");
    const Point& home = env_.true_scene().start;
    if (!env_.navigate_to(home)) {
        // The start must be in known space; walk the trace back as a fallback.
        std::vector<Point> back(env_.trace().path.vertices.rbegin(),
                                env_.trace().path.vertices.rend());
        env_.walk(back);
        env_.navigate_to(home);
    }
}

void CpexStrategy::run_level(int h_remaining) {
    if (env_.depth() > h_max_ + 1)
        throw std::runtime_error("h_cpex: recursion depth exceeded");
    if (h_remaining <= 0) {
        base_explore(env_, kInf, false);
        sweep_remaining_windows();
        mop_up_coverage();
        return;
    }

    // Records are scoped to this level's scene; restore on any exit.
    std::map<Color, HoleRecord> saved_records;
    std::vector<Color> saved_order;
    std::swap(saved_records, records_);
    std::swap(saved_order, discovery_order_);
    int saved_h = current_h_;
    current_h_ = h_remaining;
    try {
        run_level_body(h_remaining);
    } catch (...) {
        std::swap(saved_records, records_);
        std::swap(saved_order, discovery_order_);
        current_h_ = saved_h;
        finished_by_recursion_ = false;
        throw;
    }
    current_h_ = saved_h;
    std::swap(saved_records, records_);
    std::swap(saved_order, discovery_order_);
    // Keep the root level's final state visible for inspection after the run.
    if (env_.depth() == 0) {
        records_ = std::move(saved_records);
        discovery_order_ = std::move(saved_order);
    }
    finished_by_recursion_ = false;
}

void CpexStrategy::run_level_body(int h_remaining) {
    const int outer_cap = 4 * (h_max_ + 2);
    bool done = false;
    for (int round = 0; round < outer_cap && !done; ++round) {
        sync_discovered();
        if (records_.empty()) {
            env_.add_event("PhaseChange", -1, "base-explore");
            auto out = base_explore(env_, kInf, true);
            if (out.result == BaseExploreResult::Explored) {
                sweep_remaining_windows();
                mop_up_coverage();
                done = true;
                break;
            }
            sync_discovered();
        }

        classify_all(h_remaining);
        if (finished_by_recursion_) break;

        // Group critical records by equal tours, in discovery order.
        const double diam = std::max(1.0, env_.active_scene().diameter());
        std::vector<std::pair<Fence, std::vector<Color>>> fences;
        std::vector<std::vector<Color>> groups;
        for (Color c : discovery_order_) {
            auto& rec = records_[c];
            if (rec.status != HoleStatus::Critical || !rec.tour) continue;
            bool grouped = false;
            for (auto& g : groups) {
                const auto& probe = records_[g.front()].tour;
                if (std::fabs(probe->length() - rec.tour->length()) <= 1e-9 * diam &&
                    std::fabs(probe->enclosed_area - rec.tour->enclosed_area) <=
                        1e-9 * diam * diam) {
                    g.push_back(c);
                    grouped = true;
                    break;
                }
            }
            if (!grouped) groups.push_back({c});
        }

        for (const auto& group : groups) {
            auto& rec = records_[group.front()];
            auto [lam, witness] = lambda_lower_bound(env_.active_scene(), *rec.tour,
                                                     env_.config().lambda_resolution);
            (void)lam;
            Fence fence = build_fence(env_.active_scene(), *rec.tour, witness);
            env_.add_event("FenceBuilt", group.front(), fence.note);
            if (!fence.valid) continue;
            fences.push_back({fence, group});

            auto result = explore_frontyard(fence, h_remaining);
            if (result == FrontyardResult::PromotedSafe) {
                for (Color c : group) {
                    records_[c].status = HoleStatus::Safe;
                    env_.add_event("Classified", c, "safe-promoted");
                }
                explore_safe(records_[group.front()], h_remaining);
                break;
            }
        }
        if (finished_by_recursion_) break;

        std::size_t known_colors = records_.size();
        sync_discovered();
        if (records_.size() > known_colors) continue;  // R1: classify the newcomers

        if (!fences.empty()) {
            explore_backyard(fences);
            if (finished_by_recursion_) break;
        }

        sync_discovered();
        if (records_.size() == known_colors) {
            sweep_remaining_windows();
            mop_up_coverage();
            done = true;
        }
    }
    if (!done && !finished_by_recursion_)
        throw std::runtime_error("h_cpex: control loop did not converge");
}

void CpexStrategy::classify_all(int h_remaining) {
    const auto& cfg = env_.config();
    int guard = 0;
    while (++guard < 100) {
        Color next = -1;
        for (Color c : discovery_order_)
            if (records_[c].status == HoleStatus::Discovered && !records_[c].tour) {
                next = c;
                break;
            }
        if (next < 0) return;

        auto& rec = records_[next];
        env_.add_event("PhaseChange", next, "learn-tour");
        rec.tour = learn_encircling_online(env_, next);
        auto [lam, witness] = lambda_lower_bound(env_.active_scene(), *rec.tour,
                                                 cfg.lambda_resolution);
        (void)witness;
        rec.lambda = lam;
        double old_lambda = lambda_global_;
        lambda_global_ = std::max(lambda_global_, lam);

        rec.status = classify(rec, lambda_global_, cfg);
        env_.add_event("Classified", next,
                       rec.status == HoleStatus::Safe ? "safe" : "critical");
        if (rec.status == HoleStatus::Safe) {
            explore_safe(rec, h_remaining);
            return;
        }
        if (lambda_global_ > old_lambda) {
            // Re-check earlier critical holes against the improved bound.
            for (Color c : discovery_order_) {
                auto& other = records_[c];
                if (other.status != HoleStatus::Critical || !other.tour) continue;
                if (classify(other, lambda_global_, cfg) == HoleStatus::Safe) {
                    other.status = HoleStatus::Safe;
                    env_.add_event("Classified", c, "safe-recheck");
                    explore_safe(other, h_remaining);
                    return;
                }
            }
        }
        sync_discovered();  // holes sighted while learning queue up (R1 exception)
    }
    throw std::runtime_error("classify_all: did not settle");
}

void CpexStrategy::explore_safe(HoleRecord& record, int h_remaining) {
    const Scene& scene = env_.active_scene();
    const double diam = std::max(1.0, scene.diameter());
    VisGraph graph(scene);

    // Candidate safe holes ordered by barrier length; the requested record
    // first among equals.
    std::vector<Color> candidates;
    candidates.push_back(record.color);
    for (Color c : discovery_order_)
        if (c != record.color && records_[c].status == HoleStatus::Safe && records_[c].tour)
            candidates.push_back(c);

    struct Option {
        Color color;
        Polyline barrier;
        double len;
    };
    std::vector<Option> options;
    for (Color c : candidates) {
        const Hole* hole = scene.hole_by_color(c);
        if (!hole || !records_[c].tour) continue;
        Polyline best;
        double best_len = kInf;
        for (const auto& hv : hole->boundary.vertices) {
            Polyline p = graph.path(scene.start, hv);
            double len = polyline_length(p);
            if (len < best_len) {
                best_len = len;
                best = p;
            }
        }
        if (best_len > 0.5 * records_[c].tour->length() + 1e-12) continue;  // eq. (1)
        options.push_back({c, best, best_len});
    }
    if (options.empty())
        throw std::runtime_error("explore_safe: no safe hole admits a barrier within half its tour");
    std::stable_sort(options.begin(), options.end(),
                     [](const Option& a, const Option& b) { return a.len < b.len; });

    // A barrier strip may merge further holes; they must all be safe.
    const Option* chosen = nullptr;
    for (const auto& opt : options) {
        bool interferes_with_unsafe = false;
        for (const auto& h : scene.holes) {
            if (h.color == opt.color) continue;
            if (records_.count(h.color) && records_[h.color].status == HoleStatus::Safe) continue;
            double d = kInf;
            for (std::size_t i = 0; i + 1 < opt.barrier.vertices.size(); ++i)
                for (std::size_t j = 0; j < h.boundary.segment_count(); ++j)
                    d = std::min(d, point_segment_distance(opt.barrier.vertices[i],
                                                           h.boundary.segment(j)));
            if (d <= 1e-6 * diam) interferes_with_unsafe = true;
        }
        if (!interferes_with_unsafe) {
            chosen = &opt;
            break;
        }
    }
    if (!chosen)
        throw std::runtime_error("explore_safe: every safe barrier interferes with an unsafe hole");

    env_.add_event("PhaseChange", chosen->color, "insert-barrier");
    if (!env_.navigate_to(scene.start))
        throw std::runtime_error("explore_safe: cannot return to start");

    CutResult cut = cut_scene(scene, chosen->barrier, scene.start);
    if (!cut.ok) throw std::runtime_error("explore_safe: barrier cut failed: " + cut.note);

    for (auto& [c, r] : records_) {
        if (c == chosen->color) continue;
        if (r.status != HoleStatus::Discovered) {
            r.status = HoleStatus::Discovered;
            r.tour.reset();
            r.lambda.reset();
            env_.add_event("Classified", c, "reset-discovered");
        }
    }

    env_.add_event("RecursionEnter", chosen->color, std::to_string(h_remaining - 1));
    {
        SceneGuard guard(env_, cut.piece_with_anchor);
        run_level(h_remaining - 1);
    }
    env_.add_event("RecursionExit", chosen->color);
    finished_by_recursion_ = true;
}

CpexStrategy::FrontyardResult CpexStrategy::explore_frontyard(const Fence& fence,
                                                              int h_remaining) {
    env_.add_event("PhaseChange", -1, "frontyard");
    if (!env_.navigate_to(env_.active_scene().start))
        throw std::runtime_error("explore_frontyard: cannot return to start");

    double budget = env_.config().C(h_remaining - 1) * fence.x;
    env_.add_event("RecursionEnter", -1, std::to_string(h_remaining - 1));
    FrontyardResult result = FrontyardResult::Explored;
    {
        SceneGuard scene_guard(env_, fence.frontyard);
        BudgetGuard budget_guard(env_, budget);
        try {
            run_level(h_remaining - 1);
        } catch (const BudgetExceededError& e) {
            if (e.limit != budget_guard.limit()) throw;  // an outer budget tripped
            result = FrontyardResult::PromotedSafe;
        }
    }
    env_.add_event("RecursionExit", -1);
    return result;
}

bool CpexStrategy::backyard_ray_walk(const Fence& fence, WindowSide side, double target_depth,
                                     double& progress, bool& touched_fence, bool& exhausted,
                                     const std::vector<Point>& curve) {
    const double diam = std::max(1.0, env_.active_scene().diameter());
    // Resume along the curve from the current progress.
    double walked_here = 0.0;
    double along = 0.0;
    (void)side;
    for (std::size_t i = 0; i + 1 < curve.size() && progress < target_depth; ++i) {
        double seg_len = dist(curve[i], curve[i + 1]);
        along += seg_len;
        if (along <= progress + 1e-12) continue;
        if (!env_.navigate_to(curve[i])) break;
        if (!env_.can_move_to(curve[i + 1])) {
            exhausted = true;
            break;
        }
        double before = env_.traveled();
        env_.move_to(curve[i + 1]);
        walked_here += env_.traveled() - before;
        progress = along;
        if (point_segment_distance(env_.position(), fence.segment) <= 1e-6 * diam) {
            touched_fence = true;
            return true;
        }
    }
    if (progress >= polyline_length({curve, false}) - 1e-9) exhausted = true;
    return walked_here > 0;
}

void CpexStrategy::explore_backyard(
    const std::vector<std::pair<Fence, std::vector<Color>>>& fences) {
    env_.add_event("PhaseChange", -1, "backyard");
    const Scene& scene = env_.active_scene();
    const double diam = std::max(1.0, scene.diameter());
    const double arc_tol = env_.config().arc_tolerance_scale * diam;

    struct RayPlan {
        const Fence* fence = nullptr;
        std::vector<Color> group;
        WindowSide side = WindowSide::Left;
        std::vector<Point> curve;
        double progress = 0.0;
        bool touched = false;
        bool exhausted = false;
    };
    std::vector<RayPlan> plans;
    for (const auto& [fence, group] : fences) {
        const auto& rec = records_.at(group.front());
        if (!rec.tour) continue;
        const auto& loop = rec.tour->loop.vertices;
        // Apex index within the loop: nearest loop vertex to the fence apex.
        std::size_t apex_idx = 0;
        double bd = kInf;
        for (std::size_t i = 0; i < loop.size(); ++i)
            if (dist(loop[i], fence.apex) < bd) {
                bd = dist(loop[i], fence.apex);
                apex_idx = i;
            }
        Polyline left_chain, right_chain;
        for (std::size_t i = 0; i <= apex_idx; ++i) left_chain.vertices.push_back(loop[i]);
        right_chain.vertices.push_back(loop[0]);
        for (std::size_t i = loop.size(); i-- > apex_idx;) right_chain.vertices.push_back(loop[i]);

        for (WindowSide side : {WindowSide::Left, WindowSide::Right}) {
            const Polyline& chain = (side == WindowSide::Left) ? left_chain : right_chain;
            RayPlan plan;
            plan.fence = &fence;
            plan.group = group;
            plan.side = side;
            if (chain.vertices.size() >= 2) {
                AngleHullCurve hull = angle_hull(scene, chain, side, arc_tol);
                plan.curve = hull.curve.vertices;
            } else {
                plan.curve = chain.vertices;
            }
            // Finish with a semicircle approach to the apex.
            if (!plan.curve.empty()) {
                auto arc = semicircle_arc(plan.curve.back(), fence.apex, side, arc_tol);
                plan.curve.insert(plan.curve.end(), arc.begin(), arc.end());
            }
            plans.push_back(std::move(plan));
        }
    }
    if (plans.empty()) return;

    auto backyard_done = [&]() {
        for (const auto& w : env_.knowledge().windows()) {
            if (w.resolved) continue;
            for (const auto& [fence, group] : fences) {
                (void)group;
                if (point_in_ring(w.probe, fence.backyard.outer)) return false;
            }
        }
        return true;
    };

    std::vector<SearchRay> rays;
    for (std::size_t i = 0; i < plans.size(); ++i) {
        SearchRay r;
        r.id = static_cast<int>(i);
        r.advance = [&, i](double depth) {
            ProbeResult pr;
            RayPlan& plan = plans[i];
            double before = env_.traveled();
            if (backyard_done()) {
                pr.found = true;
                pr.found_depth = plan.progress;
                return pr;
            }
            backyard_ray_walk(*plan.fence, plan.side, depth, plan.progress, plan.touched,
                              plan.exhausted, plan.curve);
            pr.walked = env_.traveled() - before;
            pr.found = backyard_done();
            pr.found_depth = plan.progress;
            pr.exhausted = plan.exhausted;
            // Both fence sides touched promotes the whole group.
            if (plan.touched) {
                bool other_side = false;
                for (const auto& p : plans)
                    if (p.fence == plan.fence && p.side != plan.side && p.touched)
                        other_side = true;
                if (other_side) pr.found = true;
            }
            return pr;
        };
        rays.push_back(std::move(r));
    }

    double unit = env_.config().unit_scale * diam;
    double perimeter = polyline_length(scene.outer);
    SearchOptions opt;
    opt.depth_cap = env_.config().depth_cap_perimeters * std::max(perimeter, diam);
    if (rays.size() == 2)
        cow_path(std::move(rays[0]), std::move(rays[1]), unit, opt);
    else
        star_search(std::move(rays), static_cast<int>(rays.size()), unit, opt);

    // Promotion when a fence was touched on both sides.
    for (const auto& [fence, group] : fences) {
        bool left = false, right = false;
        for (const auto& p : plans)
            if (p.fence == &fence && p.touched) (p.side == WindowSide::Left ? left : right) = true;
        if (left && right) {
            for (Color c : group) {
                records_[c].status = HoleStatus::Safe;
                env_.add_event("Classified", c, "safe-fence-touched");
            }
            explore_safe(records_[group.front()], current_h_);
            return;
        }
    }

    // Final sweep of the remaining right-side list without doubling.
    sweep_remaining_windows();
}

void CpexStrategy::sweep_remaining_windows() {
    int guard = 0;
    while (++guard < 5000) {
        const KnownWindow* w = nearest_unresolved_window(env_);
        if (!w) return;
        if (!visit_window(env_, *w)) {
            for (auto& kw : env_.knowledge().windows())
                if (kw.id == w->id) kw.resolved = true;
        }
        env_.observe();
    }
    throw std::runtime_error("sweep_remaining_windows: did not converge");
}

void CpexStrategy::mop_up_coverage() {
    Knowledge& k = env_.knowledge();
    int guard = 0;
    while (!k.grid().complete() && ++guard < 4000) {
        auto missing = k.grid().first_uncovered();
        if (!missing) return;
        // Find a seen vantage from which the missing cell is visible.
        VisibilityPolygon vp = visibility_polygon(k.scene(), *missing);
        const CoverageGrid& g = k.grid();
        Point best{};
        double best_d = kInf;
        int x_lo = std::max(0, static_cast<int>((vp.bbox.min_x - g.box.min_x) / g.cell) - 1);
        int x_hi = std::min(g.nx - 1, static_cast<int>((vp.bbox.max_x - g.box.min_x) / g.cell) + 1);
        int y_lo = std::max(0, static_cast<int>((vp.bbox.min_y - g.box.min_y) / g.cell) - 1);
        int y_hi = std::min(g.ny - 1, static_cast<int>((vp.bbox.max_y - g.box.min_y) / g.cell) + 1);
        for (int iy = y_lo; iy <= y_hi; ++iy)
            for (int ix = x_lo; ix <= x_hi; ++ix) {
                int i = g.index(ix, iy);
                if (!g.free_cell[i] || !g.covered[i]) continue;
                Point c = g.center(ix, iy);
                if (!vp.contains(c, 0.0)) continue;
                double d = dist(c, *missing);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
        if (best_d == kInf) {
            // No covered vantage yet; chase frontiers and retry.
            const KnownWindow* w = nearest_unresolved_window(env_);
            if (!w) throw std::runtime_error("mop_up_coverage: unreachable free-space cell");
            visit_window(env_, *w);
            continue;
        }
        if (!env_.navigate_to(best))
            throw std::runtime_error("mop_up_coverage: vantage unroutable");
        env_.observe();
        if (!k.grid().covered_at(*missing)) {
            // Cell center grazes geometry; a direct visit settles it.
            if (env_.can_move_to(*missing)) env_.move_to(*missing);
            else
                for (auto& kw : k.windows())
                    if (!kw.resolved) visit_window(env_, kw);
        }
    }
}

}  // namespace cpex
