#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "cpex/strategy.hpp"
#include "json.hpp"

namespace cpex {

double StrategyConfig::C(int h) const {
    if (!competitive_table.empty()) {
        if (h < static_cast<int>(competitive_table.size())) return competitive_table[h];
        return competitive_table.back();
    }
    if (h <= 0) return c0;
    double v = 1.0;
    for (int k = 2; k <= h + 22; ++k) {
        v *= k;
        if (v > 1e300) return 1e300;
    }
    return v;
}

std::string trace_to_json(const Trace& t) {
    nlohmann::json j;
    j["path"] = nlohmann::json::array();
    for (const auto& p : t.path.vertices) j["path"].push_back({p.x, p.y});
    j["events"] = nlohmann::json::array();
    for (const auto& e : t.events) {
        nlohmann::json ev;
        ev["at_length"] = e.at_length;
        ev["kind"] = e.kind;
        if (e.color >= 0) ev["color"] = e.color;
        if (!e.detail.empty()) ev["detail"] = e.detail;
        j["events"].push_back(ev);
    }
    j["total"] = t.total;
    return j.dump(2);
}

// ---------------------------------------------------------------------------
// Knowledge
// ---------------------------------------------------------------------------

Knowledge::Knowledge(const Scene& scene, const StrategyConfig& cfg)
    : scene_(&scene), cfg_(&cfg), grid_(make_coverage_grid(scene, cfg.coverage_resolution)) {
    probe_offset_ = std::max(1e-6 * std::max(1.0, scene.diameter()), 4.0 * kEpsGeom);
}

std::pair<long long, long long> Knowledge::key(const Point& p) const {
    double q = 1e-9 * std::max(1.0, scene_->diameter());
    return {static_cast<long long>(std::llround(p.x / q)),
            static_cast<long long>(std::llround(p.y / q))};
}

bool Knowledge::has_observation_at(const Point& p) const {
    return viewpoint_index_.count(key(p)) > 0;
}

int Knowledge::observation_at(const Point& p) const {
    auto it = viewpoint_index_.find(key(p));
    return it == viewpoint_index_.end() ? -1 : it->second;
}

int Knowledge::add_observation(const Point& viewpoint, VisibilityPolygon vp) {
    auto k = key(viewpoint);
    auto it = viewpoint_index_.find(k);
    if (it != viewpoint_index_.end()) return it->second;

    int idx = static_cast<int>(polygons_.size());
    mark_visible_parallel(grid_, vp);

    // Hop edges to every earlier viewpoint this polygon contains.
    hop_adj_.emplace_back();
    for (int j = 0; j < idx; ++j) {
        bool linked = vp.contains(viewpoints_[j], probe_offset_) ||
                      polygons_[j].contains(viewpoint, probe_offset_);
        if (linked) {
            double w = dist(viewpoint, viewpoints_[j]);
            hop_adj_[idx].push_back({j, w});
            hop_adj_[j].push_back({idx, w});
        }
    }

    // Frontier bookkeeping: resolve old windows this polygon reveals, then
    // append the new polygon's windows.
    for (auto& kw : windows_) {
        if (kw.resolved) continue;
        if (vp.contains(kw.probe, 0.0)) kw.resolved = true;
    }
    for (const auto& w : vp.windows) {
        KnownWindow kw;
        kw.id = next_window_id_++;
        kw.origin = idx;
        kw.window = w;
        Point mid = w.chord.midpoint();
        Point away = normalized(perp(w.chord.b - w.chord.a));
        // Probe on the unseen side of the chord: the side away from the viewpoint.
        if (dot(away, mid - viewpoint) < 0) away = away * -1.0;
        kw.probe = mid + away * probe_offset_;
        kw.resolved = !in_free_space(*scene_, kw.probe);
        for (const auto& poly : polygons_)
            if (!kw.resolved && poly.contains(kw.probe, 0.0)) kw.resolved = true;
        windows_.push_back(kw);
    }

    for (const auto& tag : vp.edge_tags)
        if (tag.kind == EdgeTag::Kind::Hole &&
            std::find(seen_colors_.begin(), seen_colors_.end(), tag.color) == seen_colors_.end())
            seen_colors_.push_back(tag.color);

    polygons_.push_back(std::move(vp));
    viewpoints_.push_back(viewpoint);
    viewpoint_index_[k] = idx;
    return idx;
}

bool Knowledge::point_known(const Point& p) const {
    for (const auto& poly : polygons_)
        if (poly.contains(p, kEpsGeom)) return true;
    return false;
}

std::vector<Point> Knowledge::route(const Point& from, const Point& to) const {
    const int n = static_cast<int>(viewpoints_.size());
    // Entry nodes: all observations whose polygon contains the endpoint.
    std::vector<int> from_nodes, to_nodes;
    for (int i = 0; i < n; ++i) {
        if (polygons_[i].contains(from, probe_offset_)) from_nodes.push_back(i);
        if (polygons_[i].contains(to, probe_offset_)) to_nodes.push_back(i);
    }
    if (from_nodes.empty() || to_nodes.empty()) return {};

    struct Item {
        double d;
        int v;
        bool operator>(const Item& o) const { return d > o.d; }
    };
    std::vector<double> dist_v(n, std::numeric_limits<double>::infinity());
    std::vector<int> parent(n, -1);
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    for (int i : from_nodes) {
        dist_v[i] = dist(from, viewpoints_[i]);
        pq.push({dist_v[i], i});
    }
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist_v[u]) continue;
        for (auto [v, w] : hop_adj_[u])
            if (d + w < dist_v[v]) {
                dist_v[v] = d + w;
                parent[v] = u;
                pq.push({dist_v[v], v});
            }
    }
    double best = std::numeric_limits<double>::infinity();
    int best_node = -1;
    for (int i : to_nodes) {
        double total = dist_v[i] + dist(viewpoints_[i], to);
        if (total < best) {
            best = total;
            best_node = i;
        }
    }
    if (best_node < 0) return {};
    std::vector<Point> hops;
    for (int v = best_node; v != -1; v = parent[v]) hops.push_back(viewpoints_[v]);
    std::reverse(hops.begin(), hops.end());
    hops.push_back(to);
    return hops;
}

double Knowledge::route_length(const Point& from, const Point& to) const {
    auto hops = route(from, to);
    if (hops.empty()) return std::numeric_limits<double>::infinity();
    double total = dist(from, hops.front());
    for (std::size_t i = 0; i + 1 < hops.size(); ++i) total += dist(hops[i], hops[i + 1]);
    return total;
}

std::vector<double> Knowledge::viewpoint_distances(const Point& from) const {
    const int n = static_cast<int>(viewpoints_.size());
    std::vector<double> dist_v(n, std::numeric_limits<double>::infinity());
    struct Item {
        double d;
        int v;
        bool operator>(const Item& o) const { return d > o.d; }
    };
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    for (int i = 0; i < n; ++i)
        if (polygons_[i].contains(from, probe_offset_)) {
            dist_v[i] = dist(from, viewpoints_[i]);
            pq.push({dist_v[i], i});
        }
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist_v[u]) continue;
        for (auto [v, w] : hop_adj_[u])
            if (d + w < dist_v[v]) {
                dist_v[v] = d + w;
                pq.push({dist_v[v], v});
            }
    }
    return dist_v;
}

// ---------------------------------------------------------------------------
// Environment
// ---------------------------------------------------------------------------

Environment::Environment(Scene scene, StrategyConfig cfg) : cfg_(std::move(cfg)) {
    auto bad = validate_scene(scene);
    if (!bad.empty()) throw std::invalid_argument("environment: invalid scene: " + bad.front());
    scenes_.push_back(std::make_unique<Scene>(std::move(scene)));
    levels_.push_back(std::make_unique<Knowledge>(*scenes_.back(), cfg_));
    position_ = scenes_.back()->start;
    trace_.path.vertices.push_back(position_);
    observe();
}

void Environment::add_event(const std::string& kind, int color, const std::string& detail) {
    trace_.events.push_back({trace_.total, kind, color, detail});
}

const VisibilityPolygon& Environment::observe() {
    Knowledge& k = knowledge();
    int idx = k.observation_at(position_);
    if (idx < 0) {
        VisibilityPolygon vp = visibility_polygon(k.scene(), position_);
        idx = k.add_observation(position_, std::move(vp));
        // Parent grids benefit from every observation made deeper down.
        for (std::size_t l = 0; l + 1 < levels_.size(); ++l)
            mark_visible_parallel(levels_[l]->grid_, k.polygons()[idx]);
        log_.push_back({trace_.path.vertices.size() - 1, k.polygons()[idx]});
    }
    last_observation_ = idx;
    return k.polygons()[idx];
}

void Environment::check_budget(double next_leg) {
    for (double lim : budget_limits_)
        if (trace_.total + next_leg > lim) throw BudgetExceededError{lim};
}

bool Environment::can_move_to(const Point& q) const {
    const Knowledge& k = knowledge();
    if (last_observation_ >= 0 && k.polygons()[last_observation_].contains(q, kEpsGeom))
        return true;
    if (!in_free_space(k.scene(), q)) return false;
    return sees(k.scene(), position_, q);
}

void Environment::move_to(const Point& q) {
    if (dist(position_, q) == 0.0) return;
    if (!can_move_to(q)) throw std::runtime_error("environment: move target not visible");
    check_budget(dist(position_, q));
    trace_.total += dist(position_, q);
    position_ = q;
    trace_.path.vertices.push_back(q);
    observe();
}

bool Environment::navigate_to(const Point& target) {
    if (dist(position_, target) == 0.0) return true;
    if (can_move_to(target)) {
        move_to(target);
        return true;
    }
    auto hops = knowledge().route(position_, target);
    if (hops.empty()) return false;
    for (const auto& h : hops) move_to(h);
    return true;
}

double Environment::route_length_to(const Point& target) const {
    if (dist(position_, target) == 0.0) return 0.0;
    return knowledge().route_length(position_, target);
}

double Environment::walk(const std::vector<Point>& pts, const std::function<bool()>& stop_when) {
    double walked = 0.0;
    for (const auto& p : pts) {
        if (stop_when && stop_when()) break;
        if (dist(position_, p) == 0.0) continue;
        if (!can_move_to(p)) break;
        double leg = dist(position_, p);
        move_to(p);
        walked += leg;
    }
    return walked;
}

void Environment::push_scene(Scene sub) {
    auto bad = validate_scene(sub);
    if (!bad.empty())
        throw std::runtime_error("environment: invalid sub-scene: " + bad.front());
    scenes_.push_back(std::make_unique<Scene>(std::move(sub)));
    levels_.push_back(std::make_unique<Knowledge>(*scenes_.back(), cfg_));
    last_observation_ = -1;
    observe();
}

void Environment::pop_scene() {
    if (levels_.size() <= 1) throw std::logic_error("environment: no sub-scene to pop");
    auto child = std::move(levels_.back());
    levels_.pop_back();
    scenes_.pop_back();
    // Child observations remain valid (smaller) observations in the parent.
    Knowledge& parent = *levels_.back();
    for (std::size_t i = 0; i < child->polygons().size(); ++i)
        parent.add_observation(child->viewpoints()[i], child->polygons()[i]);
    last_observation_ = parent.observation_at(position_);
    if (last_observation_ < 0) {
        // The position may sit on the removed cut; snap an observation here.
        observe();
    }
}

double Environment::push_budget(double additional) {
    budget_limits_.push_back(trace_.total + additional);
    return budget_limits_.back();
}

void Environment::pop_budget() {
    if (!budget_limits_.empty()) budget_limits_.pop_back();
}

bool trace_moves_legal(const Environment& env) {
    // Replay the trace against the chronological observation log: every
    // sampled point of leg i must lie inside a polygon observed at a trace
    // vertex <= i.
    const auto& path = env.trace().path.vertices;
    const auto& log = env.observation_log();
    const double tol = 1e-7 * std::max(1.0, env.true_scene().diameter());
    std::size_t next_obs = 0;
    std::vector<const VisibilityPolygon*> seen;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        while (next_obs < log.size() && log[next_obs].path_index <= i)
            seen.push_back(&log[next_obs++].polygon);
        Segment leg{path[i], path[i + 1]};
        int samples = std::max(2, static_cast<int>(leg.length() / tol * 1e-3) + 1);
        samples = std::min(samples, 64);
        for (int t = 0; t <= samples; ++t) {
            Point q = leg.at(static_cast<double>(t) / samples);
            bool inside = false;
            for (auto it = seen.rbegin(); it != seen.rend(); ++it)
                if ((*it)->contains(q, tol)) {
                    inside = true;
                    break;
                }
            if (!inside) return false;
        }
    }
    return true;
}

}  // namespace cpex
