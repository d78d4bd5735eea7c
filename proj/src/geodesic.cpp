#include "cpex/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace cpex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct QItem {
    double d;
    int node;
    bool operator>(const QItem& o) const { return d > o.d; }
};

// Dijkstra over an adjacency list with optional extra edges appended per node.
std::vector<double> dijkstra(const std::vector<std::vector<std::pair<int, double>>>& adj, int src,
                             std::vector<int>* parent = nullptr) {
    std::vector<double> dist(adj.size(), kInf);
    if (parent) parent->assign(adj.size(), -1);
    std::priority_queue<QItem, std::vector<QItem>, std::greater<QItem>> pq;
    dist[src] = 0.0;
    pq.push({0.0, src});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        for (auto [v, w] : adj[u]) {
            double nd = d + w;
            if (nd < dist[v]) {
                dist[v] = nd;
                if (parent) (*parent)[v] = u;
                pq.push({nd, v});
            }
        }
    }
    return dist;
}

}  // namespace

VisGraph::VisGraph(const Scene& s) : scene_(&s) {
    nodes_ = scene_vertices(s);
    adj_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        for (std::size_t j = i + 1; j < nodes_.size(); ++j) {
            if (dist(nodes_[i], nodes_[j]) == 0.0) continue;
            if (sees(s, nodes_[i], nodes_[j])) {
                double w = dist(nodes_[i], nodes_[j]);
                adj_[i].push_back({static_cast<int>(j), w});
                adj_[j].push_back({static_cast<int>(i), w});
            }
        }
}

Polyline VisGraph::path(const Point& a, const Point& b) const {
    Polyline out;
    out.closed = false;
    if (dist(a, b) == 0.0) {
        out.vertices = {a};
        return out;
    }
    if (sees(*scene_, a, b)) {
        out.vertices = {a, b};
        return out;
    }
    auto adj = adj_;
    int ia = static_cast<int>(nodes_.size());
    int ib = ia + 1;
    adj.resize(nodes_.size() + 2);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (dist(a, nodes_[i]) > 0 && sees(*scene_, a, nodes_[i])) {
            double w = dist(a, nodes_[i]);
            adj[ia].push_back({static_cast<int>(i), w});
            adj[i].push_back({ia, w});
        }
        if (dist(b, nodes_[i]) > 0 && sees(*scene_, b, nodes_[i])) {
            double w = dist(b, nodes_[i]);
            adj[ib].push_back({static_cast<int>(i), w});
            adj[i].push_back({ib, w});
        }
    }
    std::vector<int> parent;
    auto d = dijkstra(adj, ia, &parent);
    if (d[ib] == kInf) throw std::runtime_error("shortest_path: endpoints not connected");
    std::vector<Point> rev;
    for (int v = ib; v != -1; v = parent[v]) rev.push_back(v == ia ? a : (v == ib ? b : nodes_[v]));
    out.vertices.assign(rev.rbegin(), rev.rend());
    return out;
}

double VisGraph::distance(const Point& a, const Point& b) const {
    if (dist(a, b) == 0.0) return 0.0;
    if (sees(*scene_, a, b)) return dist(a, b);
    return polyline_length(path(a, b));
}

std::vector<double> VisGraph::distances_from(const Point& src,
                                             const std::vector<Point>& targets) const {
    auto adj = adj_;
    int is = static_cast<int>(nodes_.size());
    adj.resize(nodes_.size() + 1 + targets.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (dist(src, nodes_[i]) > 0 && sees(*scene_, src, nodes_[i])) {
            double w = dist(src, nodes_[i]);
            adj[is].push_back({static_cast<int>(i), w});
            adj[i].push_back({is, w});
        }
    for (std::size_t k = 0; k < targets.size(); ++k) {
        int it = is + 1 + static_cast<int>(k);
        if (dist(src, targets[k]) == 0.0) {
            adj[is].push_back({it, 0.0});
            continue;
        }
        if (sees(*scene_, src, targets[k]))
            adj[is].push_back({it, dist(src, targets[k])});
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (dist(targets[k], nodes_[i]) > 0 && sees(*scene_, targets[k], nodes_[i]))
                adj[i].push_back({it, dist(targets[k], nodes_[i])});
    }
    auto d = dijkstra(adj, is);
    std::vector<double> out(targets.size());
    for (std::size_t k = 0; k < targets.size(); ++k) out[k] = d[is + 1 + k];
    return out;
}

Polyline shortest_path(const Scene& s, const Point& a, const Point& b) {
    if (!in_free_space(s, a) || !in_free_space(s, b))
        throw std::invalid_argument("shortest_path: endpoint outside free space");
    VisGraph g(s);
    return g.path(a, b);
}

// ---------------------------------------------------------------------------
// Encircling tours via a branch cut: crossing counts of graph edges against a
// hole-to-outer cut polyline turn the homotopy constraint into levels of a
// small covering graph.
// ---------------------------------------------------------------------------

namespace {

Polyline build_cut(const VisGraph& g, const Hole& hole, int attempt) {
    const Scene& s = g.scene();
    const double diam = std::max(1.0, s.diameter());

    // Deterministic anchor: lexicographically least hole vertex.
    Point h0 = hole.boundary.vertices[0];
    for (const auto& v : hole.boundary.vertices)
        if (v.y < h0.y || (v.y == h0.y && v.x < h0.x)) h0 = v;

    // Geodesic to the nearest outer vertex keeps the cut inside free space.
    double best = kInf;
    Polyline path;
    for (const auto& ov : s.outer.vertices) {
        Polyline p = g.path(h0, ov);
        double len = polyline_length(p);
        if (len < best) {
            best = len;
            path = p;
        }
    }
    if (path.vertices.size() < 2) throw std::runtime_error("encircling_tour: no cut found");

    // Nudge interior bend vertices off the obstacles they wrap.
    double eps = (1e-7 + attempt * 3.7e-8) * diam;
    for (std::size_t i = 1; i + 1 < path.vertices.size(); ++i) {
        Point prev = path.vertices[i - 1], cur = path.vertices[i], next = path.vertices[i + 1];
        Point d = normalized(normalized(prev - cur) + normalized(next - cur));
        if (norm(d) < 1e-9) d = perp(normalized(next - prev));
        Point moved = cur + d * eps;
        if (point_location(s, moved).where == PointLocation::Interior) path.vertices[i] = moved;
    }
    // Extend the ends past the boundaries so no edge slips around them.
    Point d0 = normalized(path.vertices[0] - path.vertices[1]);
    Point d1 = normalized(path.vertices.back() - path.vertices[path.vertices.size() - 2]);
    path.vertices.front() = path.vertices.front() + d0 * (1e-5 * diam);
    path.vertices.back() = path.vertices.back() + d1 * (1e-5 * diam);
    return path;
}

// Signed crossing count of segment uv against the cut; +1 when passing from
// the right of the cut's travel direction to its left. Degenerate contact
// reports failure so the caller can retry with a perturbed cut.
bool crossings(const Segment& uv, const Polyline& cut, int& total) {
    total = 0;
    for (std::size_t i = 0; i + 1 < cut.vertices.size(); ++i) {
        Point ca = cut.vertices[i], cb = cut.vertices[i + 1];
        double d1 = orient2d(ca, cb, uv.a);
        double d2 = orient2d(ca, cb, uv.b);
        double d3 = orient2d(uv.a, uv.b, ca);
        double d4 = orient2d(uv.a, uv.b, cb);
        bool proper = ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
                      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
        if (proper) {
            total += (d1 < 0) ? 1 : -1;
            continue;
        }
        bool touching = (d1 == 0 || d2 == 0) ? segments_intersect({ca, cb}, uv)
                                             : (d3 == 0 || d4 == 0) && segments_intersect({ca, cb}, uv);
        if (touching) return false;
    }
    return true;
}

}  // namespace

EncirclingTour encircling_tour_impl(const VisGraph& g, Color hole_color) {
    const Scene& s = g.scene();
    const Hole* hole = s.hole_by_color(hole_color);
    if (!hole) throw std::invalid_argument("encircling_tour: no such hole");
    const double diam = std::max(1.0, s.diameter());

    // Graph nodes: scene vertices plus the start (merged when coincident).
    std::vector<Point> nodes = g.nodes_;
    int start_node = -1;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (dist(nodes[i], s.start) <= kEpsGeom * diam) start_node = static_cast<int>(i);
    std::vector<std::vector<std::pair<int, double>>> base = g.adj_;
    if (start_node < 0) {
        start_node = static_cast<int>(nodes.size());
        nodes.push_back(s.start);
        base.emplace_back();
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
            if (dist(s.start, nodes[i]) > 0 && sees(s, s.start, nodes[i])) {
                double w = dist(s.start, nodes[i]);
                base[start_node].push_back({static_cast<int>(i), w});
                base[i].push_back({start_node, w});
            }
    }

    const int V = static_cast<int>(nodes.size());
    constexpr int kMinLevel = -3, kMaxLevel = 4;
    const int L = kMaxLevel - kMinLevel + 1;
    const double area_delta = 1e-9;

    for (int attempt = 0; attempt < 6; ++attempt) {
        Polyline cut = build_cut(g, *hole, attempt);

        // Edge crossing counts; bail out to a retry on degenerate contact.
        bool degenerate = false;
        std::vector<std::vector<std::pair<int, int>>> crossing_of(V);  // (neighbor, crossings)
        for (int u = 0; u < V && !degenerate; ++u)
            for (auto [v, w] : base[u]) {
                (void)w;
                int c;
                if (!crossings({nodes[u], nodes[v]}, cut, c)) {
                    degenerate = true;
                    break;
                }
                crossing_of[u].push_back({v, c});
            }
        if (degenerate) continue;

        auto state = [&](int v, int level) { return (level - kMinLevel) * V + v; };
        std::vector<std::vector<std::pair<int, double>>> cover(static_cast<std::size_t>(V) * L);
        for (int u = 0; u < V; ++u)
            for (auto [v, c] : crossing_of[u]) {
                double len = dist(nodes[u], nodes[v]);
                // Area perturbation realizes the largest-area tie break.
                double w = len - area_delta * cross(nodes[u], nodes[v]) / 2.0;
                if (w < 0) w = 0;
                for (int l = kMinLevel; l <= kMaxLevel; ++l) {
                    int nl = l + c;
                    if (nl < kMinLevel || nl > kMaxLevel) continue;
                    cover[state(u, l)].push_back({state(v, nl), w});
                }
            }

        std::vector<int> parent;
        auto d = dijkstra(cover, state(start_node, 0), &parent);

        for (int target_level : {1, -1}) {
            int goal = state(start_node, target_level);
            if (d[goal] == kInf) continue;
            std::vector<Point> rev;
            for (int v = goal; v != -1; v = parent[v]) rev.push_back(nodes[v % V]);
            Polyline loop;
            loop.closed = true;
            loop.vertices.assign(rev.rbegin(), rev.rend() - 1);  // drop repeated start

            Point inside = ring_interior_point(hole->boundary);
            double wind = winding_number(inside, loop);
            if (std::fabs(wind - 1.0) > 0.25 && std::fabs(wind + 1.0) > 0.25) continue;
            if (wind < 0) continue;  // the mirrored family carries the inverted tie break

            EncirclingTour tour;
            tour.hole_color = hole_color;
            tour.loop = loop;
            tour.enclosed_area = signed_area(loop);
            for (std::size_t i = 1; i < loop.vertices.size(); ++i) tour.apex_indices.push_back(i);
            return tour;
        }
    }
    throw std::runtime_error("encircling_tour: failed after retries");
}

EncirclingTour encircling_tour(const VisGraph& g, Color hole_color) {
    return encircling_tour_impl(g, hole_color);
}

EncirclingTour encircling_tour(const Scene& s, Color hole_color) {
    VisGraph g(s);
    return encircling_tour_impl(g, hole_color);
}

// ---------------------------------------------------------------------------
// Lambda lower bound by candidate sampling
// ---------------------------------------------------------------------------

namespace {

struct ApexFrame {
    Point apex;
    Point prev, next;  // incident tour vertices
};

bool in_right_half_plane(const Point& a, const Point& b, const Point& q, double tol) {
    return orient2d(a, b, q) <= tol;
}

}  // namespace

std::pair<double, LambdaWitness> lambda_lower_bound(const VisGraph& g, const EncirclingTour& t,
                                                    int resolution) {
    const Scene& s = g.scene();
    const double diam = std::max(1e-12, s.diameter());
    const double side_tol = 1e-12 * diam * diam;
    const auto& loop = t.loop.vertices;
    const std::size_t n = loop.size();
    if (n < 3 || t.apex_indices.empty()) return {0.0, {}};

    // Shared grid candidates over the free space.
    int side_cells = std::max(2, static_cast<int>(std::floor(std::sqrt(double(resolution)))));
    BoundingBox bb = s.bbox();
    std::vector<Point> candidates;
    for (int iy = 0; iy < side_cells; ++iy)
        for (int ix = 0; ix < side_cells; ++ix) {
            Point p{bb.min_x + (ix + 0.5) * bb.width() / side_cells,
                    bb.min_y + (iy + 0.5) * bb.height() / side_cells};
            if (in_free_space(s, p)) candidates.push_back(p);
        }
    candidates.push_back(s.start);

    // Near-apex probes on the incident tour segments sharpen the minimum.
    std::vector<ApexFrame> frames;
    for (std::size_t k = 0; k < t.apex_indices.size(); ++k) {
        std::size_t i = t.apex_indices[k];
        ApexFrame f;
        f.apex = loop[i];
        f.prev = loop[(i + n - 1) % n];
        f.next = loop[(i + 1) % n];
        frames.push_back(f);
        for (double u : {1.0 / 1024, 1.0 / 64, 1.0 / 16, 1.0 / 4, 1.0 / 2}) {
            candidates.push_back(f.apex + (f.prev - f.apex) * u);
            candidates.push_back(f.apex + (f.next - f.apex) * u);
        }
    }

    std::vector<double> ds = g.distances_from(s.start, candidates);

    double lambda = 0.0;
    LambdaWitness best_witness;
    bool any = false;

    for (std::size_t k = 0; k < frames.size(); ++k) {
        const ApexFrame& f = frames[k];
        std::vector<int> left_set, right_set;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (ds[c] == kInf) continue;
            const Point& q = candidates[c];
            if (dist(q, f.apex) <= kEpsGeom * diam) continue;
            if (!sees(s, q, f.apex)) continue;
            if (in_right_half_plane(f.prev, f.apex, q, side_tol)) left_set.push_back(c);
            if (in_right_half_plane(f.apex, f.next, q, side_tol)) right_set.push_back(c);
        }
        if (left_set.empty() || right_set.empty()) continue;

        double best = kInf;
        int best_a = -1, best_b = -1;
        for (int a : left_set)
            for (int b : right_set) {
                double through_apex =
                    (a == b) ? 0.0 : dist(candidates[a], f.apex) + dist(f.apex, candidates[b]);
                double val = std::min(ds[a], ds[b]) + through_apex;
                if (val < best) {
                    best = val;
                    best_a = a;
                    best_b = b;
                }
            }
        // Straight connections can only help pairs already near the optimum.
        for (int a : left_set)
            for (int b : right_set) {
                if (a == b) continue;
                double lower = std::min(ds[a], ds[b]) + dist(candidates[a], candidates[b]);
                if (lower >= best) continue;
                if (sees(s, candidates[a], candidates[b])) {
                    best = lower;
                    best_a = a;
                    best_b = b;
                }
            }
        if (best_a < 0) continue;
        any = true;
        if (best > lambda) {
            lambda = best;
            best_witness.apex_index = k;
            best_witness.apex = f.apex;
            best_witness.q_left = candidates[best_a];
            best_witness.q_right = candidates[best_b];
            best_witness.arm_left = dist(candidates[best_a], f.apex);
            best_witness.arm_right = dist(candidates[best_b], f.apex);
            best_witness.value = best;
        }
    }
    if (!any) return {0.0, {}};
    return {lambda, best_witness};
}

std::pair<double, LambdaWitness> lambda_lower_bound(const Scene& s, const EncirclingTour& t,
                                                    int resolution) {
    VisGraph g(s);
    return lambda_lower_bound(g, t, resolution);
}

// ---------------------------------------------------------------------------

Polyline eulerian_safe_tour(const Scene& s, const EncirclingTour& t, const Polyline& b,
                            const Polyline& ref_tour) {
    const double diam = std::max(1.0, s.diameter());
    if (!b.vertices.empty() && dist(b.vertices.front(), s.start) > 1e-6 * diam)
        throw std::invalid_argument("eulerian_safe_tour: barrier must start at the scene start");

    Polyline out;
    out.closed = true;
    auto append = [&](const std::vector<Point>& pts) {
        for (const auto& p : pts) {
            if (!out.vertices.empty() && dist(out.vertices.back(), p) == 0.0) continue;
            out.vertices.push_back(p);
        }
    };
    auto loop_from_start = [&](const Polyline& loop) {
        std::vector<Point> seq = loop.vertices;
        seq.push_back(loop.vertices.front());  // expanded closed walk
        return seq;
    };

    for (int rep = 0; rep < 2; ++rep) {
        append(loop_from_start(t.loop));
        if (b.vertices.size() >= 2) {
            append(b.vertices);
            std::vector<Point> back(b.vertices.rbegin(), b.vertices.rend());
            append(back);
        }
        append(loop_from_start(ref_tour));
    }
    // Drop the final repeated start; the polyline closes implicitly.
    if (out.vertices.size() > 1 && dist(out.vertices.back(), out.vertices.front()) == 0.0)
        out.vertices.pop_back();
    return out;
}

}  // namespace cpex
