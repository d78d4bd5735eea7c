#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "cpex/geodesic.hpp"

namespace cpex {

// The right-angle hull of a chain equals the union of the Thales discs over
// all vertex pairs: for fixed x, (p-x).(q-x) is bilinear in (p,q), so its
// minimum over chain points is attained at a vertex pair. The hull boundary
// on one side is therefore a run of circular arcs of that disc union.

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

struct Disc {
    Point c;
    double r;
};

struct Arc {
    int disc;
    double a0, a1;  // ccw from a0 to a1, a1 > a0
};

double normalize_angle(double a) {
    while (a < 0) a += kTwoPi;
    while (a >= kTwoPi) a -= kTwoPi;
    return a;
}

// Angular intervals of disc d's boundary covered by disc e.
std::vector<std::pair<double, double>> covered_by(const Disc& d, const Disc& e) {
    double D = dist(d.c, e.c);
    if (D >= d.r + e.r) return {};
    if (D + d.r <= e.r) return {{0.0, kTwoPi}};
    if (D + e.r <= d.r) return {};
    double cosb = (D * D + d.r * d.r - e.r * e.r) / (2.0 * D * d.r);
    cosb = std::clamp(cosb, -1.0, 1.0);
    double beta = std::acos(cosb);
    double phi = std::atan2(e.c.y - d.c.y, e.c.x - d.c.x);
    double lo = normalize_angle(phi - beta);
    double hi = lo + 2.0 * beta;
    if (hi <= kTwoPi) return {{lo, hi}};
    return {{lo, kTwoPi}, {0.0, hi - kTwoPi}};
}

Point on_disc(const Disc& d, double angle) {
    return {d.c.x + d.r * std::cos(angle), d.c.y + d.r * std::sin(angle)};
}

}  // namespace

AngleHullCurve angle_hull(const Scene& s, const Polyline& chain, WindowSide side,
                          double arc_tolerance) {
    AngleHullCurve out;
    out.base_chain = chain;

    std::vector<Point> pts;
    for (const auto& p : chain.vertices)
        if (pts.empty() || dist(pts.back(), p) > 0) pts.push_back(p);
    if (pts.size() < 2) {
        out.curve.vertices = pts;
        return out;
    }

    std::vector<Disc> discs;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            discs.push_back({Segment{pts[i], pts[j]}.midpoint(), dist(pts[i], pts[j]) / 2.0});
    // Drop discs contained in bigger ones (ties keep the first copy).
    std::vector<Disc> kept;
    for (std::size_t i = 0; i < discs.size(); ++i) {
        bool inside = false;
        for (std::size_t j = 0; j < discs.size() && !inside; ++j) {
            if (i == j) continue;
            double d = dist(discs[i].c, discs[j].c);
            if (d == 0.0 && discs[i].r == discs[j].r) {
                inside = j < i;
            } else if (d + discs[i].r <= discs[j].r + 1e-12 * discs[j].r) {
                inside = true;
            }
        }
        if (!inside) kept.push_back(discs[i]);
    }
    discs = kept;

    // Boundary arcs of the disc union.
    std::vector<Arc> arcs;
    for (int di = 0; di < static_cast<int>(discs.size()); ++di) {
        std::vector<std::pair<double, double>> cov;
        bool gone = false;
        for (int e = 0; e < static_cast<int>(discs.size()) && !gone; ++e) {
            if (e == di) continue;
            for (auto iv : covered_by(discs[di], discs[e])) {
                if (iv.second - iv.first >= kTwoPi - 1e-15) gone = true;
                cov.push_back(iv);
            }
        }
        if (gone) continue;
        std::sort(cov.begin(), cov.end());
        double cursor = 0.0;
        for (const auto& iv : cov) {
            if (iv.first > cursor + 1e-12) arcs.push_back({di, cursor, iv.first});
            cursor = std::max(cursor, iv.second);
        }
        if (cursor < kTwoPi - 1e-12) arcs.push_back({di, cursor, kTwoPi});
    }
    if (arcs.empty()) {
        out.curve.vertices = pts;
        out.length = polyline_length(out.curve);
        return out;
    }

    // Discretize each arc and stitch arcs into closed loops by endpoints.
    const double diam = std::max({1.0, s.diameter()});
    const double snap = 1e-7 * diam;
    struct Piece {
        std::vector<Point> pts;
        bool used = false;
    };
    std::vector<Piece> pieces;
    for (const auto& arc : arcs) {
        const Disc& d = discs[arc.disc];
        double span = arc.a1 - arc.a0;
        int steps = 1;
        if (d.r > arc_tolerance)
            steps = std::max(1, static_cast<int>(
                                    std::ceil(span / (2.0 * std::acos(std::max(
                                                          0.0, 1.0 - arc_tolerance / d.r))))));
        Piece piece;
        for (int k = 0; k <= steps; ++k)
            piece.pts.push_back(on_disc(d, arc.a0 + span * k / steps));
        pieces.push_back(std::move(piece));
    }

    auto near = [&](const Point& a, const Point& b) { return dist(a, b) <= snap; };
    std::vector<std::vector<Point>> loops;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (pieces[i].used) continue;
        pieces[i].used = true;
        std::vector<Point> loop = pieces[i].pts;
        bool extended = true;
        while (extended && !near(loop.front(), loop.back())) {
            extended = false;
            for (auto& cand : pieces) {
                if (cand.used) continue;
                if (near(loop.back(), cand.pts.front())) {
                    loop.insert(loop.end(), cand.pts.begin() + 1, cand.pts.end());
                } else if (near(loop.back(), cand.pts.back())) {
                    loop.insert(loop.end(), cand.pts.rbegin() + 1, cand.pts.rend());
                } else {
                    continue;
                }
                cand.used = true;
                extended = true;
                break;
            }
        }
        loops.push_back(std::move(loop));
    }

    // Outer boundary of the union = loop with the largest absolute area.
    std::size_t best_loop = 0;
    double best_area = -1.0;
    for (std::size_t i = 0; i < loops.size(); ++i) {
        Polyline pl;
        pl.closed = true;
        pl.vertices = loops[i];
        double a = std::fabs(signed_area(pl));
        if (a > best_area) {
            best_area = a;
            best_loop = i;
        }
    }
    std::vector<Point>& loop = loops[best_loop];
    if (!loop.empty() && near(loop.front(), loop.back())) loop.pop_back();

    // Split the loop at the chain endpoints and keep the requested side.
    auto nearest_index = [&](const Point& target) {
        std::size_t best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < loop.size(); ++i)
            if (dist(loop[i], target) < bd) {
                bd = dist(loop[i], target);
                best = i;
            }
        return best;
    };
    std::size_t i0 = nearest_index(pts.front());
    std::size_t i1 = nearest_index(pts.back());

    auto extract = [&](std::size_t from, std::size_t to) {
        std::vector<Point> path;
        for (std::size_t i = from;; i = (i + 1) % loop.size()) {
            path.push_back(loop[i]);
            if (i == to) break;
        }
        return path;
    };
    std::vector<Point> path_a = extract(i0, i1);
    std::vector<Point> path_b = extract(i1, i0);
    std::reverse(path_b.begin(), path_b.end());

    auto side_score = [&](const std::vector<Point>& path) {
        double score = 0.0;
        for (const auto& q : path) {
            double bd = std::numeric_limits<double>::infinity();
            double sgn = 0.0;
            for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
                Segment seg{pts[i], pts[i + 1]};
                double d = point_segment_distance(q, seg);
                if (d < bd) {
                    bd = d;
                    sgn = cross(seg.b - seg.a, q - seg.a);
                }
            }
            score += (sgn > 0) ? 1.0 : (sgn < 0 ? -1.0 : 0.0);
        }
        return score;
    };
    double score_a = side_score(path_a), score_b = side_score(path_b);
    std::vector<Point> chosen;
    if (side == WindowSide::Left)
        chosen = (score_a >= score_b) ? path_a : path_b;
    else
        chosen = (score_a >= score_b) ? path_b : path_a;

    // Clip to free space; bridge clipped-out runs with geodesics.
    std::vector<Point> clipped;
    std::unique_ptr<VisGraph> graph;
    auto ensure_graph = [&]() {
        if (!graph) graph = std::make_unique<VisGraph>(s);
    };
    for (const auto& q : chosen) {
        if (in_free_space(s, q)) {
            if (!clipped.empty() && !sees(s, clipped.back(), q)) {
                ensure_graph();
                Polyline bridge = graph->path(clipped.back(), q);
                for (std::size_t i = 1; i < bridge.vertices.size(); ++i)
                    clipped.push_back(bridge.vertices[i]);
            } else {
                clipped.push_back(q);
            }
        }
    }
    if (clipped.empty()) clipped = pts;
    if (dist(clipped.front(), pts.front()) > snap) clipped.insert(clipped.begin(), pts.front());
    if (dist(clipped.back(), pts.back()) > snap) clipped.push_back(pts.back());

    out.curve.closed = false;
    out.curve.vertices = std::move(clipped);
    out.length = polyline_length(out.curve);
    return out;
}

}  // namespace cpex
