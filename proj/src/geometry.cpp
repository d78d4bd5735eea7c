#include "cpex/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace cpex {

// ---------------------------------------------------------------------------
// Adaptive-precision orientation, after Shewchuk's classic scheme: evaluate
// with doubles, compare against a running error bound, escalate to exact
// expansion arithmetic only when the fast result is inconclusive.
// ---------------------------------------------------------------------------

namespace {

struct PredicateConstants {
    double epsilon;
    double splitter;
    double resulterrbound;
    double ccwerrbound_a;
    double ccwerrbound_b;
    double ccwerrbound_c;

    PredicateConstants() {
        double half = 0.5;
        double check = 1.0, lastcheck;
        epsilon = 1.0;
        splitter = 1.0;
        bool every_other = true;
        do {
            lastcheck = check;
            epsilon *= half;
            if (every_other) splitter *= 2.0;
            every_other = !every_other;
            check = 1.0 + epsilon;
        } while (check != 1.0 && check != lastcheck);
        splitter += 1.0;
        resulterrbound = (3.0 + 8.0 * epsilon) * epsilon;
        ccwerrbound_a = (3.0 + 16.0 * epsilon) * epsilon;
        ccwerrbound_b = (2.0 + 12.0 * epsilon) * epsilon;
        ccwerrbound_c = (9.0 + 64.0 * epsilon) * epsilon * epsilon;
    }
};

const PredicateConstants kPred;

inline void two_sum(double a, double b, double& x, double& y) {
    x = a + b;
    double bvirt = x - a;
    double avirt = x - bvirt;
    double bround = b - bvirt;
    double around = a - avirt;
    y = around + bround;
}

inline void two_diff(double a, double b, double& x, double& y) {
    x = a - b;
    double bvirt = a - x;
    double avirt = x + bvirt;
    double bround = bvirt - b;
    double around = a - avirt;
    y = around + bround;
}

inline void two_diff_tail(double a, double b, double x, double& y) {
    double bvirt = a - x;
    double avirt = x + bvirt;
    double bround = bvirt - b;
    double around = a - avirt;
    y = around + bround;
}

inline void split(double a, double& hi, double& lo) {
    double c = kPred.splitter * a;
    double abig = c - a;
    hi = c - abig;
    lo = a - hi;
}

inline void two_product(double a, double b, double& x, double& y) {
    x = a * b;
    double ahi, alo, bhi, blo;
    split(a, ahi, alo);
    split(b, bhi, blo);
    double err1 = x - (ahi * bhi);
    double err2 = err1 - (alo * bhi);
    double err3 = err2 - (ahi * blo);
    y = (alo * blo) - err3;
}

inline void two_one_diff(double a1, double a0, double b, double& x2, double& x1, double& x0) {
    double i;
    two_diff(a0, b, i, x0);
    two_sum(a1, i, x2, x1);
}

inline void two_two_diff(double a1, double a0, double b1, double b0, double& x3, double& x2,
                         double& x1, double& x0) {
    double j, t;
    two_one_diff(a1, a0, b0, j, t, x0);
    two_one_diff(j, t, b1, x3, x2, x1);
}

int fast_expansion_sum_zeroelim(int elen, const double* e, int flen, const double* f, double* h) {
    double q, qnew, hh;
    double enow = e[0];
    double fnow = f[0];
    int eindex = 0, findex = 0;
    if ((fnow > enow) == (fnow > -enow)) {
        q = enow;
        enow = e[++eindex];
    } else {
        q = fnow;
        fnow = f[++findex];
    }
    int hindex = 0;
    if ((eindex < elen) && (findex < flen)) {
        if ((fnow > enow) == (fnow > -enow)) {
            // fast path valid: |q| dominates next term
            qnew = enow + q;
            hh = q - (qnew - enow);
            enow = e[++eindex];
        } else {
            qnew = fnow + q;
            hh = q - (qnew - fnow);
            fnow = f[++findex];
        }
        q = qnew;
        if (hh != 0.0) h[hindex++] = hh;
        while ((eindex < elen) && (findex < flen)) {
            if ((fnow > enow) == (fnow > -enow)) {
                two_sum(q, enow, qnew, hh);
                enow = e[++eindex];
            } else {
                two_sum(q, fnow, qnew, hh);
                fnow = f[++findex];
            }
            q = qnew;
            if (hh != 0.0) h[hindex++] = hh;
        }
    }
    while (eindex < elen) {
        two_sum(q, enow, qnew, hh);
        enow = e[++eindex];
        q = qnew;
        if (hh != 0.0) h[hindex++] = hh;
    }
    while (findex < flen) {
        two_sum(q, fnow, qnew, hh);
        fnow = f[++findex];
        q = qnew;
        if (hh != 0.0) h[hindex++] = hh;
    }
    if ((q != 0.0) || (hindex == 0)) h[hindex++] = q;
    return hindex;
}

double estimate(int elen, const double* e) {
    double q = e[0];
    for (int i = 1; i < elen; ++i) q += e[i];
    return q;
}

double orient2d_adapt(const Point& pa, const Point& pb, const Point& pc, double detsum) {
    double acx = pa.x - pc.x;
    double bcx = pb.x - pc.x;
    double acy = pa.y - pc.y;
    double bcy = pb.y - pc.y;

    double detleft, detlefttail, detright, detrighttail;
    two_product(acx, bcy, detleft, detlefttail);
    two_product(acy, bcx, detright, detrighttail);

    double b[4], b3;
    two_two_diff(detleft, detlefttail, detright, detrighttail, b3, b[2], b[1], b[0]);
    b[3] = b3;

    double det = estimate(4, b);
    double errbound = kPred.ccwerrbound_b * detsum;
    if (det >= errbound || -det >= errbound) return det;

    double acxtail, acytail, bcxtail, bcytail;
    two_diff_tail(pa.x, pc.x, acx, acxtail);
    two_diff_tail(pb.x, pc.x, bcx, bcxtail);
    two_diff_tail(pa.y, pc.y, acy, acytail);
    two_diff_tail(pb.y, pc.y, bcy, bcytail);
    if (acxtail == 0.0 && acytail == 0.0 && bcxtail == 0.0 && bcytail == 0.0) return det;

    errbound = kPred.ccwerrbound_c * detsum + kPred.resulterrbound * std::fabs(det);
    det += (acx * bcytail + bcy * acxtail) - (acy * bcxtail + bcx * acytail);
    if (det >= errbound || -det >= errbound) return det;

    double s1, s0, t1, t0, u[4], u3;
    double c1[8], c2[12], d[16];

    two_product(acxtail, bcy, s1, s0);
    two_product(acytail, bcx, t1, t0);
    two_two_diff(s1, s0, t1, t0, u3, u[2], u[1], u[0]);
    u[3] = u3;
    int c1len = fast_expansion_sum_zeroelim(4, b, 4, u, c1);

    two_product(acx, bcytail, s1, s0);
    two_product(acy, bcxtail, t1, t0);
    two_two_diff(s1, s0, t1, t0, u3, u[2], u[1], u[0]);
    u[3] = u3;
    int c2len = fast_expansion_sum_zeroelim(c1len, c1, 4, u, c2);

    two_product(acxtail, bcytail, s1, s0);
    two_product(acytail, bcxtail, t1, t0);
    two_two_diff(s1, s0, t1, t0, u3, u[2], u[1], u[0]);
    u[3] = u3;
    int dlen = fast_expansion_sum_zeroelim(c2len, c2, 4, u, d);

    return d[dlen - 1];
}

}  // namespace

double orient2d(const Point& pa, const Point& pb, const Point& pc) {
    double detleft = (pa.x - pc.x) * (pb.y - pc.y);
    double detright = (pa.y - pc.y) * (pb.x - pc.x);
    double det = detleft - detright;
    double detsum;

    if (detleft > 0.0) {
        if (detright <= 0.0) return det;
        detsum = detleft + detright;
    } else if (detleft < 0.0) {
        if (detright >= 0.0) return det;
        detsum = -detleft - detright;
    } else {
        return det;
    }
    double errbound = kPred.ccwerrbound_a * detsum;
    if (det >= errbound || -det >= errbound) return det;
    return orient2d_adapt(pa, pb, pc, detsum);
}

Orientation orientation(const Point& p, const Point& q, const Point& r) {
    double d = orient2d(p, q, r);
    if (d > 0) return Orientation::Left;
    if (d < 0) return Orientation::Right;
    return Orientation::Collinear;
}

// ---------------------------------------------------------------------------
// Segment primitives
// ---------------------------------------------------------------------------

SegmentIntersection segment_intersection(const Segment& a, const Segment& b) {
    if (a.length() == 0.0 || b.length() == 0.0)
        throw std::invalid_argument("segment_intersection: degenerate segment");

    SegmentIntersection out;
    double d1 = orient2d(b.a, b.b, a.a);
    double d2 = orient2d(b.a, b.b, a.b);
    double d3 = orient2d(a.a, a.b, b.a);
    double d4 = orient2d(a.a, a.b, b.b);

    if (d1 == 0 && d2 == 0 && d3 == 0 && d4 == 0) {
        // Collinear: project on the dominant axis.
        Point dir = a.b - a.a;
        auto param = [&](const Point& p) {
            return std::fabs(dir.x) >= std::fabs(dir.y) ? (p.x - a.a.x) / dir.x
                                                        : (p.y - a.a.y) / dir.y;
        };
        double t0 = 0.0, t1 = 1.0;
        double u0 = param(b.a), u1 = param(b.b);
        if (u0 > u1) std::swap(u0, u1);
        double lo = std::max(t0, u0), hi = std::min(t1, u1);
        if (lo > hi) return out;
        if (hi - lo < kEpsGeom / std::max(1.0, norm(dir))) {
            out.kind = SegmentIntersection::Kind::Point;
            out.p = a.at(lo);
            return out;
        }
        out.kind = SegmentIntersection::Kind::Overlap;
        out.overlap = {a.at(lo), a.at(hi)};
        return out;
    }

    if (((d1 > 0 && d2 > 0) || (d1 < 0 && d2 < 0)) || ((d3 > 0 && d4 > 0) || (d3 < 0 && d4 < 0)))
        return out;

    // Proper or touching intersection; parametric solve is fine since the
    // orientation filter already settled the classification.
    Point r = a.b - a.a, s = b.b - b.a;
    double denom = cross(r, s);
    double t;
    if (denom != 0.0) {
        t = cross(b.a - a.a, s) / denom;
    } else {
        // Touching at an endpoint with collinear pieces filtered above.
        t = (d1 == 0) ? 0.0 : 1.0;
    }
    t = std::clamp(t, 0.0, 1.0);
    out.kind = SegmentIntersection::Kind::Point;
    out.p = a.at(t);
    return out;
}

bool segments_intersect(const Segment& a, const Segment& b) {
    double d1 = orient2d(b.a, b.b, a.a);
    double d2 = orient2d(b.a, b.b, a.b);
    double d3 = orient2d(a.a, a.b, b.a);
    double d4 = orient2d(a.a, a.b, b.b);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    auto on_segment = [](const Segment& s, const Point& p) {
        return orient2d(s.a, s.b, p) == 0 && p.x >= std::min(s.a.x, s.b.x) &&
               p.x <= std::max(s.a.x, s.b.x) && p.y >= std::min(s.a.y, s.b.y) &&
               p.y <= std::max(s.a.y, s.b.y);
    };
    if (d1 == 0 && on_segment(b, a.a)) return true;
    if (d2 == 0 && on_segment(b, a.b)) return true;
    if (d3 == 0 && on_segment(a, b.a)) return true;
    if (d4 == 0 && on_segment(a, b.b)) return true;
    return false;
}

Point closest_point_on_segment(const Point& p, const Segment& s) {
    Point d = s.b - s.a;
    double len2 = dot(d, d);
    if (len2 == 0.0) return s.a;
    double t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
    return s.at(t);
}

double point_segment_distance(const Point& p, const Segment& s) {
    return dist(p, closest_point_on_segment(p, s));
}

std::optional<double> ray_segment_hit(const Point& origin, const Point& dir, const Segment& s) {
    Point v = s.b - s.a;
    double denom = cross(dir, v);
    if (denom == 0.0) {
        // Parallel; collinear overlap handled by picking the nearest endpoint.
        if (orient2d(origin, origin + dir, s.a) != 0) return std::nullopt;
        double ta = dot(s.a - origin, dir) / dot(dir, dir);
        double tb = dot(s.b - origin, dir) / dot(dir, dir);
        double t = std::min(ta < 0 ? std::numeric_limits<double>::infinity() : ta,
                            tb < 0 ? std::numeric_limits<double>::infinity() : tb);
        if (!std::isfinite(t)) return std::nullopt;
        return t;
    }
    double t = cross(s.a - origin, v) / denom;
    double u = cross(s.a - origin, dir) / denom;
    if (t < 0 || u < -1e-12 || u > 1.0 + 1e-12) return std::nullopt;
    return t;
}

// ---------------------------------------------------------------------------
// Polyline helpers
// ---------------------------------------------------------------------------

double polyline_length(const Polyline& p) {
    double total = 0.0;
    for (std::size_t i = 0; i < p.segment_count(); ++i) total += p.segment(i).length();
    return total;
}

double signed_area(const Polyline& p) {
    double twice = 0.0;
    const auto& v = p.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point& a = v[i];
        const Point& b = v[(i + 1) % v.size()];
        twice += cross(a, b);
    }
    return twice / 2.0;
}

BoundingBox bounding_box(const std::vector<Point>& pts) {
    BoundingBox bb;
    if (pts.empty()) return bb;
    bb = {pts[0].x, pts[0].y, pts[0].x, pts[0].y};
    for (const auto& p : pts) bb.expand(p);
    return bb;
}

bool point_in_ring(const Point& p, const Polyline& ring) {
    bool inside = false;
    const auto& v = ring.vertices;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        if ((v[i].y > p.y) != (v[j].y > p.y)) {
            double xint = v[j].x + (v[i].x - v[j].x) * (p.y - v[j].y) / (v[i].y - v[j].y);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

double winding_number(const Point& p, const Polyline& ring) {
    double total = 0.0;
    const auto& v = ring.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
        Point a = v[i] - p;
        Point b = v[(i + 1) % v.size()] - p;
        total += std::atan2(cross(a, b), dot(a, b));
    }
    return total / (2.0 * M_PI);
}

}  // namespace cpex
