#pragma once

// Skew return maps on the region R, modeled as leaf-space x fiber:
// leaf coordinate u in [-1,1] (B- = [-1,0], B+ = [0,1], glued along the
// middle leaf l = {u = 0}), fiber coordinate y in [0,1].  The base map acts
// on leaves, the fiber contracts by mu per application with a per-branch
// offset.  Variant G is the theta-equivariant map, variant H the modified
// map with independently invariant halves.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "venice/branched1d.hpp"
#include "venice/common.hpp"

namespace venice::skew2d {

enum class Variant { G, H, Single };

struct Point {
    double u = 0.0;  // leaf
    double y = 0.0;  // fiber
};

inline Point theta(Point p) { return {-p.u, p.y}; }

struct SkewReturnMap {
    Variant variant = Variant::H;
    branched1d::BranchedIntervalMap plus;   // base on B+, internal [0,1] coords
    branched1d::BranchedIntervalMap minus;  // base on B-, conjugated by u -> -u
    double mu = 1.0 / 3.0;
    std::vector<double> offsets_plus;       // per plus-branch fiber offset
    std::vector<double> offsets_minus;

    double d_plus() const { return plus.d_star; }
    double d_minus() const { return -minus.d_star; }
    bool has_minus_half() const { return variant != Variant::Single; }
};

// Fiber offsets: all B+ offsets lie in [1/3, 2/3] so the fiber attractor of
// the plus half fills [1/2, 1]; the offset at the branch through the middle
// leaf is exactly 1/3, pinning the fixed point P at fiber 1/2.  The top
// offset backs off 2/3 by 1e-12 so images stay strictly interior.
inline std::vector<double> plus_offsets() { return {1.0 / 3.0, 0.5, 2.0 / 3.0 - 1e-12, 0.5}; }

// For variant H the minus-half offsets sit in (0, 1/3] (fiber attractor in
// [0.015, 1/2]), chain-overlapping so the attractor is an interval.  The cut
// branch offset is exactly 1/6 so the singular trace tops out at fiber 1/2
// (the top evolves by t -> t/3 + 1/3) and the halves meet only at P.
inline std::vector<double> minus_offsets_H() { return {1.0 / 3.0, 1.0 / 6.0, 0.01, 0.30}; }

inline SkewReturnMap default_G() {
    SkewReturnMap m;
    m.variant = Variant::G;
    m.plus = branched1d::default_f_plus();
    m.minus = branched1d::default_f_plus();  // odd extension, forced by (G1)
    m.offsets_plus = plus_offsets();
    m.offsets_minus = plus_offsets();        // theta-equivariance
    return m;
}

inline SkewReturnMap default_H() {
    SkewReturnMap m;
    m.variant = Variant::H;
    m.plus = branched1d::default_f_plus();
    m.minus = branched1d::default_f_minus_base();
    m.offsets_plus = plus_offsets();
    m.offsets_minus = minus_offsets_H();
    return m;
}

// Control configuration: one expanding branch system on a single interval,
// used as a transitive counterexample in the diagnostics.
inline SkewReturnMap default_single() {
    SkewReturnMap m;
    m.variant = Variant::Single;
    m.plus = branched1d::default_f_plus();
    m.minus = m.plus;
    m.offsets_plus = plus_offsets();
    m.offsets_minus = m.offsets_plus;
    return m;
}

// ---------------------------------------------------------------------------
// Pointwise action

struct LeafBranchRef {
    int half = +1;        // +1 = B+, -1 = B-
    int index = 0;        // branch index in the underlying 1D map
    double offset = 0.0;
};

inline LeafBranchRef branch_at(const SkewReturnMap& m, double u) {
    if (u == m.d_plus() || (m.has_minus_half() && u == m.d_minus()))
        throw SingularLeaf("leaf at a singular leaf d^+/d^-");
    if (u >= 0.0 || !m.has_minus_half()) {
        if (u < 0.0 || u > 1.0) throw DomainError("leaf outside the region");
        for (int i = 0; i < int(m.plus.branches.size()); ++i)
            if (m.plus.branches[size_t(i)].domain.contains(u))
                return {+1, i, m.offsets_plus[size_t(i)]};
        throw DomainError("leaf not in any branch domain");
    }
    double x = -u;
    if (x > 1.0) throw DomainError("leaf outside the region");
    for (int i = 0; i < int(m.minus.branches.size()); ++i)
        if (m.minus.branches[size_t(i)].domain.contains(x))
            return {-1, i, m.offsets_minus[size_t(i)]};
    throw DomainError("leaf not in any branch domain");
}

inline double base_eval(const SkewReturnMap& m, double u) {
    LeafBranchRef b = branch_at(m, u);
    if (b.half > 0) return m.plus.branches[size_t(b.index)].func(u);
    return -m.minus.branches[size_t(b.index)].func(-u);
}

inline double base_derivative(const SkewReturnMap& m, double u) {
    LeafBranchRef b = branch_at(m, u);
    const auto& br = (b.half > 0 ? m.plus : m.minus).branches[size_t(b.index)];
    return br.func.derivative()(b.half > 0 ? u : -u);
}

inline Point apply(const SkewReturnMap& m, Point p) {
    LeafBranchRef b = branch_at(m, p.u);
    double nu = b.half > 0 ? m.plus.branches[size_t(b.index)].func(p.u)
                           : -m.minus.branches[size_t(b.index)].func(-p.u);
    return {nu, m.mu * p.y + b.offset};
}

// Unique fixed point on the invariant middle leaf l.
inline Point fixed_point_P(const SkewReturnMap& m, const Tolerances& tol = {}) {
    double o = m.offsets_plus.at(0);  // branch through u = 0
    double y = 0.0;
    for (int it = 0; it < 200; ++it) {
        double ny = m.mu * y + o;
        if (std::abs(ny - y) <= 0.1 * tol.tol_fix) { y = ny; break; }
        y = ny;
    }
    return {0.0, y};
}

// ---------------------------------------------------------------------------
// Box sets

struct Box {
    double ulo = 0.0, uhi = 0.0, ylo = 0.0, yhi = 0.0;
    bool empty() const { return uhi < ulo || yhi < ylo; }
    double dist_linf(Point p) const {
        double du = p.u < ulo ? ulo - p.u : (p.u > uhi ? p.u - uhi : 0.0);
        double dy = p.y < ylo ? ylo - p.y : (p.y > yhi ? p.y - yhi : 0.0);
        return std::max(du, dy);
    }
};

struct BoxSet {
    std::vector<Box> boxes;
    int generation = 0;
};

namespace detail {

// Merge boxes that agree in one axis (within merge_tol) and overlap or touch
// in the other.  Only box-preserving unions are taken, so inflation per merge
// is bounded by merge_tol.
inline bool merge_pass_fiber(std::vector<Box>& v, double merge_tol) {
    std::sort(v.begin(), v.end(), [](const Box& a, const Box& b) {
        if (a.ylo != b.ylo) return a.ylo < b.ylo;
        if (a.yhi != b.yhi) return a.yhi < b.yhi;
        return a.ulo < b.ulo;
    });
    std::vector<Box> out;
    bool changed = false;
    for (const auto& b : v) {
        if (!out.empty()) {
            Box& last = out.back();
            if (std::abs(last.ylo - b.ylo) <= merge_tol &&
                std::abs(last.yhi - b.yhi) <= merge_tol &&
                b.ulo <= last.uhi + merge_tol) {
                last.uhi = std::max(last.uhi, b.uhi);
                last.ylo = std::min(last.ylo, b.ylo);
                last.yhi = std::max(last.yhi, b.yhi);
                changed = true;
                continue;
            }
        }
        out.push_back(b);
    }
    v.swap(out);
    return changed;
}

inline bool merge_pass_leaf(std::vector<Box>& v, double merge_tol) {
    std::sort(v.begin(), v.end(), [](const Box& a, const Box& b) {
        if (a.ulo != b.ulo) return a.ulo < b.ulo;
        if (a.uhi != b.uhi) return a.uhi < b.uhi;
        return a.ylo < b.ylo;
    });
    std::vector<Box> out;
    bool changed = false;
    for (const auto& b : v) {
        if (!out.empty()) {
            Box& last = out.back();
            if (std::abs(last.ulo - b.ulo) <= merge_tol &&
                std::abs(last.uhi - b.uhi) <= merge_tol &&
                b.ylo <= last.yhi + merge_tol) {
                last.yhi = std::max(last.yhi, b.yhi);
                last.ulo = std::min(last.ulo, b.ulo);
                last.uhi = std::max(last.uhi, b.uhi);
                changed = true;
                continue;
            }
        }
        out.push_back(b);
    }
    v.swap(out);
    return changed;
}

inline void absorb_contained(std::vector<Box>& v) {
    if (v.size() > 4000) return;
    std::vector<Box> out;
    for (size_t i = 0; i < v.size(); ++i) {
        bool contained = false;
        for (size_t j = 0; j < v.size() && !contained; ++j) {
            if (i == j) continue;
            const Box &a = v[i], &b = v[j];
            bool same = a.ulo == b.ulo && a.uhi == b.uhi && a.ylo == b.ylo && a.yhi == b.yhi;
            if (same && j < i) { contained = true; break; }
            if (!same && a.ulo >= b.ulo && a.uhi <= b.uhi && a.ylo >= b.ylo && a.yhi <= b.yhi)
                contained = true;
        }
        if (!contained) out.push_back(v[i]);
    }
    v.swap(out);
}

}  // namespace detail

inline void normalize(BoxSet& s, double merge_tol = 1e-9, size_t cap = 1'000'000) {
    auto& v = s.boxes;
    v.erase(std::remove_if(v.begin(), v.end(), [](const Box& b) { return b.empty(); }), v.end());
    double tol = merge_tol;
    for (int round = 0; round < 6; ++round) {
        bool c1 = true, c2 = true;
        for (int it = 0; it < 8 && (c1 || c2); ++it) {
            c1 = detail::merge_pass_fiber(v, tol);
            c2 = detail::merge_pass_leaf(v, tol);
        }
        detail::absorb_contained(v);
        if (v.size() <= cap) return;
        tol *= 100.0;  // coarsening fallback
    }
    if (v.size() > cap) throw BudgetExceeded("box set exceeds configured cap");
}

// One application of the skew map to a box set.
inline BoxSet apply_boxset(const SkewReturnMap& m, const BoxSet& s,
                           double merge_tol = 1e-9, size_t cap = 1'000'000) {
    struct LeafPiece {
        double lo, hi;         // leaf-coordinate domain
        int half;
        const branched1d::Branch* br;
        double offset;
    };
    std::vector<LeafPiece> pieces;
    for (size_t i = 0; i < m.plus.branches.size(); ++i) {
        const auto& br = m.plus.branches[i];
        pieces.push_back({br.domain.lo, br.domain.hi, +1, &br, m.offsets_plus[i]});
    }
    if (m.has_minus_half()) {
        for (size_t i = 0; i < m.minus.branches.size(); ++i) {
            const auto& br = m.minus.branches[i];
            pieces.push_back({-br.domain.hi, -br.domain.lo, -1, &br, m.offsets_minus[i]});
        }
    }

    BoxSet out;
    out.generation = s.generation + 1;
    for (const auto& b : s.boxes) {
        for (const auto& pc : pieces) {
            double lo = std::max(b.ulo, pc.lo), hi = std::min(b.uhi, pc.hi);
            if (hi < lo) continue;
            double v1, v2;
            if (pc.half > 0) { v1 = pc.br->func(lo); v2 = pc.br->func(hi); }
            else { v1 = -pc.br->func(-lo); v2 = -pc.br->func(-hi); }
            Box nb;
            nb.ulo = std::min(v1, v2);
            nb.uhi = std::max(v1, v2);
            nb.ylo = m.mu * b.ylo + pc.offset;
            nb.yhi = m.mu * b.yhi + pc.offset;
            out.boxes.push_back(nb);
        }
    }
    normalize(out, merge_tol, cap);
    return out;
}

enum class Half { Plus, Minus };

// n-th generation approximation of A^half = Cl(cap_n H^n(H^half)).
inline BoxSet attractor_half(const SkewReturnMap& m, Half half, int n,
                             double merge_tol = 1e-9, size_t cap = 1'000'000) {
    BoxSet s;
    if (half == Half::Plus) s.boxes.push_back({0.0, 1.0, 0.0, 1.0});
    else s.boxes.push_back({-1.0, 0.0, 0.0, 1.0});
    for (int k = 0; k < n; ++k) s = apply_boxset(m, s, merge_tol, cap);
    return s;
}

// ---------------------------------------------------------------------------
// Set utilities (all distances in the L-infinity metric)

inline double point_dist(const BoxSet& s, Point p) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& b : s.boxes) d = std::min(d, b.dist_linf(p));
    return d;
}

inline std::vector<Point> sample_boxset(const BoxSet& s, double spacing, size_t cap = 2'000'000) {
    std::vector<Point> pts;
    for (const auto& b : s.boxes) {
        int nu = std::max(1, int(std::ceil((b.uhi - b.ulo) / spacing)));
        int ny = std::max(1, int(std::ceil((b.yhi - b.ylo) / spacing)));
        for (int i = 0; i <= nu; ++i)
            for (int j = 0; j <= ny; ++j) {
                pts.push_back({b.ulo + (b.uhi - b.ulo) * double(i) / double(nu),
                               b.ylo + (b.yhi - b.ylo) * double(j) / double(ny)});
                if (pts.size() > cap) throw BudgetExceeded("boxset sampling cap");
            }
    }
    return pts;
}

inline double hausdorff(const BoxSet& a, const BoxSet& b, double spacing) {
    double d = 0.0;
    for (const auto& p : sample_boxset(a, spacing)) d = std::max(d, point_dist(b, p));
    for (const auto& p : sample_boxset(b, spacing)) d = std::max(d, point_dist(a, p));
    return d;
}

inline void write_csv(const BoxSet& s, std::ostream& os) {
    os << "leaf_lo,leaf_hi,fiber_lo,fiber_hi,generation\n";
    for (const auto& b : s.boxes)
        os << b.ulo << ',' << b.uhi << ',' << b.ylo << ',' << b.yhi << ',' << s.generation << '\n';
}

// ---------------------------------------------------------------------------
// Class intersection

enum class IntersectKind { Point, SegmentClosure };

struct IntersectionReport {
    IntersectKind kind = IntersectKind::Point;
    double diameter = 0.0;
    bool contains_P = false;
    BoxSet cluster;            // points of the A+ approximation near A-
    int generation = 0;
    double eps = 0.0;
};

enum class SingularLeafId { DPlus, DMinus };

inline BoxSet singular_leaf_forward_closure(const SkewReturnMap& m, SingularLeafId which,
                                            int n, double merge_tol, size_t cap);

// Points of the discretized A+ approximation within eps (L-inf) of the A-
// approximation.  Exact on boxes: clip each A+ box against each eps-inflated
// A- box.  Each half is augmented with its singular-leaf forward closure: the
// exit strips of the singularity belong to the class but have no finite
// backward chain in the section map, so pure box iteration drops them.
inline IntersectionReport class_intersection(const SkewReturnMap& m, int n, double eps,
                                             const Tolerances& tol = {},
                                             double merge_tol = 1e-9,
                                             size_t cap = 1'000'000) {
    BoxSet ap = attractor_half(m, Half::Plus, n, merge_tol, cap);
    BoxSet am = attractor_half(m, Half::Minus, n, merge_tol, cap);
    for (const auto& b :
         singular_leaf_forward_closure(m, SingularLeafId::DPlus, n, merge_tol, cap).boxes)
        ap.boxes.push_back(b);
    if (m.has_minus_half())
        for (const auto& b :
             singular_leaf_forward_closure(m, SingularLeafId::DMinus, n, merge_tol, cap).boxes)
            am.boxes.push_back(b);
    normalize(ap, merge_tol, cap);
    normalize(am, merge_tol, cap);

    IntersectionReport rep;
    rep.generation = n;
    rep.eps = eps;
    rep.cluster.generation = n;
    for (const auto& p : ap.boxes) {
        for (const auto& q : am.boxes) {
            Box r;
            r.ulo = std::max(p.ulo, q.ulo - eps);
            r.uhi = std::min(p.uhi, q.uhi + eps);
            r.ylo = std::max(p.ylo, q.ylo - eps);
            r.yhi = std::min(p.yhi, q.yhi + eps);
            if (!r.empty()) rep.cluster.boxes.push_back(r);
        }
    }
    normalize(rep.cluster, merge_tol, cap);

    if (rep.cluster.boxes.empty()) {
        rep.diameter = 0.0;
        rep.contains_P = false;
        rep.kind = IntersectKind::Point;
        return rep;
    }
    double ulo = 1e300, uhi = -1e300, ylo = 1e300, yhi = -1e300;
    for (const auto& b : rep.cluster.boxes) {
        ulo = std::min(ulo, b.ulo); uhi = std::max(uhi, b.uhi);
        ylo = std::min(ylo, b.ylo); yhi = std::max(yhi, b.yhi);
    }
    rep.diameter = std::max(uhi - ulo, yhi - ylo);
    Point P = fixed_point_P(m, tol);
    rep.contains_P = point_dist(rep.cluster, P) <= 10.0 * tol.tol_fix;
    rep.kind = (rep.diameter <= 2.0 * std::pow(m.mu, n) + eps) ? IntersectKind::Point
                                                               : IntersectKind::SegmentClosure;
    return rep;
}

// ---------------------------------------------------------------------------
// Periodic orbits of the skew map

struct Orbit2D {
    std::vector<Point> cycle;
    int period = 0;
    double base_multiplier = 0.0;   // |prod of base derivatives| over one period
    double fiber_multiplier = 0.0;  // mu^period
    int half = +1;
};

inline std::vector<Orbit2D> periodic_points_2d(const SkewReturnMap& m, int n_max,
                                               const Tolerances& tol = {}) {
    std::vector<Orbit2D> orbits;
    std::map<long long, bool> seen;  // keyed by (half, orbit-min point) rounded

    auto process_half = [&](const branched1d::BranchedIntervalMap& base,
                            const std::vector<double>& offs, int half) {
        branched1d::detail::WordWalker w{base, tol};
        w.depth_max = n_max;
        w.on_point = [&](double x, int p) {
            int mp = branched1d::detail::minimal_period(base, x, p, tol);
            if (half < 0 && std::abs(x) <= tol.tol_root) return true;  // P counted on B+
            // orbit representative = min point of the cycle
            double rep = x, z = x;
            for (int i = 0; i < mp; ++i) {
                const auto* br = branched1d::find_branch(base, z);
                if (!br) return true;
                z = br->func(z);
                rep = std::min(rep, z);
            }
            long long key = (half > 0 ? 1LL : -1LL) * llround(rep * 1e8 + 2.0);
            if (seen.count(key)) return true;
            seen[key] = true;

            Orbit2D o;
            o.period = mp;
            o.half = half;
            o.fiber_multiplier = std::pow(m.mu, mp);
            // fiber cycle: y0 = sum mu^{p-1-i} o_i / (1 - mu^p)
            double coef = 0.0, basemult = 1.0;
            z = x;
            std::vector<double> cycle_x(size_t(mp), 0.0), cycle_o(size_t(mp), 0.0);
            for (int i = 0; i < mp; ++i) {
                const auto* br = branched1d::find_branch(base, z);
                int bi = int(br - base.branches.data());
                cycle_x[size_t(i)] = z;
                cycle_o[size_t(i)] = offs[size_t(bi)];
                basemult *= std::abs(br->func.derivative()(z));
                z = br->func(z);
            }
            for (int i = 0; i < mp; ++i) coef = m.mu * coef + cycle_o[size_t(i)];
            double y = coef / (1.0 - o.fiber_multiplier);
            o.base_multiplier = basemult;
            for (int i = 0; i < mp; ++i) {
                o.cycle.push_back({half > 0 ? cycle_x[size_t(i)] : -cycle_x[size_t(i)], y});
                y = m.mu * y + cycle_o[size_t(i)];
            }
            orbits.push_back(std::move(o));
            return true;
        };
        w.run();
    };

    process_half(m.plus, m.offsets_plus, +1);
    if (m.has_minus_half()) process_half(m.minus, m.offsets_minus, -1);

    std::sort(orbits.begin(), orbits.end(), [](const Orbit2D& a, const Orbit2D& b) {
        if (a.period != b.period) return a.period < b.period;
        return a.cycle.front().u < b.cycle.front().u;
    });
    return orbits;
}

// ---------------------------------------------------------------------------
// Singular-leaf forward closure

// Union over k <= n of the forward images of the one-sided first-hit leaves
// of the singular leaf (the leaf through f(d*+-) = 0, lifted to the fiber
// offsets of the adjacent branches), as a closure approximation.
inline BoxSet singular_leaf_forward_closure(const SkewReturnMap& m, SingularLeafId which,
                                            int n, double merge_tol = 1e-9,
                                            size_t cap = 1'000'000) {
    const bool plus_side = (which == SingularLeafId::DPlus) || !m.has_minus_half();
    const auto& base = plus_side ? m.plus : m.minus;
    const auto& offs = plus_side ? m.offsets_plus : m.offsets_minus;

    // adjacent branches at the cut point d_*
    BoxSet acc;
    BoxSet cur;
    for (size_t i = 0; i < base.branches.size(); ++i) {
        const auto& br = base.branches[i];
        if (br.domain.hi == base.d_star || br.domain.lo == base.d_star) {
            double limit = (br.domain.hi == base.d_star) ? br.limit_hi : br.limit_lo;
            double u = plus_side ? limit : -limit;
            cur.boxes.push_back({u, u, offs[i], offs[i] + m.mu});
        }
    }
    acc = cur;
    for (int k = 1; k <= n; ++k) {
        cur = apply_boxset(m, cur, merge_tol, cap);
        for (const auto& b : cur.boxes) acc.boxes.push_back(b);
        normalize(acc, merge_tol, cap);
    }
    acc.generation = n;
    return acc;
}

// ---------------------------------------------------------------------------
// Base-hypothesis verification (G3)/(L3): the induced leaf-space map on each
// half must satisfy (H1)-(H5).

inline branched1d::HypothesisReport verify_base_plus(const SkewReturnMap& m,
                                                     const Tolerances& tol = {}) {
    return branched1d::verify_hypotheses(m.plus, tol);
}

inline branched1d::HypothesisReport verify_base_minus(const SkewReturnMap& m,
                                                      const Tolerances& tol = {}) {
    return branched1d::verify_hypotheses(m.minus, tol);
}

}  // namespace venice::skew2d
