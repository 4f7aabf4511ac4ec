#pragma once

// One-dimensional expanding maps on the branched manifold B: a compact
// interval plus a circle glued at the branch point b, cut open to [0,1]
// with 1 identified to b.  Houses the base map f, the modified maps
// f+/f-, hypothesis verification, leo checking, and the periodic-point /
// preimage enumeration used by the density diagnostics.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "venice/common.hpp"
#include "venice/interval.hpp"
#include "venice/polynomial.hpp"

namespace venice::branched1d {

struct Branch {
    Interval domain;       // sub-interval of [0,1], flags mark open endpoints
    Polynomial func;
    double limit_lo = 0.0; // one-sided limit at domain.lo (from the right)
    double limit_hi = 0.0; // one-sided limit at domain.hi (from the left)
};

struct BranchedIntervalMap {
    double branch_point = 0.0;    // b; the circle part of B is [b,1], 1 ~ b
    double d1 = 0.0, d_star = 0.0, d2 = 0.0;
    std::vector<Branch> branches; // ordered by domain
    double expansion_const = 1.0; // lambda in (H5)
    bool mirrored = false;        // negative-copy bookkeeping (f- convention)

    double cut_point() const { return mirrored ? -d_star : d_star; }
};

// ---------------------------------------------------------------------------
// Default instances.  Only the qualitative graph is forced; these are
// the smallest piecewise-polynomial maps satisfying (H1)-(H5) exactly:
//   b = 0.4, d1 = 0.25, d_* = 0.5, d2 = 0.8, lambda = 1.2,
//   slopes 4, -1.6, 10/3, -1.2, f(b) = 0.16.
// The modified map adds quadratic bumps on (0, d1) and (d_*, d2) that keep
// every branch value and |f'| >= lambda while strictly increasing arc length.

inline BranchedIntervalMap default_f() {
    BranchedIntervalMap m;
    m.branch_point = 0.4;
    m.d1 = 0.25; m.d_star = 0.5; m.d2 = 0.8;
    m.expansion_const = 1.2;
    m.branches = {
        {Interval::closed(0.0, 0.25), Polynomial{{0.0, 4.0}}, 0.0, 1.0},
        {Interval::open(0.25, 0.5), Polynomial{{0.8, -1.6}}, 0.4, 0.0},
        {Interval::lopen(0.5, 0.8), Polynomial{{-5.0 / 3.0, 10.0 / 3.0}}, 0.0, 1.0},
        {Interval::lopen(0.8, 1.0), Polynomial{{1.36, -1.2}}, 0.4, 0.16},
    };
    return m;
}

// Quadratic bump a*(x-u)(v-x) added on branch domains (u,v); vanishes at the
// branch endpoints so (H2)-(H4) are untouched.
inline BranchedIntervalMap bumped_f(double a1, double a3) {
    BranchedIntervalMap m = default_f();
    // branch 1: 4x + a1*x*(0.25 - x)
    m.branches[0].func = Polynomial{{0.0, 4.0 + 0.25 * a1, -a1}};
    // branch 3: (10/3)(x-0.5) + a3*(x-0.5)*(0.8-x)
    m.branches[2].func =
        Polynomial{{-5.0 / 3.0 - 0.4 * a3, 10.0 / 3.0 + 1.3 * a3, -a3}};
    return m;
}

inline BranchedIntervalMap default_f_plus() { return bumped_f(0.8, 0.9); }

// Independent bump parameters for the negative copy used by the H variant.
inline BranchedIntervalMap default_f_minus_base() { return bumped_f(0.7, 1.0); }

// ---------------------------------------------------------------------------
// Evaluation

inline const Branch* find_branch(const BranchedIntervalMap& m, double x) {
    for (const auto& br : m.branches)
        if (br.domain.contains(x)) return &br;
    return nullptr;
}

inline double eval(const BranchedIntervalMap& m, double x) {
    if (x < 0.0 || x > 1.0) throw DomainError("eval: x outside [0,1]");
    if (x == m.d_star) throw DomainError("eval: x at the cut point d_*");
    const Branch* br = find_branch(m, x);
    if (!br) throw DomainError("eval: x not in any branch domain");
    return br->func(x);
}

enum class Side { Left, Right };

inline double eval_one_sided(const BranchedIntervalMap& m, double x, Side side) {
    if (side == Side::Left && x <= 0.0) throw DomainError("one-sided limit outside [0,1]");
    if (side == Side::Right && x >= 1.0) throw DomainError("one-sided limit outside [0,1]");
    if (x < 0.0 || x > 1.0) throw DomainError("one-sided limit outside [0,1]");
    for (const auto& br : m.branches) {
        if (side == Side::Right) {
            if (x == br.domain.lo) return br.limit_lo;
            if (x > br.domain.lo && x < br.domain.hi) return br.func(x);
        } else {
            if (x == br.domain.hi) return br.limit_hi;
            if (x > br.domain.lo && x < br.domain.hi) return br.func(x);
        }
    }
    throw DomainError("one-sided limit: no adjacent branch");
}

// Evaluate in signed coordinates, honoring the mirror flag: a mirrored map
// acts on [-1,0] by conjugation with x -> -x.
inline double eval_signed(const BranchedIntervalMap& m, double x) {
    return m.mirrored ? -eval(m, -x) : eval(m, x);
}

inline BranchedIntervalMap reflect(const BranchedIntervalMap& m) {
    BranchedIntervalMap r = m;
    r.mirrored = !m.mirrored;
    return r;
}

// ---------------------------------------------------------------------------
// Interval images

inline IntervalSet image_of_interval(const BranchedIntervalMap& m, const Interval& I) {
    if (I.empty()) throw EmptyInput("image_of_interval: degenerate interval");
    IntervalSet out;
    for (const auto& br : m.branches) {
        Interval c = I.intersect(br.domain);
        if (c.empty()) continue;
        // Monotone branch: the image endpoints are the (one-sided) values at
        // the clipped endpoints; an endpoint value is attained iff closed.
        double vlo = (c.lo == br.domain.lo) ? br.limit_lo : br.func(c.lo);
        double vhi = (c.hi == br.domain.hi) ? br.limit_hi : br.func(c.hi);
        bool lo_open = c.lo_open, hi_open = c.hi_open;
        if (c.lo == c.hi) {
            if (!c.lo_open && !c.hi_open) out.add(Interval::point(br.func(c.lo)));
            continue;
        }
        Interval img;
        if (vlo <= vhi) { img = {vlo, vhi, lo_open, hi_open}; }
        else { img = {vhi, vlo, hi_open, lo_open}; }
        out.add(img);
    }
    return out;
}

inline IntervalSet image_of_set(const BranchedIntervalMap& m, const IntervalSet& S) {
    IntervalSet out;
    for (const auto& p : S.parts()) out.add(image_of_interval(m, p));
    return out;
}

// leo: the first m <= m_max with Cl(f^m(I)) = [0,1] (gap <= tol_cover).
// m = 0 succeeds only when I itself is all of [0,1] with attained endpoints.
inline std::optional<int> leo_check(const BranchedIntervalMap& m, const Interval& I,
                                    int m_max, const Tolerances& tol = {}) {
    if (I.empty()) return std::nullopt;
    if (!I.lo_open && !I.hi_open && I.lo <= tol.tol_cover && I.hi >= 1.0 - tol.tol_cover)
        return 0;
    IntervalSet S(I);
    for (int k = 1; k <= m_max; ++k) {
        S = image_of_set(m, S);
        if (S.uncovered_length(0.0, 1.0) <= tol.tol_cover) return k;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Hypothesis verification

struct HypothesisReport {
    struct Entry {
        std::string name;
        bool pass = false;
        std::string witness;  // empty when passing
    };
    std::vector<Entry> entries;

    bool all_pass() const {
        for (const auto& e : entries)
            if (!e.pass) return false;
        return true;
    }
    const Entry* find(const std::string& name) const {
        for (const auto& e : entries)
            if (e.name == name) return &e;
        return nullptr;
    }
};

inline HypothesisReport verify_hypotheses(const BranchedIntervalMap& m,
                                          const Tolerances& tol = {}) {
    HypothesisReport rep;
    auto push = [&](const std::string& n, bool ok, const std::string& w) {
        rep.entries.push_back({n, ok, ok ? "" : w});
    };

    // (H1) branch domains partition [0,1] \ {d_*}
    {
        bool ok = !m.branches.empty();
        std::string w;
        if (ok) {
            const auto& first = m.branches.front();
            const auto& last = m.branches.back();
            if (first.domain.lo != 0.0 || first.domain.lo_open) { ok = false; w = "domain does not start closed at 0"; }
            if (last.domain.hi != 1.0 || last.domain.hi_open) { ok = false; w = "domain does not end closed at 1"; }
            for (size_t k = 0; ok && k + 1 < m.branches.size(); ++k) {
                const auto& a = m.branches[k].domain;
                const auto& b = m.branches[k + 1].domain;
                if (a.hi != b.lo) { ok = false; w = "gap between branch domains at " + std::to_string(a.hi); break; }
                bool at_cut = (a.hi == m.d_star);
                int closed = (a.hi_open ? 0 : 1) + (b.lo_open ? 0 : 1);
                if (at_cut ? closed != 0 : closed != 1) {
                    ok = false; w = "endpoint flags wrong at " + std::to_string(a.hi);
                }
            }
        } else {
            w = "no branches";
        }
        push("H1", ok, w);
    }

    // (H2) endpoint values
    {
        bool ok = true;
        std::string w;
        auto check = [&](double x, double want, const char* what) {
            double v = eval(m, x);
            if (!approx_eq(v, want, tol.tol_lim)) { ok = false; w = std::string(what) + " = " + std::to_string(v); }
        };
        check(0.0, 0.0, "f(0)");
        check(m.d1, 1.0, "f(d1)");
        check(m.d2, 1.0, "f(d2)");
        double fb = eval(m, m.branch_point);
        if (!approx_eq(eval(m, 1.0), fb, tol.tol_lim)) { ok = false; w = "f(1) != f(b)"; }
        if (!(fb > 0.0 && fb < m.d1)) { ok = false; w = "f(b) outside (0, d1)"; }
        push("H2", ok, w);
    }

    // (H3) one-sided limits
    {
        bool ok = true;
        std::string w;
        auto check = [&](double x, Side s, double want, const char* what) {
            double v = eval_one_sided(m, x, s);
            if (!approx_eq(v, want, tol.tol_lim)) { ok = false; w = std::string(what) + " = " + std::to_string(v); }
        };
        check(m.d1, Side::Right, m.branch_point, "f(d1+)");
        check(m.d2, Side::Right, m.branch_point, "f(d2+)");
        check(m.d1, Side::Left, 1.0, "f(d1-)");
        check(m.d2, Side::Left, 1.0, "f(d2-)");
        check(m.d_star, Side::Right, 0.0, "f(d_*+)");
        check(m.d_star, Side::Left, 0.0, "f(d_*-)");
        push("H3", ok, w);
    }

    // (H4) branch images
    {
        bool ok = true;
        std::string w;
        double fb = eval(m, m.branch_point);
        struct Case { Interval dom; Interval want; const char* name; };
        const Case cases[] = {
            {Interval::closed(0.0, m.d1), Interval::closed(0.0, 1.0), "f([0,d1])"},
            {Interval::open(m.d1, m.d_star), Interval::open(0.0, m.branch_point), "f((d1,d_*))"},
            {Interval::lopen(m.d_star, m.d2), Interval::lopen(0.0, 1.0), "f((d_*,d2])"},
            {Interval::lopen(m.d2, 1.0), Interval::ropen(fb, m.branch_point), "f((d2,1])"},
        };
        for (const auto& c : cases) {
            IntervalSet img = image_of_interval(m, c.dom);
            if (!img.same_as(IntervalSet(c.want), tol.tol_lim)) {
                ok = false; w = std::string(c.name) + " mismatch";
                break;
            }
        }
        push("H4", ok, w);
    }

    // (H5) |f'| >= lambda on sampled branch interiors, with constant sign
    {
        bool ok = true;
        std::string w;
        for (const auto& br : m.branches) {
            Polynomial d = br.func.derivative();
            double a = br.domain.lo, b = br.domain.hi;
            int sign0 = 0;
            for (int k = 0; k <= tol.n_deriv; ++k) {
                double x = a + (b - a) * double(k) / double(tol.n_deriv);
                double dv = d(x);
                if (std::abs(dv) < m.expansion_const - 1e-12) {
                    ok = false; w = "|f'| < lambda at x = " + std::to_string(x);
                    break;
                }
                int s = dv > 0 ? 1 : -1;
                if (sign0 == 0) sign0 = s;
                else if (s != sign0) { ok = false; w = "f' changes sign at x = " + std::to_string(x); break; }
            }
            if (!ok) break;
        }
        push("H5", ok, w);
    }

    return rep;
}

// ---------------------------------------------------------------------------
// Inverse branches

// Solve func(x) = y on the branch; nullopt when y is outside the image or the
// solution violates the domain flags.
inline std::optional<double> branch_preimage(const Branch& br, double y,
                                             double tol_root = 1e-12) {
    double vlo = br.limit_lo, vhi = br.limit_hi;
    double ylo = std::min(vlo, vhi), yhi = std::max(vlo, vhi);
    if (y < ylo - tol_root || y > yhi + tol_root) return std::nullopt;
    double yc = std::clamp(y, ylo, yhi);
    double x = monotone_inverse(br.func, br.domain.lo, br.domain.hi, yc);
    x = std::clamp(x, br.domain.lo, br.domain.hi);
    if (!br.domain.contains(x)) {
        // landed exactly on an open endpoint
        return std::nullopt;
    }
    if (std::abs(br.func(x) - y) > 1e-9) return std::nullopt;
    return x;
}

// Canonical representative under the identification 1 ~ b.
inline double canonical_point(const BranchedIntervalMap& m, double x, double tol = 1e-12) {
    return approx_eq(x, 1.0, tol) ? m.branch_point : x;
}

// Union of f^{-n}(x) for n <= n_max.  The identification 1 ~ b makes the
// preimage of either endpoint value include both targets.
inline std::vector<double> preimage_tree(const BranchedIntervalMap& m, double x,
                                         int n_max, const Tolerances& tol = {},
                                         size_t budget = 50'000'000) {
    if (x < 0.0 || x > 1.0) throw DomainError("preimage_tree: x outside [0,1]");
    std::vector<double> all = {x};
    std::vector<double> level = {x};
    for (int n = 1; n <= n_max; ++n) {
        std::vector<double> next;
        for (double y : level) {
            std::vector<double> targets = {y};
            if (approx_eq(y, 1.0, tol.tol_root) || approx_eq(y, m.branch_point, tol.tol_root)) {
                targets = {1.0, m.branch_point};
            }
            for (double t : targets)
                for (const auto& br : m.branches)
                    if (auto p = branch_preimage(br, t, tol.tol_root)) next.push_back(*p);
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end(),
                               [&](double a, double b) { return std::abs(a - b) <= tol.tol_root; }),
                   next.end());
        if (all.size() + next.size() > budget) throw BudgetExceeded("preimage_tree: budget");
        all.insert(all.end(), next.begin(), next.end());
        level.swap(next);
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end(),
                          [&](double a, double b) { return std::abs(a - b) <= tol.tol_root; }),
              all.end());
    return all;
}

// ---------------------------------------------------------------------------
// Periodic points via itinerary enumeration.
//
// A word (j_0 .. j_{p-1}) is admissible when the cylinder
// { x in D_{j_0} : f^i(x) in D_{j_i} } is nonempty; on each admissible word
// the composed inverse g_{j_0} o ... o g_{j_{p-1}} contracts by lambda^{-p},
// so the candidate periodic point is its fixed point.

namespace detail {

struct WordWalker {
    const BranchedIntervalMap& m;
    const Tolerances& tol;
    // callback(x, word_length) on each validated periodic point; return false
    // to stop the walk early.
    std::function<bool(double, int)> on_point;
    int depth_max = 0;
    size_t nodes = 0;
    size_t node_budget = size_t(-1);
    // optional window restriction on the cylinder (for targeted search)
    double win_lo = 0.0, win_hi = 1.0;
    // optional forced continuations: at every node, also attempt closures of
    // word + s for each suffix s (used to pin the tail of the itinerary)
    std::vector<std::vector<int>> closure_suffixes;
    bool stopped = false;

    std::vector<int> word;

    double pull_back(double y) const {
        // apply inverse branches along the current word, last symbol first
        for (size_t k = word.size(); k-- > 0;) {
            const Branch& br = m.branches[size_t(word[k])];
            double vlo = std::min(br.limit_lo, br.limit_hi);
            double vhi = std::max(br.limit_lo, br.limit_hi);
            y = std::clamp(y, vlo, vhi);
            y = std::clamp(monotone_inverse(br.func, br.domain.lo, br.domain.hi, y),
                           br.domain.lo, br.domain.hi);
        }
        return y;
    }

    // Returns false only when the callback asks to stop the walk.
    bool try_close(double jlo, double jhi) {
        int p = int(word.size());
        double y = 0.5 * (jlo + jhi);
        double prev = 1e300;
        for (int it = 0; it < 300; ++it) {
            double ny = pull_back(y);
            double delta = std::abs(ny - y);
            y = ny;
            if (delta <= 0.25 * tol.tol_root) break;
            if (it > 50 && delta >= prev) break;
            prev = delta;
        }
        if (y < jlo - 1e-9 || y > jhi + 1e-9) return true;
        // validate forward: itinerary and return
        double z = y;
        for (int i = 0; i < p; ++i) {
            const Branch& br = m.branches[size_t(word[i])];
            if (!br.domain.contains(z)) return true;
            z = br.func(z);
        }
        if (std::abs(z - y) > tol.tol_root) return true;
        return on_point(y, p);
    }

    void walk(double jlo, double jhi, double ilo, double ihi, int depth) {
        if (stopped) return;
        if (++nodes > node_budget) throw BudgetExceeded("periodic enumeration: node budget");
        if (depth > 0) {
            if (!try_close(jlo, jhi)) { stopped = true; return; }
        }
        for (const auto& s : closure_suffixes) {
            // chain the forward image through the suffix; close if nonempty
            double slo = ilo, shi = ihi;
            bool alive = true;
            size_t base_len = word.size();
            for (int j : s) {
                const Branch& br = m.branches[size_t(j)];
                double clo = std::max(slo, br.domain.lo);
                double chi = std::min(shi, br.domain.hi);
                if (chi - clo < 1e-14) { alive = false; break; }
                word.push_back(j);
                double a = br.func(clo), b = br.func(chi);
                slo = std::min(a, b); shi = std::max(a, b);
            }
            if (alive && word.size() > base_len) {
                double p1 = pull_back(slo), p2 = pull_back(shi);
                if (!try_close(std::min(p1, p2), std::max(p1, p2))) {
                    word.resize(base_len);
                    stopped = true;
                    return;
                }
            }
            word.resize(base_len);
        }
        if (depth == depth_max) return;
        for (int j = 0; j < int(m.branches.size()); ++j) {
            const Branch& br = m.branches[size_t(j)];
            double clo = std::max(ilo, br.domain.lo);
            double chi = std::min(ihi, br.domain.hi);
            if (chi - clo < 1e-14) continue;
            word.push_back(j);
            double a = br.func(clo), b = br.func(chi);
            double nilo = std::min(a, b), nihi = std::max(a, b);
            // cylinder endpoints: pull the clipped image window back
            double pj1 = pull_back(nilo), pj2 = pull_back(nihi);
            double njlo = std::min(pj1, pj2), njhi = std::max(pj1, pj2);
            if (njhi >= win_lo && njlo <= win_hi)
                walk(njlo, njhi, nilo, nihi, depth + 1);
            word.pop_back();
            if (stopped) return;
        }
    }

    void run() {
        word.clear();
        stopped = false;
        walk(0.0, 1.0, 0.0, 1.0, 0);
    }
};

inline int minimal_period(const BranchedIntervalMap& m, double x, int p,
                          const Tolerances& tol) {
    for (int d = 1; d < p; ++d) {
        if (p % d != 0) continue;
        double z = x;
        bool ok = true;
        for (int i = 0; i < d; ++i) {
            const Branch* br = find_branch(m, z);
            if (!br) { ok = false; break; }
            z = br->func(z);
        }
        if (ok && std::abs(z - x) <= tol.tol_root) return d;
    }
    return p;
}

}  // namespace detail

struct PeriodicPoint {
    double x = 0.0;
    int period = 0;
};

inline std::vector<PeriodicPoint> periodic_points(const BranchedIntervalMap& m, int n_max,
                                                  const Tolerances& tol = {},
                                                  size_t node_budget = 400'000'000) {
    std::vector<PeriodicPoint> found;
    detail::WordWalker w{m, tol};
    w.depth_max = n_max;
    w.node_budget = node_budget;
    w.on_point = [&](double x, int p) {
        found.push_back({canonical_point(m, x), p});
        return true;
    };
    w.run();
    std::sort(found.begin(), found.end(),
              [](const PeriodicPoint& a, const PeriodicPoint& b) { return a.x < b.x; });
    std::vector<PeriodicPoint> out;
    for (const auto& pp : found) {
        if (!out.empty() && std::abs(out.back().x - pp.x) <= 2.0 * tol.tol_root) {
            out.back().period = std::min(out.back().period, pp.period);
        } else {
            out.push_back(pp);
        }
    }
    for (auto& pp : out) pp.period = detail::minimal_period(m, pp.x, pp.period, tol);
    return out;
}

// Coverage check: is every grid point k*grid_eps within grid_eps of a periodic
// point of period <= n_max?  Enumerates cheap periods first, then runs a
// window-targeted search for any still-uncovered grid cells.
struct NetCheckResult {
    bool pass = false;
    double coverage = 0.0;    // fraction of grid points covered
    int max_period_used = 0;
    double first_uncovered = -1.0;
};

inline NetCheckResult periodic_net_check(const BranchedIntervalMap& m, double grid_eps,
                                         int n_max, const Tolerances& tol = {}) {
    const int N = int(std::round(1.0 / grid_eps));
    std::vector<char> covered(size_t(N) + 1, 0);
    int max_p = 0;
    auto mark = [&](double x) {
        int lo = std::max(0, int(std::ceil((x - grid_eps) / grid_eps - 1e-12)));
        int hi = std::min(N, int(std::floor((x + grid_eps) / grid_eps + 1e-12)));
        for (int k = lo; k <= hi; ++k) covered[size_t(k)] = 1;
    };

    int bulk_depth = std::min(n_max, 10);
    detail::WordWalker w{m, tol};
    w.depth_max = bulk_depth;
    w.on_point = [&](double x, int p) {
        mark(x);
        max_p = std::max(max_p, p);
        return true;
    };
    w.run();

    for (int k = 0; k <= N; ++k) {
        if (covered[size_t(k)]) continue;
        double g = double(k) * grid_eps;
        detail::WordWalker t{m, tol};
        t.depth_max = n_max;
        t.win_lo = g - grid_eps;
        t.win_hi = g + grid_eps;
        t.on_point = [&](double x, int p) {
            if (std::abs(x - g) <= grid_eps) {
                mark(x);
                max_p = std::max(max_p, p);
                return false;  // this cell is done
            }
            mark(x);
            return true;
        };
        t.run();
    }

    NetCheckResult res;
    int n_cov = 0;
    for (int k = 0; k <= N; ++k) {
        if (covered[size_t(k)]) ++n_cov;
        else if (res.first_uncovered < 0.0) res.first_uncovered = double(k) * grid_eps;
    }
    res.coverage = double(n_cov) / double(N + 1);
    res.pass = (n_cov == N + 1);
    res.max_period_used = max_p;
    return res;
}

// Streaming preimage density check with early stop.
inline NetCheckResult preimage_net_check(const BranchedIntervalMap& m, double x0,
                                         double grid_eps, int n_max,
                                         const Tolerances& tol = {}) {
    const int N = int(std::round(1.0 / grid_eps));
    std::vector<char> covered(size_t(N) + 1, 0);
    auto mark = [&](double x) {
        int lo = std::max(0, int(std::ceil((x - grid_eps) / grid_eps - 1e-12)));
        int hi = std::min(N, int(std::floor((x + grid_eps) / grid_eps + 1e-12)));
        for (int k = lo; k <= hi; ++k) covered[size_t(k)] = 1;
    };
    auto all_covered = [&]() {
        for (int k = 0; k <= N; ++k)
            if (!covered[size_t(k)]) return false;
        return true;
    };

    mark(x0);
    std::vector<double> level = {x0};
    int used = 0;
    for (int n = 1; n <= n_max && !all_covered(); ++n) {
        std::vector<double> next;
        for (double y : level) {
            std::vector<double> targets = {y};
            if (approx_eq(y, 1.0, tol.tol_root) || approx_eq(y, m.branch_point, tol.tol_root))
                targets = {1.0, m.branch_point};
            for (double t : targets)
                for (const auto& br : m.branches)
                    if (auto p = branch_preimage(br, t, tol.tol_root)) {
                        next.push_back(*p);
                        mark(*p);
                    }
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end(),
                               [&](double a, double b) { return std::abs(a - b) <= tol.tol_root; }),
                   next.end());
        level.swap(next);
        used = n;
    }

    NetCheckResult res;
    int n_cov = 0;
    for (int k = 0; k <= N; ++k) {
        if (covered[size_t(k)]) ++n_cov;
        else if (res.first_uncovered < 0.0) res.first_uncovered = double(k) * grid_eps;
    }
    res.coverage = double(n_cov) / double(N + 1);
    res.pass = (n_cov == N + 1);
    res.max_period_used = used;
    return res;
}

// ---------------------------------------------------------------------------
// Arc length

namespace detail {

template <class F>
double simpson(F&& f, double a, double b) {
    return (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
}

template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol, int depth) {
    double whole = simpson(f, a, b);
    double mid = 0.5 * (a + b);
    double left = simpson(f, a, mid), right = simpson(f, mid, b);
    if (std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    if (depth <= 0) throw QuadratureFailure("adaptive quadrature: depth exhausted");
    return adaptive_simpson(f, a, mid, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, mid, b, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Arc length of the graph over [a, b], split at branch boundaries.
inline double arc_length(const BranchedIntervalMap& m, double a, double b,
                         double tol_quad = 1e-8) {
    double total = 0.0;
    for (const auto& br : m.branches) {
        double lo = std::max(a, br.domain.lo), hi = std::min(b, br.domain.hi);
        if (hi - lo <= 0.0) continue;
        Polynomial d = br.func.derivative();
        auto integrand = [&](double x) { return std::sqrt(1.0 + d(x) * d(x)); };
        total += detail::adaptive_simpson(integrand, lo, hi, tol_quad, 40);
    }
    return total;
}

struct ArcLengthBudget {
    double epsilon = 0.05;
    // The comparison segments: [0, d1] and the arc from d_* to the branch
    // point.  With b < d_* that arc runs through the circle part, i.e.
    // [d_*, 1] in cut coordinates.
    Interval seg1 = Interval::closed(0.0, 0.25);
    Interval seg2 = Interval::closed(0.5, 1.0);
};

struct ArcLengthResult {
    bool pass = false;
    double base1 = 0.0, plus1 = 0.0;
    double base2 = 0.0, plus2 = 0.0;
};

inline ArcLengthResult verify_arclength_eps(const BranchedIntervalMap& base,
                                            const BranchedIntervalMap& plus,
                                            const ArcLengthBudget& budget,
                                            const Tolerances& tol = {}) {
    if (!approx_eq(base.d1, plus.d1, 1e-15) || !approx_eq(base.d_star, plus.d_star, 1e-15) ||
        !approx_eq(base.branch_point, plus.branch_point, 1e-15))
        throw DomainError("verify_arclength_eps: maps do not share d1, d_*, b");
    ArcLengthResult r;
    r.base1 = arc_length(base, budget.seg1.lo, budget.seg1.hi, tol.tol_quad);
    r.plus1 = arc_length(plus, budget.seg1.lo, budget.seg1.hi, tol.tol_quad);
    r.base2 = arc_length(base, budget.seg2.lo, budget.seg2.hi, tol.tol_quad);
    r.plus2 = arc_length(plus, budget.seg2.lo, budget.seg2.hi, tol.tol_quad);
    r.pass = r.base1 < r.plus1 && r.plus1 < r.base1 + budget.epsilon &&
             r.base2 < r.plus2 && r.plus2 < r.base2 + budget.epsilon;
    return r;
}

}  // namespace venice::branched1d
