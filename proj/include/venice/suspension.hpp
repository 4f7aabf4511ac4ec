#pragma once

// Singular suspension of a skew return map: the flow runs a roof function
// over the section R, with a logarithmically diverging ceiling along the
// singular leaves where the Lorenz-like plugs are glued in.  The examples
// assemble the H variant (example X, nontransitive with a periodic-orbit
// class intersection), the G variant (example Y, class intersection equal to
// the closure of the singular traces), and a one-singularity variant.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "venice/cherryplug.hpp"
#include "venice/common.hpp"
#include "venice/skew2d.hpp"

namespace venice::suspension {

struct Singularity {
    std::string label;
    cherryplug::SingularitySpectrum spectrum;
    std::vector<skew2d::SingularLeafId> leaves;  // attached singular leaves
};

struct SingularSuspension {
    skew2d::SkewReturnMap section;
    std::vector<Singularity> singularities;
    double ceiling_base = 1.0;
    double ceiling_cap = 0.5;    // distance beyond which the ceiling is flat
    double delta_sing = 1e-6;    // near-singular passage logging threshold
};

enum class ExampleKind { X, Y, OneSingularity };

inline double leaf_position(const SingularSuspension& s, skew2d::SingularLeafId id) {
    return id == skew2d::SingularLeafId::DPlus ? s.section.d_plus() : s.section.d_minus();
}

// Distance to the nearest attached singular leaf, with that leaf's unstable
// eigenvalue.
inline std::pair<double, double> singular_distance(const SingularSuspension& s, double u) {
    double d = std::numeric_limits<double>::infinity();
    double lam_u = 1.0;
    for (const auto& sg : s.singularities)
        for (auto id : sg.leaves) {
            double dd = std::abs(u - leaf_position(s, id));
            if (dd < d) { d = dd; lam_u = sg.spectrum.u; }
        }
    return {d, lam_u};
}

// Roof function: constant away from the singular leaves, diverging like
// -log(dist)/lambda_u near them (the linearized transit time of the plug).
inline double ceiling(const SingularSuspension& s, double u) {
    auto [d, lam_u] = singular_distance(s, u);
    if (!(d < s.ceiling_cap)) return s.ceiling_base;
    return s.ceiling_base + std::log(s.ceiling_cap / d) / lam_u;
}

// ---------------------------------------------------------------------------
// Example assembly

inline SingularSuspension build_example(ExampleKind kind, double tau = 0.75,
                                        double lambda_ss = -10.0,
                                        const Tolerances& tol = {}) {
    cherryplug::PlugResult plug = cherryplug::build_plug(tau, lambda_ss, 96, tol);
    if (!plug.lorenz_like)
        throw ConfigError("build_example: plug saddles are not Lorenz-like at tau = " +
                          std::to_string(tau));

    SingularSuspension s;
    switch (kind) {
        case ExampleKind::X: s.section = skew2d::default_H(); break;
        case ExampleKind::Y: s.section = skew2d::default_G(); break;
        case ExampleKind::OneSingularity: s.section = skew2d::default_G(); break;
    }
    if (kind == ExampleKind::OneSingularity) {
        // a single plug threaded through both singular leaves
        s.singularities.push_back({"sigma1",
                                   plug.saddles.front().spectrum,
                                   {skew2d::SingularLeafId::DPlus, skew2d::SingularLeafId::DMinus}});
    } else {
        s.singularities.push_back({"sigma1", plug.saddles.front().spectrum,
                                   {skew2d::SingularLeafId::DPlus}});
        s.singularities.push_back({"sigma2", plug.saddles.back().spectrum,
                                   {skew2d::SingularLeafId::DMinus}});
    }
    return s;
}

// Transitive control: single expanding interval section, no singular plugs.
inline SingularSuspension build_control() {
    SingularSuspension s;
    s.section = skew2d::default_single();
    return s;
}

// ---------------------------------------------------------------------------
// Flow orbits

struct Passage {
    int step = 0;
    std::string label;      // which singularity's leaf was passed
    double dist = 0.0;
    double transit = 0.0;   // the divergent part of the return time
    int side = 0;           // sign of (leaf - singular leaf)
};

struct FlowOrbit {
    struct Sample {
        skew2d::Point p;
        double t = 0.0;     // accumulated flow time at this section hit
    };
    std::vector<Sample> samples;
    std::vector<Passage> passages;
    double total_time = 0.0;
    bool completed = false;  // n_returns reached within the time budget
};

inline FlowOrbit flow_orbit(const SingularSuspension& s, skew2d::Point start, int n_returns,
                            double time_budget = 1e9, const Tolerances& tol = {}) {
    FlowOrbit orb;
    skew2d::Point p = start;
    double t = 0.0;
    orb.samples.push_back({p, 0.0});
    for (int k = 0; k < n_returns; ++k) {
        auto [d, lam_u] = singular_distance(s, p.u);
        if (d <= tol.tol_root)
            throw StagnationAtSingularity("flow orbit hit a singular leaf at step " +
                                          std::to_string(k));
        if (d < s.delta_sing) {
            Passage pa;
            pa.step = k;
            pa.dist = d;
            pa.transit = std::log(s.ceiling_cap / d) / lam_u;
            double nearest = 0.0;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& sg : s.singularities)
                for (auto id : sg.leaves) {
                    double lp = leaf_position(s, id);
                    if (std::abs(p.u - lp) < best) {
                        best = std::abs(p.u - lp);
                        nearest = lp;
                        pa.label = sg.label;
                    }
                }
            pa.side = p.u >= nearest ? +1 : -1;
            orb.passages.push_back(pa);
        }
        t += ceiling(s, p.u);
        if (t > time_budget) {
            orb.total_time = t;
            return orb;
        }
        p = skew2d::apply(s.section, p);
        orb.samples.push_back({p, t});
    }
    orb.total_time = t;
    orb.completed = true;
    return orb;
}

inline void write_csv(const FlowOrbit& orb, std::ostream& os) {
    os << "leaf,fiber,return_time,passage_label\n";
    for (size_t k = 0; k < orb.samples.size(); ++k) {
        double rt = (k + 1 < orb.samples.size())
                        ? orb.samples[k + 1].t - orb.samples[k].t
                        : 0.0;
        std::string label;
        for (const auto& pa : orb.passages)
            if (pa.step == int(k)) label = pa.label;
        os << orb.samples[k].p.u << ',' << orb.samples[k].p.y << ',' << rt << ',' << label
           << '\n';
    }
}

// ---------------------------------------------------------------------------
// Density of suspended periodic orbits

struct DensityResult {
    bool pass = false;
    double coverage = 0.0;
    int cells_total = 0;
    int cells_covered = 0;
    int max_period_used = 0;
};

namespace detail {

// Mark every grid cell within grid_eps (L-inf) of (u, y).
struct Grid2D {
    double eps;
    int nu, ny;
    std::vector<char> state;  // 0 = outside attractor, 1 = pending, 2 = covered

    Grid2D(double grid_eps) : eps(grid_eps) {
        nu = int(std::round(2.0 / eps));
        ny = int(std::round(1.0 / eps));
        state.assign(size_t(nu + 1) * size_t(ny + 1), 0);
    }
    double ucoord(int i) const { return -1.0 + eps * double(i); }
    double ycoord(int j) const { return eps * double(j); }
    char& at(int i, int j) { return state[size_t(i) * size_t(ny + 1) + size_t(j)]; }

    void mark(double u, double y) {
        int ilo = std::max(0, int(std::ceil((u - eps + 1.0) / eps - 1e-9)));
        int ihi = std::min(nu, int(std::floor((u + eps + 1.0) / eps + 1e-9)));
        int jlo = std::max(0, int(std::ceil((y - eps) / eps - 1e-9)));
        int jhi = std::min(ny, int(std::floor((y + eps) / eps + 1e-9)));
        for (int i = ilo; i <= ihi; ++i)
            for (int j = jlo; j <= jhi; ++j)
                if (at(i, j) == 1) at(i, j) = 2;
    }
};

// Fiber value of the periodic point x of period p (forward itinerary).
inline std::optional<double> fiber_of_periodic(const branched1d::BranchedIntervalMap& base,
                                               const std::vector<double>& offs, double mu,
                                               double x, int p) {
    double coef = 0.0;
    double z = x;
    std::vector<double> cyc(size_t(p), 0.0);
    for (int i = 0; i < p; ++i) {
        const auto* br = branched1d::find_branch(base, z);
        if (!br) return std::nullopt;
        cyc[size_t(i)] = offs[size_t(br - base.branches.data())];
        z = br->func(z);
    }
    for (int i = p; i-- > 0;) coef = mu * coef + cyc[size_t(i)];
    return coef / (1.0 - std::pow(mu, p));
}

}  // namespace detail

// Every grid point of a grid_eps-grid restricted to the attractor
// approximation must lie within grid_eps of a section point of a suspended
// periodic orbit of period <= n_max.
inline DensityResult dense_periodic_check(const SingularSuspension& s, double grid_eps,
                                          int n_max, const Tolerances& tol = {},
                                          int attractor_gen = 10) {
    const auto& m = s.section;
    detail::Grid2D grid(grid_eps);

    skew2d::BoxSet ap = skew2d::attractor_half(m, skew2d::Half::Plus, attractor_gen);
    skew2d::BoxSet am;
    if (m.has_minus_half()) am = skew2d::attractor_half(m, skew2d::Half::Minus, attractor_gen);

    int total = 0;
    for (int i = 0; i <= grid.nu; ++i)
        for (int j = 0; j <= grid.ny; ++j) {
            skew2d::Point p{grid.ucoord(i), grid.ycoord(j)};
            if (skew2d::point_dist(ap, p) == 0.0 ||
                (m.has_minus_half() && skew2d::point_dist(am, p) == 0.0)) {
                grid.at(i, j) = 1;
                ++total;
            }
        }

    int max_p = 0;
    auto mark_from = [&](const branched1d::BranchedIntervalMap& base,
                         const std::vector<double>& offs, int half, double x, int p) {
        if (auto y = detail::fiber_of_periodic(base, offs, m.mu, x, p)) {
            max_p = std::max(max_p, p);
            double u = half > 0 ? x : -x;
            double yy = *y;
            grid.mark(u, yy);
            double z = x;
            for (int i = 1; i < p; ++i) {
                const auto* br = branched1d::find_branch(base, z);
                if (!br) break;
                yy = m.mu * yy + offs[size_t(br - base.branches.data())];
                z = br->func(z);
                grid.mark(half > 0 ? z : -z, yy);
            }
        }
    };

    auto pending = [&]() {
        int n = 0;
        for (char c : grid.state) n += (c == 1);
        return n;
    };

    // bulk enumeration at increasing depths, both halves, with early stop
    auto run_bulk = [&](const branched1d::BranchedIntervalMap& base,
                        const std::vector<double>& offs, int half, int depth) {
        branched1d::detail::WordWalker w{base, tol};
        w.depth_max = depth;
        w.on_point = [&](double x, int p) {
            mark_from(base, offs, half, x, p);
            return true;
        };
        w.run();
    };
    for (int depth : {std::min(n_max, 10), std::min(n_max, 13)}) {
        run_bulk(m.plus, m.offsets_plus, +1, depth);
        if (m.has_minus_half()) run_bulk(m.minus, m.offsets_minus, -1, depth);
        if (pending() == 0) break;
    }

    // targeted search for the remaining cells: pin the itinerary tail to hit
    // the fiber window, restrict the cylinder window to the leaf cell
    int K = std::max(1, int(std::ceil(std::log(2.0 / grid_eps) / std::log(1.0 / m.mu))));
    K = std::min(K, n_max - 1);
    for (int i = 0; i <= grid.nu && pending() > 0; ++i) {
        for (int j = 0; j <= grid.ny; ++j) {
            if (grid.at(i, j) != 1) continue;
            double ug = grid.ucoord(i), yg = grid.ycoord(j);
            int half = (ug >= 0.0 || !m.has_minus_half()) ? +1 : -1;
            const auto& base = half > 0 ? m.plus : m.minus;
            const auto& offs = half > 0 ? m.offsets_plus : m.offsets_minus;
            double xg = half > 0 ? ug : -ug;

            // admissible tails whose offset sum lands in the fiber window
            // tail value: sum over tail symbols t_0..t_{K-1} of
            // mu^{K-1-q} o_{t_q}; any completion adds at most mu^K on top
            std::vector<std::vector<int>> tails;
            std::vector<int> cur;
            double muK = std::pow(m.mu, K);
            std::function<void(double, int)> rec2 = [&](double val, int depth) {
                if (depth == K) {
                    if (std::abs(val + 0.5 * muK - yg) <= std::max(0.0, grid_eps - 0.5 * muK))
                        tails.push_back(cur);
                    return;
                }
                for (int b = 0; b < int(base.branches.size()); ++b) {
                    cur.push_back(b);
                    rec2(m.mu * val + offs[size_t(b)], depth + 1);
                    cur.pop_back();
                }
            };
            rec2(0.0, 0);
            if (tails.empty()) continue;

            branched1d::detail::WordWalker w{base, tol};
            w.depth_max = std::max(0, n_max - K);
            w.win_lo = xg - grid_eps;
            w.win_hi = xg + grid_eps;
            w.closure_suffixes = tails;
            w.on_point = [&](double x, int p) {
                mark_from(base, offs, half, x, p);
                return grid.at(i, j) == 1;  // stop once this cell is covered
            };
            w.run();
        }
    }

    DensityResult res;
    res.cells_total = total;
    for (int i = 0; i <= grid.nu; ++i)
        for (int j = 0; j <= grid.ny; ++j)
            if (grid.at(i, j) == 2) ++res.cells_covered;
    res.coverage = total > 0 ? double(res.cells_covered) / double(total) : 1.0;
    res.pass = (res.cells_covered == total);
    res.max_period_used = max_p;
    return res;
}

// ---------------------------------------------------------------------------
// Transitivity witness

enum class TransitivityVerdict { NonTransitive, Inconclusive };

struct TransitivityReport {
    TransitivityVerdict verdict = TransitivityVerdict::Inconclusive;
    bool structural_certificate = false;  // both halves forward-invariant
    long crossings = 0;
    int samples_used = 0;
    double frac_plus = 0.0;  // fraction of sampled iterates in the plus half
};

namespace detail {

inline bool half_invariant(const branched1d::BranchedIntervalMap& base) {
    // all branch values stay in [0,1]: monotone branches, so the one-sided
    // limit values bound the image
    for (const auto& br : base.branches) {
        double lo = std::min(br.limit_lo, br.limit_hi);
        double hi = std::max(br.limit_lo, br.limit_hi);
        if (lo < 0.0 || hi > 1.0) return false;
    }
    return true;
}

}  // namespace detail

inline TransitivityReport transitivity_witness(const SingularSuspension& s, int n_samples,
                                               int n_iters, uint64_t seed = 0,
                                               int workers = 1) {
    TransitivityReport rep;
    const auto& m = s.section;
    rep.structural_certificate =
        m.has_minus_half() && detail::half_invariant(m.plus) && detail::half_invariant(m.minus);
    if (n_samples <= 0) {
        rep.verdict = TransitivityVerdict::Inconclusive;
        return rep;
    }

    // Crossing side: the glued middle leaf for the two-half variants, the cut
    // point for the single-interval control.
    const double split = m.has_minus_half() ? 0.0 : m.plus.d_star;

    auto run_chunk = [&](int lo, int hi) {
        long cross = 0;
        long in_plus = 0, visited = 0;
        for (int k = lo; k < hi; ++k) {
            std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + uint64_t(k) + 1);
            std::uniform_real_distribution<double> uu(m.has_minus_half() ? -1.0 : 0.0, 1.0);
            std::uniform_real_distribution<double> yy(0.0, 1.0);
            skew2d::Point p{uu(rng), yy(rng)};
            int prev_side = p.u >= split ? +1 : -1;
            for (int it = 0; it < n_iters; ++it) {
                try {
                    p = skew2d::apply(m, p);
                } catch (const SingularLeaf&) {
                    p.u = std::nextafter(p.u, 2.0);  // step off the singular leaf
                    continue;
                }
                int side = p.u >= split ? +1 : -1;
                if (side != prev_side) ++cross;
                prev_side = side;
                ++visited;
                if (p.u >= split) ++in_plus;
            }
        }
        return std::array<long, 3>{cross, in_plus, visited};
    };

    long cross = 0, in_plus = 0, visited = 0;
    int W = std::max(1, workers);
    std::vector<std::future<std::array<long, 3>>> futs;
    for (int w = 0; w < W; ++w) {
        int lo = n_samples * w / W, hi = n_samples * (w + 1) / W;
        futs.push_back(std::async(std::launch::async, run_chunk, lo, hi));
    }
    for (auto& f : futs) {
        auto r = f.get();
        cross += r[0]; in_plus += r[1]; visited += r[2];
    }
    rep.crossings = cross;
    rep.samples_used = n_samples;
    rep.frac_plus = visited > 0 ? double(in_plus) / double(visited) : 0.0;
    rep.verdict = (rep.structural_certificate && cross == 0)
                      ? TransitivityVerdict::NonTransitive
                      : TransitivityVerdict::Inconclusive;
    return rep;
}

// ---------------------------------------------------------------------------
// Class structure (the two theorems, numerically)

struct ClassStructureReport {
    skew2d::IntersectionReport intersection;
    std::string verdict;            // "periodic_orbit" or "singular_closure"
    bool contains_P = false;
    double base_multiplier = 0.0;   // of the orbit through P (when periodic)
    double fiber_multiplier = 0.0;
    double hausdorff_to_traces = -1.0;  // filled for the singular-closure case
};

inline ClassStructureReport class_structure(const SingularSuspension& s, int n, double eps,
                                            const Tolerances& tol = {}) {
    ClassStructureReport rep;
    const auto& m = s.section;
    rep.intersection = skew2d::class_intersection(m, n, eps, tol);
    rep.contains_P = rep.intersection.contains_P;

    if (rep.intersection.kind == skew2d::IntersectKind::Point) {
        rep.verdict = "periodic_orbit";
        skew2d::Point P = skew2d::fixed_point_P(m, tol);
        rep.base_multiplier = std::abs(skew2d::base_derivative(m, P.u));
        rep.fiber_multiplier = m.mu;
    } else {
        rep.verdict = "singular_closure";
        skew2d::BoxSet traces;
        skew2d::BoxSet tp = skew2d::singular_leaf_forward_closure(m, skew2d::SingularLeafId::DPlus, n);
        for (const auto& b : tp.boxes) traces.boxes.push_back(b);
        if (m.has_minus_half()) {
            skew2d::BoxSet tm =
                skew2d::singular_leaf_forward_closure(m, skew2d::SingularLeafId::DMinus, n);
            for (const auto& b : tm.boxes) traces.boxes.push_back(b);
        }
        skew2d::normalize(traces);
        double spacing = std::max(eps / 4.0, 1e-3);
        rep.hausdorff_to_traces = skew2d::hausdorff(rep.intersection.cluster, traces, spacing);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Unstable sets inside the classes

struct UnstableContainment {
    bool pass = false;
    double max_dist = 0.0;
    std::string label;
};

inline UnstableContainment unstable_in_class(const SingularSuspension& s,
                                             const std::string& label, int n, double eps) {
    UnstableContainment res;
    res.label = label;
    if (eps <= 0.0) return res;  // strict positive slack required
    const auto& m = s.section;
    const Singularity* sg = nullptr;
    for (const auto& g : s.singularities)
        if (g.label == label) sg = &g;
    if (!sg) throw ConfigError("unstable_in_class: unknown singularity " + label);

    double maxd = 0.0;
    for (auto id : sg->leaves) {
        skew2d::BoxSet trace = skew2d::singular_leaf_forward_closure(m, id, n);
        skew2d::Half half =
            (id == skew2d::SingularLeafId::DPlus) ? skew2d::Half::Plus : skew2d::Half::Minus;
        skew2d::BoxSet attr = skew2d::attractor_half(m, half, n);
        for (const auto& p : skew2d::sample_boxset(trace, std::max(eps / 4.0, 1e-3)))
            maxd = std::max(maxd, skew2d::point_dist(attr, p));
    }
    res.max_dist = maxd;
    res.pass = maxd <= eps;
    return res;
}

// ---------------------------------------------------------------------------
// Sectional-expansion audit over suspended periodic orbits

struct AuditRow {
    int period = 0;
    double leaf0 = 0.0;
    double total_time = 0.0;
    double expansion_rate = 0.0;    // sum log|base'| / total time, must be > 0
    double contraction_rate = 0.0;  // log(mu^p) / total time, must be < 0
    double max_ceiling = 0.0;
};

inline std::vector<AuditRow> sectional_expansion_audit(const SingularSuspension& s,
                                                       int p_max,
                                                       const Tolerances& tol = {}) {
    std::vector<AuditRow> rows;
    for (const auto& orb : skew2d::periodic_points_2d(s.section, p_max, tol)) {
        AuditRow r;
        r.period = orb.period;
        r.leaf0 = orb.cycle.front().u;
        double sum_log = 0.0, sum_t = 0.0, max_c = 0.0;
        for (const auto& p : orb.cycle) {
            sum_log += std::log(std::abs(skew2d::base_derivative(s.section, p.u)));
            double c = ceiling(s, p.u);
            sum_t += c;
            max_c = std::max(max_c, c);
        }
        r.total_time = sum_t;
        r.expansion_rate = sum_log / sum_t;
        r.contraction_rate = std::log(orb.fiber_multiplier) / sum_t;
        r.max_ceiling = max_c;
        rows.push_back(r);
    }
    return rows;
}

}  // namespace venice::suspension
