#pragma once

// Planar vector fields for the plug construction: a Cherry-type field on the
// square Q with a saddle and a sink on the x-axis, a compactly supported
// derived-from-Anosov style perturbation family splitting the saddle, and the
// eigenvalue bookkeeping that turns planar saddles into Lorenz-like spectra
// after taking the product with a strong contraction.

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "venice/common.hpp"

namespace venice::cherryplug {

using Vec2 = std::array<double, 2>;

struct PlanarField {
    std::function<Vec2(double, double)> F;
    // analytic Jacobian when available; otherwise equilibrium classification
    // falls back to central differences
    std::function<std::array<double, 4>(double, double)> J;  // row-major
    double xlo = -1.0, xhi = 1.0, ylo = -1.0, yhi = 1.0;     // the square Q
    bool boundary_inward = true;  // metadata recorded on the plug
    std::string name;
};

// Cherry base field: saddle at the origin with eigenvalues (1, lambda_s),
// sink at (sink_x, 0).  x' = x (1 - x / sink_x), y' = lambda_s y.
inline PlanarField cherry_field(double sink_x = 0.6, double lambda_s = -0.5) {
    PlanarField f;
    f.name = "cherry";
    f.F = [sink_x, lambda_s](double x, double y) -> Vec2 {
        return {x * (1.0 - x / sink_x), lambda_s * y};
    };
    f.J = [sink_x, lambda_s](double x, double) -> std::array<double, 4> {
        return {1.0 - 2.0 * x / sink_x, 0.0, 0.0, lambda_s};
    };
    return f;
}

// ---------------------------------------------------------------------------
// Equilibria

enum class EqType { Saddle, Sink, Source };

struct Equilibrium {
    Vec2 p{};
    double eig1 = 0.0, eig2 = 0.0;  // sorted ascending; real parts if complex
    bool complex_pair = false;
    EqType type = EqType::Saddle;
};

struct NewtonDivergence {
    Vec2 seed{};
    int iters = 0;
};

struct EquilibriaResult {
    std::vector<Equilibrium> points;
    std::vector<NewtonDivergence> divergences;
};

namespace detail {

inline std::array<double, 4> fd_jacobian(const PlanarField& f, double x, double y,
                                         double h = 1e-6) {
    Vec2 fx1 = f.F(x + h, y), fx0 = f.F(x - h, y);
    Vec2 fy1 = f.F(x, y + h), fy0 = f.F(x, y - h);
    return {(fx1[0] - fx0[0]) / (2 * h), (fy1[0] - fy0[0]) / (2 * h),
            (fx1[1] - fx0[1]) / (2 * h), (fy1[1] - fy0[1]) / (2 * h)};
}

inline std::array<double, 4> jacobian(const PlanarField& f, double x, double y) {
    return f.J ? f.J(x, y) : fd_jacobian(f, x, y);
}

// Damped Newton on F = 0 from a seed; nullopt on divergence.
inline std::optional<Vec2> newton(const PlanarField& f, Vec2 p, double tol_root,
                                  int max_iter, int* iters_out) {
    for (int it = 0; it < max_iter; ++it) {
        Vec2 v = f.F(p[0], p[1]);
        double r = std::max(std::abs(v[0]), std::abs(v[1]));
        if (r <= tol_root) { if (iters_out) *iters_out = it; return p; }
        auto Jm = jacobian(f, p[0], p[1]);
        double det = Jm[0] * Jm[3] - Jm[1] * Jm[2];
        if (std::abs(det) < 1e-14) break;
        double dx = (-v[0] * Jm[3] + v[1] * Jm[1]) / det;
        double dy = (-v[1] * Jm[0] + v[0] * Jm[2]) / det;
        double step = 1.0;
        for (int half = 0; half < 12; ++half) {
            Vec2 q = {p[0] + step * dx, p[1] + step * dy};
            Vec2 w = f.F(q[0], q[1]);
            if (std::max(std::abs(w[0]), std::abs(w[1])) < r) { p = q; break; }
            step *= 0.5;
            if (half == 11) { if (iters_out) *iters_out = it; return std::nullopt; }
        }
        if (std::abs(p[0]) > 1e6 || std::abs(p[1]) > 1e6) {
            if (iters_out) *iters_out = it;
            return std::nullopt;
        }
    }
    if (iters_out) *iters_out = max_iter;
    return std::nullopt;
}

inline Equilibrium classify(const PlanarField& f, Vec2 p) {
    auto Jm = jacobian(f, p[0], p[1]);
    double tr = Jm[0] + Jm[3], det = Jm[0] * Jm[3] - Jm[1] * Jm[2];
    double disc = tr * tr - 4.0 * det;
    Equilibrium e;
    e.p = p;
    if (disc >= 0.0) {
        double sq = std::sqrt(disc);
        e.eig1 = 0.5 * (tr - sq);
        e.eig2 = 0.5 * (tr + sq);
    } else {
        e.complex_pair = true;
        e.eig1 = e.eig2 = 0.5 * tr;
    }
    if (det < 0.0) e.type = EqType::Saddle;
    else if (tr < 0.0) e.type = EqType::Sink;
    else e.type = EqType::Source;
    return e;
}

}  // namespace detail

// Single damped-Newton solve; a divergence is recorded on the result, never
// thrown.
inline std::optional<Equilibrium> newton_from_seed(const PlanarField& f, Vec2 seed,
                                                   EquilibriaResult& log,
                                                   const Tolerances& tol = {}) {
    int iters = 0;
    if (auto p = detail::newton(f, seed, tol.tol_root, 80, &iters)) {
        Equilibrium e = detail::classify(f, *p);
        log.points.push_back(e);
        return e;
    }
    log.divergences.push_back({seed, iters});
    return std::nullopt;
}

// Grid scan for sign-change cells, then damped Newton; duplicates merged at
// 10 * tol_root.  An identically-zero field (on the grid) is rejected.
inline EquilibriaResult equilibria(const PlanarField& f, int grid_n = 64,
                                   const Tolerances& tol = {}) {
    if (grid_n < 2) throw DomainError("equilibria: grid too coarse");
    std::vector<std::vector<Vec2>> vals(size_t(grid_n) + 1,
                                        std::vector<Vec2>(size_t(grid_n) + 1));
    double maxmag = 0.0;
    for (int i = 0; i <= grid_n; ++i)
        for (int j = 0; j <= grid_n; ++j) {
            double x = f.xlo + (f.xhi - f.xlo) * double(i) / grid_n;
            double y = f.ylo + (f.yhi - f.ylo) * double(j) / grid_n;
            vals[size_t(i)][size_t(j)] = f.F(x, y);
            maxmag = std::max({maxmag, std::abs(vals[size_t(i)][size_t(j)][0]),
                               std::abs(vals[size_t(i)][size_t(j)][1])});
        }
    if (maxmag < 1e-12) throw DomainError("equilibria: identically zero field");

    EquilibriaResult res;
    auto push_unique = [&](const Equilibrium& e) {
        for (const auto& q : res.points)
            if (std::abs(q.p[0] - e.p[0]) <= 10.0 * tol.tol_root &&
                std::abs(q.p[1] - e.p[1]) <= 10.0 * tol.tol_root)
                return;
        res.points.push_back(e);
    };

    for (int i = 0; i < grid_n; ++i)
        for (int j = 0; j < grid_n; ++j) {
            // a cell is a candidate when each component changes sign (or
            // vanishes) over its corners
            double f0min = 1e300, f0max = -1e300, f1min = 1e300, f1max = -1e300;
            for (int di = 0; di <= 1; ++di)
                for (int dj = 0; dj <= 1; ++dj) {
                    const Vec2& v = vals[size_t(i + di)][size_t(j + dj)];
                    f0min = std::min(f0min, v[0]); f0max = std::max(f0max, v[0]);
                    f1min = std::min(f1min, v[1]); f1max = std::max(f1max, v[1]);
                }
            if (f0min > 0.0 || f0max < 0.0 || f1min > 0.0 || f1max < 0.0) continue;
            double cx = f.xlo + (f.xhi - f.xlo) * (double(i) + 0.5) / grid_n;
            double cy = f.ylo + (f.yhi - f.ylo) * (double(j) + 0.5) / grid_n;
            int iters = 0;
            if (auto p = detail::newton(f, {cx, cy}, tol.tol_root, 80, &iters)) {
                if ((*p)[0] >= f.xlo - 1e-9 && (*p)[0] <= f.xhi + 1e-9 &&
                    (*p)[1] >= f.ylo - 1e-9 && (*p)[1] <= f.yhi + 1e-9)
                    push_unique(detail::classify(f, *p));
            } else {
                res.divergences.push_back({{cx, cy}, iters});
            }
        }
    return res;
}

// ---------------------------------------------------------------------------
// DA-style perturbation family

// C-infinity bump: psi(r) = e * exp(-1 / (1 - (r/R)^2)) for r < R, 0 outside.
// Normalized so psi(0) = 1; support is exactly the closed disk of radius R.
inline double bump(double r, double R) {
    double s = r / R;
    if (s >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

struct DAFamily {
    PlanarField base;
    Vec2 center{0.0, 0.0};  // the saddle being split
    double radius = 0.15;   // support radius of the perturbation

    // B_t = base + (0, t * psi(r) * y): pushes the y-eigenvalue of the
    // centered equilibrium from lambda_s to lambda_s + t.
    PlanarField perturb(double t) const {
        PlanarField f = base;
        f.name = base.name + "+DA";
        auto base_F = base.F;
        Vec2 c = center;
        double R = radius;
        f.F = [base_F, c, R, t](double x, double y) -> Vec2 {
            Vec2 v = base_F(x, y);
            double r = std::hypot(x - c[0], y - c[1]);
            v[1] += t * bump(r, R) * y;
            return v;
        };
        f.J = nullptr;  // perturbed Jacobian via finite differences
        return f;
    }
};

inline DAFamily default_da_family() {
    DAFamily fam;
    fam.base = cherry_field();
    fam.center = {0.0, 0.0};
    fam.radius = 0.15;
    return fam;
}

// ---------------------------------------------------------------------------
// Lorenz-like spectra

struct SingularitySpectrum {
    double ss = 0.0;  // strong stable
    double s = 0.0;   // weak stable
    double u = 0.0;   // unstable
};

inline bool is_lorenz_like(const SingularitySpectrum& sp) {
    return sp.ss < sp.s && sp.s < 0.0 && 0.0 < -sp.s && -sp.s < sp.u;
}

struct ProductSaddle {
    Equilibrium planar;
    SingularitySpectrum spectrum;
    bool lorenz_like = false;
};

// Take the product of each planar saddle with a strong linear contraction
// lambda_ss and test the Lorenz-like ordering.
inline std::vector<ProductSaddle> productize(const PlanarField& f, double lambda_ss,
                                             int grid_n = 64, const Tolerances& tol = {}) {
    std::vector<ProductSaddle> out;
    for (const auto& e : equilibria(f, grid_n, tol).points) {
        if (e.type != EqType::Saddle) continue;
        ProductSaddle ps;
        ps.planar = e;
        ps.spectrum = {lambda_ss, e.eig1, e.eig2};  // eig1 < 0 < eig2 at a saddle
        if (lambda_ss >= e.eig1) ps.spectrum = {e.eig1, lambda_ss, e.eig2};
        ps.lorenz_like = is_lorenz_like(ps.spectrum);
        out.push_back(ps);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Separatrix targets

namespace detail {

// One embedded RK45 (Cash-Karp) step with error estimate.
inline Vec2 rk45_step(const PlanarField& f, Vec2 p, double h, double& err) {
    auto ev = [&](double x, double y) { return f.F(x, y); };
    Vec2 k1 = ev(p[0], p[1]);
    Vec2 k2 = ev(p[0] + h * 0.2 * k1[0], p[1] + h * 0.2 * k1[1]);
    Vec2 k3 = ev(p[0] + h * (3.0 / 40 * k1[0] + 9.0 / 40 * k2[0]),
                 p[1] + h * (3.0 / 40 * k1[1] + 9.0 / 40 * k2[1]));
    Vec2 k4 = ev(p[0] + h * (0.3 * k1[0] - 0.9 * k2[0] + 1.2 * k3[0]),
                 p[1] + h * (0.3 * k1[1] - 0.9 * k2[1] + 1.2 * k3[1]));
    Vec2 k5 = ev(p[0] + h * (-11.0 / 54 * k1[0] + 2.5 * k2[0] - 70.0 / 27 * k3[0] + 35.0 / 27 * k4[0]),
                 p[1] + h * (-11.0 / 54 * k1[1] + 2.5 * k2[1] - 70.0 / 27 * k3[1] + 35.0 / 27 * k4[1]));
    Vec2 k6 = ev(p[0] + h * (1631.0 / 55296 * k1[0] + 175.0 / 512 * k2[0] + 575.0 / 13824 * k3[0] +
                             44275.0 / 110592 * k4[0] + 253.0 / 4096 * k5[0]),
                 p[1] + h * (1631.0 / 55296 * k1[1] + 175.0 / 512 * k2[1] + 575.0 / 13824 * k3[1] +
                             44275.0 / 110592 * k4[1] + 253.0 / 4096 * k5[1]));
    Vec2 y5, y4;
    for (int i = 0; i < 2; ++i) {
        double ki1 = (i == 0 ? k1[0] : k1[1]), ki3 = (i == 0 ? k3[0] : k3[1]);
        double ki4 = (i == 0 ? k4[0] : k4[1]), ki5 = (i == 0 ? k5[0] : k5[1]);
        double ki6 = (i == 0 ? k6[0] : k6[1]);
        y5[size_t(i)] = p[size_t(i)] + h * (37.0 / 378 * ki1 + 250.0 / 621 * ki3 +
                                            125.0 / 594 * ki4 + 512.0 / 1771 * ki6);
        y4[size_t(i)] = p[size_t(i)] + h * (2825.0 / 27648 * ki1 + 18575.0 / 48384 * ki3 +
                                            13525.0 / 55296 * ki4 + 277.0 / 14336 * ki5 +
                                            0.25 * ki6);
    }
    err = std::max(std::abs(y5[0] - y4[0]), std::abs(y5[1] - y4[1]));
    return y5;
}

}  // namespace detail

struct SeparatrixHit {
    std::string label;      // which saddle the branch leaves
    Vec2 entry{};           // first point inside the target disk
    double time = 0.0;
    std::string component;  // "upper" / "lower" by the sign of y at entry
    std::vector<Vec2> path; // decimated trace for export
};

struct SeparatrixConfig {
    Vec2 disk_center{0.6, 0.0};
    double disk_radius = 0.2;
    double seed_offset = 1e-4;  // offset along the unstable eigendirection
    double t_max = 200.0;
    size_t max_steps = 2'000'000;
};

// Integrate one unstable branch from a seed until it enters the target disk.
inline SeparatrixHit trace_separatrix(const PlanarField& f, const std::string& label,
                                      Vec2 seed, const SeparatrixConfig& cfg,
                                      const Tolerances& tol = {}) {
    Vec2 p = seed;
    double t = 0.0, h = 1e-3;
    std::vector<Vec2> path = {p};
    for (size_t step = 0; step < cfg.max_steps; ++step) {
        double d = std::hypot(p[0] - cfg.disk_center[0], p[1] - cfg.disk_center[1]);
        if (d <= cfg.disk_radius) {
            SeparatrixHit hit;
            hit.label = label;
            hit.entry = p;
            hit.time = t;
            hit.component = p[1] >= 0.0 ? "upper" : "lower";
            hit.path = std::move(path);
            hit.path.push_back(p);
            return hit;
        }
        if (t > cfg.t_max) break;
        double err = 0.0;
        Vec2 q = detail::rk45_step(f, p, h, err);
        if (err > tol.tol_ode && h > 1e-12) {
            h = std::max(1e-12, 0.5 * h);
            continue;
        }
        p = q;
        t += h;
        if (step % 16 == 0) path.push_back(p);
        if (err < 0.1 * tol.tol_ode) h = std::min(0.05, 2.0 * h);
    }
    throw NoCrossing("separatrix: no disk entry within the time budget");
}

// Unstable eigendirection of a planar saddle (for the positive eigenvalue).
inline Vec2 unstable_direction(const PlanarField& f, Vec2 p) {
    auto Jm = detail::jacobian(f, p[0], p[1]);
    double tr = Jm[0] + Jm[3], det = Jm[0] * Jm[3] - Jm[1] * Jm[2];
    double disc = std::max(0.0, tr * tr - 4.0 * det);
    double lam = 0.5 * (tr + std::sqrt(disc));
    // (J - lam I) v = 0
    double a = Jm[0] - lam, b = Jm[1], c = Jm[2], d2 = Jm[3] - lam;
    Vec2 v;
    if (std::abs(a) + std::abs(b) >= std::abs(c) + std::abs(d2)) v = {-b, a};
    else v = {-d2, c};
    double n = std::hypot(v[0], v[1]);
    if (n < 1e-14) return {1.0, 0.0};
    return {v[0] / n, v[1] / n};
}

// Both saddle branches aimed at the sink disk; the required configuration is
// that they enter through distinct components (distinct signs of y).
struct SeparatrixReport {
    std::vector<SeparatrixHit> hits;
    bool distinct_components = false;
};

inline SeparatrixReport separatrix_targets(const PlanarField& f,
                                           const std::vector<std::pair<std::string, Vec2>>& seeds,
                                           const SeparatrixConfig& cfg = {},
                                           const Tolerances& tol = {}) {
    SeparatrixReport rep;
    for (const auto& [label, seed] : seeds)
        rep.hits.push_back(trace_separatrix(f, label, seed, cfg, tol));
    if (rep.hits.size() >= 2) {
        bool up = false, down = false;
        for (const auto& h : rep.hits) (h.component == "upper" ? up : down) = true;
        rep.distinct_components = up && down;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Default plug pipeline: perturb the Cherry saddle with parameter tau; for
// tau > -lambda_s the origin becomes a source and sheds two symmetric
// equilibria at (0, +-y*) with bump(y*) * tau = -lambda_s; each is a planar
// saddle whose product with the strong contraction is Lorenz-like for the
// default window of tau.

struct PlugResult {
    PlanarField field;
    double tau = 0.0;
    std::vector<ProductSaddle> saddles;      // the two split saddles
    std::vector<Equilibrium> all_equilibria;
    SeparatrixReport separatrices;
    bool lorenz_like = false;
};

inline PlugResult build_plug(double tau = 0.75, double lambda_ss = -10.0,
                             int grid_n = 96, const Tolerances& tol = {}) {
    DAFamily fam = default_da_family();
    PlugResult res;
    res.tau = tau;
    res.field = fam.perturb(tau);

    auto eq = equilibria(res.field, grid_n, tol);
    res.all_equilibria = eq.points;
    res.saddles = productize(res.field, lambda_ss, grid_n, tol);
    // keep only the split pair on the y-axis
    std::erase_if(res.saddles, [](const ProductSaddle& s) {
        return std::abs(s.planar.p[0]) > 1e-6 || std::abs(s.planar.p[1]) < 1e-9;
    });
    res.lorenz_like = res.saddles.size() == 2;
    for (const auto& s : res.saddles) res.lorenz_like = res.lorenz_like && s.lorenz_like;

    std::vector<std::pair<std::string, Vec2>> seeds;
    int idx = 1;
    for (const auto& s : res.saddles) {
        Vec2 dir = unstable_direction(res.field, s.planar.p);
        if (dir[0] < 0.0) dir = {-dir[0], -dir[1]};  // branch aimed at the sink
        seeds.push_back({"sigma" + std::to_string(idx++),
                         {s.planar.p[0] + 1e-4 * dir[0], s.planar.p[1] + 1e-4 * dir[1]}});
    }
    if (seeds.size() == 2) res.separatrices = separatrix_targets(res.field, seeds, {}, tol);
    return res;
}

}  // namespace venice::cherryplug
