#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace venice {

// Error types shared across modules. Failures of *checked properties* are
// report entries, not exceptions; these are for contract violations.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};
struct EmptyInput : std::runtime_error {
    explicit EmptyInput(const std::string& msg) : std::runtime_error(msg) {}
};
struct QuadratureFailure : std::runtime_error {
    explicit QuadratureFailure(const std::string& msg) : std::runtime_error(msg) {}
};
struct SingularLeaf : std::runtime_error {
    explicit SingularLeaf(const std::string& msg) : std::runtime_error(msg) {}
};
struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& msg) : std::runtime_error(msg) {}
};
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};
struct NoCrossing : std::runtime_error {
    explicit NoCrossing(const std::string& msg) : std::runtime_error(msg) {}
};
struct StagnationAtSingularity : std::runtime_error {
    explicit StagnationAtSingularity(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical tolerances. Defaults are sized for double precision at desk scale.
struct Tolerances {
    double tol_root  = 1e-10;  // root / fixed-point solves
    double tol_lim   = 1e-9;   // one-sided limit comparisons
    double tol_cover = 1e-6;   // allowed total gap in interval coverings
    double tol_quad  = 1e-8;   // adaptive quadrature
    double tol_fix   = 1e-10;  // 2D fixed-point solves
    double tol_ode   = 1e-9;   // ODE local error
    double tol_time  = 1e-8;   // return-time consistency
    int    n_deriv   = 1024;   // derivative samples per branch
};

inline bool approx_eq(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace venice
