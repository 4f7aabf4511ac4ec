#pragma once

#include <cmath>
#include <vector>

#include "venice/common.hpp"

namespace venice {

// Polynomial in one variable, coefficients in increasing degree.
struct Polynomial {
    std::vector<double> coeffs;  // c0 + c1 x + c2 x^2 + ...

    static Polynomial affine(double c0, double c1) { return {{c0, c1}}; }

    double operator()(double x) const {
        double acc = 0.0;
        for (size_t k = coeffs.size(); k-- > 0;) acc = acc * x + coeffs[k];
        return acc;
    }

    Polynomial derivative() const {
        Polynomial d;
        for (size_t k = 1; k < coeffs.size(); ++k) d.coeffs.push_back(coeffs[k] * double(k));
        if (d.coeffs.empty()) d.coeffs.push_back(0.0);
        return d;
    }

    int degree() const { return coeffs.empty() ? 0 : int(coeffs.size()) - 1; }
};

// Inverse of a polynomial strictly monotone on [a, b], solved for p(x) = y.
// Affine and quadratic cases are closed-form; higher degrees bisect.
inline double monotone_inverse(const Polynomial& p, double a, double b, double y,
                               double tol = 1e-14) {
    const auto& c = p.coeffs;
    if (c.size() == 2) {
        return (y - c[0]) / c[1];
    }
    if (c.size() == 3 && c[2] != 0.0) {
        // c2 x^2 + c1 x + (c0 - y) = 0; pick the root in [a, b]
        double disc = c[1] * c[1] - 4.0 * c[2] * (c[0] - y);
        if (disc < 0.0) disc = 0.0;
        double sq = std::sqrt(disc);
        double q = -0.5 * (c[1] + (c[1] >= 0 ? sq : -sq));
        double r1 = q / c[2];
        double r2 = (q != 0.0) ? (c[0] - y) / q : r1;
        double mid = 0.5 * (a + b), span = 0.5 * (b - a) + 1e-12;
        if (std::abs(r1 - mid) <= span) return r1;
        return r2;
    }
    double lo = a, hi = b;
    bool increasing = p(b) > p(a);
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        double m = 0.5 * (lo + hi);
        if ((p(m) < y) == increasing) lo = m;
        else hi = m;
    }
    return 0.5 * (lo + hi);
}

}  // namespace venice
