#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace ktorus {

// Bracketed root of g on [a, b] (g(a), g(b) of opposite sign or zero).
// Stops when the bracket is narrower than xtol.
double solve_bracket(const std::function<double(double)>& g, double a, double b,
                     double xtol = 1e-15, double ga = NAN, double gb = NAN);

// Minimiser of g on [a, b] (Brent), returns (x, g(x)).
std::pair<double, double> minimize_on(const std::function<double(double)>& g, double a,
                                      double b, int bits = 52);

// Chebyshev-Lobatto style nodes mapped to [lo, hi], ascending, n >= 2.
// Node j = lo + (hi-lo) * (1 - cos(pi (j+1/2) / n)) / 2.
std::vector<double> chebyshev_nodes(double lo, double hi, int n);

// Adaptive Gauss-Kronrod 15/31 on a finite interval.
double integrate_gk(const std::function<double(double)>& g, double a, double b,
                    double rel_tol = 1e-12, double* err = nullptr);

// Tanh-sinh quadrature, used where an endpoint is singular or as an
// independent second rule.
double integrate_ts(const std::function<double(double)>& g, double a, double b,
                    double rel_tol = 1e-12, double* err = nullptr);

// Fixed 20-point Gauss-Legendre on [a, b].
double integrate_gl20(const std::function<double(double)>& g, double a, double b);

// Positive modulo into [0, p).
inline double wrap(double x, double p) {
    double r = std::fmod(x, p);
    if (r < 0.0) r += p;
    if (r >= p) r -= p;
    return r;
}

inline double sqr(double x) { return x * x; }

}  // namespace ktorus
