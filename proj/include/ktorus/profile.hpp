#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ktorus/expr.hpp"

namespace ktorus {

struct Tolerances {
    double tol_root = 1e-12;
    double tol_sym = 1e-9;
    double margin_simple = 1e-6;
    double tol_axis = 1e-8;  // symmetry-axis residual
    int grid = 10000;
    int max_divisor = 12;
};

struct Band {
    double lo = 0.0;
    double hi = 0.0;  // may exceed the period for the wrapping band
    int eps = 0;
    double sup_abs = 0.0;  // M_eps = sup of eps*f
    double x_cr = 0.0;     // argmax of eps*f
    std::vector<double> critical_xs;
    std::vector<double> curvature_zeros;
    double width() const { return hi - lo; }
};

struct FProfile {
    Expression expr;
    double period = 0.0;
    double period_residual = 0.0;
    std::vector<double> zeros;
    std::vector<double> zero_slopes;
    std::vector<Band> bands;
    std::vector<double> critical_points;
    std::vector<double> obstruction_residuals;  // f'(x_k) + f'(x_{k+1}), cyclic
    std::optional<double> symmetry_axis;
    int n_bands = 0;
    bool flat = false;
    bool no_null_orbits = false;
    bool degenerate = false;
    std::vector<double> degenerate_zeros;
    std::vector<std::string> notes;
    Tolerances tol;

    double f(double x) const { return expr.eval(x); }
    std::array<double, 4> derivs(double x, int order = 3) const { return expr.eval_derivs(x, order); }
    bool certifiable() const { return !degenerate && !flat && n_bands >= 2; }

    // Zero number k of the lifted sequence (any integer k), increasing in k.
    double zero_at(long k) const;
    // Band between zero_at(k) and zero_at(k+1), shifted by whole periods.
    Band band_at(long k) const;
    // Index k with zero_at(k) <= x < zero_at(k+1).
    long band_index_of(double x) const;
};

FProfile build_profile(const Expression& expr, double hint_period, const Tolerances& tol = {});

std::array<double, 4> sample_derivatives(const FProfile& p, double x);

// Axis a in [0, P) with f(a+t) = f(a-t), if the residual is below tol.
std::optional<double> detect_symmetry(const FProfile& p, double tol, double* residual = nullptr);

// Max over a t-grid of |f(a+t) - f(a-t)|.
double symmetry_residual(const FProfile& p, double a, int n = 256);

std::vector<Band> decompose_bands(const FProfile& p);

// Sign-change roots of f^(k) on [lo, hi) from an n-cell grid. Exact grid
// zeros count once; the left endpoint and the right endpoint are excluded.
std::vector<double> derivative_roots(const FProfile& p, int k, double lo, double hi, int n);

}  // namespace ktorus
