#pragma once

#include <array>
#include <functional>
#include <string>

#include "ktorus/profile.hpp"

namespace ktorus {

// Symmetric 2x2 metric in coordinates (a, b): g_aa da^2 + 2 g_ab da db + g_bb db^2.
struct Metric2 {
    double g11 = 0.0;
    double g12 = 0.0;
    double g22 = 0.0;
    double det() const { return g11 * g22 - g12 * g12; }
};

using Jacobian2 = std::array<std::array<double, 2>, 2>;  // J[i][j] = d(target_i)/d(source_j)

// Ribbon metric 2 sigma dx dy + f(x) dy^2 at x.
Metric2 ribbon_metric(const FProfile& p, int sigma, double x);

// Nonzero Christoffel symbols of the ribbon metric.
struct ChristoffelData {
    double x_yy = 0.0;
    double x_xy = 0.0;
    double y_yy = 0.0;
};

ChristoffelData christoffel(const FProfile& p, int sigma, double x);

// Gauss curvature f''/2.
double curvature(const FProfile& p, double x);

// G with G' = -1/f on an open band, G(x_ref) = 0.
class TransitionPrimitive {
public:
    TransitionPrimitive(const FProfile& p, const Band& band, double x_ref);
    double operator()(double x) const;
    double derivative(double x) const;
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double x_ref() const { return x_ref_; }

private:
    const FProfile* p_;
    double lo_;
    double hi_;
    double x_ref_;
};

TransitionPrimitive transition_primitive(const FProfile& p, const Band& band, double x_ref);

// psi from a chart of parity sigma into the neighbouring one: (x, y - 2 sigma G(x)).
std::array<double, 2> transition(const TransitionPrimitive& G, int sigma, double x, double y);
std::array<double, 2> transition_inverse(const TransitionPrimitive& G, int sigma, double x,
                                         double y);
Jacobian2 transition_jacobian(const TransitionPrimitive& G, int sigma, double x);

// (x, 2G(x) - y): band isometry reversing K.
std::array<double, 2> killing_reflection(const TransitionPrimitive& G, double x, double y);
Jacobian2 killing_reflection_jacobian(const TransitionPrimitive& G, double x);

// (-x, 2G(-x) + y), G taken on the band of -x. Pulls g_f back to g_{f(-x)}.
std::array<double, 2> generic_reflection(const TransitionPrimitive& G, double x, double y);
Jacobian2 generic_reflection_jacobian(const TransitionPrimitive& G, double x);

// J^T g J.
Metric2 pullback(const Metric2& target, const Jacobian2& J);

class SaddleChart {
public:
    SaddleChart(const FProfile& p, long k, double half_width);

    double anchor() const { return xk_; }
    double lambda() const { return lambda_; }
    double half_width() const { return hw_; }

    // x is the offset from the anchor.
    double j(double x) const;
    double jprime(double x) const;
    double l(double x) const;
    double h(double x) const;

    Metric2 metric(double u, double v) const;
    // Killing field (2/lambda)(u d_u - v d_v).
    std::array<double, 2> killing(double u, double v) const;
    bool contains(double u, double v) const { return std::abs(u * v) < hw_; }

private:
    const FProfile* p_;
    double xk_;
    double lambda_;
    double hw_;
};

// Default half width: 0.4 times the distance to the nearest other zero.
SaddleChart saddle_chart(const FProfile& p, long k, double half_width = 0.0);

struct NullOrbitParam {
    double x = 0.0;
    int eta = 1;
    double coefficient = 0.0;   // -eta f'(x_k) / 2
    double nabla_kk = 0.0;      // factor c in nabla_K K = c K on the orbit
    std::string description;
};

NullOrbitParam null_orbit_parametrization(const FProfile& p, long k, int eta);

}  // namespace ktorus
