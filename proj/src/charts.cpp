#include "ktorus/charts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ktorus/errors.hpp"
#include "ktorus/numerics.hpp"

namespace ktorus {

Metric2 ribbon_metric(const FProfile& p, int sigma, double x) {
    return {0.0, static_cast<double>(sigma), p.f(x)};
}

ChristoffelData christoffel(const FProfile& p, int sigma, double x) {
    auto d = p.derivs(x, 1);
    ChristoffelData c;
    c.x_yy = 0.5 * d[0] * d[1];
    c.x_xy = 0.5 * sigma * d[1];
    c.y_yy = -0.5 * sigma * d[1];
    return c;
}

double curvature(const FProfile& p, double x) { return 0.5 * p.derivs(x, 2)[2]; }

TransitionPrimitive::TransitionPrimitive(const FProfile& p, const Band& band, double x_ref)
    : p_(&p), lo_(band.lo), hi_(band.hi), x_ref_(x_ref) {
    if (p.flat) {
        lo_ = -INFINITY;
        hi_ = INFINITY;
    }
    if (!(x_ref > lo_ && x_ref < hi_)) {
        throw Error(ErrorKind::OutOfBand, "reference point outside the open band");
    }
}

double TransitionPrimitive::operator()(double x) const {
    if (!(x > lo_ && x < hi_)) {
        throw Error(ErrorKind::OutOfBand, "G evaluated outside the open band");
    }
    if (x == x_ref_) return 0.0;
    return -integrate_gk([this](double t) { return 1.0 / p_->f(t); }, x_ref_, x, 1e-13);
}

double TransitionPrimitive::derivative(double x) const {
    if (!(x > lo_ && x < hi_)) {
        throw Error(ErrorKind::OutOfBand, "G' evaluated outside the open band");
    }
    return -1.0 / p_->f(x);
}

TransitionPrimitive transition_primitive(const FProfile& p, const Band& band, double x_ref) {
    return TransitionPrimitive(p, band, x_ref);
}

std::array<double, 2> transition(const TransitionPrimitive& G, int sigma, double x, double y) {
    return {x, y - 2.0 * sigma * G(x)};
}

std::array<double, 2> transition_inverse(const TransitionPrimitive& G, int sigma, double x,
                                         double y) {
    return {x, y + 2.0 * sigma * G(x)};
}

Jacobian2 transition_jacobian(const TransitionPrimitive& G, int sigma, double x) {
    return {{{1.0, 0.0}, {-2.0 * sigma * G.derivative(x), 1.0}}};
}

std::array<double, 2> killing_reflection(const TransitionPrimitive& G, double x, double y) {
    return {x, 2.0 * G(x) - y};
}

Jacobian2 killing_reflection_jacobian(const TransitionPrimitive& G, double x) {
    return {{{1.0, 0.0}, {2.0 * G.derivative(x), -1.0}}};
}

std::array<double, 2> generic_reflection(const TransitionPrimitive& G, double x, double y) {
    return {-x, 2.0 * G(-x) + y};
}

Jacobian2 generic_reflection_jacobian(const TransitionPrimitive& G, double x) {
    return {{{-1.0, 0.0}, {-2.0 * G.derivative(-x), 1.0}}};
}

Metric2 pullback(const Metric2& g, const Jacobian2& J) {
    // (J^T g J)_{ij} = sum_ab J[a][i] g_ab J[b][j]
    double G[2][2] = {{g.g11, g.g12}, {g.g12, g.g22}};
    double out[2][2] = {};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) out[i][j] += J[a][i] * G[a][b] * J[b][j];
    return {out[0][0], out[0][1], out[1][1]};
}

SaddleChart::SaddleChart(const FProfile& p, long k, double half_width)
    : p_(&p), xk_(p.zero_at(k)), hw_(half_width) {
    lambda_ = p.derivs(xk_, 1)[1];
    if (std::abs(lambda_) <= p.tol.margin_simple) {
        throw Error(ErrorKind::DegenerateZero, "saddle chart needs a simple zero");
    }
}

double SaddleChart::j(double x) const {
    return integrate_gl20([&](double t) { return p_->derivs(xk_ + t * x, 1)[1]; }, 0.0, 1.0);
}

double SaddleChart::jprime(double x) const {
    return integrate_gl20([&](double t) { return t * p_->derivs(xk_ + t * x, 2)[2]; }, 0.0, 1.0);
}

double SaddleChart::l(double x) const {
    double v = j(x);
    return v - 1.0 / v;
}

double SaddleChart::h(double x) const {
    return integrate_gl20(
        [&](double t) {
            double jj = j(t * x);
            return jprime(t * x) * (1.0 + 1.0 / (jj * jj));
        },
        0.0, 1.0);
}

Metric2 SaddleChart::metric(double u, double v) const {
    double x = u * v;
    double jj = j(x);
    double hh = h(x);
    return {v * v * hh / lambda_, -(jj + 1.0 / jj) / lambda_, u * u * hh / lambda_};
}

std::array<double, 2> SaddleChart::killing(double u, double v) const {
    return {2.0 / lambda_ * u, -2.0 / lambda_ * v};
}

SaddleChart saddle_chart(const FProfile& p, long k, double half_width) {
    if (half_width <= 0.0) {
        double xk = p.zero_at(k);
        double d = std::min(xk - p.zero_at(k - 1), p.zero_at(k + 1) - xk);
        if (p.zeros.size() == 1) d = p.period;
        half_width = 0.4 * d;
    }
    return SaddleChart(p, k, half_width);
}

NullOrbitParam null_orbit_parametrization(const FProfile& p, long k, int eta) {
    NullOrbitParam r;
    r.x = p.zero_at(k);
    r.eta = eta;
    double fp = p.derivs(r.x, 1)[1];
    if (std::abs(fp) <= p.tol.margin_simple) {
        throw Error(ErrorKind::DegenerateZero, "complete null orbit: zero is not simple");
    }
    r.coefficient = -0.5 * eta * fp;
    // along x = x_k, nabla_K K = Gamma^x_yy d_x + Gamma^y_yy d_y with f = 0
    auto c = christoffel(p, 1, r.x);
    r.nabla_kk = c.y_yy;
    char buf[160];
    std::snprintf(buf, sizeof buf, "-2/(%.17g) * exp(%.17g t)", eta * fp, r.coefficient);
    r.description = buf;
    return r;
}

}  // namespace ktorus
