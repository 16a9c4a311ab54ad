#include "ktorus/elliptic.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ktorus {

namespace {

constexpr int kMaxAgm = 40;

struct Cache {
    double u = std::numeric_limits<double>::quiet_NaN();
    double m = std::numeric_limits<double>::quiet_NaN();
    SnCnDn v{};
};

thread_local Cache tl_cache;

SnCnDn compute(double u, double m) {
    if (m < 0.0 || m > 1.0 || std::isnan(m)) {
        throw std::domain_error("jacobi parameter m outside [0,1]");
    }
    if (m == 0.0) {
        return {std::sin(u), std::cos(u), 1.0};
    }
    if (m == 1.0) {
        double s = 1.0 / std::cosh(u);
        return {std::tanh(u), s, s};
    }
    std::array<double, kMaxAgm + 1> a{}, c{};
    a[0] = 1.0;
    double b = std::sqrt(1.0 - m);
    c[0] = std::sqrt(m);
    int n = 0;
    while (std::abs(c[n]) > 2.3e-16 * a[n] && n < kMaxAgm) {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = std::sqrt(a[n] * b);
        ++n;
    }
    double phi = std::ldexp(a[n] * u, n);
    for (int i = n; i > 0; --i) {
        phi = 0.5 * (phi + std::asin(c[i] / a[i] * std::sin(phi)));
    }
    double sn = std::sin(phi);
    double cn = std::cos(phi);
    // 1 - m sn^2 written without cancellation
    double dn = std::sqrt((1.0 - m) + m * cn * cn);
    return {sn, cn, dn};
}

}  // namespace

SnCnDn sncndn(double u, double m) {
    Cache& c = tl_cache;
    if (u == c.u && m == c.m) {
        return c.v;
    }
    SnCnDn v = compute(u, m);
    c.u = u;
    c.m = m;
    c.v = v;
    return v;
}

double ellipk(double m) {
    if (m < 0.0 || m >= 1.0) {
        throw std::domain_error("ellipk needs 0 <= m < 1");
    }
    double a = 1.0;
    double b = std::sqrt(1.0 - m);
    for (int i = 0; i < kMaxAgm && std::abs(a - b) > 1e-16 * a; ++i) {
        double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return M_PI / (2.0 * a);
}

}  // namespace ktorus
