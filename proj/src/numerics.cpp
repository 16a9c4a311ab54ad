#include "ktorus/numerics.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "ktorus/errors.hpp"

namespace ktorus {

double solve_bracket(const std::function<double(double)>& g, double a, double b, double xtol,
                     double ga, double gb) {
    if (std::isnan(ga)) ga = g(a);
    if (std::isnan(gb)) gb = g(b);
    if (ga == 0.0) return a;
    if (gb == 0.0) return b;
    if ((ga > 0) == (gb > 0)) {
        throw Error(ErrorKind::Numeric, "solve_bracket: no sign change");
    }
    std::uintmax_t iters = 200;
    auto tol = [xtol](double lo, double hi) { return std::abs(hi - lo) <= xtol * std::max(1.0, std::abs(lo)); };
    auto r = boost::math::tools::toms748_solve(g, a, b, ga, gb, tol, iters);
    double x = 0.5 * (r.first + r.second);
    return x;
}

std::pair<double, double> minimize_on(const std::function<double(double)>& g, double a, double b,
                                      int bits) {
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::brent_find_minima(g, a, b, bits, iters);
    return {r.first, r.second};
}

std::vector<double> chebyshev_nodes(double lo, double hi, int n) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        double th = M_PI * (j + 0.5) / n;
        out.push_back(lo + (hi - lo) * 0.5 * (1.0 - std::cos(th)));
    }
    return out;
}

double integrate_gk(const std::function<double(double)>& g, double a, double b, double rel_tol,
                    double* err) {
    double e = 0.0;
    double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, a, b, 15, rel_tol, &e);
    if (err) *err = e;
    return v;
}

double integrate_ts(const std::function<double(double)>& g, double a, double b, double rel_tol,
                    double* err) {
    static thread_local boost::math::quadrature::tanh_sinh<double> ts(12);
    double e = 0.0;
    double v = ts.integrate(g, a, b, rel_tol, &e);
    if (err) *err = e;
    return v;
}

double integrate_gl20(const std::function<double(double)>& g, double a, double b) {
    return boost::math::quadrature::gauss<double, 20>::integrate(g, a, b);
}

}  // namespace ktorus
