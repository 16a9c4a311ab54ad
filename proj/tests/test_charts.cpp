#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "ktorus/charts.hpp"
#include "ktorus/errors.hpp"
#include "ktorus/geodesic.hpp"

using namespace ktorus;
using doctest::Approx;

namespace {
FProfile make(const char* src, double hint) { return build_profile(Expression::parse(src), hint); }

void check_same(const Metric2& a, const Metric2& b, double tol) {
    CHECK(std::abs(a.g11 - b.g11) < tol);
    CHECK(std::abs(a.g12 - b.g12) < tol);
    CHECK(std::abs(a.g22 - b.g22) < tol);
}
}  // namespace

TEST_CASE("ribbon metric is Lorentzian with det -1") {
    auto p = make("sin(x)+0.3*sin(2*x)", 2 * M_PI);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-10, 10);
    for (int i = 0; i < 200; ++i) {
        double x = U(rng);
        for (int s : {1, -1}) {
            Metric2 g = ribbon_metric(p, s, x);
            CHECK(g.det() == Approx(-1.0).epsilon(1e-15));
            CHECK(g.g22 == Approx(p.f(x)));
        }
    }
}

TEST_CASE("christoffel symbols and curvature") {
    auto p = make("sin(2*x)", M_PI);
    double x = 0.3, f = std::sin(0.6), fp = 2 * std::cos(0.6);
    for (int s : {1, -1}) {
        auto c = christoffel(p, s, x);
        CHECK(c.x_yy == Approx(0.5 * f * fp));
        CHECK(c.x_xy == Approx(0.5 * s * fp));
        CHECK(c.y_yy == Approx(-0.5 * s * fp));
    }
    CHECK(curvature(p, x) == Approx(-2 * f));
}

TEST_CASE("transition primitive closed form for sin 2x") {
    auto p = make("sin(2*x)", M_PI);
    TransitionPrimitive G(p, p.bands[0], M_PI / 4);
    // G = -1/2 ln tan x, so G(pi/6) = ln 3 / 4
    CHECK(G(M_PI / 6) == Approx(std::log(3.0) / 4).epsilon(1e-12));
    for (double x : {0.1, 0.5, 1.0, 1.4})
        CHECK(G(x) == Approx(-0.5 * std::log(std::tan(x))).epsilon(1e-11));
    CHECK(G.derivative(0.5) == Approx(-1.0 / std::sin(1.0)));
    CHECK_THROWS_AS(G(M_PI / 2 + 0.1), Error);
}

TEST_CASE("transition pulls the neighbouring chart back to the ribbon metric") {
    auto p = make("sin(x)+0.3*sin(2*x)", 2 * M_PI);
    for (const Band& b : p.bands) {
        TransitionPrimitive G(p, b, b.x_cr);
        for (int i = 1; i < 20; ++i) {
            double x = b.lo + b.width() * i / 20, y = 0.7;
            for (int s : {1, -1}) {
                auto xy = transition(G, s, x, y);
                auto back = transition_inverse(G, s, xy[0], xy[1]);
                CHECK(back[0] == Approx(x).epsilon(1e-14));
                CHECK(back[1] == Approx(y).epsilon(1e-12));
                Metric2 pb = pullback(ribbon_metric(p, -s, xy[0]), transition_jacobian(G, s, x));
                check_same(pb, ribbon_metric(p, s, x), 1e-9);
            }
        }
    }
}

TEST_CASE("killing reflection is an isometry and generic reflection flips the profile") {
    auto p = make("sin(x)+0.3*sin(2*x)", 2 * M_PI);
    const Band& b = p.bands[0];
    TransitionPrimitive G(p, b, b.x_cr);
    for (int i = 1; i < 20; ++i) {
        double x = b.lo + b.width() * i / 20;
        auto J = killing_reflection_jacobian(G, x);
        auto img = killing_reflection(G, x, 0.2);
        CHECK(img[0] == x);
        check_same(pullback(ribbon_metric(p, 1, x), J), ribbon_metric(p, 1, x), 1e-9);
    }
    // G on the band of -x
    const Band nb = p.band_at(p.band_index_of(-0.5));
    TransitionPrimitive Gm(p, nb, nb.x_cr);
    for (double x : {0.2, 0.5, 0.9}) {
        auto J = generic_reflection_jacobian(Gm, x);
        Metric2 pb = pullback(ribbon_metric(p, 1, -x), J);
        CHECK(std::abs(pb.g11) < 1e-9);
        CHECK(pb.g12 == Approx(1.0));
        CHECK(pb.g22 == Approx(p.f(-x)));
        auto img = generic_reflection(Gm, x, 0.0);
        CHECK(img[0] == -x);
    }
}

TEST_CASE("saddle chart identities") {
    auto p = make("sin(2*x)", M_PI);
    SaddleChart ch(p, 0, 0.5);
    CHECK(ch.lambda() == Approx(2.0));
    CHECK(ch.j(0.0) == Approx(2.0));
    CHECK(ch.jprime(0.0) == Approx(0.0).epsilon(1e-12));  // f''(0)/2 = 0
    auto K = ch.killing(0.0, 0.0);
    CHECK(K[0] == 0.0);
    CHECK(K[1] == 0.0);
    // j(x) = (f(x_k + x) - f(x_k)) / x
    for (double x : {0.1, -0.2, 0.3}) CHECK(ch.j(x) == Approx(std::sin(2 * x) / x).epsilon(1e-12));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(-0.6, 0.6);
    for (int i = 0; i < 100; ++i) {
        double u = U(rng), v = U(rng);
        if (!ch.contains(u, v)) continue;
        Metric2 g = ch.metric(u, v);
        CHECK(g.det() < 0);
        // swap symmetry of the normal form
        Metric2 s = ch.metric(v, u);
        CHECK(g.g11 == Approx(s.g22));
        // invariance under the Killing flow (u, v) -> (a u, v / a)
        double a = 1.3;
        Jacobian2 J{{{a, 0.0}, {0.0, 1.0 / a}}};
        check_same(pullback(ch.metric(a * u, v / a), J), g, 1e-10);
    }
    CHECK_THROWS_AS(saddle_chart(make("ln(2+sin(x))", 2 * M_PI), 0), Error);
}

TEST_CASE("null orbit parametrisation") {
    auto p = make("sin(2*x)", M_PI);
    for (long k : {0L, 1L}) {
        double fp = p.derivs(p.zero_at(k), 1)[1];
        auto n1 = null_orbit_parametrization(p, k, 1);
        CHECK(n1.coefficient == Approx(-0.5 * fp));
        CHECK(n1.nabla_kk == Approx(-0.5 * fp));
        auto n2 = null_orbit_parametrization(p, k, -1);
        CHECK(n2.coefficient == Approx(0.5 * fp));
        // s(t) = -2/(eta f') exp(c t) inverts to t(s) with t'' = -c t'^2,
        // the geodesic equation along x = x_k with Gamma^y_yy = c (eta = 1)
        double c = n1.coefficient;
        auto t_of = [&](double s) { return std::log(-s * 0.5 * fp) / c; };
        double s = -2.0 / fp * std::exp(c * 0.4), h = 1e-4 * std::abs(s);
        double t1 = (t_of(s + h) - t_of(s - h)) / (2 * h);
        double t2 = (t_of(s + h) - 2 * t_of(s) + t_of(s - h)) / (h * h);
        CHECK(t2 == Approx(-n1.nabla_kk * t1 * t1).epsilon(1e-5));
    }
}

TEST_CASE("geodesic equation residual along a traced geodesic") {
    auto p = make("sin(2*x)", M_PI);
    LaunchSpec spec{1, 0.5, 0, Side::Left};
    auto tr = launch_tangent(p, spec);
    const double cs = branch_c(tr);
    auto yp = [&](double t) { return 1.0 / (cs + tr.xprime(t)); };  // eps = 1
    for (double t : {0.3, 0.9, 1.7, 2.5}) {
        State s = tr.state(t);
        double x = s[kX], xp = s[kXp];
        auto d = p.derivs(x, 1);
        auto c = christoffel(p, 1, x);
        double xpp = -0.5 * d[1];
        double y1 = yp(t);
        double h = 1e-5;
        double y2 = (yp(t + h) - yp(t - h)) / (2 * h);
        CHECK(std::abs(xpp + c.x_yy * y1 * y1 + 2 * c.x_xy * xp * y1) < 1e-9);
        CHECK(std::abs(y2 + c.y_yy * y1 * y1) < 1e-6);
        // unit timelike/spacelike norm: 2 x' y' + f y'^2 = eps
        CHECK(2 * xp * y1 + d[0] * y1 * y1 == Approx(1.0).epsilon(1e-9));
    }
}
