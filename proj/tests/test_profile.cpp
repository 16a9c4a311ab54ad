#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "ktorus/errors.hpp"
#include "ktorus/numerics.hpp"
#include "ktorus/profile.hpp"

using namespace ktorus;
using doctest::Approx;

namespace {
FProfile make(const char* src, double hint) { return build_profile(Expression::parse(src), hint); }
}  // namespace

TEST_CASE("sin 2x: zeros, slopes, bands") {
    auto p = make("sin(2*x)", M_PI);
    CHECK(p.period == Approx(M_PI));
    REQUIRE(p.zeros.size() == 2);
    CHECK(std::abs(p.zeros[0]) < 1e-12);
    CHECK(p.zeros[1] == Approx(M_PI / 2).epsilon(1e-13));
    CHECK(p.n_bands == 2);
    CHECK(p.zero_slopes[0] == Approx(2.0));
    CHECK(p.zero_slopes[1] == Approx(-2.0));
    REQUIRE(p.bands.size() == 2);
    CHECK(p.bands[0].eps == 1);
    CHECK(p.bands[1].eps == -1);
    CHECK(p.bands[0].sup_abs == Approx(1.0));
    CHECK(p.bands[1].sup_abs == Approx(1.0));
    CHECK(p.bands[0].x_cr == Approx(M_PI / 4));
    CHECK(p.bands[1].x_cr == Approx(3 * M_PI / 4));
    for (double r : p.obstruction_residuals) CHECK(std::abs(r) < 1e-12);
    CHECK(p.certifiable());
    REQUIRE(p.symmetry_axis.has_value());
    double a = *p.symmetry_axis;
    CHECK((std::abs(a - M_PI / 4) < 1e-8 || std::abs(a - 3 * M_PI / 4) < 1e-8));
}

TEST_CASE("period is reduced from a multiple of the hint") {
    auto p = make("sin(2*x)", 2 * M_PI);
    CHECK(p.period == Approx(M_PI));
    CHECK(p.n_bands == 2);
}

TEST_CASE("sin x + 0.3 sin 2x") {
    auto p = make("sin(x) + 0.3*sin(2*x)", 2 * M_PI);
    REQUIRE(p.zeros.size() == 2);
    CHECK(std::abs(p.zeros[0]) < 1e-12);
    CHECK(p.zeros[1] == Approx(M_PI));
    CHECK(p.zero_slopes[0] == Approx(1.6));
    CHECK(p.zero_slopes[1] == Approx(-0.4));
    CHECK(p.obstruction_residuals[0] == Approx(1.2));
    CHECK(p.obstruction_residuals[1] == Approx(1.2));
    CHECK_FALSE(p.symmetry_axis.has_value());
    CHECK(symmetry_residual(p, M_PI / 2) > 0.1);
}

TEST_CASE("quadratic variation a = 0.2: two bands, zero residuals") {
    auto p = make("sin(2*x) - 2*0.2*cos(x)^2", M_PI);
    CHECK(p.n_bands == 2);
    REQUIRE(p.obstruction_residuals.size() == 2);
    // independent root finder on f' at the closed-form zeros: tan x solves
    // 2 tan x - a (1 + tan^2 x)... use the grid-free form sin 2x = a (1 + cos 2x)
    for (double z : p.zeros) {
        CHECK(std::abs(std::sin(2 * z) - 0.2 * (1 + std::cos(2 * z))) < 1e-12);
    }
    for (double r : p.obstruction_residuals) CHECK(std::abs(r) < 1e-10);
}

TEST_CASE("cos(sin x) - 3/4: period pi, axis found") {
    auto p = make("cos(sin(x)) - 3/4", 2 * M_PI);
    CHECK(p.period == Approx(M_PI));
    REQUIRE(p.zeros.size() == 2);
    CHECK(p.zeros[0] == Approx(std::asin(std::acos(0.75))));
    CHECK(p.zero_slopes[0] == Approx(-0.4571).epsilon(1e-3));
    REQUIRE(p.symmetry_axis.has_value());
    CHECK(symmetry_residual(p, M_PI / 2, 1024) < 1e-12);
}

TEST_CASE("sin x / (10 + sin x)") {
    auto p = make("sin(x)/(10+sin(x))", 2 * M_PI);
    CHECK(p.n_bands == 2);
    CHECK(p.zero_slopes[0] == Approx(0.1));
    CHECK(p.zero_slopes[1] == Approx(-0.1));
    CHECK(p.symmetry_axis.has_value());
}

TEST_CASE("jacobi profiles") {
    auto p = make("jacobi_sd(x, 1/2)", 8 * 1.8540746773013719);
    CHECK(p.period == Approx(4 * 1.8540746773013719));
    CHECK(p.n_bands == 2);
    auto q = make("jacobi_sn(x, 1/4)", 4 * 1.6857503548125961);
    CHECK(q.n_bands == 2);
    CHECK(q.zero_slopes[0] == Approx(1.0));
}

TEST_CASE("ln(2+sin x) has tangential zeros") {
    auto p = make("ln(2+sin(x))", 2 * M_PI);
    CHECK(p.degenerate);
    CHECK_FALSE(p.certifiable());
    REQUIRE(p.degenerate_zeros.size() == 1);
    CHECK(p.degenerate_zeros[0] == Approx(1.5 * M_PI).epsilon(1e-6));
}

TEST_CASE("flat and sign-definite profiles") {
    auto p = make("2", 1.0);
    CHECK(p.flat);
    CHECK(p.no_null_orbits);
    CHECK_FALSE(p.certifiable());
    CHECK(p.bands.size() == 1);
    auto q = make("2 + sin(x)", 2 * M_PI);
    CHECK_FALSE(q.flat);
    CHECK(q.zeros.empty());
    CHECK(q.no_null_orbits);
    REQUIRE(q.bands.size() == 1);
    CHECK(q.bands[0].sup_abs == Approx(3.0));
}

TEST_CASE("non periodic and non evaluable inputs") {
    CHECK_THROWS_AS(make("x", 1.0), Error);
    try {
        make("sin(x) + x/1000", 2 * M_PI);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonPeriodic);
    }
    try {
        make("ln(sin(x))", 2 * M_PI);
        FAIL("expected domain error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Domain);
    }
}

TEST_CASE("sample_derivatives") {
    auto p = make("ln(2+sin(x))", 2 * M_PI);
    auto d = sample_derivatives(p, 0.0);
    CHECK(d[3] == Approx(-0.25));
}

TEST_CASE("properties: periodicity, grid bijection, simple margins") {
    std::mt19937_64 rng(5);
    for (const char* s : {"sin(2*x)", "sin(x)+0.3*sin(2*x)", "cos(sin(x)) - 3/4",
                          "sin(x)/(10+sin(x))", "sin(2*x) - 2*0.5*cos(x)^2",
                          "sin(2*x) + 0.05*sin(6*x)"}) {
        auto p = make(s, 2 * M_PI);
        std::uniform_real_distribution<double> U(-50, 50);
        for (int i = 0; i < 1000; ++i) {
            double x = U(rng);
            CHECK(std::abs(p.f(x + p.period) - p.f(x)) < 1e-9);
        }
        int changes = 0;
        const int N = 10000;
        double prev = p.f(0.5e-4 * p.period);
        for (int i = 1; i <= N; ++i) {
            double v = p.f((i + 0.5) * p.period / N);
            if ((v > 0) != (prev > 0)) ++changes;
            prev = v;
        }
        CHECK(changes == static_cast<int>(p.zeros.size()));
        for (std::size_t k = 0; k < p.zeros.size(); ++k) {
            CHECK(std::abs(p.f(p.zeros[k])) < 1e-12);
            CHECK(std::abs(p.zero_slopes[k]) > 1e-6);
            CHECK(p.bands[k].eps != p.bands[(k + 1) % p.bands.size()].eps);
        }
        for (const Band& b : p.bands) {
            for (int i = 1; i < 200; ++i) {
                double x = b.lo + (b.hi - b.lo) * i / 200;
                CHECK(b.eps * p.f(x) > 0);
            }
        }
    }
}

TEST_CASE("translation leaves band data invariant") {
    auto p = make("sin(x)+0.3*sin(2*x)", 2 * M_PI);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(0.1, 6.0);
    for (int i = 0; i < 5; ++i) {
        double s = U(rng);
        char buf[128];
        std::snprintf(buf, sizeof buf, "sin(x+%.17g)+0.3*sin(2*(x+%.17g))", s, s);
        auto q = make(buf, 2 * M_PI);
        REQUIRE(q.zeros.size() == 2);
        std::vector<double> a = p.obstruction_residuals, b = q.obstruction_residuals;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        CHECK(a[0] == Approx(b[0]));
        CHECK(a[1] == Approx(b[1]));
        for (double z : q.zeros) {
            double back = wrap(z + s, 2 * M_PI);
            bool hit = false;
            for (double w : p.zeros) hit = hit || std::abs(back - w) < 1e-9 ||
                                           std::abs(std::abs(back - w) - 2 * M_PI) < 1e-9;
            CHECK(hit);
        }
    }
}
