#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/ellint_1.hpp>
#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include "ktorus/conditions.hpp"
#include "ktorus/errors.hpp"

using namespace ktorus;
using doctest::Approx;

namespace {
FProfile make(const std::string& src, double hint) {
    return build_profile(Expression::parse(src), hint);
}

const double kTwoPi2 = 2 * M_PI * M_PI;

double gk(const std::function<double(double)>& g, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, a, b, 15, 1e-13);
}

// Sign changes of f' on a fine grid over [lo, hi].
int fprime_sign_changes(const FProfile& p, double lo, double hi) {
    const int n = 20000;
    int count = 0;
    double prev = p.derivs(lo + (hi - lo) * 0.5 / n, 1)[1];
    for (int i = 1; i < n; ++i) {
        double v = p.derivs(lo + (hi - lo) * (i + 0.5) / n, 1)[1];
        if (v * prev < 0) ++count;
        prev = v;
    }
    return count;
}

// Coefficient with every solution T-antiperiodic, from u = rho cos(theta),
// theta' = lambda / rho^2, lambda fixed so theta(T) = pi.
struct ErmakovFixture {
    double T, a, b, lambda;
    double rho(double t) const {
        double w = 2 * M_PI / T;
        return 1 + a * std::cos(w * t) + b * std::sin(2 * w * t);
    }
    double rho2(double t) const {
        double w = 2 * M_PI / T;
        return -a * w * w * std::cos(w * t) - 4 * b * w * w * std::sin(2 * w * t);
    }
    double q(double t) const {
        double r = rho(t);
        return -rho2(t) / r + lambda * lambda / (r * r * r * r);
    }
    ErmakovFixture(double T_, double a_, double b_) : T(T_), a(a_), b(b_) {
        double I = gk([&](double t) { return 1.0 / (rho(t) * rho(t)); }, 0.0, T);
        lambda = M_PI / I;
    }
};
}  // namespace

TEST_CASE("necessary conditions") {
    auto p = make("sin(2*x)", M_PI);
    auto r = check_necessary(p);
    CHECK(r.pass);
    for (const auto& c : r.checks) CHECK(c.pass);
    for (int n : r.fprime_zeros_per_band) CHECK(n == 1);

    auto q = make("sin(2*x) + 0.05*sin(6*x)", M_PI);
    auto rq = check_necessary(q);
    REQUIRE(rq.fprime_zeros_per_band.size() == q.bands.size());
    bool all_one = true;
    for (std::size_t k = 0; k < q.bands.size(); ++k) {
        int expect = fprime_sign_changes(q, q.bands[k].lo, q.bands[k].hi);
        CHECK(rq.fprime_zeros_per_band[k] == expect);
        all_one = all_one && expect == 1;
    }
    CHECK(rq.pass == all_one);

    auto w = make("sin(2*x) + 0.2*sin(6*x)", M_PI);
    auto rw = check_necessary(w);
    int extra = 0;
    for (std::size_t k = 0; k < w.bands.size(); ++k) {
        int expect = fprime_sign_changes(w, w.bands[k].lo, w.bands[k].hi);
        CHECK(rw.fprime_zeros_per_band[k] == expect);
        extra += expect != 1;
    }
    CHECK(extra > 0);
    CHECK_FALSE(rw.pass);

    auto f = make("1", 1.0);
    auto rf = check_necessary(f);
    CHECK(rf.pass);
    bool noted = false;
    for (const auto& c : rf.checks) noted = noted || c.note.find("no null orbits") != std::string::npos;
    CHECK(noted);
}

TEST_CASE("lambda obstruction") {
    auto p = make("sin(2*x)", M_PI);
    auto r = check_lambda_obstruction(p);
    REQUIRE(r.residuals.size() == 2);
    for (double v : r.residuals) CHECK(std::abs(v) < 1e-12);
    CHECK(r.pass);

    auto q = make("sin(x)+0.3*sin(2*x)", 2 * M_PI);
    auto rq = check_lambda_obstruction(q);
    REQUIRE(rq.residuals.size() == 2);
    // f'(0) = 1.6, f'(pi) = -0.4: both cyclic pairs give 1.2
    CHECK(std::abs(rq.residuals[0] - 1.2) < 1e-12);
    CHECK(std::abs(rq.residuals[1] - 1.2) < 1e-12);
    CHECK_FALSE(rq.pass);
    // residuals recomputed from raw f
    for (std::size_t n = 0; n < rq.residuals.size(); ++n) {
        double a = q.derivs(q.zero_at(static_cast<long>(n)), 1)[1];
        double b = q.derivs(q.zero_at(static_cast<long>(n) + 1), 1)[1];
        CHECK(std::abs(rq.residuals[n] - (a + b)) < 1e-9);
    }

    auto l = make("ln(2+sin(x))", 2 * M_PI);
    auto rl = check_lambda_obstruction(l);
    CHECK(rl.rejected);
    CHECK_FALSE(rl.pass);
}

TEST_CASE("obstruction residuals are translation invariant") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-4.0, 4.0);
    auto base = check_lambda_obstruction(make("sin(x)+0.3*sin(2*x)", 2 * M_PI));
    std::vector<double> ref = base.residuals;
    std::sort(ref.begin(), ref.end());
    for (int i = 0; i < 10; ++i) {
        std::string a = std::to_string(U(rng));
        auto r = check_lambda_obstruction(
            make("sin(x+" + a + ")+0.3*sin(2*(x+" + a + "))", 2 * M_PI));
        std::vector<double> got = r.residuals;
        std::sort(got.begin(), got.end());
        REQUIRE(got.size() == ref.size());
        for (std::size_t k = 0; k < got.size(); ++k) CHECK(std::abs(got[k] - ref[k]) < 1e-9);
    }
}

TEST_CASE("famille conditions") {
    for (const char* src : {"sin(2*x)", "sin(x)/(10+sin(x))", "cos(sin(x)) - 3/4"}) {
        auto r = check_famille(make(src, 2 * M_PI));
        CHECK(r.simple_zeros.pass);
        CHECK(r.one_sign_change.pass);
        CHECK(r.fpfppp_nonpositive.pass);
        CHECK(r.symmetry_axis.pass);
        CHECK(r.two_zeros_per_period.pass);
        CHECK(r.pass);
    }
    auto p = make("sin(2*x)", M_PI);
    auto r = check_famille(p);
    // f' f''' = -16 cos^2 2x, so the minimum of -f' f''' is 0
    CHECK(std::abs(r.fpfppp_nonpositive.margin) < 1e-9);
    CHECK(r.simple_zeros.margin == Approx(2.0 - p.tol.margin_simple).epsilon(1e-9));

    auto q = check_famille(make("sin(x)+0.3*sin(2*x)", 2 * M_PI));
    CHECK_FALSE(q.symmetry_axis.pass);
    CHECK_FALSE(q.pass);
}

TEST_CASE("stability point on sin 2x") {
    auto p = make("sin(2*x)", M_PI);
    auto g = stability_geometry(p, p.band_at(-1));
    CHECK(g.eps == 1);
    CHECK(g.x_cr_opp == Approx(-M_PI / 4).epsilon(1e-10));
    CHECK(g.zeta0 == Approx(-M_PI / 2).epsilon(1e-9));
    CHECK(std::abs(g.zeta1) < 1e-9);
    const double x0 = -7 * M_PI / 12;
    auto s = stability_point(p, g, x0);
    CHECK(s.x1 == Approx(M_PI / 12).epsilon(1e-10));
    CHECK_FALSE(s.singular);
    double I = gk([](double x) { return 1.0 / std::sqrt(1 - std::sin(2 * x)); }, x0, M_PI / 12);
    CHECK(I < M_PI);
    CHECK(s.lhs1 == Approx(2 * I * I).epsilon(1e-9));
    CHECK(s.lhs1 < kTwoPi2);
    // 1/2 - sin 2x = 2 cos(x + pi/12) sin(pi/12 - x) on (-pi/2, 0)
    double I2 = gk(
        [](double x) {
            return 1.0 / std::sqrt(2 * std::cos(x + M_PI / 12) * std::sin(M_PI / 12 - x));
        },
        -M_PI / 2, 0.0);
    CHECK(s.lhs2 == Approx(4 * I2 * I2).epsilon(1e-8));
    CHECK(s.lhs2 < kTwoPi2);
}

TEST_CASE("stability inequalities on the listed profiles") {
    for (const char* src : {"sin(2*x)", "sin(x)/(10+sin(x))", "cos(sin(x)) - 3/4"}) {
        auto t0 = std::chrono::steady_clock::now();
        auto r = check_stability_inequalities(make(src, 2 * M_PI));
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        CHECK(secs < 10.0);
        CHECK(r.curvature_simple_zeros.pass);
        CHECK(r.curvature_zero_count == 2);
        CHECK(r.plus.pass);
        CHECK(r.minus.pass);
        CHECK(r.plus.ineq1_margin < 0);
        CHECK(r.plus.ineq2_margin < 0);
        CHECK(r.minus.ineq1_margin < 0);
        CHECK(r.minus.ineq2_margin < 0);
        CHECK(r.pass);
    }
}

TEST_CASE("elliptic profiles under the modulus reading") {
    for (auto [src, m] : {std::pair{"jacobi_sn(x, 1/16)", 1.0 / 16}, std::pair{"jacobi_sd(x, 1/4)", 0.25}}) {
        auto p = make(src, 4 * boost::math::ellint_1(std::sqrt(m)));
        auto f = check_famille(p);
        CHECK(f.pass);
        auto s = check_stability_inequalities(p);
        CHECK(s.curvature_simple_zeros.pass);
        CHECK(s.pass);
    }
}

TEST_CASE("ineq1 is invariant under scaling f") {
    auto base = make("sin(x)/(10+sin(x))", 2 * M_PI);
    auto g = stability_geometry(base, base.band_at(1));
    double x0 = 0.5 * (g.d2 + g.xcr_right) + 0.1 * (g.xcr_right - g.d2);
    auto ref = stability_point(base, g, x0);
    for (double c : {0.25, 4.0}) {
        auto p = make(std::to_string(c) + "*sin(x)/(10+sin(x))", 2 * M_PI);
        auto gc = stability_geometry(p, p.band_at(1));
        auto s = stability_point(p, gc, x0);
        CHECK(s.lhs1 == Approx(ref.lhs1).epsilon(1e-8));
        CHECK(s.lhs2 == Approx(ref.lhs2).epsilon(1e-8));
    }
}

TEST_CASE("Hill value") {
    for (double T : {0.5, 1.0, 3.0}) {
        double k = M_PI / T;
        auto b = synthetic_basis([k](double) { return k * k; }, -0.5, 2 * T + 0.5);
        CHECK(hill_value(b, T) == Approx(M_PI * M_PI).epsilon(1e-8));
    }
    // every solution T-antiperiodic, non-constant coefficient
    for (auto [a, bb] : {std::pair{0.2, 0.1}, std::pair{0.3, -0.15}, std::pair{0.1, 0.25}}) {
        ErmakovFixture e(2.0, a, bb);
        auto b = synthetic_basis([&](double t) { return e.q(t); }, -0.5, 4.5);
        CHECK(monodromy_over(b, 2.0).is_minus_identity(1e-6));
        CHECK(hill_value(b, 2.0) <= M_PI * M_PI + 1e-6);
    }
    auto p = make("sin(2*x)", M_PI);
    for (double c2 : {0.2, 0.5, 0.8}) {
        auto tr = launch_tangent(p, {1, c2, 0, Side::Left});
        auto b = fundamental_basis(p, tr);
        try {
            hill_diagnostic(tr, b);
            FAIL("expected NotApplicable");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NotApplicable);
        }
    }
}

TEST_CASE("Sturm-Liouville bounds") {
    auto p = make("sin(2*x)", M_PI);
    auto tr = launch_tangent(p, {1, 0.5, 0, Side::Left});
    auto b = fundamental_basis(p, tr);
    auto s = sl_bounds(tr, b);
    CHECK(s.lemma0_ok);
    CHECK(s.lemma0_rhs - s.lemma0_lhs > 1e-3);
    CHECK(s.omega == Approx(tr.omega).epsilon(1e-12));

    for (double w : {0.5, 1.0, 2.0}) {
        double k = M_PI / (2 * w);
        auto bc = synthetic_basis([k](double) { return k * k; }, -0.5, 4 * w + 0.5);
        auto sc = sl_bounds_over(bc, w);
        CHECK(std::abs(sc.lemma0_lhs - sc.lemma0_rhs) < 1e-6);
        CHECK(sc.lemma0_ok);
        CHECK(sc.d2 == Approx(k * k).epsilon(1e-9));
    }

    // equality configuration for lemma 1
    for (double w : {0.5, 1.0, 2.0}) {
        double k = M_PI / (2 * w);
        auto bc = synthetic_basis([k](double) { return k * k; }, -0.5, 4 * w + 0.5);
        auto sc = sl_bounds_over(bc, w);
        CHECK(sc.lemma1_applicable);
        CHECK(sc.lemma1_ok);
        CHECK(std::abs(sc.lemma1_lhs - sc.lemma1_rhs) < 1e-6);
        CHECK_FALSE(sc.lemma2_applicable);
    }

    // Asymmetric coefficients with every solution antiperiodic over 2 omega
    // lie outside the lemma's hypotheses; the checker reports the raw values.
    for (auto [a, bb] : {std::pair{0.2, 0.1}, std::pair{0.3, -0.15}, std::pair{0.1, 0.25}}) {
        const double w = 1.0;
        ErmakovFixture e(2 * w, a, bb);
        auto be = synthetic_basis([&](double t) { return e.q(t); }, -0.5, 4 * w + 0.5);
        auto se = sl_bounds_over(be, w);
        CHECK(se.lemma1_applicable);
        double upper = gk([&](double t) { return e.q(t); }, w, 2 * w) / w;
        double lhs = std::max(upper, -e.q(0.0));
        CHECK(se.lemma1_lhs == Approx(lhs).epsilon(1e-8));
        CHECK(se.lemma1_rhs == Approx(M_PI * M_PI / 4).epsilon(1e-12));
        CHECK(se.lemma1_ok == (lhs >= se.lemma1_rhs - 1e-6));
    }
}

TEST_CASE("full report") {
    auto r = check_all(make("sin(2*x)", M_PI), 2);
    CHECK(r.necessary.pass);
    CHECK(r.obstruction.pass);
    CHECK(r.famille.pass);
    REQUIRE(r.stability.has_value());
    CHECK(r.stability->pass);
    CHECK(r.pass);
    CHECK(r.diagnostics.size() == 4);
    for (const auto& d : r.diagnostics) CHECK(d.bounds.lemma0_ok);

    auto q = check_all(make("sin(x)+0.3*sin(2*x)", 2 * M_PI), 2);
    CHECK_FALSE(q.obstruction.pass);
    CHECK_FALSE(q.stability.has_value());
    CHECK_FALSE(q.pass);
}
