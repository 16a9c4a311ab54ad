#include "ktorus/jacobi.hpp"

#include <algorithm>
#include <cmath>

#include "ktorus/errors.hpp"
#include "ktorus/numerics.hpp"

namespace ktorus {

double JacobiBasis::wronskian(double t) const {
    auto v = at(t);
    return v[2] * v[1] - v[3] * v[0];
}

JacobiBasis fundamental_basis(const FProfile& p, const GeodesicTrace& tr) {
    JacobiBasis b;
    auto trp = std::make_shared<const GeodesicTrace>(tr);
    const FProfile* pp = &p;
    b.eval_ = [trp](double t) {
        State s = trp->state(t);
        return std::array<double, 4>{s[kS], s[kSp], s[kC], s[kCp]};
    };
    const int eps = tr.spec.eps;
    b.ek_ = [trp, pp, eps](double t) { return eps * 0.5 * pp->derivs(trp->x(t), 2)[2]; };
    b.beta0p_ = 0.5 * eps * p.derivs(tr.z0(), 1)[1];
    b.t_lo_ = tr.t_lo();
    b.t_hi_ = tr.t_hi();
    b.omega_ = tr.omega;
    double ref = tr.omega > 0.0 ? tr.omega : std::max(tr.t1, 1e-3);
    b.scan_ = std::min(ref / 200.0, 0.05);
    return b;
}

JacobiBasis synthetic_basis(std::function<double(double)> eps_kappa, double t_lo, double t_hi,
                            double scan_step) {
    JacobiBasis b;
    Rhs rhs = [eps_kappa](double t, const double* y, double* dy) {
        double k = eps_kappa(t);
        dy[0] = y[1];
        dy[1] = -k * y[0];
        dy[2] = y[3];
        dy[3] = -k * y[2];
    };
    double y0[4] = {0.0, 1.0, 1.0, 0.0};
    OdeOptions oo;
    oo.rtol = 1e-12;
    oo.atol = 1e-12;
    auto fw = std::make_shared<const DenseSolution>(
        integrate_dopri5(rhs, 4, 0.0, y0, t_hi, oo).sol);
    auto bw = std::make_shared<const DenseSolution>(
        integrate_dopri5(rhs, 4, 0.0, y0, t_lo, oo).sol);
    b.eval_ = [fw, bw](double t) {
        std::array<double, 4> v{};
        (t >= 0.0 ? fw : bw)->eval(t, v.data());
        return v;
    };
    b.ek_ = eps_kappa;
    b.beta0p_ = 1.0;
    b.t_lo_ = t_lo;
    b.t_hi_ = t_hi;
    b.scan_ = scan_step;
    return b;
}

double solution_through(const JacobiBasis& b, double a, double t) {
    auto va = b.at(a);
    auto vt = b.at(t);
    return va[2] * vt[0] - va[0] * vt[2];
}

std::optional<double> next_zero_before(const JacobiBasis& b, double a, double limit) {
    if (a < b.t_lo() || a > b.t_hi()) {
        throw Error(ErrorKind::SpanExhausted, "a outside the basis span");
    }
    auto va = b.at(a);
    auto u = [&](double t) {
        auto v = b.at(t);
        return va[2] * v[0] - va[0] * v[2];
    };
    const double end = std::min(limit, b.t_hi());
    const double h = b.scan_step();
    double ta = a;
    double ua = 0.0;
    while (ta < end) {
        double tb = std::min(ta + h, end);
        double ub = u(tb);
        if (ub <= 0.0) {
            if (ub == 0.0) return tb;
            if (ta == a) {
                // the solution leaves a with unit slope, so a zero this close is spurious
                ta = a + 1e-3 * (tb - a);
                ua = u(ta);
                if (ua <= 0.0) return ta;
            }
            return solve_bracket(u, ta, tb, 1e-15, ua, ub);
        }
        ta = tb;
        ua = ub;
    }
    if (limit > b.t_hi()) {
        throw Error(ErrorKind::SpanExhausted, "no zero before the end of the basis span");
    }
    return std::nullopt;
}

double next_zero(const JacobiBasis& b, double a) {
    return *next_zero_before(b, a, INFINITY);
}

double Monodromy::distance_to(double sign) const {
    return std::max({std::abs(m[0][0] - sign), std::abs(m[1][1] - sign), std::abs(m[0][1]),
                     std::abs(m[1][0])});
}

Monodromy monodromy_over(const JacobiBasis& b, double T) {
    auto v = b.at(T);
    Monodromy M;
    M.period = T;
    // c(t+T) = c(T) c + c'(T) s, s(t+T) = s(T) c + s'(T) s
    M.m[0][0] = v[2];
    M.m[1][0] = v[3];
    M.m[0][1] = v[0];
    M.m[1][1] = v[1];
    return M;
}

Monodromy monodromy(const GeodesicTrace& tr, const JacobiBasis& b) {
    if (!tr.t_turn) {
        throw Error(ErrorKind::NotPeriodic, "trace has no turning point");
    }
    return monodromy_over(b, 4.0 * tr.omega);
}

GapResult min_gap_over(const JacobiBasis& b, double a_lo, double a_hi, int n) {
    GapResult r{INFINITY, a_lo};
    for (int i = 0; i < n; ++i) {
        double a = a_lo + (a_hi - a_lo) * i / n;
        double g = next_zero(b, a) - a;
        if (g < r.gap) {
            r.gap = g;
            r.a_min = a;
        }
    }
    // refine around the best grid point
    double h = (a_hi - a_lo) / n;
    auto rr = minimize_on([&](double a) { return next_zero(b, a) - a; }, r.a_min - h,
                          r.a_min + h, 40);
    if (rr.second < r.gap) {
        r.gap = rr.second;
        r.a_min = rr.first;
    }
    return r;
}

GapResult min_gap(const GeodesicTrace& tr, const JacobiBasis& b, int grid_n) {
    if (!tr.t_turn) {
        throw Error(ErrorKind::NotPeriodic, "trace has no turning point");
    }
    double w = tr.omega;
    return min_gap_over(b, -2.0 * w, 2.0 * w, grid_n);
}

}  // namespace ktorus
