#include "ktorus/geodesic.hpp"

#include <algorithm>
#include <cmath>

#include "ktorus/errors.hpp"
#include "ktorus/numerics.hpp"

namespace ktorus {

const char* to_string(TraceKind k) {
    switch (k) {
        case TraceKind::Periodic: return "periodic";
        case TraceKind::Asymptotic: return "asymptotic";
        case TraceKind::CriticalOrbit: return "critical_orbit";
        case TraceKind::Perpendicular: return "perpendicular";
    }
    return "?";
}

namespace {

double crit_tol(double c2) { return kTolCrit * std::max(1.0, c2); }
// Launch band: C^2 < M_eps is strict, only round-off is excluded.
double launch_tol(double m) { return 1e-13 * std::max(1.0, m); }

// First root of eps f - c2 met when walking from `from` toward `to`,
// eps f(from) < c2 <= eps f(to).
double level_root(const FProfile& p, int eps, double c2, double from, double to) {
    auto g = [&](double x) { return eps * p.f(x) - c2; };
    const int n = 512;
    double xa = from;
    double ga = g(xa);
    for (int i = 1; i <= n; ++i) {
        double xb = from + (to - from) * i / n;
        double gb = g(xb);
        if (gb >= 0.0) {
            if (gb == 0.0) return xb;
            return solve_bracket(g, std::min(xa, xb), std::max(xa, xb), 1e-16,
                                 xa < xb ? ga : gb, xa < xb ? gb : ga);
        }
        xa = xb;
        ga = gb;
    }
    throw Error(ErrorKind::Numeric, "level set not bracketed");
}

Rhs make_rhs(const FProfile& p, int eps) {
    return [&p, eps](double, const double* y, double* dy) {
        auto d = p.derivs(y[kX], 2);
        double ek = eps * 0.5 * d[2];
        dy[kX] = y[kXp];
        dy[kXp] = -0.5 * eps * d[1];
        dy[kS] = y[kSp];
        dy[kSp] = -ek * y[kS];
        dy[kC] = y[kCp];
        dy[kCp] = -ek * y[kC];
    };
}

// Time in (t_from, t_limit] where x(t) reaches `target`, x moving with sign dir.
std::optional<double> crossing_time(const DenseSolution& sol, double target, int dir,
                                    double t_from, double t_limit) {
    double y[6];
    for (std::size_t k = sol.step_of(t_from); k < sol.steps(); ++k) {
        double ta = std::max(sol.step_t0(k), t_from);
        if (ta > t_limit) break;
        double tb = std::min(sol.step_t1(k), t_limit);
        sol.eval(tb, y);
        if (dir * (y[kX] - target) >= 0.0) {
            auto g = [&](double t) { return sol(t, kX) - target; };
            double ga = g(ta);
            if (dir * ga >= 0.0) return ta;
            return solve_bracket(g, ta, tb, 1e-15, ga, y[kX] - target);
        }
    }
    return std::nullopt;
}

}  // namespace

PathPlan plan_path(const FProfile& p, const LaunchSpec& spec) {
    if (!p.certifiable()) {
        throw Error(ErrorKind::NotApplicable, "profile is not certifiable");
    }
    if (!(spec.c2 > 0.0)) {
        throw Error(ErrorKind::NoTangency, "C^2 must be positive for a tangent launch");
    }
    Band b = p.band_at(spec.band);
    if (b.eps != spec.eps) {
        throw Error(ErrorKind::Config, "band sign does not match eps");
    }
    PathPlan pl;
    pl.m_eps = b.sup_abs;
    if (spec.c2 >= b.sup_abs - launch_tol(b.sup_abs)) {
        throw Error(ErrorKind::NoTangency, "C^2 is not below the band maximum");
    }
    const int eps = spec.eps;
    const double c2 = spec.c2;
    pl.dir = spec.side == Side::Left ? -1 : 1;
    double edge = pl.dir < 0 ? b.lo : b.hi;
    pl.z0 = level_root(p, eps, c2, edge, b.x_cr);
    if (eps * p.derivs(pl.z0, 1)[1] * -pl.dir <= 0.0) {
        throw Error(ErrorKind::NoTangency, "tangency point is critical");
    }
    pl.x0 = edge;
    pl.x1 = pl.dir < 0 ? p.zero_at(spec.band - 1) : p.zero_at(spec.band + 2);
    pl.crossed = {pl.x0, pl.x1};

    const long nb = static_cast<long>(p.bands.size());
    long kb = spec.band + 2 * pl.dir;
    for (long iter = 0; iter <= nb; ++iter, kb += 2 * pl.dir) {
        Band e = p.band_at(kb);
        std::vector<double> cr = e.critical_xs;
        std::sort(cr.begin(), cr.end());
        if (pl.dir < 0) std::reverse(cr.begin(), cr.end());
        double prev = pl.dir < 0 ? e.hi : e.lo;
        for (double c : cr) {
            double v = eps * p.f(c);
            if (v >= c2 - crit_tol(c2)) {
                if (std::abs(v - c2) <= crit_tol(c2)) {
                    pl.asymptotic = true;
                    pl.z1 = c;
                } else {
                    pl.z1 = level_root(p, eps, c2, prev, c);
                }
                return pl;
            }
            prev = c;
        }
        if (pl.dir < 0) {
            pl.crossed.push_back(p.zero_at(kb));
            pl.crossed.push_back(p.zero_at(kb - 1));
        } else {
            pl.crossed.push_back(p.zero_at(kb + 1));
            pl.crossed.push_back(p.zero_at(kb + 2));
        }
    }
    throw Error(ErrorKind::Numeric, "no turning point found along the path");
}

double GeodesicTrace::t_lo() const { return bwd ? bwd->t_end() : -fwd->t_end(); }
double GeodesicTrace::t_hi() const { return fwd->t_end(); }

State GeodesicTrace::state(double t) const {
    State s{};
    if (t >= 0.0) {
        fwd->eval(t, s.data());
        return s;
    }
    if (bwd) {
        bwd->eval(t, s.data());
        return s;
    }
    fwd->eval(-t, s.data());
    s[kXp] = -s[kXp];
    s[kS] = -s[kS];
    s[kCp] = -s[kCp];
    return s;
}

GeodesicTrace launch_tangent(const FProfile& p, const LaunchSpec& spec, const TraceOptions& opt) {
    GeodesicTrace tr;
    tr.spec = spec;
    tr.plan = plan_path(p, spec);
    tr.C = std::sqrt(spec.c2);
    tr.t_max = opt.t_max > 0.0 ? opt.t_max : 50.0 * p.period / tr.C;
    const PathPlan& pl = tr.plan;
    const int dir = pl.dir;

    Rhs rhs = make_rhs(p, spec.eps);
    double y0[6] = {pl.z0, 0.0, 0.0, 1.0, 1.0, 0.0};
    OdeOptions oo;
    oo.rtol = opt.rtol;
    oo.atol = opt.atol;
    std::optional<double> turn;
    double target = INFINITY;
    auto observer = [&](const DenseSolution& sol) {
        std::size_t k = sol.steps() - 1;
        double tb = sol.step_t1(k);
        double xb = sol(tb, kX);
        if (pl.asymptotic) {
            return std::abs(xb - pl.z1) < kAsymptoticRadius;
        }
        if (!turn) {
            double vb = sol(tb, kXp);
            if (dir * vb < 0.0) {
                double ta = sol.step_t0(k);
                auto g = [&](double t) { return sol(t, kXp); };
                if (k == 0) ta = 1e-3 * tb;  // x'(0) = 0
                double ga = g(ta);
                turn = solve_bracket(g, ta, tb, 1e-15, ga, vb);
                target = 2.0 * opt.span_factor * *turn + opt.extra_span;
            }
        }
        return tb >= target;
    };
    auto res = integrate_dopri5(rhs, 6, 0.0, y0, tr.t_max, oo, observer);
    tr.fwd = std::make_shared<const DenseSolution>(std::move(res.sol));
    if (!res.stopped) {
        tr.horizon_exceeded = true;
    }
    if (turn) {
        tr.t_turn = turn;
        tr.omega = 0.5 * *turn;
    }
    double tc = 0.0;
    for (double z : pl.crossed) {
        auto e = crossing_time(*tr.fwd, z, dir, tc, turn ? *turn : tr.fwd->t_end());
        if (!e) break;
        tr.crossings.push_back(*e);
        tc = *e;
    }
    if (tr.crossings.size() < 2) {
        throw Error(ErrorKind::HorizonExceeded, "null orbit crossings not reached before T_max");
    }
    if (!tr.horizon_exceeded && tr.crossings.size() != pl.crossed.size()) {
        throw Error(ErrorKind::Numeric, "crossing count does not match the path plan");
    }
    tr.t0 = tr.crossings[0];
    tr.t1 = tr.crossings[1];
    if (pl.asymptotic) {
        auto rb = integrate_dopri5(rhs, 6, 0.0, y0, -tr.fwd->t_end(), oo);
        tr.bwd = std::make_shared<const DenseSolution>(std::move(rb.sol));
    }
    tr.cls = classify_spec(p, spec);
    tr.cls.omega = tr.omega;
    if (!pl.asymptotic && !turn) {
        tr.horizon_exceeded = true;
    }
    return tr;
}

Classification classify_spec(const FProfile& p, const LaunchSpec& spec) {
    Classification c;
    if (spec.c2 == 0.0) {
        c.kind = TraceKind::Perpendicular;
        return c;
    }
    Band b = p.band_at(spec.band);
    if (std::abs(spec.c2 - b.sup_abs) <= launch_tol(b.sup_abs)) {
        c.kind = TraceKind::CriticalOrbit;
        c.x_limit = b.x_cr;
        return c;
    }
    PathPlan pl = plan_path(p, spec);
    if (pl.asymptotic) {
        c.kind = TraceKind::Asymptotic;
        c.x_limit = pl.z1;
    } else {
        c.kind = TraceKind::Periodic;
    }
    c.near_critical = (b.sup_abs - spec.c2) < 1e-6 * b.sup_abs;
    return c;
}

Classification classify(const FProfile&, const GeodesicTrace& trace) { return trace.cls; }

double energy_residual(const FProfile& p, const GeodesicTrace& tr, double t) {
    State s = tr.state(t);
    return std::abs(s[kXp] * s[kXp] + tr.spec.eps * p.f(s[kX]) - tr.spec.c2);
}

double branch_c(const GeodesicTrace& tr) { return tr.spec.eps * tr.plan.dir * tr.C; }

namespace {
double yprime(const GeodesicTrace& tr, double t) {
    double den = tr.spec.eps * branch_c(tr) + tr.xprime(t);
    if (std::abs(den) < 1e-9) {
        throw Error(ErrorKind::BranchSingular, "regular y-branch is singular on this span");
    }
    return tr.spec.eps / den;
}
}  // namespace

std::vector<YSample> y_trace(const FProfile&, const GeodesicTrace& tr, double y0, double t_end,
                             int samples) {
    if (t_end > tr.t_hi() || t_end < tr.t_lo()) {
        throw Error(ErrorKind::SpanExhausted, "y_trace beyond the integrated span");
    }
    for (int i = 0; i <= 20 * samples; ++i) {
        yprime(tr, t_end * i / (20.0 * samples));
    }
    std::vector<YSample> out;
    double y = y0;
    double tp = 0.0;
    out.push_back({0.0, tr.x(0.0), y});
    for (int i = 1; i <= samples; ++i) {
        double t = t_end * i / samples;
        y += integrate_gk([&](double s) { return yprime(tr, s); }, tp, t, 1e-12);
        out.push_back({t, tr.x(t), y});
        tp = t;
    }
    return out;
}

double y_increment_ts(const FProfile&, const GeodesicTrace& tr, double t_end) {
    return integrate_ts([&](double s) { return yprime(tr, s); }, 0.0, t_end, 1e-12);
}

std::vector<double> band_crossing_growth(const FProfile& p, int eps, double c2, int n,
                                         double t_max) {
    if (!p.certifiable()) {
        throw Error(ErrorKind::NotApplicable, "profile is not certifiable");
    }
    if (!(c2 > 0.0)) {
        throw Error(ErrorKind::Config, "C^2 must be positive");
    }
    const double C = std::sqrt(c2);
    double fmax = 0.0;
    double wmin = INFINITY;
    for (const Band& b : p.bands) {
        fmax = std::max(fmax, b.sup_abs);
        wmin = std::min(wmin, b.width());
    }
    const double vmax = std::sqrt(c2 + fmax);
    if (t_max <= 0.0) {
        t_max = 50.0 * p.period / C * std::max(1.0, static_cast<double>(n) / p.n_bands);
    }
    Rhs rhs = [&p, eps](double, const double* y, double* dy) {
        dy[0] = y[1];
        dy[1] = -0.5 * eps * p.derivs(y[0], 1)[1];
    };
    double y0[2] = {p.zero_at(0), C};
    OdeOptions oo;
    oo.h_max = 0.5 * wmin / vmax;
    std::vector<double> times;
    long kcur = 0;
    auto observer = [&](const DenseSolution& sol) {
        std::size_t k = sol.steps() - 1;
        double ta = sol.step_t0(k);
        double tb = sol.step_t1(k);
        long kn = p.band_index_of(sol(tb, 0));
        if (kn != kcur) {
            double z = p.zero_at(std::max(kn, kcur));
            auto g = [&](double t) { return sol(t, 0) - z; };
            times.push_back(solve_bracket(g, ta, tb, 1e-15));
            kcur = kn;
        }
        return static_cast<int>(times.size()) >= n;
    };
    integrate_dopri5(rhs, 2, 0.0, y0, t_max, oo, observer);
    if (static_cast<int>(times.size()) < n) {
        throw Error(ErrorKind::HorizonExceeded, "fewer crossings than requested before T_max");
    }
    return times;
}

}  // namespace ktorus
