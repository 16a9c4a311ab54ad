#include "ktorus/certifier.hpp"

#include <algorithm>
#include <cmath>

#include "ktorus/errors.hpp"
#include "ktorus/numerics.hpp"

namespace ktorus {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::NoConjugate: return "no_conjugate";
        case Verdict::Conjugate: return "conjugate";
        case Verdict::Degenerate: return "degenerate";
        case Verdict::Failed: return "failed";
    }
    return "?";
}

const char* to_string(Overall o) {
    switch (o) {
        case Overall::CertifiedNoConjugate: return "certified_no_conjugate";
        case Overall::ConjugateFound: return "conjugate_found";
        case Overall::Inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

// Integrand of dx / sqrt(c2 - eps f) after x = z + dir u^2, where z is a
// simple root of eps f = c2 and eps f decreases away from z along dir.
struct SingularSegment {
    const FProfile* p;
    int eps;
    double c2;
    double z;
    int dir;
    std::array<double, 4> d;

    double operator()(double u) const {
        double u2 = u * u;
        double delta = dir * u2;
        if (u2 < 1e-5) {
            // (c2 - eps f(z + delta)) / u^2 by Taylor, without cancellation
            double q = -eps * (dir * d[1] + 0.5 * d[2] * u2 + dir * d[3] * u2 * u2 / 6.0);
            return 2.0 / std::sqrt(q);
        }
        double D = c2 - eps * p->f(z + delta);
        return 2.0 * u / std::sqrt(D);
    }
};

SingularSegment singular(const FProfile& p, int eps, double c2, double z, int dir) {
    return {&p, eps, c2, z, dir, p.derivs(z, 3)};
}

double regular(const FProfile& p, int eps, double c2, double a, double b, bool alt) {
    auto g = [&](double x) { return 1.0 / std::sqrt(c2 - eps * p.f(x)); };
    double lo = std::min(a, b), hi = std::max(a, b);
    return alt ? integrate_ts(g, lo, hi, 1e-13) : integrate_gk(g, lo, hi, 1e-13);
}

double singular_time(const SingularSegment& s, double to, bool alt) {
    double umax = std::sqrt(std::abs(to - s.z));
    return alt ? integrate_ts(s, 0.0, umax, 1e-13) : integrate_gk(s, 0.0, umax, 1e-13);
}

}  // namespace

TurningTimes turning_quadratures(const FProfile& p, const LaunchSpec& spec) {
    if (p.certifiable()) {
        Band b = p.band_at(spec.band);
        if (b.eps == spec.eps && std::abs(spec.c2 - b.sup_abs) <= kTolCrit * std::max(1.0, b.sup_abs)) {
            throw Error(ErrorKind::DegenerateZero, "tangency point is a critical point of f");
        }
    }
    PathPlan pl = plan_path(p, spec);
    auto seg = singular(p, spec.eps, spec.c2, pl.z0, pl.dir);
    TurningTimes r;
    r.t0 = singular_time(seg, pl.x0, false);
    r.t0_alt = singular_time(seg, pl.x0, true);
    r.t1 = r.t0 + regular(p, spec.eps, spec.c2, pl.x0, pl.x1, false);
    r.t1_alt = r.t0_alt + regular(p, spec.eps, spec.c2, pl.x0, pl.x1, true);
    return r;
}

double turn_quadrature(const FProfile& p, const LaunchSpec& spec) {
    PathPlan pl = plan_path(p, spec);
    if (pl.asymptotic) {
        throw Error(ErrorKind::DegenerateZero, "turn lies on a critical orbit, integral diverges");
    }
    double t = singular_time(singular(p, spec.eps, spec.c2, pl.z0, pl.dir), pl.crossed[0], false);
    for (std::size_t i = 1; i < pl.crossed.size(); ++i) {
        t += regular(p, spec.eps, spec.c2, pl.crossed[i - 1], pl.crossed[i], false);
    }
    t += singular_time(singular(p, spec.eps, spec.c2, pl.z1, -pl.dir), pl.crossed.back(), false);
    return t;
}

DominoValues domino_criteria(const JacobiBasis& b, double t0, double t1,
                             std::optional<double> omega, double ta, double tb) {
    DominoValues v;
    v.s_t0 = b.s(t0);
    v.num0 = b.c(t0) + b.c(t1);
    v.z0 = v.num0 / v.s_t0;
    if (omega && *omega > 0.0) {
        if (std::isnan(ta)) ta = t0;
        if (std::isnan(tb)) tb = t1;
        auto at = b.at(2.0 * *omega);
        v.z1 = -b.c(ta) - b.c(tb) + 2.0 * (at[3] / at[1]) * b.s(ta);
    }
    return v;
}

double limit_z_small_c(const FProfile& p, double x_i, double x_j) {
    double a = p.derivs(x_i, 1)[1];
    double b = p.derivs(x_j, 1)[1];
    if (std::abs(b) <= p.tol.margin_simple || std::abs(a) <= p.tol.margin_simple) {
        throw Error(ErrorKind::DegenerateZero, "limit needs simple zeros");
    }
    return (a + b) / b;
}

std::vector<Window> torus_windows(const GeodesicTrace& tr) {
    std::vector<Window> w;
    w.push_back({-tr.t1, tr.t0, "origin_a"});
    w.push_back({-tr.t0, tr.t1, "origin_b"});
    if (tr.t_turn) {
        double T = 4.0 * tr.omega;
        std::size_t n = tr.crossings.size();
        double ta = tr.crossings[n - 2];
        double tb = tr.crossings[n - 1];
        w.push_back({ta, T - tb, "turn_a"});
        w.push_back({tb, T - ta, "turn_b"});
    }
    return w;
}

std::optional<Witness> oracle_scan(const JacobiBasis& b, const std::vector<Window>& windows,
                                   int grid_n) {
    for (const Window& w : windows) {
        for (int i = 0; i < grid_n; ++i) {
            double a = w.lo + (w.hi - w.lo) * i / grid_n;
            auto z = next_zero_before(b, a, w.hi);
            if (z && *z < w.hi - 1e-9) {
                return Witness{a, *z, w.name};
            }
        }
    }
    return std::nullopt;
}

DominoCertificate certify_launch(const FProfile& p, const LaunchSpec& spec,
                                 const CertifyOptions& opt) {
    DominoCertificate c;
    c.spec = spec;
    try {
        GeodesicTrace tr = launch_tangent(p, spec);
        JacobiBasis b = fundamental_basis(p, tr);
        c.kind = tr.cls.kind;
        c.z0 = tr.z0();
        c.t0 = tr.t0;
        c.t1 = tr.t1;
        TurningTimes q = turning_quadratures(p, spec);
        c.t0_quad = q.t0;
        c.t1_quad = q.t1;
        c.duality_err = std::max(std::abs(q.t0 - tr.t0), std::abs(q.t1 - tr.t1));
        std::optional<double> omega;
        if (tr.t_turn) {
            omega = tr.omega;
            c.omega = tr.omega;
            std::size_t n = tr.crossings.size();
            c.ta = tr.crossings[n - 2];
            c.tb = tr.crossings[n - 1];
        }
        c.z = domino_criteria(b, tr.t0, tr.t1, omega, c.ta, c.tb);
        double m = c.z.min_margin();
        bool near = std::abs(c.z.num0) <= kTolSign || (c.z.z1 && std::abs(*c.z.z1) <= kTolSign);
        if (m < -kTolSign) {
            c.verdict = Verdict::Conjugate;
        } else if (near) {
            c.verdict = Verdict::Degenerate;
        } else {
            c.verdict = Verdict::NoConjugate;
        }
        if (opt.run_oracle) {
            c.witness = oracle_scan(b, torus_windows(tr), opt.oracle_grid);
            if (c.verdict == Verdict::Degenerate) {
                c.oracle_agrees = true;
            } else {
                c.oracle_agrees = c.witness.has_value() == (c.verdict == Verdict::Conjugate);
            }
        }
    } catch (const Error& e) {
        c.verdict = Verdict::Failed;
        c.error = std::string(ktorus::to_string(e.kind())) + ": " + e.what();
    }
    return c;
}

std::vector<double> sweep_grid(double m_eps, int n) {
    auto nodes = chebyshev_nodes(1e-3, 1.0 - 1e-3, n);
    for (double& v : nodes) v *= m_eps;
    return nodes;
}

SweepRecord band_sweep(const FProfile& p, long band, int n, Exec exec, const CertifyOptions& opt) {
    if (n < 2) {
        throw Error(ErrorKind::Config, "sweep needs at least two samples");
    }
    Band b = p.band_at(band);
    SweepRecord r;
    r.band = band;
    r.eps = b.eps;
    auto grid = sweep_grid(b.sup_abs, n);
    const int total = 2 * n;
    r.certs.resize(total);
    auto one = [&](int i) {
        LaunchSpec s;
        s.eps = b.eps;
        s.band = band;
        s.side = i < n ? Side::Left : Side::Right;
        s.c2 = grid[i % n];
        r.certs[i] = certify_launch(p, s, opt);
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (int i = 0; i < total; ++i) one(i);
    } else {
        for (int i = 0; i < total; ++i) one(i);
    }
    r.min_z0 = INFINITY;
    r.min_z1 = INFINITY;
    double best = INFINITY;
    for (const auto& c : r.certs) {
        switch (c.verdict) {
            case Verdict::Conjugate: ++r.n_conjugate; break;
            case Verdict::Degenerate: ++r.n_degenerate; break;
            case Verdict::Failed: ++r.n_failed; continue;
            default: break;
        }
        if (!c.oracle_agrees && opt.run_oracle) ++r.n_disagree;
        r.min_z0 = std::min(r.min_z0, c.z.num0);
        if (c.z.z1) r.min_z1 = std::min(r.min_z1, *c.z.z1);
        if (c.z.min_margin() < best) {
            best = c.z.min_margin();
            r.argmin_c2 = c.spec.c2;
        }
        r.max_duality_err = std::max(r.max_duality_err, c.duality_err);
    }
    return r;
}

TorusVerdict torus_verdict(const FProfile& p, const VerdictOptions& opt) {
    TorusVerdict v;
    if (p.flat) {
        v.overall = Overall::CertifiedNoConjugate;
        v.notes.push_back("flat: curvature vanishes identically");
        return v;
    }
    if (!p.certifiable()) {
        v.overall = Overall::Inconclusive;
        if (p.degenerate) v.notes.push_back("degenerate zero: outside the certifiable class");
        if (p.no_null_orbits) v.notes.push_back("no null orbits: no band structure to certify");
        return v;
    }
    v.notes.push_back("critical orbits of K carry no conjugate points");
    v.notes.push_back("geodesics perpendicular to K carry no conjugate points");
    v.notes.push_back("null geodesics carry no conjugate points");
    v.notes.push_back("geodesics on which beta never vanishes carry at most one zero per Jacobi field");
    for (double r : p.obstruction_residuals) {
        if (std::abs(r) > opt.obstruction_tol) v.obstruction_violated = true;
    }
    const long nb = static_cast<long>(p.bands.size());
    if (v.obstruction_violated) {
        v.notes.push_back("obstruction f'(x_n) + f'(x_n+1) = 0 violated");
        for (long k = 0; k < nb && !v.evidence; ++k) {
            for (Side side : {Side::Left, Side::Right}) {
                LaunchSpec s;
                s.eps = p.bands[k].eps;
                s.band = k;
                s.side = side;
                s.c2 = 1e-3 * p.bands[k].sup_abs;
                auto c = certify_launch(p, s, opt.cert);
                if (c.verdict == Verdict::Conjugate && c.oracle_agrees && c.witness) {
                    v.evidence = c;
                    break;
                }
            }
        }
        if (v.evidence) {
            v.overall = Overall::ConjugateFound;
            return v;
        }
        v.notes.push_back("no witness at small C^2, running the full sweep");
    }
    bool all_clean = true;
    for (long k = 0; k < nb; ++k) {
        v.sweeps.push_back(band_sweep(p, k, opt.samples, opt.exec, opt.cert));
        for (const auto& c : v.sweeps.back().certs) {
            if (c.verdict == Verdict::Conjugate && c.oracle_agrees && !v.evidence) {
                v.evidence = c;
            }
            if (c.verdict != Verdict::NoConjugate || !c.oracle_agrees) all_clean = false;
        }
    }
    if (v.evidence) {
        v.overall = Overall::ConjugateFound;
    } else if (all_clean) {
        v.overall = Overall::CertifiedNoConjugate;
    } else {
        v.overall = Overall::Inconclusive;
    }
    return v;
}

}  // namespace ktorus
