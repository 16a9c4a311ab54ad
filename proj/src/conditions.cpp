#include "ktorus/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ktorus/errors.hpp"
#include "ktorus/numerics.hpp"

namespace ktorus {

namespace {

constexpr double kTwoPi2 = 2.0 * M_PI * M_PI;

Check make_check(std::string name, bool pass, double margin, std::string note = {}) {
    return Check{std::move(name), pass, margin, std::move(note)};
}

std::vector<int> fprime_zero_counts(const FProfile& p) {
    std::vector<int> out;
    for (const Band& b : p.bands) out.push_back(static_cast<int>(b.critical_xs.size()));
    return out;
}

Check one_sign_change(const FProfile& p, std::vector<int>* counts) {
    auto c = fprime_zero_counts(p);
    int worst = 0;
    for (int k : c) worst = std::max(worst, std::abs(k - 1));
    if (counts) *counts = c;
    bool ok = !p.zeros.empty() && worst == 0;
    return make_check("fprime_one_sign_change_per_band", ok, worst,
                      "max over bands of |#zeros of f' - 1|");
}

double golden(const std::function<double(double)>& g, double a, double b, int iters,
              double* fx) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = g(c), fd = g(d);
    for (int i = 0; i < iters && b - a > 1e-13 * (1 + std::abs(a)); ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = g(d);
        }
    }
    double x = fc < fd ? c : d;
    *fx = std::min(fc, fd);
    return x;
}

}  // namespace

NecessaryReport check_necessary(const FProfile& p) {
    NecessaryReport r;
    if (p.flat || p.no_null_orbits) {
        std::string note = p.flat ? "flat profile: no null orbits" : "no null orbits";
        r.checks = {make_check("locally_finite", true, 0.0, note),
                    make_check("sign_alternation", true, 0.0, note),
                    make_check("fprime_one_sign_change_per_band", true, 0.0, note),
                    make_check("type_II_only", true, 0.0, note)};
        r.pass = true;
        return r;
    }
    int nz = static_cast<int>(p.zeros.size() + p.degenerate_zeros.size());
    r.checks.push_back(make_check("locally_finite", nz > 0, nz,
                                  "structural for analytic profiles; margin is zeros per period"));
    double min_slope = std::numeric_limits<double>::infinity();
    bool alt = !p.degenerate && p.zeros.size() % 2 == 0;
    for (std::size_t k = 0; k < p.zeros.size(); ++k) {
        min_slope = std::min(min_slope, std::abs(p.zero_slopes[k]));
        double a = p.zero_slopes[k], b = p.zero_slopes[(k + 1) % p.zeros.size()];
        if (a * b >= 0) alt = false;
    }
    if (p.zeros.empty()) min_slope = 0.0;
    r.checks.push_back(make_check("sign_alternation", alt, min_slope,
                                  p.degenerate ? "tangential zero: f does not change sign"
                                               : "margin is min |f'| at the zeros"));
    Check osc = one_sign_change(p, &r.fprime_zeros_per_band);
    r.checks.push_back(osc);
    r.checks.push_back(make_check("type_II_only", alt && osc.pass, osc.margin,
                                  "structural given one zero of f' per band"));
    r.pass = std::all_of(r.checks.begin(), r.checks.end(), [](const Check& c) { return c.pass; });
    return r;
}

ObstructionReport check_lambda_obstruction(const FProfile& p, double tol) {
    ObstructionReport r;
    if (p.flat || p.no_null_orbits) {
        r.pass = true;
        r.note = "no null orbits";
        return r;
    }
    if (p.degenerate) {
        r.rejected = true;
        r.note = "DegenerateZero: non-simple zero, profile outside the class";
        return r;
    }
    r.residuals = p.obstruction_residuals;
    for (double v : r.residuals) r.max_abs = std::max(r.max_abs, std::abs(v));
    r.pass = r.max_abs < tol;
    return r;
}

FamilleReport check_famille(const FProfile& p, double tol) {
    FamilleReport r;
    double min_slope = 0.0;
    if (!p.zeros.empty()) {
        min_slope = std::numeric_limits<double>::infinity();
        for (double s : p.zero_slopes) min_slope = std::min(min_slope, std::abs(s));
    }
    r.simple_zeros = make_check("simple_zeros",
                                !p.degenerate && !p.zeros.empty() &&
                                    min_slope > p.tol.margin_simple,
                                min_slope - p.tol.margin_simple, "min |f'| at zeros minus margin");
    r.one_sign_change = one_sign_change(p, nullptr);
    r.one_sign_change.name = "one_sign_change";

    const int n = 10000;
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        auto d = p.derivs(p.period * i / n, 3);
        worst = std::min(worst, -d[1] * d[3]);
    }
    r.fpfppp_nonpositive = make_check("fpfppp_nonpositive", worst >= -tol, worst,
                                      "min over grid of -f' f'''");

    double res = 0.0;
    auto axis = detect_symmetry(p, p.tol.tol_axis, &res);
    r.symmetry_axis = make_check("symmetry_axis", axis.has_value(), res,
                                 axis ? "axis at " + std::to_string(*axis) : "no axis");

    int nz = static_cast<int>(p.zeros.size() + p.degenerate_zeros.size());
    r.two_zeros_per_period = make_check("two_zeros_per_period", nz == 2, nz - 2,
                                        "zeros per smallest period minus 2");
    r.pass = r.simple_zeros.pass && r.one_sign_change.pass && r.fpfppp_nonpositive.pass &&
             r.symmetry_axis.pass && r.two_zeros_per_period.pass;
    return r;
}

StabilityGeometry stability_geometry(const FProfile& p, const Band& opp) {
    StabilityGeometry g;
    g.eps = -opp.eps;
    g.d1 = opp.lo;
    g.d2 = opp.hi;
    g.x_cr_opp = opp.x_cr;
    long k = p.band_index_of(0.5 * (opp.lo + opp.hi));
    Band left = p.band_at(k - 1), right = p.band_at(k + 1);
    g.xcr_left = left.x_cr;
    g.xcr_right = right.x_cr;
    g.m_left = left.sup_abs;
    g.m_right = right.sup_abs;
    const double P = p.period;
    auto roots = derivative_roots(p, 2, opp.x_cr - P, opp.x_cr + P, 4 * p.tol.grid);
    g.zeta0 = -INFINITY;
    g.zeta1 = INFINITY;
    for (double z : roots) {
        if (z < opp.x_cr) g.zeta0 = std::max(g.zeta0, z);
        if (z > opp.x_cr) g.zeta1 = std::min(g.zeta1, z);
    }
    if (!std::isfinite(g.zeta0) || !std::isfinite(g.zeta1))
        throw Error(ErrorKind::NotApplicable, "f'' has no zero on one side of the critical point");
    return g;
}

StabilityPoint stability_point(const FProfile& p, const StabilityGeometry& g, double x0) {
    StabilityPoint sp;
    const int e = g.eps;
    sp.x1 = g.d1 + g.d2 - x0;
    double a = std::min(x0, sp.x1), b = std::max(x0, sp.x1);
    double M = x0 < g.d1 ? g.m_left : g.m_right;
    auto g1 = [&](double x) { return 1.0 / std::sqrt(std::max(M - e * p.f(x), 0.0)); };
    double i1 = integrate_gk(g1, a, b, 1e-11);
    sp.lhs1 = -e * p.derivs(x0, 2)[2] * i1 * i1;

    const double level = e * p.f(x0);
    const int n = 256;
    for (int i = 0; i <= n; ++i) {
        double x = g.zeta0 + (g.zeta1 - g.zeta0) * i / n;
        if (level - e * p.f(x) <= 0.0) {
            sp.singular = true;
            sp.lhs2 = INFINITY;
            return sp;
        }
    }
    auto g2 = [&](double x) { return 1.0 / std::sqrt(std::max(level - e * p.f(x), 1e-300)); };
    double i2 = integrate_ts(g2, g.zeta0, g.zeta1, 1e-11);
    sp.lhs2 = e * p.derivs(g.x_cr_opp, 2)[2] * i2 * i2;
    return sp;
}

namespace {

StabilitySide stability_side(const FProfile& p, int eps) {
    StabilitySide side;
    side.eps = eps;
    side.ineq1_margin = side.ineq2_margin = INFINITY;
    bool any = false;
    bool all_ok = true;
    for (const Band& opp : p.bands) {
        if (opp.eps != -eps) continue;
        any = true;
        StabilityGeometry g;
        try {
            g = stability_geometry(p, opp);
        } catch (const Error& e) {
            side.note = e.what();
            all_ok = false;
            continue;
        }
        // x0 beyond the f'' zero on the near side, short of the eps maximum.
        struct Interval {
            double lo, hi;
        };
        std::vector<Interval> cand;
        double lh = std::min(g.d1, g.zeta0);
        if (lh > g.xcr_left) cand.push_back({g.xcr_left, lh});
        double rl = std::max(g.d2, g.zeta1);
        if (rl < g.xcr_right) cand.push_back({rl, g.xcr_right});

        int skipped = 0;
        auto objective = [&](double x0) -> double {
            StabilityPoint sp = stability_point(p, g, x0);
            if (sp.singular) {
                ++skipped;
                return INFINITY;
            }
            return std::max(sp.lhs1, sp.lhs2) - kTwoPi2;
        };
        double best = INFINITY, best_x = NAN;
        for (const Interval& iv : cand) {
            // stay off the endpoints: the ineq1 integrand blows up at x_cr
            double w = iv.hi - iv.lo;
            auto nodes = chebyshev_nodes(iv.lo + 1e-9 * w, iv.hi - 1e-9 * w, 256);
            std::vector<double> vals(nodes.size());
            for (std::size_t i = 0; i < nodes.size(); ++i) vals[i] = objective(nodes[i]);
            std::size_t j = std::min_element(vals.begin(), vals.end()) - vals.begin();
            if (!std::isfinite(vals[j])) continue;
            double lo = nodes[j > 0 ? j - 1 : j], hi = nodes[j + 1 < nodes.size() ? j + 1 : j];
            double fx = vals[j], x = nodes[j];
            if (hi > lo) {
                double gx;
                double xg = golden(objective, lo, hi, 80, &gx);
                if (gx < fx) {
                    fx = gx;
                    x = xg;
                }
            }
            if (fx < best) {
                best = fx;
                best_x = x;
            }
        }
        side.skipped += skipped;
        side.applicable = true;
        bool ok = std::isfinite(best) && best < 0.0;
        all_ok = all_ok && ok;
        if (!std::isfinite(best)) {
            side.note = "no admissible tangency";
            side.ineq1_margin = side.ineq2_margin = INFINITY;
            continue;
        }
        StabilityPoint sp = stability_point(p, g, best_x);
        double m1 = sp.lhs1 - kTwoPi2, m2 = sp.lhs2 - kTwoPi2;
        // keep the worst -eps band
        if (!std::isfinite(side.ineq1_margin) || std::max(m1, m2) >
                                                     std::max(side.ineq1_margin,
                                                              side.ineq2_margin)) {
            side.x0 = best_x;
            side.x1 = sp.x1;
            side.ineq1_lhs = sp.lhs1;
            side.ineq2_lhs = sp.lhs2;
            side.ineq1_margin = m1;
            side.ineq2_margin = m2;
            side.x_cr_opp = g.x_cr_opp;
            side.zeta0 = g.zeta0;
            side.zeta1 = g.zeta1;
        }
    }
    if (!any) side.note = "no band of the opposite sign";
    side.pass = any && all_ok;
    return side;
}

}  // namespace

StabilityReport check_stability_inequalities(const FProfile& p) {
    StabilityReport r;
    r.plus.eps = 1;
    r.minus.eps = -1;
    if (!p.certifiable()) {
        r.plus.note = r.minus.note = "profile outside the class";
        r.curvature_simple_zeros = make_check("curvature_simple_zeros", false, 0.0,
                                              "profile outside the class");
        return r;
    }
    // start at a maximum of |f| so no window edge sits on a zero of f''
    const double a = p.bands.front().x_cr;
    auto roots = derivative_roots(p, 2, a, a + p.period, p.tol.grid);
    double min3 = INFINITY;
    for (double z : roots) min3 = std::min(min3, std::abs(p.derivs(z, 3)[3]));
    if (roots.empty()) min3 = 0.0;
    r.curvature_zero_count = static_cast<int>(roots.size());
    r.curvature_simple_zeros =
        make_check("curvature_simple_zeros", roots.size() == 2 && min3 > p.tol.margin_simple,
                   min3 - p.tol.margin_simple, "two zeros of f'' per period; min |f'''| minus margin");
    int worst = 0;
    for (const Band& b : p.bands)
        worst = std::max(worst, std::abs(static_cast<int>(b.critical_xs.size()) - 1));
    r.one_critical_orbit_per_band =
        make_check("one_critical_orbit_per_band", worst == 0, worst, "max |#critical points - 1|");
    r.plus = stability_side(p, 1);
    r.minus = stability_side(p, -1);
    // The hypotheses are reported alongside; the verdict is condition (3).
    r.pass = r.plus.pass && r.minus.pass;
    return r;
}

namespace {

// Composite Gauss-Legendre: the coefficient comes from a piecewise
// polynomial interpolant, which adaptive rules refine forever.
double integrate_cells(const JacobiBasis& b, double a, double c, int cells) {
    auto ek = [&](double t) { return b.eps_kappa(t); };
    double h = (c - a) / cells, acc = 0.0;
    for (int i = 0; i < cells; ++i) acc += integrate_gl20(ek, a + i * h, a + (i + 1) * h);
    return acc;
}

}  // namespace

double hill_value(const JacobiBasis& b, double T, bool require_antiperiodic) {
    if (require_antiperiodic) {
        Monodromy m = monodromy_over(b, T);
        if (!m.is_minus_identity(1e-6))
            throw Error(ErrorKind::NotApplicable,
                        "shift over T is not -Id (distance " + std::to_string(m.distance_to(-1)) +
                            ")");
    }
    return T * integrate_cells(b, 0.0, T, 256);
}

double hill_diagnostic(const GeodesicTrace& tr, const JacobiBasis& b) {
    if (tr.cls.kind != TraceKind::Periodic)
        throw Error(ErrorKind::NotApplicable, "trace is not periodic");
    return hill_value(b, 2.0 * tr.omega, true);
}

SlBounds sl_bounds_over(const JacobiBasis& b, double w) {
    SlBounds r;
    r.omega = w;
    auto ek = [&](double t) { return b.eps_kappa(t); };
    auto I = [&](double a, double c) { return integrate_cells(b, a, c, 128); };

    r.d2 = I(0.0, w) / w;
    r.lemma0_lhs = I(0.0, 2 * w);
    r.lemma0_rhs = M_PI * M_PI / (2 * w);
    r.lemma0_ok = r.lemma0_lhs <= r.lemma0_rhs + 1e-6;

    // Tail averages on a grid, from the far end inward.
    const int n = 400;
    r.d2_min = INFINITY;
    r.big_d2 = 0.0;
    double acc0 = 0.0, acc1 = 0.0;
    for (int i = n - 1; i >= 0; --i) {
        double t = w * i / n, t2 = w + w * i / n;
        acc0 += integrate_cells(b, t, t + w / n, 1);
        acc1 += integrate_cells(b, t2, t2 + w / n, 1);
        r.d2_min = std::min(r.d2_min, acc0 / (w - t));
        r.big_d2 = std::max(r.big_d2, std::abs(acc1) / (2 * w - t2));
    }

    Monodromy m = monodromy_over(b, 2 * w);
    bool pm = m.is_identity(1e-6) || m.is_minus_identity(1e-6);
    if (pm) {
        r.lemma1_applicable = true;
        r.lemma1_lhs = std::max(I(w, 2 * w) / w, -b.eps_kappa(0.0));
        r.lemma1_rhs = M_PI * M_PI / (4 * w * w);
        r.lemma1_ok = r.lemma1_lhs >= r.lemma1_rhs - 1e-6;

        // first sign change of kappa on (0, w)
        const int k = 2000;
        double prev = b.eps_kappa(0.0);
        for (int i = 1; i <= k; ++i) {
            double t = w * i / k, v = b.eps_kappa(t);
            if ((prev < 0) != (v < 0) && i > 1) {
                r.lemma2_applicable = true;
                r.tau = solve_bracket(ek, w * (i - 1) / k, t, 1e-14);
                r.lemma2_lhs = sqr(w - r.tau) * b.eps_kappa(w);
                r.lemma2_ok = r.lemma2_lhs >= M_PI * M_PI / 4 - 1e-6;
                break;
            }
            prev = v;
        }
    }
    r.sl_bound_ok = r.lemma0_ok && (!r.lemma1_applicable || r.lemma1_ok) &&
                    (!r.lemma2_applicable || r.lemma2_ok);
    return r;
}

SlBounds sl_bounds(const GeodesicTrace& tr, const JacobiBasis& b) {
    if (tr.cls.kind != TraceKind::Periodic)
        throw Error(ErrorKind::NotApplicable, "trace is not periodic");
    return sl_bounds_over(b, tr.omega);
}

std::vector<GeodesicDiagnostic> geodesic_diagnostics(const FProfile& p, int samples) {
    std::vector<GeodesicDiagnostic> out;
    if (!p.certifiable() || samples <= 0) return out;
    for (std::size_t k = 0; k < p.bands.size(); ++k) {
        const Band& band = p.bands[k];
        for (double u : chebyshev_nodes(0.05, 0.95, samples)) {
            GeodesicDiagnostic d;
            d.eps = band.eps;
            d.c2 = u * band.sup_abs;
            try {
                LaunchSpec spec{band.eps, d.c2, static_cast<long>(k), Side::Left};
                GeodesicTrace tr = launch_tangent(p, spec);
                if (tr.cls.kind != TraceKind::Periodic) {
                    d.note = std::string("trace is ") + to_string(tr.cls.kind);
                    out.push_back(d);
                    continue;
                }
                JacobiBasis b = fundamental_basis(p, tr);
                d.omega = tr.omega;
                d.bounds = sl_bounds(tr, b);
                try {
                    d.hill_value = hill_diagnostic(tr, b);
                } catch (const Error&) {
                }
            } catch (const Error& e) {
                d.note = e.what();
            }
            out.push_back(d);
        }
    }
    return out;
}

ConditionReport check_all(const FProfile& p, int diagnostic_samples) {
    ConditionReport r;
    r.necessary = check_necessary(p);
    r.obstruction = check_lambda_obstruction(p);
    r.famille = check_famille(p);
    bool pre = r.famille.simple_zeros.pass && r.famille.one_sign_change.pass &&
               r.famille.symmetry_axis.pass && r.famille.two_zeros_per_period.pass;
    if (pre) {
        r.stability = check_stability_inequalities(p);
    } else {
        r.notes.push_back("stability inequalities skipped: famille hypotheses fail");
    }
    if (p.degenerate) r.notes.push_back("non-simple zero: raw profile is outside the class");
    r.diagnostics = geodesic_diagnostics(p, diagnostic_samples);
    r.pass = r.necessary.pass && r.obstruction.pass && r.famille.pass && r.stability &&
             r.stability->pass;
    return r;
}

}  // namespace ktorus
