#include "ktorus/profile.hpp"

#include <algorithm>
#include <cmath>

#include "ktorus/errors.hpp"
#include "ktorus/numerics.hpp"

namespace ktorus {

namespace {

int sgn(double v) { return (v > 0) - (v < 0); }

}  // namespace

std::vector<double> derivative_roots(const FProfile& p, int k, double lo, double hi, int n) {
    std::vector<double> out;
    auto g = [&](double x) { return p.derivs(x, k)[k]; };
    double h = (hi - lo) / n;
    double x0 = lo;
    double g0 = g(x0);
    for (int i = 1; i <= n; ++i) {
        double x1 = (i == n) ? hi : lo + i * h;
        double g1 = g(x1);
        if (g0 == 0.0) {
            if (i > 1) out.push_back(x0);
        } else if (g1 != 0.0 && sgn(g0) != sgn(g1)) {
            out.push_back(solve_bracket(g, x0, x1, 1e-15, g0, g1));
        }
        x0 = x1;
        g0 = g1;
    }
    return out;
}

namespace {

double polish_zero(const FProfile& p, double x) {
    for (int it = 0; it < 3; ++it) {
        auto d = p.derivs(x, 1);
        if (d[1] == 0.0) break;
        double nx = x - d[0] / d[1];
        if (std::abs(p.f(nx)) >= std::abs(d[0])) break;
        x = nx;
    }
    return x;
}

}  // namespace

double FProfile::zero_at(long k) const {
    long n = static_cast<long>(zeros.size());
    if (n == 0) {
        throw Error(ErrorKind::NotApplicable, "profile has no zeros");
    }
    long q = k / n;
    long r = k % n;
    if (r < 0) {
        r += n;
        q -= 1;
    }
    return zeros[static_cast<std::size_t>(r)] + static_cast<double>(q) * period;
}

Band FProfile::band_at(long k) const {
    long n = static_cast<long>(bands.size());
    long q = k / n;
    long r = k % n;
    if (r < 0) {
        r += n;
        q -= 1;
    }
    Band b = bands[static_cast<std::size_t>(r)];
    double shift = static_cast<double>(q) * period;
    b.lo += shift;
    b.hi += shift;
    b.x_cr += shift;
    for (double& c : b.critical_xs) c += shift;
    for (double& z : b.curvature_zeros) z += shift;
    return b;
}

long FProfile::band_index_of(double x) const {
    if (zeros.empty()) {
        return static_cast<long>(std::floor(x / period));
    }
    long n = static_cast<long>(zeros.size());
    long q = static_cast<long>(std::floor((x - zeros[0]) / period));
    double xr = x - static_cast<double>(q) * period;
    long r = n - 1;
    for (long i = 0; i + 1 < n; ++i) {
        if (xr < zeros[static_cast<std::size_t>(i + 1)]) {
            r = i;
            break;
        }
    }
    return q * n + r;
}

std::array<double, 4> sample_derivatives(const FProfile& p, double x) { return p.derivs(x, 3); }

std::vector<Band> decompose_bands(const FProfile& p) {
    std::vector<Band> out;
    const double P = p.period;
    const int N = std::max(p.tol.grid, 100);
    if (p.flat) {
        Band b;
        b.lo = 0.0;
        b.hi = P;
        double v = p.f(0.0);
        b.eps = sgn(v);
        b.sup_abs = std::abs(v);
        b.x_cr = 0.0;
        out.push_back(b);
        return out;
    }
    auto fill = [&](Band& b, int cells) {
        b.critical_xs = derivative_roots(p, 1, b.lo, b.hi, cells);
        b.curvature_zeros = derivative_roots(p, 2, b.lo, b.hi, cells);
        // drop roots sitting on the band edges
        auto inside = [&](double x) { return x > b.lo + 1e-12 && x < b.hi - 1e-12; };
        std::erase_if(b.critical_xs, [&](double x) { return !inside(x); });
        std::erase_if(b.curvature_zeros, [&](double x) { return !inside(x); });
        double best = -INFINITY;
        for (double c : b.critical_xs) {
            double v = b.eps * p.f(c);
            if (v > best) {
                best = v;
                b.x_cr = c;
            }
        }
        if (b.critical_xs.empty()) {
            auto r = minimize_on([&](double x) { return -b.eps * p.f(x); }, b.lo, b.hi);
            b.x_cr = r.first;
            best = -r.second;
        }
        b.sup_abs = best;
    };
    if (p.zeros.empty()) {
        Band b;
        b.lo = 0.0;
        b.hi = P;
        b.eps = sgn(p.f(0.0));
        fill(b, N);
        out.push_back(b);
        return out;
    }
    const std::size_t n = p.zeros.size();
    for (std::size_t i = 0; i < n; ++i) {
        Band b;
        b.lo = p.zeros[i];
        b.hi = (i + 1 < n) ? p.zeros[i + 1] : p.zeros[0] + P;
        double mid = 0.5 * (b.lo + b.hi);
        b.eps = sgn(p.f(mid));
        int cells = std::max(64, static_cast<int>(N * (b.hi - b.lo) / P));
        fill(b, cells);
        out.push_back(b);
    }
    return out;
}

double symmetry_residual(const FProfile& p, double a, int n) {
    double r = 0.0;
    double half = 0.5 * p.period;
    for (int i = 1; i <= n; ++i) {
        double t = half * i / n;
        r = std::max(r, std::abs(p.f(a + t) - p.f(a - t)));
    }
    return r;
}

std::optional<double> detect_symmetry(const FProfile& p, double tol, double* residual) {
    std::vector<double> cands = p.critical_points;
    for (std::size_t i = 0; i < p.zeros.size(); ++i) {
        double a = p.zeros[i];
        double b = (i + 1 < p.zeros.size()) ? p.zeros[i + 1] : p.zeros[0] + p.period;
        cands.push_back(0.5 * (a + b));
    }
    if (cands.empty()) {
        cands.push_back(0.0);
    }
    double best_a = cands[0];
    double best_r = INFINITY;
    for (double a : cands) {
        double r = symmetry_residual(p, a, 128);
        if (r < best_r) {
            best_r = r;
            best_a = a;
        }
    }
    double h = 1e-3 * p.period;
    auto rr = minimize_on([&](double a) { return symmetry_residual(p, a, 128); }, best_a - h,
                          best_a + h, 40);
    if (rr.second < best_r) {
        best_a = rr.first;
    }
    best_r = symmetry_residual(p, best_a, 1024);
    if (residual) *residual = best_r;
    if (best_r < tol) {
        return wrap(best_a, p.period);
    }
    return std::nullopt;
}

FProfile build_profile(const Expression& expr, double hint_period, const Tolerances& tol) {
    if (!(hint_period > 0.0) || !std::isfinite(hint_period)) {
        throw Error(ErrorKind::Config, "period hint must be positive");
    }
    FProfile p;
    p.expr = expr;
    p.tol = tol;

    // evaluable on [0, 4 hint]
    const int ndom = 4000;
    double fmax = 0.0;
    double f0 = expr.eval(0.0);
    double spread = 0.0;
    double dmax = 0.0;
    for (int i = 0; i <= ndom; ++i) {
        double x = 4.0 * hint_period * i / ndom;
        auto d = expr.eval_derivs(x, 3);
        for (double v : d) {
            if (!std::isfinite(v)) {
                throw Error(ErrorKind::Domain, "profile not finite at x = " + std::to_string(x));
            }
        }
        fmax = std::max(fmax, std::abs(d[0]));
        spread = std::max(spread, std::abs(d[0] - f0));
        dmax = std::max(dmax, std::abs(d[1]));
    }
    if (!expr.depends_on_x() || (spread <= 1e-14 * std::max(1.0, std::abs(f0)) && dmax <= 1e-12)) {
        p.flat = true;
        p.period = hint_period;
        p.no_null_orbits = (f0 != 0.0);
        p.notes.push_back("flat");
        if (f0 == 0.0) {
            p.notes.push_back("identically null Killing field");
        } else {
            p.notes.push_back("no null orbits");
        }
        p.bands = decompose_bands(p);
        p.n_bands = 0;
        return p;
    }

    // smallest period among hint/k
    const int nsamp = 1000;
    auto residual_for = [&](double P) {
        double r = 0.0;
        for (int j = 0; j < nsamp; ++j) {
            double x = hint_period * (j + 0.318309886183791) / nsamp;
            r = std::max(r, std::abs(expr.eval(x + P) - expr.eval(x)));
        }
        return r;
    };
    double chosen = 0.0;
    for (int k = tol.max_divisor; k >= 1; --k) {
        double P = hint_period / k;
        double r = residual_for(P);
        if (r < tol.tol_sym) {
            chosen = P;
            p.period_residual = r;
            break;
        }
    }
    if (chosen == 0.0) {
        throw Error(ErrorKind::NonPeriodic,
                    "no period hint/k passes the periodicity test (residual " +
                        std::to_string(residual_for(hint_period)) + ")");
    }
    p.period = chosen;
    const double P = p.period;

    // zeros by grid bracketing on [0, P)
    const int N = tol.grid;
    std::vector<double> xs(N), fs(N);
    for (int i = 0; i < N; ++i) {
        xs[i] = P * i / N;
        fs[i] = expr.eval(xs[i]);
    }
    auto fval = [&](double x) { return expr.eval(x); };
    std::vector<std::pair<double, bool>> found;  // (x, tangential)
    for (int i = 0; i < N; ++i) {
        int j = (i + 1) % N;
        double xa = xs[i];
        double xb = (j == 0) ? P : xs[j];
        double fa = fs[i];
        double fb = fs[j];
        if (fa == 0.0) {
            found.push_back({xa, false});
        } else if (fb != 0.0 && sgn(fa) != sgn(fb)) {
            double z = solve_bracket(fval, xa, xb, 1e-16, fa, fb);
            found.push_back({polish_zero(p, z), false});
        } else {
            // tangential touch: local minimum of |f| without sign change
            int k = (i + N - 1) % N;
            double fk = fs[k];
            if (std::abs(fa) <= std::abs(fk) && std::abs(fa) < std::abs(fb) &&
                sgn(fk) == sgn(fa) && std::abs(fa) < 1e-2 * std::max(fmax, 1e-300)) {
                double xk = (i == 0) ? -P / N : xs[k];
                int e = sgn(fa);
                auto r = minimize_on([&](double x) { return e * expr.eval(x); }, xk, xb, 52);
                if (std::abs(r.second) < 1e-10) {
                    found.push_back({wrap(r.first, P), true});
                }
            }
        }
    }
    std::sort(found.begin(), found.end());
    for (auto& [z, tangential] : found) {
        double zz = wrap(z, P);
        if (!p.zeros.empty() && std::abs(zz - p.zeros.back()) < 1e-9) continue;
        if (!p.zeros.empty() && std::abs(zz - P - p.zeros.front()) < 1e-9) continue;
        double slope = expr.eval_derivs(zz, 1)[1];
        p.zeros.push_back(zz);
        p.zero_slopes.push_back(slope);
        if (tangential || std::abs(slope) <= tol.margin_simple) {
            p.degenerate = true;
            p.degenerate_zeros.push_back(zz);
        }
    }
    if (p.degenerate) {
        p.notes.push_back("degenerate zero: rejected for certification");
    }
    p.n_bands = static_cast<int>(p.zeros.size());
    if (p.zeros.empty()) {
        p.no_null_orbits = true;
        p.notes.push_back("no null orbits");
    }
    if (p.degenerate) {
        // tangential zeros do not separate bands; keep only sign changes for banding
        FProfile q = p;
        q.zeros.clear();
        for (std::size_t i = 0; i < p.zeros.size(); ++i) {
            double s = std::abs(p.zero_slopes[i]);
            bool tangential = std::find(p.degenerate_zeros.begin(), p.degenerate_zeros.end(),
                                        p.zeros[i]) != p.degenerate_zeros.end() &&
                              s <= tol.margin_simple;
            if (!tangential) q.zeros.push_back(p.zeros[i]);
        }
        p.bands = decompose_bands(q);
    } else {
        p.bands = decompose_bands(p);
    }
    for (const Band& b : p.bands) {
        for (double c : b.critical_xs) p.critical_points.push_back(wrap(c, P));
    }
    std::sort(p.critical_points.begin(), p.critical_points.end());
    const std::size_t n = p.zeros.size();
    for (std::size_t i = 0; i < n; ++i) {
        p.obstruction_residuals.push_back(p.zero_slopes[i] + p.zero_slopes[(i + 1) % n]);
    }
    p.symmetry_axis = detect_symmetry(p, tol.tol_axis);
    return p;
}

}  // namespace ktorus
