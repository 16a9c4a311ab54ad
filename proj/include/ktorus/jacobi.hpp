#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>

#include "ktorus/geodesic.hpp"
#include "ktorus/ode.hpp"

namespace ktorus {

// Fundamental solutions of u'' + eps kappa(t) u = 0 with
// s(0) = 0, s'(0) = 1, c(0) = 1, c'(0) = 0.
class JacobiBasis {
public:
    // (s, s', c, c') at t.
    std::array<double, 4> at(double t) const { return eval_(t); }
    double s(double t) const { return at(t)[0]; }
    double sprime(double t) const { return at(t)[1]; }
    double c(double t) const { return at(t)[2]; }
    double cprime(double t) const { return at(t)[3]; }
    double eps_kappa(double t) const { return ek_(t); }

    double beta0p() const { return beta0p_; }
    double beta(double t) const { return beta0p_ * s(t); }
    double wronskian(double t) const;

    double t_lo() const { return t_lo_; }
    double t_hi() const { return t_hi_; }
    double scan_step() const { return scan_; }
    double omega() const { return omega_; }  // 0 when unknown

    friend JacobiBasis fundamental_basis(const FProfile& p, const GeodesicTrace& tr);
    friend JacobiBasis synthetic_basis(std::function<double(double)> eps_kappa, double t_lo,
                                       double t_hi, double scan_step);

private:
    std::function<std::array<double, 4>(double)> eval_;
    std::function<double(double)> ek_;
    double beta0p_ = 0.0;
    double t_lo_ = 0.0;
    double t_hi_ = 0.0;
    double scan_ = 0.01;
    double omega_ = 0.0;
};

JacobiBasis fundamental_basis(const FProfile& p, const GeodesicTrace& tr);

// Basis for a prescribed coefficient eps kappa(t), integrated on [t_lo, t_hi].
JacobiBasis synthetic_basis(std::function<double(double)> eps_kappa, double t_lo, double t_hi,
                            double scan_step = 0.01);

// Solution c(a) s - s(a) c, vanishing at a with unit slope.
double solution_through(const JacobiBasis& b, double a, double t);

// Smallest zero > a of the solution through a, if below `limit`.
std::optional<double> next_zero_before(const JacobiBasis& b, double a, double limit);
// As above, up to the end of the span; SpanExhausted otherwise.
double next_zero(const JacobiBasis& b, double a);

struct Monodromy {
    // Period shift in the basis (c, s): columns are the images of c and s.
    std::array<std::array<double, 2>, 2> m{};
    double period = 0.0;
    double det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
    double distance_to(double sign) const;  // max |m - sign I|
    bool is_identity(double tol = 1e-6) const { return distance_to(1.0) < tol; }
    bool is_minus_identity(double tol = 1e-6) const { return distance_to(-1.0) < tol; }
};

Monodromy monodromy_over(const JacobiBasis& b, double period);
// Over 4 omega; NotPeriodic when the trace has no turn.
Monodromy monodromy(const GeodesicTrace& tr, const JacobiBasis& b);

struct GapResult {
    double gap = 0.0;
    double a_min = 0.0;
};

// Min over an a-grid on one kappa period of z(a) - a.
GapResult min_gap(const GeodesicTrace& tr, const JacobiBasis& b, int grid_n);
GapResult min_gap_over(const JacobiBasis& b, double a_lo, double a_hi, int grid_n);

}  // namespace ktorus
