#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ktorus/geodesic.hpp"
#include "ktorus/jacobi.hpp"
#include "ktorus/profile.hpp"

namespace ktorus {

struct Check {
    std::string name;
    bool pass = false;
    double margin = 0.0;
    std::string note;
};

struct NecessaryReport {
    std::vector<Check> checks;  // locally_finite, sign_alternation, fprime_one_sign_change, type_II_only
    std::vector<int> fprime_zeros_per_band;
    bool pass = false;
};

NecessaryReport check_necessary(const FProfile& p);

struct ObstructionReport {
    std::vector<double> residuals;  // f'(x_n) + f'(x_n+1), cyclic
    double max_abs = 0.0;
    bool pass = false;
    bool rejected = false;  // degenerate zeros: outside the class
    std::string note;
};

ObstructionReport check_lambda_obstruction(const FProfile& p, double tol = 1e-9);

struct FamilleReport {
    Check simple_zeros;
    Check one_sign_change;
    Check fpfppp_nonpositive;  // margin: min over grid of -f' f'''
    Check symmetry_axis;
    Check two_zeros_per_period;
    bool pass = false;
};

FamilleReport check_famille(const FProfile& p, double tol = 1e-9);

struct StabilitySide {
    int eps = 0;
    bool applicable = false;
    std::string note;
    double x0 = 0.0;  // witness
    double x1 = 0.0;
    double ineq1_lhs = 0.0;
    double ineq2_lhs = 0.0;
    double ineq1_margin = 0.0;  // lhs - 2 pi^2
    double ineq2_margin = 0.0;
    double x_cr_opp = 0.0;  // critical point of the -eps band
    double zeta0 = 0.0;
    double zeta1 = 0.0;
    int skipped = 0;  // singular quadrature candidates
    bool pass = false;
};

struct StabilityReport {
    Check curvature_simple_zeros;  // f'' zeros per period with |f'''| > margin
    int curvature_zero_count = 0;
    Check one_critical_orbit_per_band;
    StabilitySide plus;
    StabilitySide minus;
    bool pass = false;
};

// A -eps band [d1, d2] with the eps critical points on either side and the
// zeros of f'' around its own critical point.
struct StabilityGeometry {
    int eps = 0;  // sign of the launch band
    double d1 = 0.0;
    double d2 = 0.0;
    double xcr_left = 0.0;   // eps band to the left
    double xcr_right = 0.0;  // eps band to the right
    double m_left = 0.0;
    double m_right = 0.0;
    double x_cr_opp = 0.0;
    double zeta0 = 0.0;
    double zeta1 = 0.0;
};

// opp is a band of sign -eps (lifted coordinates).
StabilityGeometry stability_geometry(const FProfile& p, const Band& opp);

struct StabilityPoint {
    double x1 = 0.0;
    double lhs1 = 0.0;
    double lhs2 = 0.0;
    bool singular = false;  // eps f(x0) - eps f vanishes on (zeta0, zeta1)
};

// Both left-hand sides for the tangency x0, mirrored to x1 = d1 + d2 - x0.
StabilityPoint stability_point(const FProfile& p, const StabilityGeometry& g, double x0);

StabilityReport check_stability_inequalities(const FProfile& p);

// T * int_0^T eps kappa; NotApplicable unless the shift over T is -Id.
double hill_diagnostic(const GeodesicTrace& tr, const JacobiBasis& b);
double hill_value(const JacobiBasis& b, double T, bool require_antiperiodic = true);

struct SlBounds {
    double omega = 0.0;
    double d2 = 0.0;        // (1/w) int_0^w eps kappa
    double d2_min = 0.0;    // min_t int_t^w eps kappa / (w - t)
    double lemma0_lhs = 0.0;   // int_0^{2w} eps kappa
    double lemma0_rhs = 0.0;   // pi^2 / (2 w)
    bool lemma0_ok = false;
    bool lemma1_applicable = false;
    double lemma1_lhs = 0.0;   // sup{(1/w) int_w^{2w} eps kappa, -eps kappa(0)}
    double lemma1_rhs = 0.0;   // pi^2 / (4 w^2)
    double big_d2 = 0.0;       // max_t |int_t^{2w} eps kappa| / (2w - t)
    bool lemma1_ok = false;
    bool lemma2_applicable = false;
    double tau = 0.0;
    double lemma2_lhs = 0.0;   // (w - tau)^2 eps kappa(w)
    bool lemma2_ok = false;
    bool sl_bound_ok = false;
};

SlBounds sl_bounds(const GeodesicTrace& tr, const JacobiBasis& b);
SlBounds sl_bounds_over(const JacobiBasis& b, double omega);

struct GeodesicDiagnostic {
    int eps = 0;
    double c2 = 0.0;
    double omega = 0.0;
    std::optional<double> hill_value;  // only when the shift over 2 omega is -Id
    SlBounds bounds;
    std::string note;
};

// sl_bounds (and Hill where applicable) on `samples` periodic traces per band.
std::vector<GeodesicDiagnostic> geodesic_diagnostics(const FProfile& p, int samples);

struct ConditionReport {
    NecessaryReport necessary;
    ObstructionReport obstruction;
    FamilleReport famille;
    std::optional<StabilityReport> stability;
    std::vector<GeodesicDiagnostic> diagnostics;
    std::vector<std::string> notes;
    bool pass = false;
};

ConditionReport check_all(const FProfile& p, int diagnostic_samples = 4);

}  // namespace ktorus
