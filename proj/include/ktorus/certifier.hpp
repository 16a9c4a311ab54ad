#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ktorus/geodesic.hpp"
#include "ktorus/jacobi.hpp"
#include "ktorus/profile.hpp"

namespace ktorus {

inline constexpr double kTolSign = 1e-6;
inline constexpr double kTolDuality = 1e-6;

struct TurningTimes {
    double t0 = 0.0;
    double t1 = 0.0;
    double t0_alt = 0.0;  // second rule
    double t1_alt = 0.0;
};

// Crossing times by quadrature of dx / sqrt(C^2 - eps f), the tangency
// singularity removed by x = z0 + dir u^2.
TurningTimes turning_quadratures(const FProfile& p, const LaunchSpec& spec);
// Time from tangency to the turning point, same technique.
double turn_quadrature(const FProfile& p, const LaunchSpec& spec);

struct DominoValues {
    double num0 = 0.0;  // c(t0) + c(t1)
    double z0 = 0.0;    // num0 / s(t0)
    std::optional<double> z1;  // -c(ta) - c(tb) + 2 c'(2w)/s'(2w) s(ta)
    double s_t0 = 0.0;
    double min_margin() const { return z1 ? std::min(num0, *z1) : num0; }
};

DominoValues domino_criteria(const JacobiBasis& b, double t0, double t1,
                             std::optional<double> omega, double ta = NAN, double tb = NAN);

// Limit of c(t0) + c(t1) as C -> 0 for a launch crossing x_i first, then x_j.
double limit_z_small_c(const FProfile& p, double x_i, double x_j);

struct Window {
    double lo = 0.0;
    double hi = 0.0;
    std::string name;
};

struct Witness {
    double a = 0.0;
    double z = 0.0;
    std::string window;
};

std::vector<Window> torus_windows(const GeodesicTrace& tr);
std::optional<Witness> oracle_scan(const JacobiBasis& b, const std::vector<Window>& windows,
                                   int grid_n);

enum class Verdict { NoConjugate, Conjugate, Degenerate, Failed };
const char* to_string(Verdict v);

struct DominoCertificate {
    LaunchSpec spec;
    TraceKind kind = TraceKind::Periodic;
    double z0 = 0.0;
    double t0 = 0.0;
    double t1 = 0.0;
    double ta = 0.0;
    double tb = 0.0;
    double omega = 0.0;
    double t0_quad = 0.0;
    double t1_quad = 0.0;
    double duality_err = 0.0;
    DominoValues z;
    Verdict verdict = Verdict::Failed;
    std::optional<Witness> witness;
    bool oracle_agrees = false;
    std::string error;
};

struct CertifyOptions {
    int oracle_grid = 64;
    bool run_oracle = true;
};

DominoCertificate certify_launch(const FProfile& p, const LaunchSpec& spec,
                                 const CertifyOptions& opt = {});

enum class Exec { Serial, Parallel };

struct SweepRecord {
    long band = 0;
    int eps = 0;
    std::vector<DominoCertificate> certs;  // sorted by (side, C^2)
    double min_z0 = 0.0;
    double min_z1 = 0.0;
    double argmin_c2 = 0.0;
    int n_conjugate = 0;
    int n_degenerate = 0;
    int n_failed = 0;
    int n_disagree = 0;
    double max_duality_err = 0.0;
};

// C^2 = M_eps * Chebyshev nodes in [1e-3, 1 - 1e-3], both sides.
std::vector<double> sweep_grid(double m_eps, int n);
SweepRecord band_sweep(const FProfile& p, long band, int n, Exec exec = Exec::Parallel,
                       const CertifyOptions& opt = {});

enum class Overall { CertifiedNoConjugate, ConjugateFound, Inconclusive };
const char* to_string(Overall o);

struct TorusVerdict {
    Overall overall = Overall::Inconclusive;
    std::vector<SweepRecord> sweeps;
    std::vector<std::string> notes;
    std::optional<DominoCertificate> evidence;
    bool obstruction_violated = false;
};

struct VerdictOptions {
    int samples = 64;
    Exec exec = Exec::Parallel;
    CertifyOptions cert;
    double obstruction_tol = 1e-9;
};

TorusVerdict torus_verdict(const FProfile& p, const VerdictOptions& opt = {});

}  // namespace ktorus
