#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ktorus/ode.hpp"
#include "ktorus/profile.hpp"

namespace ktorus {

enum class Side { Left, Right };

struct LaunchSpec {
    int eps = 1;
    double c2 = 0.0;
    long band = 0;  // lifted band index, see FProfile::band_at
    Side side = Side::Left;
};

enum class TraceKind { Periodic, Asymptotic, CriticalOrbit, Perpendicular };

const char* to_string(TraceKind k);

struct Classification {
    TraceKind kind = TraceKind::Periodic;
    double omega = 0.0;    // Periodic
    double x_limit = 0.0;  // Asymptotic
    bool near_critical = false;
};

// Where a tangent launch goes, worked out from the band data alone.
struct PathPlan {
    int dir = -1;        // sign of x' on (0, t_turn)
    double z0 = 0.0;     // tangency, eps f(z0) = C^2
    double x0 = 0.0;     // first zero crossed
    double x1 = 0.0;     // second zero crossed
    std::vector<double> crossed;  // every zero met before the turn, in order
    bool asymptotic = false;
    double z1 = 0.0;     // turning point, or the critical point approached
    double m_eps = 0.0;  // sup of eps f on the launch band
};

// Tolerance for "C^2 is a critical value".
inline constexpr double kTolCrit = 1e-9;
// Distance to the approached critical point at which the linearised
// saddle dynamics take over and integration stops.
inline constexpr double kAsymptoticRadius = 1e-4;

PathPlan plan_path(const FProfile& p, const LaunchSpec& spec);

// State layout of the augmented system.
enum StateIndex { kX = 0, kXp = 1, kS = 2, kSp = 3, kC = 4, kCp = 5 };
using State = std::array<double, 6>;

struct TraceOptions {
    double t_max = 0.0;        // 0 = 50 P / C
    double span_factor = 1.0;  // periodic traces run to span_factor * 4 omega
    double extra_span = 0.0;   // plus this much
    double rtol = 1e-11;
    double atol = 1e-11;
};

struct GeodesicTrace {
    LaunchSpec spec;
    PathPlan plan;
    double C = 0.0;  // |C|
    std::shared_ptr<const DenseSolution> fwd;
    std::shared_ptr<const DenseSolution> bwd;  // null when x is mirrored
    double t0 = 0.0;
    double t1 = 0.0;
    std::vector<double> crossings;  // times of plan.crossed
    std::optional<double> t_turn;
    double omega = 0.0;
    Classification cls;
    bool horizon_exceeded = false;
    double t_max = 0.0;

    double t_lo() const;
    double t_hi() const;
    State state(double t) const;
    double x(double t) const { return state(t)[kX]; }
    double xprime(double t) const { return state(t)[kXp]; }
    double z0() const { return plan.z0; }
};

// Integrates x'' = -eps f'(x)/2 jointly with the Jacobi basis from (z0, 0).
GeodesicTrace launch_tangent(const FProfile& p, const LaunchSpec& spec,
                             const TraceOptions& opt = {});

Classification classify(const FProfile& p, const GeodesicTrace& trace);
Classification classify_spec(const FProfile& p, const LaunchSpec& spec);

// |x'^2 + eps f(x) - C^2|.
double energy_residual(const FProfile& p, const GeodesicTrace& tr, double t);

struct YSample {
    double t;
    double x;
    double y;
};

// y along the regular branch y' = eps / (eps C + x'), with the sign of C
// chosen so the branch is regular on the outward leg.
std::vector<YSample> y_trace(const FProfile& p, const GeodesicTrace& tr, double y0, double t_end,
                             int samples = 200);
// Same integral by a second rule, for cross checks.
double y_increment_ts(const FProfile& p, const GeodesicTrace& tr, double t_end);
// Signed Clairaut constant used by y_trace.
double branch_c(const GeodesicTrace& tr);

// Geodesic launched transversally at the zero x_0 with x' = C and
// times of its first n crossings of zeros of f.
std::vector<double> band_crossing_growth(const FProfile& p, int eps, double c2, int n,
                                         double t_max = 0.0);

}  // namespace ktorus
