#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ktorus/errors.hpp"
#include "ktorus/geodesic.hpp"
#include "ktorus/profile.hpp"
#include "ktorus/report.hpp"

namespace ktorus {

struct RunConfig {
    std::string expr;
    double period_hint = 0.0;
    Tolerances tol;

    int samples = 64;       // certify: C^2 samples per band and side
    int oracle_grid = 64;
    std::string csv;        // certify: optional (C^2, Z0, Z1) table
    int diagnostic_samples = 4;

    int eps = 1;
    std::optional<double> c2;
    long band = 0;
    Side side = Side::Left;
    double span = 1.0;
    int trace_samples = 400;
    bool jacobi = false;

    long saddle_zero = 0;
    double saddle_half_width = 0.0;
    int saddle_n = 21;

    int oracle_samples = 16;
    std::optional<int> oracle_eps;  // all bands when absent
    std::optional<double> oracle_c2;
    std::optional<std::uint64_t> seed;

    std::string out;
    int jobs = 0;  // 0 = runtime default

    Json effective;  // normalised config, hashed into the metadata
    std::string hash() const;
};

// Strict: unknown keys and non-positive tolerances are Config errors.
RunConfig parse_config(const Json& j);
RunConfig load_config(const std::string& path);

struct CommandResult {
    int code = 0;
    std::string body;  // JSON report or CSV
};

CommandResult cmd_bands(const RunConfig& cfg);
CommandResult cmd_conditions(const RunConfig& cfg);
CommandResult cmd_certify(const RunConfig& cfg);
CommandResult cmd_geodesic(const RunConfig& cfg);
CommandResult cmd_saddle(const RunConfig& cfg);
CommandResult cmd_oracle(const RunConfig& cfg);

// Error kind to exit code: 3 profile rejection, 4 parse/config, 5 numeric.
int exit_code_for(ErrorKind k);

int run_cli(int argc, char** argv);

}  // namespace ktorus
