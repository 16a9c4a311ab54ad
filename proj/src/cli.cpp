#include "ktorus/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "ktorus/certifier.hpp"
#include "ktorus/charts.hpp"
#include "ktorus/conditions.hpp"
#include "ktorus/errors.hpp"
#include "ktorus/jacobi.hpp"

namespace ktorus {

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::Config, msg); }

void allow_keys(const Json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) config_error(where + ": expected an object");
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) config_error(where + ": unknown key '" + it.key() + "'");
}

double number(const Json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        // constant DSL expressions such as "2*pi"
        return Expression::parse(j.get<std::string>()).eval(0.0);
    }
    config_error(where + ": expected a number");
}

long integer(const Json& j, const std::string& where) {
    if (!j.is_number_integer()) config_error(where + ": expected an integer");
    return j.get<long>();
}

double positive(const Json& j, const std::string& where) {
    double v = number(j, where);
    if (!(v > 0.0)) config_error(where + ": must be positive");
    return v;
}

int positive_int(const Json& j, const std::string& where) {
    long v = integer(j, where);
    if (v <= 0) config_error(where + ": must be positive");
    return static_cast<int>(v);
}

int sign(const Json& j, const std::string& where) {
    long v = integer(j, where);
    if (v != 1 && v != -1) config_error(where + ": must be +1 or -1");
    return static_cast<int>(v);
}

Side side_of(const Json& j, const std::string& where) {
    if (j == "left") return Side::Left;
    if (j == "right") return Side::Right;
    config_error(where + ": must be \"left\" or \"right\"");
}

void write_out(const RunConfig& cfg, const std::string& body) {
    if (cfg.out.empty() || cfg.out == "-") {
        std::cout << body;
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw Error(ErrorKind::Config, "cannot write " + cfg.out);
    f << body;
}

FProfile profile_of(const RunConfig& cfg) {
    return build_profile(Expression::parse(cfg.expr), cfg.period_hint, cfg.tol);
}

Json report_base(const RunConfig& cfg, const std::string& command) {
    Json j;
    j["metadata"] = metadata_json(cfg.hash(), cfg.tol);
    j["command"] = command;
    return j;
}

std::string events_block(const GeodesicTrace& tr) {
    std::ostringstream os;
    os << "# kind=" << to_string(tr.cls.kind) << " eps=" << tr.spec.eps
       << " c2=" << fmt17(tr.spec.c2) << " band=" << tr.spec.band
       << " side=" << (tr.spec.side == Side::Left ? "left" : "right") << "\n";
    os << "# tangency_x=" << fmt17(tr.plan.z0) << " t0=" << fmt17(tr.t0) << " t1=" << fmt17(tr.t1)
       << " t_turn=" << (tr.t_turn ? fmt17(*tr.t_turn) : "none") << " omega=" << fmt17(tr.omega)
       << "\n";
    os << "# crossings=";
    for (std::size_t i = 0; i < tr.crossings.size(); ++i)
        os << (i ? ";" : "") << fmt17(tr.crossings[i]);
    os << "\n";
    return os.str();
}

}  // namespace

std::string RunConfig::hash() const { return hex64(fnv1a64(canonical_json(effective))); }

RunConfig parse_config(const Json& j) {
    allow_keys(j, "config",
               {"profile", "certify", "conditions", "geodesic", "saddle", "oracle", "output", "jobs"});
    RunConfig c;
    if (!j.contains("profile")) config_error("config: missing 'profile'");
    const Json& pj = j["profile"];
    allow_keys(pj, "profile", {"expr", "period_hint", "tolerances"});
    if (!pj.contains("expr") || !pj["expr"].is_string()) config_error("profile.expr: expected a string");
    c.expr = pj["expr"].get<std::string>();
    if (!pj.contains("period_hint")) config_error("profile.period_hint: missing");
    c.period_hint = positive(pj["period_hint"], "profile.period_hint");
    if (pj.contains("tolerances")) {
        const Json& t = pj["tolerances"];
        allow_keys(t, "profile.tolerances", {"tol_root", "tol_sym", "margin_simple", "tol_axis", "grid"});
        if (t.contains("tol_root")) c.tol.tol_root = positive(t["tol_root"], "tol_root");
        if (t.contains("tol_sym")) c.tol.tol_sym = positive(t["tol_sym"], "tol_sym");
        if (t.contains("margin_simple"))
            c.tol.margin_simple = positive(t["margin_simple"], "margin_simple");
        if (t.contains("tol_axis")) c.tol.tol_axis = positive(t["tol_axis"], "tol_axis");
        if (t.contains("grid")) c.tol.grid = positive_int(t["grid"], "grid");
    }
    if (j.contains("certify")) {
        const Json& s = j["certify"];
        allow_keys(s, "certify", {"samples", "oracle_grid", "csv"});
        if (s.contains("samples")) c.samples = positive_int(s["samples"], "certify.samples");
        if (s.contains("oracle_grid")) c.oracle_grid = positive_int(s["oracle_grid"], "certify.oracle_grid");
        if (s.contains("csv")) c.csv = s["csv"].get<std::string>();
    }
    if (j.contains("conditions")) {
        const Json& s = j["conditions"];
        allow_keys(s, "conditions", {"diagnostic_samples"});
        if (s.contains("diagnostic_samples")) {
            long v = integer(s["diagnostic_samples"], "conditions.diagnostic_samples");
            if (v < 0) config_error("conditions.diagnostic_samples: must be >= 0");
            c.diagnostic_samples = static_cast<int>(v);
        }
    }
    if (j.contains("geodesic")) {
        const Json& s = j["geodesic"];
        allow_keys(s, "geodesic", {"eps", "c2", "band", "side", "span", "samples", "jacobi"});
        if (s.contains("eps")) c.eps = sign(s["eps"], "geodesic.eps");
        if (s.contains("c2")) c.c2 = positive(s["c2"], "geodesic.c2");
        if (s.contains("band")) c.band = integer(s["band"], "geodesic.band");
        if (s.contains("side")) c.side = side_of(s["side"], "geodesic.side");
        if (s.contains("span")) c.span = positive(s["span"], "geodesic.span");
        if (s.contains("samples")) c.trace_samples = positive_int(s["samples"], "geodesic.samples");
        if (s.contains("jacobi")) c.jacobi = s["jacobi"].get<bool>();
    }
    if (j.contains("saddle")) {
        const Json& s = j["saddle"];
        allow_keys(s, "saddle", {"zero", "half_width", "n"});
        if (s.contains("zero")) c.saddle_zero = integer(s["zero"], "saddle.zero");
        if (s.contains("half_width")) c.saddle_half_width = positive(s["half_width"], "saddle.half_width");
        if (s.contains("n")) c.saddle_n = positive_int(s["n"], "saddle.n");
    }
    if (j.contains("oracle")) {
        const Json& s = j["oracle"];
        allow_keys(s, "oracle", {"eps", "c2", "samples", "grid", "seed"});
        if (s.contains("eps")) c.oracle_eps = sign(s["eps"], "oracle.eps");
        if (s.contains("c2")) c.oracle_c2 = positive(s["c2"], "oracle.c2");
        if (s.contains("samples")) c.oracle_samples = positive_int(s["samples"], "oracle.samples");
        if (s.contains("grid")) c.oracle_grid = positive_int(s["grid"], "oracle.grid");
        if (s.contains("seed")) c.seed = static_cast<std::uint64_t>(integer(s["seed"], "oracle.seed"));
    }
    if (j.contains("output")) {
        allow_keys(j["output"], "output", {"path"});
        if (j["output"].contains("path")) c.out = j["output"]["path"].get<std::string>();
    }
    if (j.contains("jobs")) c.jobs = positive_int(j["jobs"], "jobs");
    c.effective = j;
    c.effective.erase("jobs");
    c.effective.erase("output");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) config_error("cannot read config " + path);
    Json j;
    try {
        j = Json::parse(f);
    } catch (const Json::exception& e) {
        config_error(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

int exit_code_for(ErrorKind k) {
    switch (k) {
        case ErrorKind::Parse:
        case ErrorKind::Config: return 4;
        case ErrorKind::Domain:
        case ErrorKind::NonPeriodic:
        case ErrorKind::DegenerateZero:
        case ErrorKind::NotApplicable:
        case ErrorKind::NoTangency:
        case ErrorKind::OutOfBand: return 3;
        default: return 5;
    }
}

CommandResult cmd_bands(const RunConfig& cfg) {
    FProfile p = profile_of(cfg);
    Json j = report_base(cfg, "bands");
    j["profile"] = to_json(p);
    return {p.degenerate ? 3 : 0, pretty_json(j)};
}

CommandResult cmd_conditions(const RunConfig& cfg) {
    FProfile p = profile_of(cfg);
    ConditionReport r = check_all(p, cfg.diagnostic_samples);
    Json j = report_base(cfg, "conditions");
    j["profile"] = to_json(p);
    j["conditions"] = to_json(r);
    return {r.pass ? 0 : 1, pretty_json(j)};
}

CommandResult cmd_certify(const RunConfig& cfg) {
    FProfile p = profile_of(cfg);
    VerdictOptions opt;
    opt.samples = cfg.samples;
    opt.cert.oracle_grid = cfg.oracle_grid;
    TorusVerdict v = torus_verdict(p, opt);
    Json j = report_base(cfg, "certify");
    j["profile"] = to_json(p);
    j["verdict"] = to_json(v);
    if (!cfg.csv.empty()) {
        std::ofstream f(cfg.csv, std::ios::binary);
        if (!f) throw Error(ErrorKind::Config, "cannot write " + cfg.csv);
        f << "band,eps,side,c2,Z0,Z1\n";
        for (const auto& s : v.sweeps)
            for (const auto& c : s.certs)
                f << s.band << ',' << s.eps << ',' << (c.spec.side == Side::Left ? "left" : "right")
                  << ',' << fmt17(c.spec.c2) << ',' << fmt17(c.z.z0) << ','
                  << (c.z.z1 ? fmt17(*c.z.z1) : "") << '\n';
    }
    int code = 2;
    if (p.degenerate) {
        code = 3;
    } else if (v.overall == Overall::CertifiedNoConjugate) {
        code = 0;
    } else if (v.overall == Overall::ConjugateFound) {
        code = 1;
    }
    return {code, pretty_json(j)};
}

CommandResult cmd_geodesic(const RunConfig& cfg) {
    FProfile p = profile_of(cfg);
    if (!p.certifiable())
        throw Error(ErrorKind::NotApplicable, "profile has no simple-zero band structure");
    int eps = cfg.eps;
    long band = cfg.band;
    // pick the first band of the requested sign when the index disagrees
    if (p.band_at(band).eps != eps) ++band;
    double m = p.band_at(band).sup_abs;
    double c2 = cfg.c2.value_or(0.5 * m);
    LaunchSpec spec{eps, c2, band, cfg.side};
    TraceOptions topt;
    topt.span_factor = cfg.span;
    GeodesicTrace tr = launch_tangent(p, spec, topt);
    std::ostringstream os;
    os << events_block(tr);
    const int n = cfg.trace_samples;
    const double lo = tr.t_lo(), hi = tr.t_hi();
    if (cfg.jacobi) {
        JacobiBasis b = fundamental_basis(p, tr);
        os << "t,s,c,sprime,cprime,beta\n";
        for (int i = 0; i <= n; ++i) {
            double t = lo + (hi - lo) * i / n;
            auto v = b.at(t);
            os << fmt17(t) << ',' << fmt17(v[0]) << ',' << fmt17(v[2]) << ',' << fmt17(v[1]) << ','
               << fmt17(v[3]) << ',' << fmt17(b.beta0p() * v[0]) << '\n';
        }
    } else {
        os << "t,x,xprime,f_of_x,kappa_of_t\n";
        for (int i = 0; i <= n; ++i) {
            double t = lo + (hi - lo) * i / n;
            State s = tr.state(t);
            auto d = p.derivs(s[kX], 2);
            os << fmt17(t) << ',' << fmt17(s[kX]) << ',' << fmt17(s[kXp]) << ',' << fmt17(d[0])
               << ',' << fmt17(0.5 * d[2]) << '\n';
        }
    }
    return {0, os.str()};
}

CommandResult cmd_saddle(const RunConfig& cfg) {
    FProfile p = profile_of(cfg);
    SaddleChart ch = saddle_chart(p, cfg.saddle_zero, cfg.saddle_half_width);
    std::ostringstream os;
    os << "# anchor=" << fmt17(ch.anchor()) << " lambda=" << fmt17(ch.lambda())
       << " half_width=" << fmt17(ch.half_width()) << "\n";
    os << "u,v,g_uu,g_uv,g_vv\n";
    const int n = cfg.saddle_n;
    const double r = 0.9 * std::sqrt(ch.half_width());
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            double u = n == 1 ? 0.0 : -r + 2 * r * i / (n - 1);
            double v = n == 1 ? 0.0 : -r + 2 * r * k / (n - 1);
            Metric2 g = ch.metric(u, v);
            os << fmt17(u) << ',' << fmt17(v) << ',' << fmt17(g.g11) << ',' << fmt17(g.g12) << ','
               << fmt17(g.g22) << '\n';
        }
    }
    return {0, os.str()};
}

CommandResult cmd_oracle(const RunConfig& cfg) {
    FProfile p = profile_of(cfg);
    Json j = report_base(cfg, "oracle");
    j["profile"] = to_json(p);
    if (!p.certifiable()) {
        j["instances"] = Json::array();
        j["agreement"] = true;
        j["witnesses"] = 0;
        j["note"] = p.flat ? "flat profile: kappa vanishes, no conjugate points"
                           : "profile outside the class, nothing to scan";
        return {p.degenerate ? 3 : 0, pretty_json(j)};
    }
    struct Job {
        LaunchSpec spec;
    };
    std::vector<Job> jobs;
    std::mt19937_64 rng(cfg.seed.value_or(0));
    for (long k = 0; k < p.n_bands; ++k) {
        Band b = p.band_at(k);
        if (cfg.oracle_eps && b.eps != *cfg.oracle_eps) continue;
        std::vector<double> c2s;
        if (cfg.oracle_c2) {
            c2s = {*cfg.oracle_c2};
        } else if (cfg.seed) {
            std::uniform_real_distribution<double> U(1e-3, 1 - 1e-3);
            for (int i = 0; i < cfg.oracle_samples; ++i) c2s.push_back(b.sup_abs * U(rng));
            std::sort(c2s.begin(), c2s.end());
        } else {
            c2s = sweep_grid(b.sup_abs, cfg.oracle_samples);
        }
        for (Side s : {Side::Left, Side::Right})
            for (double c2 : c2s) jobs.push_back({LaunchSpec{b.eps, c2, k, s}});
    }
    std::vector<DominoCertificate> certs(jobs.size());
    CertifyOptions copt;
    copt.oracle_grid = cfg.oracle_grid;
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < static_cast<long>(jobs.size()); ++i)
        certs[i] = certify_launch(p, jobs[i].spec, copt);
    Json inst = Json::array();
    bool agree = true;
    int witnesses = 0;
    for (const auto& c : certs) {
        if (c.verdict == Verdict::Failed) continue;
        agree = agree && c.oracle_agrees;
        if (c.witness) ++witnesses;
        inst.push_back(Json{{"eps", c.spec.eps},
                            {"band", c.spec.band},
                            {"side", c.spec.side == Side::Left ? "left" : "right"},
                            {"c2", c.spec.c2},
                            {"margin", c.z.min_margin()},
                            {"witness", c.witness ? to_json(*c.witness) : Json(nullptr)},
                            {"agreement", c.oracle_agrees}});
    }
    j["instances"] = inst;
    j["witnesses"] = witnesses;
    j["agreement"] = agree;
    int code = !agree ? 2 : (witnesses > 0 ? 1 : 0);
    return {code, pretty_json(j)};
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Conjugate points on Lorentzian tori with a Killing field"};
    app.require_subcommand(1);
    std::string config_path, out;
    int jobs = 0, samples = 0, eps = 0;
    double c2 = 0.0;
    long long seed = -1;
    bool jacobi = false;
    for (const char* name : {"bands", "conditions", "certify", "geodesic", "saddle", "oracle"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "config file (JSON)")->required();
        sub->add_option("--out", out, "output path, stdout when absent");
        sub->add_option("--jobs", jobs, "worker threads");
        sub->add_option("--samples", samples, "C^2 samples per band and side");
        sub->add_option("--eps", eps, "geodesic type, +1 or -1");
        sub->add_option("--c2", c2, "Clairaut constant squared");
        sub->add_option("--seed", seed, "seed for randomised C^2 draws");
        if (std::string(name) == "geodesic") sub->add_flag("--jacobi", jacobi, "emit s, c, beta");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 4;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        RunConfig cfg = load_config(config_path);
        // flags override the file and are folded into the hashed config
        if (samples > 0) {
            cfg.samples = cfg.oracle_samples = samples;
            cfg.effective["flags"]["samples"] = samples;
        }
        if (eps != 0) {
            if (eps != 1 && eps != -1) config_error("--eps must be +1 or -1");
            cfg.eps = eps;
            cfg.oracle_eps = eps;
            cfg.effective["flags"]["eps"] = eps;
        }
        if (c2 > 0.0) {
            cfg.c2 = cfg.oracle_c2 = c2;
            cfg.effective["flags"]["c2"] = c2;
        }
        if (seed >= 0) {
            cfg.seed = static_cast<std::uint64_t>(seed);
            cfg.effective["flags"]["seed"] = seed;
        }
        if (jacobi) {
            cfg.jacobi = true;
            cfg.effective["flags"]["jacobi"] = true;
        }
        if (!out.empty()) cfg.out = out;
        if (jobs > 0) cfg.jobs = jobs;
        if (cfg.jobs > 0) omp_set_num_threads(cfg.jobs);

        CommandResult r;
        if (cmd == "bands") r = cmd_bands(cfg);
        else if (cmd == "conditions") r = cmd_conditions(cfg);
        else if (cmd == "certify") r = cmd_certify(cfg);
        else if (cmd == "geodesic") r = cmd_geodesic(cfg);
        else if (cmd == "saddle") r = cmd_saddle(cfg);
        else r = cmd_oracle(cfg);
        write_out(cfg, r.body);
        return r.code;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.pretty() << "\n";
        return 4;
    } catch (const Error& e) {
        std::cerr << to_string(e.kind()) << ": " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    }
}

}  // namespace ktorus
