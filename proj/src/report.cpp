#include "ktorus/report.hpp"

#include <cmath>
#include <cstdio>

namespace ktorus {

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void escape(const std::string& s, std::string& out) {
    out += '"';
    for (unsigned char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (ch < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                    out += buf;
                } else {
                    out += static_cast<char>(ch);
                }
        }
    }
    out += '"';
}

void emit(const Json& j, std::string& out, int indent, int depth) {
    auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
        case Json::value_t::null: out += "null"; break;
        case Json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
        case Json::value_t::number_integer: out += std::to_string(j.get<std::int64_t>()); break;
        case Json::value_t::number_unsigned: out += std::to_string(j.get<std::uint64_t>()); break;
        case Json::value_t::number_float: {
            double v = j.get<double>();
            out += std::isfinite(v) ? fmt17(v) : "null";
            break;
        }
        case Json::value_t::string: escape(j.get_ref<const std::string&>(), out); break;
        case Json::value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& e : j) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                emit(e, out, indent, depth + 1);
            }
            if (!j.empty()) newline(depth);
            out += ']';
            break;
        }
        case Json::value_t::object: {
            // nlohmann's default object is a std::map: iteration is key-sorted
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                escape(it.key(), out);
                out += indent < 0 ? ":" : ": ";
                emit(it.value(), out, indent, depth + 1);
            }
            if (!j.empty()) newline(depth);
            out += '}';
            break;
        }
        default: out += "null";
    }
}

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

std::string canonical_json(const Json& j) {
    std::string out;
    emit(j, out, -1, 0);
    return out;
}

std::string pretty_json(const Json& j) {
    std::string out;
    emit(j, out, 2, 0);
    out += '\n';
    return out;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Json tolerances_json(const Tolerances& t) {
    return Json{{"tol_root", t.tol_root},
                {"tol_sym", t.tol_sym},
                {"margin_simple", t.margin_simple},
                {"tol_axis", t.tol_axis},
                {"grid", t.grid},
                {"tol_sign", kTolSign},
                {"tol_duality", kTolDuality},
                {"tol_crit", kTolCrit},
                {"asymptotic_radius", kAsymptoticRadius}};
}

Json metadata_json(const std::string& config_hash, const Tolerances& t) {
    return Json{{"tool", "ktorus"},
                {"version", kToolVersion},
                {"config_hash", config_hash},
                {"tolerances", tolerances_json(t)},
                {"arithmetic", "IEEE double, tolerance based; not an interval proof"}};
}

Json to_json(const Band& b) {
    return Json{{"lo", b.lo},
                {"hi", b.hi},
                {"eps", b.eps},
                {"sup_abs", b.sup_abs},
                {"x_cr", b.x_cr},
                {"critical_xs", b.critical_xs},
                {"curvature_zeros", b.curvature_zeros}};
}

Json to_json(const FProfile& p) {
    Json bands = Json::array();
    for (const Band& b : p.bands) bands.push_back(to_json(b));
    return Json{{"expr", p.expr.source()},
                {"period", p.period},
                {"period_residual", p.period_residual},
                {"zeros", p.zeros},
                {"zero_slopes", p.zero_slopes},
                {"n_bands", p.n_bands},
                {"bands", bands},
                {"critical_points", p.critical_points},
                {"obstruction_residuals", p.obstruction_residuals},
                {"symmetry_axis", opt(p.symmetry_axis)},
                {"flat", p.flat},
                {"no_null_orbits", p.no_null_orbits},
                {"degenerate", p.degenerate},
                {"degenerate_zeros", p.degenerate_zeros},
                {"notes", p.notes}};
}

Json to_json(const Check& c) {
    return Json{{"pass", c.pass}, {"margin", c.margin}, {"note", c.note}};
}

Json to_json(const NecessaryReport& r) {
    Json j{{"pass", r.pass}, {"fprime_zeros_per_band", r.fprime_zeros_per_band}};
    for (const Check& c : r.checks) j[c.name] = to_json(c);
    return j;
}

Json to_json(const ObstructionReport& r) {
    return Json{{"residuals", r.residuals},
                {"max_abs", r.max_abs},
                {"pass", r.pass},
                {"rejected", r.rejected},
                {"note", r.note}};
}

Json to_json(const FamilleReport& r) {
    return Json{{"simple_zeros", to_json(r.simple_zeros)},
                {"one_sign_change", to_json(r.one_sign_change)},
                {"fpfppp_nonpositive", to_json(r.fpfppp_nonpositive)},
                {"symmetry_axis", to_json(r.symmetry_axis)},
                {"two_zeros_per_period", to_json(r.two_zeros_per_period)},
                {"pass", r.pass}};
}

Json to_json(const StabilitySide& s) {
    return Json{{"eps", s.eps},
                {"applicable", s.applicable},
                {"note", s.note},
                {"x0", s.x0},
                {"x1", s.x1},
                {"ineq1_lhs", s.ineq1_lhs},
                {"ineq2_lhs", s.ineq2_lhs},
                {"ineq1_margin", s.ineq1_margin},
                {"ineq2_margin", s.ineq2_margin},
                {"x_cr_opp", s.x_cr_opp},
                {"zeta0", s.zeta0},
                {"zeta1", s.zeta1},
                {"skipped", s.skipped},
                {"pass", s.pass}};
}

Json to_json(const StabilityReport& r) {
    return Json{{"curvature_simple_zeros", to_json(r.curvature_simple_zeros)},
                {"curvature_zero_count", r.curvature_zero_count},
                {"one_critical_orbit_per_band", to_json(r.one_critical_orbit_per_band)},
                {"plus", to_json(r.plus)},
                {"minus", to_json(r.minus)},
                {"pass", r.pass}};
}

Json to_json(const SlBounds& b) {
    return Json{{"omega", b.omega},
                {"d2", b.d2},
                {"d2_min", b.d2_min},
                {"big_d2", b.big_d2},
                {"lemma0_lhs", b.lemma0_lhs},
                {"lemma0_rhs", b.lemma0_rhs},
                {"lemma0_ok", b.lemma0_ok},
                {"lemma1_applicable", b.lemma1_applicable},
                {"lemma1_lhs", b.lemma1_lhs},
                {"lemma1_rhs", b.lemma1_rhs},
                {"lemma1_ok", b.lemma1_ok},
                {"lemma2_applicable", b.lemma2_applicable},
                {"tau", b.tau},
                {"lemma2_lhs", b.lemma2_lhs},
                {"lemma2_ok", b.lemma2_ok},
                {"sl_bound_ok", b.sl_bound_ok}};
}

Json to_json(const GeodesicDiagnostic& d) {
    return Json{{"eps", d.eps},
                {"c2", d.c2},
                {"omega", d.omega},
                {"hill_value", opt(d.hill_value)},
                {"sl", to_json(d.bounds)},
                {"note", d.note}};
}

Json to_json(const ConditionReport& r) {
    Json diags = Json::array();
    for (const auto& d : r.diagnostics) diags.push_back(to_json(d));
    return Json{{"necessary", to_json(r.necessary)},
                {"obstruction", to_json(r.obstruction)},
                {"famille", to_json(r.famille)},
                {"stability", r.stability ? to_json(*r.stability) : Json(nullptr)},
                {"diagnostics", diags},
                {"notes", r.notes},
                {"pass", r.pass}};
}

Json to_json(const Witness& w) {
    return Json{{"a", w.a}, {"z", w.z}, {"window", w.window}};
}

Json to_json(const DominoCertificate& c) {
    return Json{{"eps", c.spec.eps},
                {"c2", c.spec.c2},
                {"band", c.spec.band},
                {"side", c.spec.side == Side::Left ? "left" : "right"},
                {"kind", to_string(c.kind)},
                {"x_tangency", c.z0},
                {"t0", c.t0},
                {"t1", c.t1},
                {"ta", c.ta},
                {"tb", c.tb},
                {"omega", c.omega},
                {"t0_quad", c.t0_quad},
                {"t1_quad", c.t1_quad},
                {"duality_err", c.duality_err},
                {"num0", c.z.num0},
                {"Z0", c.z.z0},
                {"Z1", opt(c.z.z1)},
                {"margin", c.z.min_margin()},
                {"verdict", to_string(c.verdict)},
                {"witness", c.witness ? to_json(*c.witness) : Json(nullptr)},
                {"oracle_agrees", c.oracle_agrees},
                {"error", c.error}};
}

Json to_json(const SweepRecord& s) {
    Json certs = Json::array();
    for (const auto& c : s.certs) certs.push_back(to_json(c));
    return Json{{"band", s.band},
                {"eps", s.eps},
                {"min_z0", s.min_z0},
                {"min_z1", s.min_z1},
                {"argmin_c2", s.argmin_c2},
                {"n_conjugate", s.n_conjugate},
                {"n_degenerate", s.n_degenerate},
                {"n_failed", s.n_failed},
                {"n_disagree", s.n_disagree},
                {"max_duality_err", s.max_duality_err},
                {"certificates", certs}};
}

Json to_json(const TorusVerdict& v) {
    Json sweeps = Json::array();
    bool agree = true;
    for (const auto& s : v.sweeps) {
        sweeps.push_back(to_json(s));
        agree = agree && s.n_disagree == 0;
    }
    if (v.evidence) agree = agree && v.evidence->oracle_agrees;
    return Json{{"overall", to_string(v.overall)},
                {"sweeps", sweeps},
                {"notes", v.notes},
                {"evidence", v.evidence ? to_json(*v.evidence) : Json(nullptr)},
                {"obstruction_violated", v.obstruction_violated},
                {"agreement", agree}};
}

}  // namespace ktorus
