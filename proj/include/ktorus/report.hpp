#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "ktorus/certifier.hpp"
#include "ktorus/conditions.hpp"
#include "ktorus/profile.hpp"

namespace ktorus {

using Json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

// Sorted keys, no whitespace, doubles as %.17g, non-finite as null.
std::string canonical_json(const Json& j);
// Indented variant of the same serialisation, newline terminated.
std::string pretty_json(const Json& j);

// 17 significant digits, the form used in every report and CSV.
std::string fmt17(double v);

std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t h);

Json tolerances_json(const Tolerances& t);
Json metadata_json(const std::string& config_hash, const Tolerances& t);

Json to_json(const Band& b);
Json to_json(const FProfile& p);
Json to_json(const Check& c);
Json to_json(const NecessaryReport& r);
Json to_json(const ObstructionReport& r);
Json to_json(const FamilleReport& r);
Json to_json(const StabilitySide& s);
Json to_json(const StabilityReport& r);
Json to_json(const SlBounds& b);
Json to_json(const GeodesicDiagnostic& d);
Json to_json(const ConditionReport& r);
Json to_json(const Witness& w);
Json to_json(const DominoCertificate& c);
Json to_json(const SweepRecord& s);
Json to_json(const TorusVerdict& v);

}  // namespace ktorus
