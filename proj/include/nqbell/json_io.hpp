#pragma once

#include <string>

#include <json.hpp>

#include "nqbell/box.hpp"
#include "nqbell/polytope.hpp"
#include "nqbell/upb.hpp"

namespace nqbell::io {

using Json = nlohmann::json;  // std::map objects: keys always serialize sorted

/// Rounds to 12 significant digits so dumps are stable across platforms.
double fixed12(double v);

Json to_json(const Rat& r);
Rat rat_from_json(const Json& j);

Json to_json(const Scenario& s);
Scenario scenario_from_json(const Json& j);

/// {"scenario":..., "mode":"exact"|"numeric", "table":{"x:a": value}}
Json to_json(const Box& b);
Json to_json(const NumericBox& b);
Box box_from_json(const Json& j);

/// {"scenario":..., "coeffs":{"x:a":"p/q"}, "classical_bound":"p/q", "label":...}
Json to_json(const BellExpression& e);
BellExpression expression_from_json(const Json& j);

Json to_json(const DeterministicStrategy& st);
Json to_json(const FacetReport& f);
Json to_json(const lp::Stats& s);

/// {"dims":[...], "vectors":[[[re,im],...] per site, ...], "labels":[[[subset,position],...],...]}
Json to_json(const upb::RawProductSet& s);
Json to_json(const upb::ProductVectorSet& s);
upb::RawProductSet raw_set_from_json(const Json& j);
Json to_json(const upb::ProductVector& v);

Json read_json_file(const std::string& path);
/// Deterministic two-space indented dump with a trailing newline.
std::string dump(const Json& j);

}  // namespace nqbell::io
