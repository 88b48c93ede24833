#include "nqbell/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace nqbell::io {

namespace {

std::string entry_key(std::size_t x, std::size_t a) { return std::to_string(x) + ":" + std::to_string(a); }

std::pair<std::size_t, std::size_t> parse_key(const std::string& key) {
  const auto colon = key.find(':');
  if (colon == std::string::npos) throw DomainError("table key '" + key + "' is not of the form x:a");
  try {
    std::size_t used = 0;
    const std::string xs = key.substr(0, colon), as = key.substr(colon + 1);
    const auto x = std::stoull(xs, &used);
    if (used != xs.size()) throw DomainError("bad input index in key '" + key + "'");
    const auto a = std::stoull(as, &used);
    if (used != as.size()) throw DomainError("bad outcome index in key '" + key + "'");
    return {static_cast<std::size_t>(x), static_cast<std::size_t>(a)};
  } catch (const std::logic_error&) {
    throw DomainError("table key '" + key + "' is not of the form x:a");
  }
}

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw DomainError(std::string("missing JSON field '") + name + "'");
  return j.at(name);
}

}  // namespace

double fixed12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  double out = std::strtod(buf, nullptr);
  return out == 0.0 ? 0.0 : out;  // no negative zero
}

Json to_json(const Rat& r) { return r.str(); }

Rat rat_from_json(const Json& j) {
  if (j.is_string()) return Rat::parse(j.get<std::string>());
  if (j.is_number_integer()) return Rat(j.get<long long>());
  throw DomainError("rational must be a \"p/q\" string or an integer");
}

Json to_json(const Scenario& s) { return Json{{"inputs", s.input_sizes()}, {"outputs", s.output_sizes()}}; }

Scenario scenario_from_json(const Json& j) {
  try {
    return Scenario(field(j, "inputs").get<std::vector<int>>(), field(j, "outputs").get<std::vector<int>>());
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("bad scenario: ") + e.what());
  }
}

Json to_json(const Box& b) {
  Json table = Json::object();
  const Scenario& s = b.scenario();
  for (std::size_t x = 0; x < s.input_count(); ++x) {
    for (std::size_t a = 0; a < s.outcome_count(); ++a) table[entry_key(x, a)] = b(x, a).str();
  }
  return Json{{"scenario", to_json(s)}, {"mode", "exact"}, {"table", std::move(table)}};
}

Json to_json(const NumericBox& b) {
  Json table = Json::object();
  const Scenario& s = b.scenario();
  for (std::size_t x = 0; x < s.input_count(); ++x) {
    for (std::size_t a = 0; a < s.outcome_count(); ++a) table[entry_key(x, a)] = fixed12(b(x, a));
  }
  return Json{{"scenario", to_json(s)}, {"mode", "numeric"}, {"table", std::move(table)}};
}

Box box_from_json(const Json& j) {
  Scenario s = scenario_from_json(field(j, "scenario"));
  if (j.contains("mode") && j.at("mode") != "exact") throw DomainError("only exact boxes can be read");
  std::vector<Rat> t(s.table_size());
  std::vector<char> seen(s.table_size(), 0);
  for (const auto& [key, value] : field(j, "table").items()) {
    const auto [x, a] = parse_key(key);
    if (x >= s.input_count() || a >= s.outcome_count()) throw DomainError("table key '" + key + "' out of range");
    t[s.entry(x, a)] = rat_from_json(value);
    seen[s.entry(x, a)] = 1;
  }
  // Missing entries are zero.
  return {std::move(s), std::move(t)};
}

Json to_json(const BellExpression& e) {
  Json coeffs = Json::object();
  for (const auto& t : e.terms()) coeffs[entry_key(t.x, t.a)] = t.coefficient.str();
  Json out{{"scenario", to_json(e.scenario())}, {"coeffs", std::move(coeffs)}};
  out["classical_bound"] = e.classical_bound() ? Json(e.classical_bound()->str()) : Json(nullptr);
  if (!e.label().empty()) out["label"] = e.label();
  return out;
}

BellExpression expression_from_json(const Json& j) {
  Scenario s = scenario_from_json(field(j, "scenario"));
  std::vector<BellTerm> terms;
  for (const auto& [key, value] : field(j, "coeffs").items()) {
    const auto [x, a] = parse_key(key);
    if (x >= s.input_count() || a >= s.outcome_count()) throw DomainError("coefficient key '" + key + "' out of range");
    terms.push_back({x, a, rat_from_json(value)});
  }
  std::optional<Rat> bound;
  if (j.contains("classical_bound") && !j.at("classical_bound").is_null()) bound = rat_from_json(j.at("classical_bound"));
  std::string label = j.contains("label") ? j.at("label").get<std::string>() : std::string{};
  return BellExpression(std::move(s), std::move(terms), std::move(bound), std::move(label));
}

Json to_json(const DeterministicStrategy& st) { return st.responses; }

Json to_json(const FacetReport& f) {
  return Json{{"is_tight", f.is_tight},
              {"saturating_vertex_count", f.saturating_vertex_count},
              {"affine_rank", f.affine_rank},
              {"polytope_dimension", f.polytope_dimension},
              {"bound_attained", f.bound_attained}};
}

Json to_json(const lp::Stats& s) {
  return Json{{"iterations", s.iterations},
              {"phase1_iterations", s.phase1_iterations},
              {"degenerate_pivots", s.degenerate_pivots},
              {"bland_pivots", s.bland_pivots}};
}

Json to_json(const upb::ProductVector& v) {
  Json sites = Json::array();
  for (const auto& f : v) {
    Json amps = Json::array();
    for (Eigen::Index k = 0; k < f.size(); ++k) amps.push_back({fixed12(f[k].real()), fixed12(f[k].imag())});
    sites.push_back(std::move(amps));
  }
  return sites;
}

Json to_json(const upb::RawProductSet& s) {
  Json vectors = Json::array();
  for (const auto& v : s.vectors) vectors.push_back(to_json(v));
  Json out{{"dims", s.dims}, {"vectors", std::move(vectors)}};
  if (s.labels) {
    Json labels = Json::array();
    for (const auto& row : *s.labels) {
      Json r = Json::array();
      for (const auto& l : row) r.push_back({l.subset, l.position});
      labels.push_back(std::move(r));
    }
    out["labels"] = std::move(labels);
  }
  return out;
}

Json to_json(const upb::ProductVectorSet& s) { return to_json(upb::RawProductSet{s.dims(), s.vectors(), s.labels()}); }

upb::RawProductSet raw_set_from_json(const Json& j) {
  upb::RawProductSet r;
  try {
    r.dims = field(j, "dims").get<std::vector<int>>();
    for (const auto& member : field(j, "vectors")) {
      upb::ProductVector v;
      for (const auto& site : member) {
        upb::LocalVector f(static_cast<Eigen::Index>(site.size()));
        Eigen::Index k = 0;
        for (const auto& amp : site) {
          if (amp.is_number()) {
            f[k++] = {amp.get<double>(), 0.0};
          } else {
            f[k++] = {amp.at(0).get<double>(), amp.at(1).get<double>()};
          }
        }
        v.push_back(std::move(f));
      }
      r.vectors.push_back(std::move(v));
    }
    if (j.contains("labels")) {
      upb::Labels labels;
      for (const auto& row : j.at("labels")) {
        std::vector<upb::SubsetLabel> l;
        for (const auto& p : row) l.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
        labels.push_back(std::move(l));
      }
      r.labels = std::move(labels);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("bad vector set: ") + e.what());
  }
  return r;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace nqbell::io
