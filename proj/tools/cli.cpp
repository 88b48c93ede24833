#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>

#include <CLI11.hpp>

#include "nqbell/gyni.hpp"
#include "nqbell/json_io.hpp"
#include "nqbell/polytope.hpp"
#include "nqbell/upb.hpp"
#include "nqbell/witness.hpp"

namespace nqbell::cli {

namespace {

using io::Json;

struct Global {
  std::uint64_t seed = 0;
  int threads = 1;
  std::size_t cap = kDefaultVertexCap;
  std::string output;
};

struct FamilyParams {
  int k = 3;
  int n = 3;
  int d = 3;
  double theta = std::numbers::pi / 4;
  std::string file;
};

struct ExprSource {
  int gyni = 0;
  std::string promise = "parity";
  std::string q_file;
  std::string form = "weighted";
  std::string expr_file;
  std::string upb;
  FamilyParams family;
};

void add_family_options(CLI::App* sub, FamilyParams& f) {
  sub->add_option("--k", f.k, "GenShifts size parameter (N = 2k - 1)")->check(CLI::Range(2, 8));
  sub->add_option("--n", f.n, "Niset-Cerf party count")->check(CLI::Range(3, 8));
  sub->add_option("--d", f.d, "Niset-Cerf local dimension")->check(CLI::Range(2, 8));
  sub->add_option("--theta", f.theta, "Shifts basis angle: e = cos(theta)|0> + sin(theta)|1>");
  sub->add_option("--file", f.file, "Vector set JSON file (for the 'file' family)");
}

void add_source_options(CLI::App* sub, ExprSource& src, bool with_upb) {
  auto* g = sub->add_option("--gyni", src.gyni, "GYNI party count")->check(CLI::Range(2, 12));
  sub->add_option("--promise", src.promise, "Input distribution for --gyni")
      ->check(CLI::IsMember({"parity", "uniform", "file"}));
  sub->add_option("--q-file", src.q_file, "Input distribution JSON for --promise file");
  sub->add_option("--form", src.form, "GYNI coefficients: weighted (q(x)) or sum (2^{N-1} q(x))")
      ->check(CLI::IsMember({"weighted", "sum"}));
  auto* e = sub->add_option("--expr", src.expr_file, "Bell expression JSON file");
  g->excludes(e);
  if (with_upb) {
    auto* u = sub->add_option("--upb", src.upb, "Inequality of a vector-set family")
                  ->check(CLI::IsMember({"shifts", "genshifts", "nc", "wupb", "tiles", "file"}));
    u->excludes(g)->excludes(e);
    add_family_options(sub, src.family);
  }
}

InputDistribution promise_from(const ExprSource& src) {
  if (src.promise == "parity") return parity_promise(src.gyni);
  if (src.promise == "uniform") return uniform_inputs(src.gyni);
  if (src.q_file.empty()) throw CLI::ValidationError("--promise file needs --q-file");
  const Json j = io::read_json_file(src.q_file);
  if (!j.contains("weights") || !j.at("weights").is_array()) throw DomainError("q file needs a \"weights\" array");
  std::vector<Rat> q;
  for (const auto& w : j.at("weights")) q.push_back(io::rat_from_json(w));
  return {Scenario::uniform(src.gyni, 2, 2), std::move(q)};
}

upb::RawProductSet family_set(const std::string& name, const FamilyParams& f) {
  if (name == "shifts") {
    upb::LocalVector e(2);
    e << std::cos(f.theta), std::sin(f.theta);
    return upb::families::shifts(e);
  }
  if (name == "genshifts") return upb::families::gen_shifts(f.k);
  if (name == "nc") return upb::families::niset_cerf(f.n, f.d);
  if (name == "wupb") return upb::families::wupb_example();
  if (name == "tiles") return upb::families::tiles();
  if (f.file.empty()) throw CLI::ValidationError("the 'file' family needs --file");
  return io::raw_set_from_json(io::read_json_file(f.file));
}

BellExpression expression_from(const ExprSource& src) {
  if (src.gyni > 0) {
    const GyniForm form = src.form == "sum" ? GyniForm::sum : GyniForm::weighted;
    return gyni_game(src.gyni, promise_from(src), form).expression;
  }
  if (!src.expr_file.empty()) return io::expression_from_json(io::read_json_file(src.expr_file));
  if (!src.upb.empty()) return upb::bell_from_set(upb::ProductVectorSet::from(family_set(src.upb, src.family)));
  throw CLI::ValidationError("one of --gyni, --expr or --upb is required");
}

PolytopeOptions polytope_options(const Global& g, std::ostream& err) {
  PolytopeOptions o;
  o.vertex_cap = g.cap;
  o.threads = g.threads;
  o.lp.threads = g.threads;
  o.lp.progress = [&err](std::size_t iteration, int phase) {
    if (iteration % 1000 == 0) err << "lp phase " << phase << " iteration " << iteration << "\n";
  };
  return o;
}

Json classical_json(const ClassicalResult& r) {
  return Json{{"value", io::to_json(r.value)},
              {"argmax", io::to_json(r.argmax)},
              {"argmax_index", r.argmax_index},
              {"attaining", r.attaining}};
}

Json ns_json(const NsResult& r) {
  return Json{{"value", io::to_json(r.value)},
              {"box", io::to_json(r.box)},
              {"lp_rows", r.lp_rows},
              {"lp_columns", r.lp_columns},
              {"symmetry_generators", r.symmetry_generators},
              {"lp_stats", io::to_json(r.stats)}};
}

Json tobl_json(const ToblResult& r) {
  return Json{{"value", io::to_json(r.value)},
              {"box", io::to_json(r.box)},
              {"lp_rows", r.lp_rows},
              {"lp_columns", r.lp_columns},
              {"lp_stats", io::to_json(r.stats)}};
}

Json bound_json(const std::string& which, const BellExpression& e, const PolytopeOptions& o) {
  if (which == "classical") return classical_json(classical_max(e, o));
  if (which == "ns") return ns_json(ns_max(e, o));
  return tobl_json(tobl_max(e, o));
}

// Resolved value of every option of a subcommand, defaults included.
Json option_echo(const CLI::App* app) {
  Json out = Json::object();
  for (const CLI::Option* opt : app->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name.empty()) continue;
    if (opt->get_expected_max() == 0) {
      out[name] = opt->count() > 0;
    } else if (opt->count() > 0) {
      out[name] = opt->as<std::string>();
    } else {
      out[name] = opt->get_default_str();
    }
  }
  return out;
}

void emit(const Json& result, const Global& g, std::ostream& out) {
  const std::string text = io::dump(result);
  if (g.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(g.output, std::ios::binary);
  if (!f) throw DomainError("cannot write '" + g.output + "'");
  f << text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bell inequalities without quantum advantage: bounds, facets, UPBs and witnesses", "nqbell"};
  app.require_subcommand(1, 1);
  app.option_defaults()->always_capture_default();

  Global g;
  app.add_option("--seed", g.seed, "Master seed for randomized searches");
  app.add_option("--threads", g.threads, "Worker threads (0 = all available)")->check(CLI::NonNegativeNumber);
  app.add_option("--cap", g.cap, "Cap on enumerated vertices and UPB search assignments");
  app.add_option("--output", g.output, "Write JSON here instead of stdout");

  ExprSource gyni_src, bounds_src, tobl_src, facet_src;

  auto* gyni = app.add_subcommand("gyni", "Build a GYNI inequality and optionally bound it");
  gyni->add_option("--n", gyni_src.gyni, "Party count")->required()->check(CLI::Range(2, 12));
  gyni->add_option("--promise", gyni_src.promise, "Input distribution")
      ->check(CLI::IsMember({"parity", "uniform", "file"}));
  gyni->add_option("--q-file", gyni_src.q_file, "Input distribution JSON for --promise file");
  gyni->add_option("--form", gyni_src.form, "Coefficients: weighted or sum")->check(CLI::IsMember({"weighted", "sum"}));
  std::string gyni_bound;
  gyni->add_option("--bound", gyni_bound, "Also compute this bound")->check(CLI::IsMember({"classical", "ns", "tobl"}));

  auto* bounds = app.add_subcommand("bounds", "Classical, no-signaling or TOBL maximum of an expression");
  add_source_options(bounds, bounds_src, true);
  std::string bounds_set;
  bounds->add_option("--set", bounds_set, "Correlation set")
      ->required()
      ->check(CLI::IsMember({"classical", "ns", "tobl"}));

  auto* tobl = app.add_subcommand("tobl", "Maximum over time-ordered bilocal boxes (three binary parties)");
  tobl_src.form = "sum";
  add_source_options(tobl, tobl_src, false);

  auto* facet = app.add_subcommand("facet", "Check that an inequality defines a facet of the local polytope");
  add_source_options(facet, facet_src, true);
  std::string facet_bound;
  facet->add_option("--bound", facet_bound, "Bound to test (default: the classical maximum)");

  auto* upbc = app.add_subcommand("upb", "Build a product-vector set and test unextendibility");
  std::string upb_family;
  FamilyParams upb_params;
  std::string upb_check = "upb";
  bool emit_bell = false;
  upbc->add_option("family", upb_family, "Vector set")
      ->required()
      ->check(CLI::IsMember({"shifts", "genshifts", "nc", "wupb", "tiles", "file"}));
  upbc->add_option("--check", upb_check, "Property to test")->check(CLI::IsMember({"upb", "wupb", "indep"}));
  upbc->add_flag("--emit-bell", emit_bell, "Include the associated Bell inequality");
  add_family_options(upbc, upb_params);

  auto* wit = app.add_subcommand("witness", "Entanglement witness and PPT state from a UPB");
  std::string wit_set;
  FamilyParams wit_params;
  int starts = witness::SeeSawOptions{}.starts;
  wit->add_option("--set", wit_set, "Vector set")
      ->required()
      ->check(CLI::IsMember({"shifts", "genshifts", "nc", "wupb", "file"}));
  wit->add_option("--starts", starts, "See-saw random starts")->check(CLI::PositiveNumber);
  add_family_options(wit, wit_params);

  auto* member = app.add_subcommand("membership", "Decide whether an exact box is local");
  std::string box_file;
  member->add_option("--box", box_file, "Box JSON file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  Json meta = option_echo(sub);
  meta["command"] = sub->get_name();
  meta["seed"] = g.seed;
  meta["threads"] = g.threads;
  meta["cap"] = g.cap;
  // Exact angle, not the abbreviated default string.
  if (meta.contains("theta")) {
    const double theta = sub == upbc ? upb_params.theta : sub == wit ? wit_params.theta : sub == bounds ? bounds_src.family.theta : facet_src.family.theta;
    meta["theta"] = io::fixed12(theta);
  }

  try {
    Json result;
    const PolytopeOptions popts = polytope_options(g, err);
    if (sub == gyni) {
      const InputDistribution q = promise_from(gyni_src);
      const GyniForm form = gyni_src.form == "sum" ? GyniForm::sum : GyniForm::weighted;
      const GyniGame game = gyni_game(gyni_src.gyni, q, form);
      Json weights = Json::array();
      for (const Rat& w : q.weights()) weights.push_back(io::to_json(w));
      result = Json{{"expression", io::to_json(game.expression)},
                    {"promise", std::move(weights)},
                    {"classical_bound_formula", io::to_json(classical_bound_formula(q))}};
      if (!gyni_bound.empty()) result["bound"] = bound_json(gyni_bound, game.expression, popts);
    } else if (sub == bounds) {
      const BellExpression e = expression_from(bounds_src);
      result = bound_json(bounds_set, e, popts);
      result["expression_label"] = e.label();
    } else if (sub == tobl) {
      if (tobl_src.gyni == 0 && tobl_src.expr_file.empty()) throw CLI::ValidationError("tobl needs --gyni 3 or --expr");
      const BellExpression e = expression_from(tobl_src);
      result = tobl_json(tobl_max(e, popts));
    } else if (sub == facet) {
      const BellExpression e = expression_from(facet_src);
      Rat bound;
      if (!facet_bound.empty()) {
        bound = Rat::parse(facet_bound);
      } else if (e.classical_bound()) {
        bound = *e.classical_bound();
      } else {
        bound = classical_max(e, popts).value;
      }
      result = io::to_json(facet_check(e, bound, popts));
      result["bound"] = io::to_json(bound);
    } else if (sub == upbc) {
      const upb::ProductVectorSet s = upb::ProductVectorSet::from(family_set(upb_family, upb_params));
      result = Json{{"set", io::to_json(s)},
                    {"size", s.size()},
                    {"space_dimension", s.space_dimension()},
                    {"local_independence", upb::check_local_independence(s)}};
      if (upb_check == "upb") {
        const upb::UpbVerdict v = upb::is_upb(s, {g.cap, g.threads});
        result["is_upb"] = v.is_upb;
        result["assignments_visited"] = v.assignments_visited;
        result["extension_witness"] = v.extension_witness ? io::to_json(*v.extension_witness) : Json(nullptr);
      } else if (upb_check == "wupb") {
        result["is_wupb"] = upb::is_wupb(s);
      }
      if (emit_bell) result["bell"] = io::to_json(upb::bell_from_set(s));
    } else if (sub == wit) {
      const upb::ProductVectorSet s = upb::ProductVectorSet::from(family_set(wit_set, wit_params));
      const witness::HermitianOp pi = witness::projector_onto_span(s);
      witness::SeeSawOptions so;
      so.starts = starts;
      so.seed = g.seed;
      so.threads = g.threads;
      witness::EpsilonResult eps = witness::epsilon_min(pi, so);
      std::string source = "product_states";
      if (eps.epsilon <= upb::kTolerance) {
        // Extendible set: only a weak UPB still has a positive minimum over its own local vectors.
        if (!upb::is_wupb(s)) throw DomainError("the set has an orthogonal product vector; no witness exists");
        eps = witness::epsilon_over_local_sets(pi, s);
        source = "local_sets";
      }
      const witness::WitnessReport rep = witness::witness_and_state(s, eps.epsilon);
      result = Json{{"epsilon", io::fixed12(rep.epsilon)},
                    {"epsilon_source", source},
                    {"argmin", io::to_json(eps.argmin)},
                    {"best_start", eps.best_start},
                    {"trace_w_rho", io::fixed12(rep.trace_w_rho)},
                    {"witness_min_eigenvalue", io::fixed12(witness::min_eigenvalue(rep.witness))},
                    {"state_min_eigenvalue", io::fixed12(witness::min_eigenvalue(rep.state))},
                    {"state_is_ppt", witness::is_ppt(rep.state)}};
      if (rep.bell_value) {
        const NumericBox box = witness::measure_operator(rep.witness, s);
        result["bell_value"] = io::fixed12(*rep.bell_value);
        result["measured_box_nonsignaling"] = static_cast<bool>(is_nonsignaling(box));
      } else {
        result["bell_value"] = nullptr;
      }
    } else if (sub == member) {
      const Box b = io::box_from_json(io::read_json_file(box_file));
      const MembershipResult m = local_membership(b, popts);
      Json weights = Json::array();
      for (const auto& [index, w] : m.weights) weights.push_back({index, io::to_json(w)});
      result = Json{{"is_local", m.is_local},
                    {"weights", std::move(weights)},
                    {"separating", m.separating ? io::to_json(*m.separating) : Json(nullptr)}};
    }
    result["meta"] = std::move(meta);
    emit(result, g, out);
    return 0;
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace nqbell::cli
