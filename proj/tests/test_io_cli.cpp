#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "nqbell/gyni.hpp"
#include "nqbell/json_io.hpp"
#include "nqbell/polytope.hpp"
#include "nqbell/upb.hpp"

using namespace nqbell;
using io::Json;

namespace {

struct Outcome {
  int code;
  Json json;
  std::string text;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  Outcome o{code, Json(), out.str(), err.str()};
  if (code == 0 && o.text.starts_with("{")) o.json = Json::parse(o.text);
  return o;
}

std::filesystem::path temp_file(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

}  // namespace

TEST_CASE("rational and float encoding") {
  CHECK(io::to_json(Rat(-3, 6)) == Json("-1/2"));
  CHECK(io::to_json(Rat(4)) == Json("4"));
  CHECK(io::rat_from_json(Json("7/21")) == Rat(1, 3));
  CHECK(io::rat_from_json(Json(5)) == Rat(5));
  CHECK_THROWS(io::rat_from_json(Json(0.5)));
  CHECK(io::fixed12(0.1 + 0.2) == 0.3);
  CHECK(io::fixed12(1.0 / 3) == 0.333333333333);
  CHECK_FALSE(std::signbit(io::fixed12(-0.0)));
}

TEST_CASE("scenario, box and expression round trips") {
  const Scenario s({2, 2, 3}, {2, 3, 2});
  CHECK(io::scenario_from_json(io::to_json(s)) == s);

  const BellExpression e = gyni_game(3, parity_promise(3)).expression;
  const BellExpression back = io::expression_from_json(io::to_json(e));
  CHECK(back.scenario() == e.scenario());
  CHECK(back.classical_bound() == e.classical_bound());
  CHECK(io::to_json(back) == io::to_json(e));

  const Box b = ns_max(e).box;
  const Box b2 = io::box_from_json(io::to_json(b));
  CHECK(io::to_json(b2) == io::to_json(b));
  CHECK(bell_value(e, b2) == Rat(1, 3));
  CHECK(io::to_json(to_numeric(b))["mode"] == "numeric");
}

TEST_CASE("product set round trip") {
  const upb::RawProductSet raw = upb::families::shifts(upb::families::hadamard_plus());
  const upb::RawProductSet back = io::raw_set_from_json(io::to_json(raw));
  CHECK(back.dims == raw.dims);
  REQUIRE(back.vectors.size() == raw.vectors.size());
  for (std::size_t m = 0; m < raw.vectors.size(); ++m)
    for (std::size_t i = 0; i < 3; ++i) CHECK(back.vectors[m][i].isApprox(raw.vectors[m][i], 1e-12));
  CHECK(back.labels == raw.labels);
  CHECK(io::to_json(upb::ProductVectorSet::from(back)) == io::to_json(upb::ProductVectorSet::from(raw)));
}

TEST_CASE("reading files") {
  CHECK_THROWS_AS(io::read_json_file(temp_file("nqbell_missing.json").string()), DomainError);
  const auto p = temp_file("nqbell_bad.json");
  write(p, "{not json");
  CHECK_THROWS_AS(io::read_json_file(p.string()), DomainError);
  std::filesystem::remove(p);
}

TEST_CASE("bounds for GYNI_3") {
  const Outcome ns = run({"bounds", "--gyni", "3", "--promise", "parity", "--set", "ns"});
  REQUIRE(ns.code == 0);
  CHECK(ns.json["value"] == "1/3");
  const Outcome cl = run({"bounds", "--gyni", "3", "--set", "classical"});
  REQUIRE(cl.code == 0);
  CHECK(cl.json["value"] == "1/4");
}

TEST_CASE("two-way one-way-signaling bound of GYNI_3") {
  const Outcome o = run({"tobl", "--gyni", "3"});
  REQUIRE(o.code == 0);
  CHECK(o.json["value"] == "7/6");
}

TEST_CASE("facet check from an expression file") {
  const auto p = temp_file("nqbell_gyni3.json");
  write(p, io::dump(io::to_json(gyni_game(3, parity_promise(3)).expression)));
  const Outcome o = run({"facet", "--expr", p.string()});
  std::filesystem::remove(p);
  REQUIRE(o.code == 0);
  CHECK(o.json["is_tight"] == true);
  CHECK(o.json["affine_rank"] == 25);
  CHECK(o.json["polytope_dimension"] == 26);
}

TEST_CASE("resolved configuration is echoed under meta") {
  const Outcome o = run({"--seed", "42", "--threads", "2", "--cap", "1000", "upb", "shifts"});
  REQUIRE(o.code == 0);
  CHECK(o.json["meta"]["seed"] == 42);
  CHECK(o.json["meta"]["threads"] == 2);
  CHECK(o.json["meta"]["cap"] == 1000);
  CHECK(o.json["meta"]["command"] == "upb");
  CHECK(o.json["is_upb"] == true);
  CHECK(o.json["size"] == 4);
}

TEST_CASE("exit codes") {
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"bounds", "--gyni", "3", "--set", "ns", "--no-such-flag"}).code == 2);
  CHECK(run({"bounds", "--gyni", "3"}).code == 2);
  CHECK(run({"--help"}).code == 0);
  const Outcome tiles = run({"upb", "tiles"});
  CHECK(tiles.code == 1);
  CHECK(tiles.err.find("ambiguous") != std::string::npos);
  CHECK(tiles.text.empty());
  CHECK(run({"membership", "--box", temp_file("nqbell_missing.json").string()}).code == 1);
}

TEST_CASE("membership of a no-signaling box") {
  const auto p = temp_file("nqbell_box.json");
  write(p, io::dump(io::to_json(ns_max(gyni_game(3, parity_promise(3)).expression).box)));
  const Outcome o = run({"membership", "--box", p.string()});
  std::filesystem::remove(p);
  REQUIRE(o.code == 0);
  CHECK(o.json["is_local"] == false);
  CHECK_FALSE(o.json["separating"].is_null());
}

TEST_CASE("output file and repeatable bytes") {
  const std::vector<std::string> args{"--seed", "3", "witness", "--set", "shifts", "--starts", "30"};
  const Outcome a = run(args);
  const Outcome b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.text == b.text);
  CHECK(a.json["epsilon_source"] == "product_states");

  const auto p = temp_file("nqbell_out.json");
  std::vector<std::string> to_file{"--output", p.string()};
  to_file.insert(to_file.end(), args.begin(), args.end());
  const Outcome f = run(to_file);
  REQUIRE(f.code == 0);
  std::ifstream in(p);
  std::stringstream content;
  content << in.rdbuf();
  std::filesystem::remove(p);
  Json written = Json::parse(content.str());
  Json expected = a.json;
  written["meta"].erase("output");
  expected["meta"].erase("output");
  CHECK(written == expected);
}
