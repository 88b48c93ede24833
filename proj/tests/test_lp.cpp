#include <doctest.h>

#include <functional>
#include <optional>
#include <random>

#include "nqbell/gyni.hpp"
#include "nqbell/polytope.hpp"
#include "nqbell/simplex.hpp"

using namespace nqbell;
using lp::Problem;
using lp::RowType;
using lp::Sense;
using lp::Status;

namespace {

Rat row_value(const lp::Row& r, const std::vector<Rat>& x) {
  Rat v;
  for (const auto& [j, c] : r.coeffs) v += c * x[j];
  return v;
}

bool satisfies(const Problem& p, const std::vector<Rat>& x) {
  for (std::size_t j = 0; j < p.num_vars(); ++j) {
    if (p.lower[j] && x[j] < *p.lower[j]) return false;
    if (p.upper[j] && x[j] > *p.upper[j]) return false;
  }
  for (const auto& r : p.rows) {
    const Rat v = row_value(r, x);
    if (r.type == RowType::le && v > r.rhs) return false;
    if (r.type == RowType::ge && v < r.rhs) return false;
    if (r.type == RowType::eq && v != r.rhs) return false;
  }
  return true;
}

// Farkas check for problems whose variables are all >= 0 without upper bounds:
// some sign of the multipliers yields a valid inequality 0 <= (negative) on the feasible set.
bool refutes(const Problem& p, const std::vector<Rat>& f) {
  for (const int s : {1, -1}) {
    bool ok = true;
    std::vector<Rat> combo(p.num_vars());
    Rat rhs;
    for (std::size_t r = 0; r < p.rows.size() && ok; ++r) {
      const Rat g = f[r] * Rat(s);
      // g * (row) must be a valid "<=" consequence.
      if (p.rows[r].type == RowType::le && g.sign() < 0) ok = false;
      if (p.rows[r].type == RowType::ge && g.sign() > 0) ok = false;
      for (const auto& [j, c] : p.rows[r].coeffs) combo[j] += g * c;
      rhs += g * p.rows[r].rhs;
    }
    if (!ok) continue;
    bool nonneg = true;
    for (const Rat& c : combo) nonneg = nonneg && c.sign() >= 0;
    if (nonneg && rhs.sign() < 0) return true;
  }
  return false;
}

// Solves a square system exactly; nullopt when singular.
std::optional<std::vector<Rat>> solve_square(std::vector<std::vector<Rat>> a, std::vector<Rat> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a[piv][c].is_zero()) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c].is_zero()) continue;
      const Rat f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) submul(a[r][k], f, a[c][k]);
      submul(b[r], f, b[c]);
    }
  }
  for (std::size_t r = 0; r < n; ++r) b[r] /= a[r][r];
  return b;
}

// Vertex enumeration oracle for bounded problems: best objective over all
// intersections of n tight constraints (rows or x_j = 0) that are feasible.
std::optional<Rat> brute_force_max(const Problem& p) {
  const std::size_t n = p.num_vars();
  std::vector<std::vector<Rat>> hyper;
  std::vector<Rat> rhs;
  for (const auto& r : p.rows) {
    std::vector<Rat> row(n);
    for (const auto& [j, c] : r.coeffs) row[j] += c;
    hyper.push_back(row);
    rhs.push_back(r.rhs);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Rat> row(n);
    row[j] = Rat(1);
    hyper.push_back(row);
    rhs.emplace_back(0);
  }
  std::optional<Rat> best;
  const std::size_t m = hyper.size();
  std::vector<std::size_t> pick(n);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t depth, std::size_t from) {
    if (depth == n) {
      std::vector<std::vector<Rat>> a;
      std::vector<Rat> b;
      for (const auto k : pick) {
        a.push_back(hyper[k]);
        b.push_back(rhs[k]);
      }
      const auto x = solve_square(a, b);
      if (!x || !satisfies(p, *x)) return;
      Rat v;
      for (std::size_t j = 0; j < n; ++j) v += p.objective[j] * (*x)[j];
      if (!best || v > *best) best = v;
      return;
    }
    for (std::size_t k = from; k < m; ++k) {
      pick[depth] = k;
      rec(depth + 1, k + 1);
    }
  };
  rec(0, 0);
  return best;
}

}  // namespace

TEST_CASE("two-variable packing problem") {
  Problem p;
  p.add_variable(Rat(1));
  p.add_variable(Rat(1));
  p.add_row({{0, Rat(1)}, {1, Rat(1)}}, RowType::le, Rat(1));
  const auto r = lp::solve(p);
  REQUIRE(r.status == Status::optimal);
  CHECK(r.objective == Rat(1));
  CHECK(r.verified);
  CHECK(satisfies(p, r.x));
  CHECK(r.duals[0] * p.rows[0].rhs == r.objective);
}

TEST_CASE("contradictory bounds are infeasible with a certificate") {
  Problem p;
  p.add_variable(Rat(1));
  p.add_row({{0, Rat(1)}}, RowType::ge, Rat(2));
  p.add_row({{0, Rat(1)}}, RowType::le, Rat(1));
  const auto r = lp::solve(p);
  CHECK(r.status == Status::infeasible);
  REQUIRE(r.farkas.size() == 2);
  CHECK(refutes(p, r.farkas));
  CHECK_FALSE(lp::feasible_point(p).has_value());
}

TEST_CASE("unbounded problems report an improving ray") {
  Problem p;
  p.add_variable(Rat(1));
  p.add_variable(Rat(-1));
  p.add_row({{0, Rat(1)}, {1, Rat(-1)}}, RowType::ge, Rat(1));
  const auto r = lp::solve(p);
  REQUIRE(r.status == Status::unbounded);
  REQUIRE(r.ray.size() == 2);
  CHECK((r.ray[0] - r.ray[1]).sign() > 0);
  CHECK(r.ray[0].sign() >= 0);
  CHECK(r.ray[1].sign() >= 0);
}

TEST_CASE("feasible points") {
  Problem p;
  p.add_variable(Rat(0), Rat(0), Rat(1));
  p.add_row({{0, Rat(1)}}, RowType::eq, Rat(1, 2));
  const auto x = lp::feasible_point(p);
  REQUIRE(x.has_value());
  CHECK((*x)[0] == Rat(1, 2));

  Problem q;
  q.add_variable(Rat(0));
  q.add_row({{0, Rat(1)}}, RowType::le, Rat(-1));
  CHECK_FALSE(lp::feasible_point(q).has_value());
  const auto r = lp::solve(q);
  CHECK(r.status == Status::infeasible);
  CHECK(refutes(q, r.farkas));
}

TEST_CASE("free and bounded variables") {
  Problem p;
  p.sense = Sense::minimize;
  p.add_variable(Rat(1), std::nullopt, std::nullopt);  // free
  p.add_variable(Rat(-2), Rat(-3), Rat(5, 2));
  p.add_row({{0, Rat(1)}, {1, Rat(1)}}, RowType::ge, Rat(-7, 3));
  const auto r = lp::solve(p);
  REQUIRE(r.status == Status::optimal);
  // x1 at its upper bound 5/2 and x0 as small as allowed: -7/3 - 5/2.
  CHECK(r.x[1] == Rat(5, 2));
  CHECK(r.x[0] == Rat(-29, 6));
  CHECK(r.objective == Rat(-29, 6) - Rat(5));
  CHECK(r.verified);
}

TEST_CASE("Beale's cycling example terminates at the optimum") {
  for (const std::size_t bland_after : {std::size_t{0}, std::size_t{1}, std::size_t{5000}}) {
    Problem p;
    for (const Rat& c : {Rat(3, 4), Rat(-20), Rat(1, 2), Rat(-6)}) p.add_variable(c);
    p.add_row({{0, Rat(1, 4)}, {1, Rat(-8)}, {2, Rat(-1)}, {3, Rat(9)}}, RowType::le, Rat(0));
    p.add_row({{0, Rat(1, 2)}, {1, Rat(-12)}, {2, Rat(-1, 2)}, {3, Rat(3)}}, RowType::le, Rat(0));
    p.add_row({{2, Rat(1)}}, RowType::le, Rat(1));
    lp::Options o;
    o.bland_after = bland_after;
    const auto r = lp::solve(p, o);
    REQUIRE(r.status == Status::optimal);
    CHECK(r.objective == Rat(5, 4));
    CHECK(r.verified);
  }
}

TEST_CASE("random bounded problems agree with vertex enumeration") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> coef(-5, 5), pos(1, 6), kind(0, 5);
  int solved = 0, infeasible = 0;
  for (int trial = 0; trial < 150; ++trial) {
    Problem p;
    const int n = 2 + trial % 2;
    for (int j = 0; j < n; ++j) p.add_variable(Rat(coef(rng), pos(rng)));
    // A box row keeps everything bounded.
    std::vector<std::pair<std::size_t, Rat>> sum;
    for (int j = 0; j < n; ++j) sum.emplace_back(static_cast<std::size_t>(j), Rat(1));
    p.add_row(sum, RowType::le, Rat(pos(rng)));
    for (int k = 0; k < 3; ++k) {
      std::vector<std::pair<std::size_t, Rat>> row;
      for (int j = 0; j < n; ++j) row.emplace_back(static_cast<std::size_t>(j), Rat(coef(rng)));
      const int t = kind(rng);
      const RowType type = t < 3 ? RowType::le : t < 5 ? RowType::ge : RowType::eq;
      p.add_row(row, type, Rat(coef(rng), pos(rng)));
    }
    const auto r = lp::solve(p);
    const auto oracle = brute_force_max(p);
    if (!oracle) {
      CHECK(r.status == Status::infeasible);
      CHECK(refutes(p, r.farkas));
      ++infeasible;
      continue;
    }
    REQUIRE(r.status == Status::optimal);
    CHECK(r.objective == *oracle);
    CHECK(r.verified);
    CHECK(satisfies(p, r.x));
    Rat dual_objective;
    for (std::size_t k = 0; k < p.rows.size(); ++k) dual_objective += r.duals[k] * p.rows[k].rhs;
    CHECK(dual_objective == r.objective);
    ++solved;
  }
  CHECK(solved > 30);
  CHECK(infeasible > 5);
}

TEST_CASE("text dump lists one constraint per line with rationals") {
  Problem p;
  p.add_variable(Rat(1, 2), Rat(0), std::nullopt, "x");
  p.add_row({{0, Rat(3, 4)}}, RowType::le, Rat(1), "cap");
  const std::string d = lp::dump(p);
  CHECK(d.find("1/2") != std::string::npos);
  CHECK(d.find("3/4") != std::string::npos);
  CHECK(d.find("cap") != std::string::npos);
}

TEST_CASE("GYNI_3 no-signaling program, reduced and plain") {
  const BellExpression e = gyni_game(3, parity_promise(3)).expression;
  PolytopeOptions plain;
  plain.use_symmetry = false;
  for (const PolytopeOptions& o : {PolytopeOptions{}, plain}) {
    const NsResult r = ns_max(e, o);
    CHECK(r.value == Rat(1, 3));
    CHECK(is_nonsignaling(r.box).nonsignaling);
    CHECK(bell_value(e, r.box) == Rat(1, 3));
  }
  CHECK(ns_max(e, plain).symmetry_generators == 0);
  CHECK(ns_max(e).symmetry_generators > 0);
}

TEST_CASE("iteration limits are reported") {
  const BellExpression e = gyni_game(4, parity_promise(4)).expression;
  PolytopeOptions o;
  o.use_symmetry = false;
  o.lp.max_iterations = 1;
  CHECK_THROWS_AS(ns_max(e, o), DomainError);
}
