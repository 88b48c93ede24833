#include <doctest.h>

#include <map>
#include <random>

#include "nqbell/gyni.hpp"
#include "nqbell/polytope.hpp"
#include "nqbell/upb.hpp"

using namespace nqbell;

namespace {

InputDistribution random_q(std::mt19937_64& rng, int n) {
  const Scenario s = Scenario::uniform(n, 2, 2);
  std::uniform_int_distribution<int> w(0, 9);
  std::vector<Rat> q(s.input_count());
  Rat total;
  for (auto& v : q) {
    v = Rat(w(rng) * w(rng));
    total += v;
  }
  if (total.is_zero()) {
    q[0] = Rat(1);
    total = Rat(1);
  }
  for (auto& v : q) v /= total;
  return {s, q};
}

// Keyed as "a|x" bit strings, party 0 first.
std::map<std::string, Rat> term_map(const BellExpression& e) {
  const Scenario& s = e.scenario();
  std::map<std::string, Rat> out;
  for (const auto& t : e.terms()) {
    std::string key;
    for (const int a : s.decode_outcomes(t.a)) key += static_cast<char>('0' + a);
    key += '|';
    for (const int x : s.decode_inputs(t.x)) key += static_cast<char>('0' + x);
    out[key] = t.coefficient;
  }
  return out;
}

}  // namespace

TEST_CASE("parity promise") {
  const InputDistribution q3 = parity_promise(3);
  const std::vector<Rat> expected3{Rat(1, 4), 0, 0, Rat(1, 4), 0, Rat(1, 4), Rat(1, 4), 0};
  CHECK(q3.weights() == expected3);
  const InputDistribution q2 = parity_promise(2);
  CHECK(q2.weights() == std::vector<Rat>{Rat(1, 2), Rat(1, 2), 0, 0});
  for (int n = 2; n <= 8; ++n) {
    const InputDistribution q = parity_promise(n);
    const Scenario& s = q.scenario();
    const int checked = n % 2 == 1 ? n : n - 1;
    Rat total;
    std::size_t support = 0;
    for (std::size_t x = 0; x < s.input_count(); ++x) {
      int parity = 0;
      for (int p = 0; p < checked; ++p) parity ^= s.input_of(x, p);
      CHECK(q(x) == (parity == 0 ? Rat(1, 1LL << (n - 1)) : Rat(0)));
      total += q(x);
      support += q(x).is_zero() ? 0 : 1;
    }
    CHECK(total == Rat(1));
    CHECK(support == (std::size_t{1} << (n - 1)));
  }
}

TEST_CASE("three-party game has the four promised terms") {
  const GyniGame g = gyni_game(3, parity_promise(3));
  const std::map<std::string, Rat> expected{
      {"000|000", Rat(1, 4)}, {"110|011", Rat(1, 4)}, {"011|101", Rat(1, 4)}, {"101|110", Rat(1, 4)}};
  CHECK(term_map(g.expression) == expected);
  CHECK(g.expression.classical_bound() == Rat(1, 4));

  const GyniGame sum = gyni_game(3, parity_promise(3), GyniForm::sum);
  for (const auto& [key, c] : term_map(sum.expression)) CHECK(c == Rat(1));
  CHECK(sum.expression.classical_bound() == Rat(1));
}

TEST_CASE("two-party uniform game") {
  const GyniGame g = gyni_game(2, uniform_inputs(2));
  const std::map<std::string, Rat> expected{
      {"00|00", Rat(1, 4)}, {"10|01", Rat(1, 4)}, {"01|10", Rat(1, 4)}, {"11|11", Rat(1, 4)}};
  CHECK(term_map(g.expression) == expected);
}

TEST_CASE("every term guesses the cyclic neighbour, one term per supported input") {
  std::mt19937_64 rng(3);
  for (int n = 2; n <= 6; ++n) {
    const InputDistribution q = random_q(rng, n);
    const GyniGame g = gyni_game(n, q);
    const Scenario& s = g.expression.scenario();
    std::size_t support = 0;
    for (std::size_t x = 0; x < s.input_count(); ++x) support += q(x).is_zero() ? 0 : 1;
    CHECK(g.expression.terms().size() == support);
    for (const auto& t : g.expression.terms()) {
      const auto xv = s.decode_inputs(t.x);
      const auto av = s.decode_outcomes(t.a);
      for (int i = 0; i < n; ++i) CHECK(av[static_cast<std::size_t>(i)] == xv[static_cast<std::size_t>((i + 1) % n)]);
      CHECK(t.coefficient == q(t.x));
    }
  }
}

TEST_CASE("closed-form classical bound") {
  CHECK(classical_bound_formula(parity_promise(3)) == Rat(1, 4));
  for (int n = 2; n <= 8; ++n) CHECK(classical_bound_formula(uniform_inputs(n)) == Rat(2, 1LL << n));
  CHECK(classical_bound_formula(point_mass(4, 5)) == Rat(1));
}

TEST_CASE("closed-form classical bound agrees with vertex enumeration") {
  std::mt19937_64 rng(11);
  for (int n = 2; n <= 6; ++n) {
    const int samples = n == 3 ? 20 : n == 6 ? 5 : 10;
    for (int k = 0; k < samples; ++k) {
      const InputDistribution q = random_q(rng, n);
      CHECK(classical_bound_formula(q) == classical_max(gyni_game(n, q).expression).value);
    }
  }
  for (int n = 2; n <= 6; ++n) {
    CHECK(classical_bound_formula(parity_promise(n)) == classical_max(gyni_game(n, parity_promise(n)).expression).value);
  }
}

TEST_CASE("no-signaling advantage for 3 to 6 parties and none for uniform inputs") {
  for (int n = 3; n <= 6; ++n) {
    const BellExpression e = gyni_game(n, parity_promise(n)).expression;
    CHECK(ns_max(e).value > *e.classical_bound());
  }
  for (int n = 3; n <= 4; ++n) {
    const BellExpression e = gyni_game(n, uniform_inputs(n)).expression;
    CHECK(ns_max(e).value == classical_max(e).value);
  }
}

TEST_CASE("no-signaling value is at most twice the classical one") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 20; ++k) {
    const BellExpression e = gyni_game(3, random_q(rng, 3)).expression;
    CHECK(ns_max(e).value <= Rat(2) * classical_max(e).value);
  }
}

TEST_CASE("orthogonality certificate") {
  for (int n = 2; n <= 8; ++n) CHECK(orthogonality_certificate(gyni_game(n, parity_promise(n)).expression));
  const auto shifts = upb::ProductVectorSet::from(upb::families::shifts(upb::families::hadamard_plus()));
  CHECK(orthogonality_certificate(upb::bell_from_set(shifts)));

  const Scenario s = Scenario::uniform(2, 2, 2);
  auto term = [&](std::vector<int> a, std::vector<int> x) { return make_term(s, a, x, Rat(1)); };
  // Complementary inputs form an allowed pair; the pair weight 2 is the classical maximum.
  CHECK(orthogonality_certificate(BellExpression(s, {term({0, 0}, {0, 0}), term({1, 1}, {1, 1})})));
  // Same input at party 0 with equal outcomes and different input at party 1: not orthogonal, not complementary.
  CHECK_FALSE(orthogonality_certificate(BellExpression(s, {term({0, 0}, {0, 0}), term({0, 1}, {0, 1})})));
  // One term overlapping two others breaks the pair structure.
  CHECK_FALSE(orthogonality_certificate(
      BellExpression(s, {term({0, 0}, {0, 0}), term({1, 1}, {1, 1}), term({1, 0}, {1, 0})})));
  CHECK_THROWS_AS(orthogonality_certificate(BellExpression(s, {{0, 0, Rat(-1)}})), DomainError);
}
