#include "nqbell/gyni.hpp"

#include "nqbell/kernels.hpp"

#include <algorithm>

namespace nqbell {

namespace {

Scenario binary(int n) {
  if (n < 2) throw DomainError("GYNI needs at least two parties");
  return Scenario::uniform(n, 2, 2);
}

}  // namespace

InputDistribution parity_promise(int n) {
  const Scenario s = binary(n);
  const int checked = n % 2 == 1 ? n : n - 1;
  const Rat w(1, 1LL << (n - 1));
  std::vector<Rat> q(s.input_count());
  for (std::size_t x = 0; x < s.input_count(); ++x) {
    int parity = 0;
    for (int p = 0; p < checked; ++p) parity ^= s.input_of(x, p);
    if (parity == 0) q[x] = w;
  }
  return {s, std::move(q)};
}

InputDistribution uniform_inputs(int n) {
  const Scenario s = binary(n);
  return {s, std::vector<Rat>(s.input_count(), Rat(1, 1LL << n))};
}

InputDistribution point_mass(int n, std::size_t x) {
  const Scenario s = binary(n);
  std::vector<Rat> q(s.input_count());
  q.at(x) = Rat(1);
  return {s, std::move(q)};
}

Rat classical_bound_formula(const InputDistribution& q) {
  const Scenario& s = q.scenario();
  if (!s.is_binary()) throw DomainError("classical bound formula needs binary inputs");
  const std::size_t all = s.input_count() - 1;
  Rat best;
  for (std::size_t x = 0; x < s.input_count(); ++x) best = std::max(best, q(x) + q(all ^ x));
  return best;
}

GyniGame gyni_game(int n, const InputDistribution& q, GyniForm form) {
  const Scenario s = binary(n);
  if (!(q.scenario() == s)) throw DomainError("input distribution does not match the party count");
  const Rat scale = form == GyniForm::sum ? Rat(1LL << (n - 1)) : Rat(1);
  std::vector<BellTerm> terms;
  for (std::size_t x = 0; x < s.input_count(); ++x) {
    if (q(x).is_zero()) continue;
    const auto xv = s.decode_inputs(x);
    std::vector<int> a(xv.size());
    for (std::size_t i = 0; i < xv.size(); ++i) a[i] = xv[(i + 1) % xv.size()];
    terms.push_back({x, s.encode_outcomes(a), q(x) * scale});
  }
  const Rat bound = classical_bound_formula(q) * scale;
  std::string label = "GYNI_" + std::to_string(n) + (form == GyniForm::sum ? " (sum form)" : "");
  return {n, q, BellExpression(s, std::move(terms), bound, std::move(label))};
}

namespace {

bool orthogonal(const Scenario& s, const BellTerm& u, const BellTerm& v) {
  for (int p = 0; p < s.parties(); ++p) {
    if (s.input_of(u.x, p) == s.input_of(v.x, p) && s.outcome_of(u.a, p) != s.outcome_of(v.a, p)) return true;
  }
  return false;
}

bool complementary(const Scenario& s, const BellTerm& u, const BellTerm& v) {
  for (int p = 0; p < s.parties(); ++p) {
    if (s.inputs(p) != 2 || s.input_of(u.x, p) == s.input_of(v.x, p)) return false;
  }
  return true;
}

}  // namespace

bool orthogonality_certificate(const BellExpression& e) {
  const Scenario& s = e.scenario();
  const auto& t = e.terms();
  for (const auto& term : t) {
    if (term.coefficient.sign() < 0) throw DomainError("orthogonality certificate needs nonnegative coefficients");
  }
  // Partner of each term in the non-orthogonality graph; at most one allowed.
  std::vector<std::size_t> partner(t.size(), t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      if (orthogonal(s, t[i], t[j])) continue;
      if (!complementary(s, t[i], t[j])) return false;
      if (partner[i] != t.size() || partner[j] != t.size()) return false;
      partner[i] = j;
      partner[j] = i;
    }
  }
  // Each projector group is a single term or a complementary pair, so the
  // quantum value is at most the largest group weight.
  Rat certified;
  for (std::size_t i = 0; i < t.size(); ++i) {
    Rat w = t[i].coefficient;
    if (partner[i] != t.size()) w += t[partner[i]].coefficient;
    certified = std::max(certified, w);
  }
  const Rat classical = e.classical_bound() ? *e.classical_bound() : kernels::vertex_scan_serial(e).best;
  return certified <= classical;
}

}  // namespace nqbell
