#include "nqbell/box.hpp"

#include <algorithm>
#include <map>

namespace nqbell {

NumericBox to_numeric(const Box& box) {
  std::vector<double> t;
  t.reserve(box.table().size());
  for (const Rat& v : box.table()) t.push_back(v.to_double());
  return {box.scenario(), std::move(t)};
}

InputDistribution::InputDistribution(Scenario scenario, std::vector<Rat> q)
    : scenario_(std::move(scenario)), q_(std::move(q)) {
  if (q_.size() != scenario_.input_count()) throw DomainError("input distribution has wrong length");
  Rat total;
  for (const Rat& v : q_) {
    if (v.sign() < 0) throw DomainError("input distribution has a negative weight");
    total += v;
  }
  if (total != Rat(1)) throw DomainError("input distribution sums to " + total.str() + ", not 1");
}

std::size_t strategy_count(const Scenario& s, std::size_t cap) {
  std::size_t total = 1;
  for (int p = 0; p < s.parties(); ++p) {
    for (int x = 0; x < s.inputs(p); ++x) {
      std::size_t next = 0;
      if (__builtin_mul_overflow(total, static_cast<std::size_t>(s.outputs(p)), &next) || next > cap) {
        throw DomainError("deterministic strategy count exceeds cap " + std::to_string(cap));
      }
      total = next;
    }
  }
  return total;
}

DeterministicStrategy strategy_at(const Scenario& s, std::size_t index) {
  DeterministicStrategy st;
  st.responses.resize(static_cast<std::size_t>(s.parties()));
  for (int p = 0; p < s.parties(); ++p) st.responses[static_cast<std::size_t>(p)].assign(static_cast<std::size_t>(s.inputs(p)), 0);
  for (int p = s.parties() - 1; p >= 0; --p) {
    auto& r = st.responses[static_cast<std::size_t>(p)];
    const auto d = static_cast<std::size_t>(s.outputs(p));
    for (int x = s.inputs(p) - 1; x >= 0; --x) {
      r[static_cast<std::size_t>(x)] = static_cast<int>(index % d);
      index /= d;
    }
  }
  if (index != 0) throw DomainError("strategy index out of range");
  return st;
}

void validate_strategy(const Scenario& s, const DeterministicStrategy& st) {
  if (st.responses.size() != static_cast<std::size_t>(s.parties())) throw DomainError("strategy has wrong party count");
  for (int p = 0; p < s.parties(); ++p) {
    const auto& r = st.responses[static_cast<std::size_t>(p)];
    if (r.size() != static_cast<std::size_t>(s.inputs(p))) throw DomainError("strategy has wrong input count");
    for (int a : r) {
      if (a < 0 || a >= s.outputs(p)) throw DomainError("strategy response out of range");
    }
  }
}

std::size_t strategy_index(const Scenario& s, const DeterministicStrategy& st) {
  validate_strategy(s, st);
  std::size_t idx = 0;
  for (int p = 0; p < s.parties(); ++p) {
    for (int a : st.responses[static_cast<std::size_t>(p)]) idx = idx * static_cast<std::size_t>(s.outputs(p)) + static_cast<std::size_t>(a);
  }
  return idx;
}

std::vector<DeterministicStrategy> enumerate_deterministic_strategies(const Scenario& s, std::size_t cap) {
  const std::size_t n = strategy_count(s, cap);
  std::vector<DeterministicStrategy> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(strategy_at(s, i));
  return out;
}

namespace {

std::size_t response_outcome(const Scenario& s, const DeterministicStrategy& st, std::size_t x) {
  std::vector<int> a(static_cast<std::size_t>(s.parties()));
  for (int p = 0; p < s.parties(); ++p) {
    a[static_cast<std::size_t>(p)] = st.responses[static_cast<std::size_t>(p)][static_cast<std::size_t>(s.input_of(x, p))];
  }
  return s.encode_outcomes(a);
}

}  // namespace

Box box_from_strategy(const Scenario& s, const DeterministicStrategy& st) {
  validate_strategy(s, st);
  std::vector<Rat> t(s.table_size());
  for (std::size_t x = 0; x < s.input_count(); ++x) t[s.entry(x, response_outcome(s, st, x))] = Rat(1);
  return {s, std::move(t)};
}

BellExpression::BellExpression(Scenario scenario, std::vector<BellTerm> terms, std::optional<Rat> classical_bound,
                               std::string label)
    : scenario_(std::move(scenario)), bound_(std::move(classical_bound)), label_(std::move(label)) {
  std::map<std::pair<std::size_t, std::size_t>, Rat> acc;
  for (auto& t : terms) {
    if (t.x >= scenario_.input_count() || t.a >= scenario_.outcome_count()) throw DomainError("term key out of range");
    acc[{t.x, t.a}] += t.coefficient;
  }
  for (auto& [key, c] : acc) {
    if (!c.is_zero()) terms_.push_back({key.first, key.second, c});
  }
  if (terms_.empty()) throw DomainError("Bell expression has no nonzero coefficient");
}

BellExpression BellExpression::with_bound(std::optional<Rat> bound) const {
  BellExpression e = *this;
  e.bound_ = std::move(bound);
  return e;
}

BellExpression BellExpression::with_label(std::string label) const {
  BellExpression e = *this;
  e.label_ = std::move(label);
  return e;
}

BellExpression BellExpression::embedded(const Scenario& larger) const {
  if (larger.parties() != scenario_.parties()) throw DomainError("embedding must keep the party count");
  for (int p = 0; p < larger.parties(); ++p) {
    if (larger.inputs(p) < scenario_.inputs(p) || larger.outputs(p) < scenario_.outputs(p)) {
      throw DomainError("embedding target is smaller than the source scenario");
    }
  }
  std::vector<BellTerm> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    out.push_back({larger.encode_inputs(scenario_.decode_inputs(t.x)), larger.encode_outcomes(scenario_.decode_outcomes(t.a)),
                   t.coefficient});
  }
  // Local bound is unchanged: extra inputs and outcomes carry zero weight.
  return {larger, std::move(out), bound_, label_};
}

Rat BellExpression::coefficient(std::size_t x, std::size_t a) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), std::pair{x, a}, [](const BellTerm& t, const auto& k) {
    return std::pair{t.x, t.a} < k;
  });
  if (it != terms_.end() && it->x == x && it->a == a) return it->coefficient;
  return {};
}

BellTerm make_term(const Scenario& s, std::span<const int> outcomes, std::span<const int> inputs, Rat coefficient) {
  return {s.encode_inputs(inputs), s.encode_outcomes(outcomes), std::move(coefficient)};
}

Rat bell_value(const BellExpression& e, const Box& b) {
  if (!(e.scenario() == b.scenario())) throw DomainError("expression and box scenarios differ");
  Rat v;
  for (const auto& t : e.terms()) v += t.coefficient * b(t.x, t.a);
  return v;
}

double bell_value(const BellExpression& e, const NumericBox& b) {
  if (!(e.scenario() == b.scenario())) throw DomainError("expression and box scenarios differ");
  double v = 0.0;
  for (const auto& t : e.terms()) v += t.coefficient.to_double() * b(t.x, t.a);
  return v;
}

Rat bell_value(const BellExpression& e, const DeterministicStrategy& st) {
  const Scenario& s = e.scenario();
  validate_strategy(s, st);
  Rat v;
  for (const auto& t : e.terms()) {
    if (response_outcome(s, st, t.x) == t.a) v += t.coefficient;
  }
  return v;
}

template <class T>
NonsignalingReport is_nonsignaling(const BasicBox<T>& b) {
  const Scenario& s = b.scenario();
  NonsignalingReport rep;
  std::vector<T> m;
  for (int p = 0; p < s.parties(); ++p) {
    const int mi = s.inputs(p);
    const int di = s.outputs(p);
    for (std::size_t x = 0; x < s.input_count(); ++x) {
      if (s.input_of(x, p) != 0) continue;
      for (std::size_t a = 0; a < s.outcome_count(); ++a) {
        if (s.outcome_of(a, p) != 0) continue;
        // marginal over party p of the remaining outcome, for each input of p
        auto xv = s.decode_inputs(x);
        auto av = s.decode_outcomes(a);
        m.assign(static_cast<std::size_t>(mi), T{});
        for (int xi = 0; xi < mi; ++xi) {
          xv[static_cast<std::size_t>(p)] = xi;
          const std::size_t xx = s.encode_inputs(xv);
          for (int ai = 0; ai < di; ++ai) {
            av[static_cast<std::size_t>(p)] = ai;
            m[static_cast<std::size_t>(xi)] += b(xx, s.encode_outcomes(av));
          }
        }
        for (int xi = 1; xi < mi; ++xi) {
          if (!ScalarTraits<T>::same(m[0], m[static_cast<std::size_t>(xi)])) {
            rep.nonsignaling = false;
            rep.violations.push_back({p, x, a, 0, xi});
          }
        }
      }
    }
  }
  return rep;
}

template <class T>
BasicBox<T> postselect(const BasicBox<T>& b, int party, int input, int outcome) {
  const Scenario& s = b.scenario();
  if (party < 0 || party >= s.parties()) throw DomainError("party index out of range");
  if (input < 0 || input >= s.inputs(party) || outcome < 0 || outcome >= s.outputs(party)) {
    throw DomainError("postselection input or outcome out of range");
  }
  const Scenario r = s.without_party(party);
  std::vector<T> t(r.table_size());
  for (std::size_t x = 0; x < r.input_count(); ++x) {
    auto xv = r.decode_inputs(x);
    xv.insert(xv.begin() + party, input);
    const std::size_t xs = s.encode_inputs(xv);
    T norm{};
    for (std::size_t a = 0; a < r.outcome_count(); ++a) {
      auto av = r.decode_outcomes(a);
      av.insert(av.begin() + party, outcome);
      t[r.entry(x, a)] = b(xs, s.encode_outcomes(av));
      norm += t[r.entry(x, a)];
    }
    if (!(norm > T{})) throw DomainError("postselected outcome has zero probability");
    for (std::size_t a = 0; a < r.outcome_count(); ++a) t[r.entry(x, a)] /= norm;
  }
  return {r, std::move(t)};
}

template <class T>
BasicBox<T> lift_box(const BasicBox<T>& b) {
  const Scenario& s = b.scenario();
  if (!s.is_binary()) throw DomainError("lifting needs binary inputs and outputs");
  auto in = s.input_sizes();
  auto out = s.output_sizes();
  in.push_back(2);
  out.push_back(2);
  const Scenario l(in, out);
  std::vector<T> t(l.table_size());
  for (std::size_t x = 0; x < s.input_count(); ++x) {
    for (int e = 0; e < 2; ++e) {
      const std::size_t xl = x * 2 + static_cast<std::size_t>(e);
      for (std::size_t a = 0; a < s.outcome_count(); ++a) t[l.entry(xl, a * 2 + static_cast<std::size_t>(e))] = b(x, a);
    }
  }
  return {l, std::move(t)};
}

template <class T>
BasicBox<T> marginal(const BasicBox<T>& b, std::span<const int> keep, std::span<const int> fixed_inputs) {
  const Scenario& s = b.scenario();
  std::vector<bool> kept(static_cast<std::size_t>(s.parties()), false);
  std::vector<int> in, out;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const int p = keep[i];
    if (p < 0 || p >= s.parties() || kept[static_cast<std::size_t>(p)]) throw DomainError("bad party list for marginal");
    if (i > 0 && p < keep[i - 1]) throw DomainError("marginal party list must be increasing");
    kept[static_cast<std::size_t>(p)] = true;
    in.push_back(s.inputs(p));
    out.push_back(s.outputs(p));
  }
  if (in.empty()) throw DomainError("marginal needs at least one party");
  const std::size_t dropped = static_cast<std::size_t>(s.parties()) - keep.size();
  if (!fixed_inputs.empty() && fixed_inputs.size() != dropped) throw DomainError("fixed inputs must cover dropped parties");
  const Scenario r(in, out);
  std::vector<int> base(static_cast<std::size_t>(s.parties()), 0);
  {
    std::size_t k = 0;
    for (int p = 0; p < s.parties(); ++p) {
      if (kept[static_cast<std::size_t>(p)]) continue;
      if (!fixed_inputs.empty()) base[static_cast<std::size_t>(p)] = fixed_inputs[k];
      ++k;
    }
  }
  std::vector<T> t(r.table_size());
  for (std::size_t x = 0; x < r.input_count(); ++x) {
    auto xv = base;
    const auto xr = r.decode_inputs(x);
    for (std::size_t i = 0; i < keep.size(); ++i) xv[static_cast<std::size_t>(keep[i])] = xr[i];
    const std::size_t xs = s.encode_inputs(xv);
    for (std::size_t a = 0; a < s.outcome_count(); ++a) {
      const auto av = s.decode_outcomes(a);
      std::vector<int> ar(keep.size());
      for (std::size_t i = 0; i < keep.size(); ++i) ar[i] = av[static_cast<std::size_t>(keep[i])];
      t[r.entry(x, r.encode_outcomes(ar))] += b(xs, a);
    }
  }
  return {r, std::move(t)};
}

template NonsignalingReport is_nonsignaling(const BasicBox<Rat>&);
template NonsignalingReport is_nonsignaling(const BasicBox<double>&);
template BasicBox<Rat> postselect(const BasicBox<Rat>&, int, int, int);
template BasicBox<double> postselect(const BasicBox<double>&, int, int, int);
template BasicBox<Rat> lift_box(const BasicBox<Rat>&);
template BasicBox<double> lift_box(const BasicBox<double>&);
template BasicBox<Rat> marginal(const BasicBox<Rat>&, std::span<const int>, std::span<const int>);
template BasicBox<double> marginal(const BasicBox<double>&, std::span<const int>, std::span<const int>);

}  // namespace nqbell
