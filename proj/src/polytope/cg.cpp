#include "nqbell/cg.hpp"

namespace nqbell::cg {

std::vector<std::size_t> local_sizes(const Scenario& s) {
  std::vector<std::size_t> out;
  for (int p = 0; p < s.parties(); ++p) {
    out.push_back(1 + static_cast<std::size_t>(s.inputs(p)) * static_cast<std::size_t>(s.outputs(p) - 1));
  }
  return out;
}

std::size_t dimension(const Scenario& s) {
  std::size_t d = 1;
  for (std::size_t l : local_sizes(s)) d *= l;
  return d;
}

namespace {

using Sparse = std::vector<std::pair<std::size_t, int>>;

Sparse local_factor(int x, int a, int d) {
  if (a < d - 1) return {{local_slot(x, a, d), 1}};
  Sparse f{{0, 1}};
  for (int b = 0; b < d - 1; ++b) f.emplace_back(local_slot(x, b, d), -1);
  return f;
}

}  // namespace

std::vector<std::pair<std::size_t, int>> table_row(const Scenario& s, std::size_t x, std::size_t a) {
  const auto sizes = local_sizes(s);
  Sparse acc{{0, 1}};
  for (int p = 0; p < s.parties(); ++p) {
    const Sparse f = local_factor(s.input_of(x, p), s.outcome_of(a, p), s.outputs(p));
    Sparse next;
    next.reserve(acc.size() * f.size());
    for (const auto& [i, u] : acc) {
      for (const auto& [j, v] : f) next.emplace_back(i * sizes[static_cast<std::size_t>(p)] + j, u * v);
    }
    acc = std::move(next);
  }
  return acc;
}

std::vector<std::size_t> vertex_support(const Scenario& s, const DeterministicStrategy& st) {
  const auto sizes = local_sizes(s);
  std::vector<std::size_t> acc{0};
  for (int p = 0; p < s.parties(); ++p) {
    const int d = s.outputs(p);
    std::vector<std::size_t> local{0};
    const auto& r = st.responses[static_cast<std::size_t>(p)];
    for (int x = 0; x < s.inputs(p); ++x) {
      const int a = r[static_cast<std::size_t>(x)];
      if (a < d - 1) local.push_back(local_slot(x, a, d));
    }
    std::vector<std::size_t> next;
    next.reserve(acc.size() * local.size());
    for (std::size_t i : acc) {
      for (std::size_t j : local) next.push_back(i * sizes[static_cast<std::size_t>(p)] + j);
    }
    acc = std::move(next);
  }
  return acc;
}

Box box_from_coordinates(const Scenario& s, const std::vector<Rat>& p) {
  if (p.size() != dimension(s) || p.empty() || p[0] != Rat(1)) throw DomainError("coordinate vector must have p[0] = 1");
  std::vector<Rat> t(s.table_size());
  for (std::size_t x = 0; x < s.input_count(); ++x) {
    for (std::size_t a = 0; a < s.outcome_count(); ++a) {
      Rat v;
      for (const auto& [k, sgn] : table_row(s, x, a)) {
        if (sgn > 0) {
          v += p[k];
        } else {
          v -= p[k];
        }
      }
      t[s.entry(x, a)] = std::move(v);
    }
  }
  return {s, std::move(t)};
}

}  // namespace nqbell::cg
