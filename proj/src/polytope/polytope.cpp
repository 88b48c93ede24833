#include "nqbell/polytope.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <string>

#include "nqbell/cg.hpp"
#include "nqbell/kernels.hpp"
#include "lp_util.hpp"

namespace nqbell {

using detail::check_lp_size;
using detail::lp_options;
using detail::npos;
using detail::require_verified;

LocalPolytope local_polytope(const Scenario& s, const PolytopeOptions& opts) {
  LocalPolytope lp{s, {}};
  const std::size_t n = strategy_count(s, opts.vertex_cap);
  lp.vertices.reserve(n);
  for (std::size_t i = 0; i < n; ++i) lp.vertices.push_back(box_from_strategy(s, strategy_at(s, i)));
  return lp;
}

ClassicalResult classical_max(const BellExpression& e, const PolytopeOptions& opts) {
  const auto scan = opts.threads == 1 ? kernels::vertex_scan_serial(e, opts.vertex_cap)
                                      : kernels::vertex_scan_parallel(e, opts.vertex_cap, opts.threads);
  return {scan.best, strategy_at(e.scenario(), scan.argmax), scan.argmax, scan.attaining};
}

MembershipResult local_membership(const Box& b, const PolytopeOptions& opts) {
  const Scenario& s = b.scenario();
  const std::size_t n = strategy_count(s, opts.vertex_cap);
  check_lp_size("membership", s.table_size(), n, opts);
  lp::Problem p;
  p.sense = lp::Sense::minimize;
  std::vector<std::vector<std::pair<std::size_t, Rat>>> rows(s.table_size());
  for (std::size_t v = 0; v < n; ++v) {
    const auto st = strategy_at(s, v);
    p.add_variable(Rat(0));
    for (std::size_t x = 0; x < s.input_count(); ++x) {
      std::vector<int> a(static_cast<std::size_t>(s.parties()));
      for (int q = 0; q < s.parties(); ++q) {
        a[static_cast<std::size_t>(q)] = st.responses[static_cast<std::size_t>(q)][static_cast<std::size_t>(s.input_of(x, q))];
      }
      rows[s.entry(x, s.encode_outcomes(a))].emplace_back(v, Rat(1));
    }
  }
  for (std::size_t r = 0; r < rows.size(); ++r) p.add_row(std::move(rows[r]), lp::RowType::eq, b.at(r));

  const lp::Result r = lp::solve(p, lp_options(opts));
  MembershipResult out;
  if (r.status == lp::Status::optimal) {
    if (!r.verified) throw std::logic_error("membership LP failed exact verification");
    out.is_local = true;
    for (std::size_t v = 0; v < n; ++v) {
      if (!r.x[v].is_zero()) out.weights.emplace_back(v, r.x[v]);
    }
    return out;
  }
  if (r.status != lp::Status::infeasible || !r.verified) throw std::logic_error("membership LP returned no usable certificate");
  std::vector<BellTerm> terms;
  for (std::size_t i = 0; i < r.farkas.size(); ++i) {
    if (r.farkas[i].is_zero()) continue;
    terms.push_back({i / s.outcome_count(), i % s.outcome_count(), r.farkas[i]});
  }
  out.separating = BellExpression(s, std::move(terms), Rat(0), "separating");
  return out;
}

ToblResult tobl_max(const BellExpression& e, const PolytopeOptions& opts) {
  const Scenario& s = e.scenario();
  if (s.parties() != 3 || !s.is_binary()) throw DomainError("TOBL optimization needs three parties with binary inputs and outputs");

  // Per bipartition i|jk a hidden variable picks h: a_i = h(x_i) and two
  // responders for the pair,
  //   forward:  a_j = f(x_j), a_k = g(x_j, x_k)
  //   backward: a_k = f'(x_k), a_j = g'(x_j, x_k)
  // and both mixtures must reproduce P. A joint weight over (h, forward,
  // backward) exists iff the (h, forward) and (h, backward) marginals share
  // their h-marginal, so the LP carries only those two marginals.
  constexpr int kCuts = 3;
  constexpr std::size_t kH = 4;
  constexpr std::size_t kPair = 4 * 16;
  const std::size_t table = s.table_size();
  const std::size_t nrows = kCuts * (2 * table + kH) + 1;
  const std::size_t ncols = table + kCuts * 2 * kH * kPair;
  check_lp_size("TOBL", nrows, ncols, opts);

  lp::Problem p;
  p.sense = lp::Sense::maximize;
  std::vector<std::vector<std::pair<std::size_t, Rat>>> rows(nrows);
  auto mix_row = [&](int cut, int dir, std::size_t r) {
    return static_cast<std::size_t>(cut) * (2 * table + kH) + static_cast<std::size_t>(dir) * table + r;
  };
  auto h_row = [&](int cut, std::size_t h) { return static_cast<std::size_t>(cut) * (2 * table + kH) + 2 * table + h; };
  const std::size_t norm_row = nrows - 1;

  for (std::size_t r = 0; r < table; ++r) p.add_variable(Rat(0));
  for (const auto& t : e.terms()) p.objective[s.entry(t.x, t.a)] = t.coefficient;
  for (int cut = 0; cut < kCuts; ++cut) {
    for (int dir = 0; dir < 2; ++dir) {
      for (std::size_t r = 0; r < table; ++r) rows[mix_row(cut, dir, r)].emplace_back(r, Rat(-1));
    }
  }

  for (int cut = 0; cut < kCuts; ++cut) {
    const int pi = cut;
    const int pj = (cut + 1) % 3;
    const int pk = (cut + 2) % 3;
    for (int dir = 0; dir < 2; ++dir) {
      for (std::size_t h = 0; h < kH; ++h) {
        for (std::size_t pair = 0; pair < kPair; ++pair) {
          const std::size_t var = p.add_variable(Rat(0));
          const std::size_t f = pair / 16;
          const std::size_t g = pair % 16;
          for (std::size_t x = 0; x < s.input_count(); ++x) {
            const int xi = s.input_of(x, pi);
            const int xj = s.input_of(x, pj);
            const int xk = s.input_of(x, pk);
            std::array<int, 3> a{};
            a[static_cast<std::size_t>(pi)] = static_cast<int>((h >> xi) & 1U);
            const auto gbit = static_cast<unsigned>(xj * 2 + xk);
            if (dir == 0) {
              a[static_cast<std::size_t>(pj)] = static_cast<int>((f >> xj) & 1U);
              a[static_cast<std::size_t>(pk)] = static_cast<int>((g >> gbit) & 1U);
            } else {
              a[static_cast<std::size_t>(pk)] = static_cast<int>((f >> xk) & 1U);
              a[static_cast<std::size_t>(pj)] = static_cast<int>((g >> gbit) & 1U);
            }
            rows[mix_row(cut, dir, s.entry(x, s.encode_outcomes(a)))].emplace_back(var, Rat(1));
          }
          rows[h_row(cut, h)].emplace_back(var, Rat(dir == 0 ? 1 : -1));
          if (cut == 0 && dir == 0) rows[norm_row].emplace_back(var, Rat(1));
        }
      }
    }
  }
  for (std::size_t r = 0; r + 1 < nrows; ++r) p.add_row(std::move(rows[r]), lp::RowType::eq, Rat(0));
  p.add_row(std::move(rows[norm_row]), lp::RowType::eq, Rat(1));

  const lp::Result r = lp::solve(p, lp_options(opts));
  require_verified(r, "TOBL");
  std::vector<Rat> t(r.x.begin(), r.x.begin() + static_cast<std::ptrdiff_t>(table));
  Box box(s, std::move(t));
  return {r.objective, std::move(box), nrows, ncols, r.stats};
}

std::size_t affine_rank(const std::vector<std::vector<Rat>>& points) {
  if (points.empty()) throw DomainError("affine rank of an empty set");
  const std::size_t cols = points[0].size();
  std::vector<std::vector<Rat>> m;
  m.reserve(points.size() - 1);
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].size() != cols) throw DomainError("points have different lengths");
    std::vector<Rat> d(cols);
    bool nonzero = false;
    for (std::size_t j = 0; j < cols; ++j) {
      d[j] = points[i][j] - points[0][j];
      nonzero = nonzero || !d[j].is_zero();
    }
    if (nonzero) m.push_back(std::move(d));
  }
  // Clear denominators so elimination stays in the integers.
  for (auto& row : m) {
    Rat l(1);
    for (const auto& v : row) l = lcm(l, v.denominator());
    if (l != Rat(1)) {
      for (auto& v : row) v *= l;
    }
  }
  // Bareiss: every division below is exact.
  Rat prev(1);
  std::size_t rank = 0;
  const std::size_t nrows = m.size();
  for (std::size_t col = 0; col < cols && rank < nrows; ++col) {
    std::size_t piv = rank;
    while (piv < nrows && m[piv][col].is_zero()) ++piv;
    if (piv == nrows) continue;
    std::swap(m[piv], m[rank]);
    const auto& prow = m[rank];
    const Rat& pv = prow[col];
    const bool unit_scale = pv == prev;
    const bool prev_one = prev == Rat(1);
    for (std::size_t i = rank + 1; i < nrows; ++i) {
      auto& row = m[i];
      if (row[col].is_zero()) {
        if (unit_scale) continue;
        for (std::size_t j = col + 1; j < cols; ++j) {
          if (!row[j].is_zero()) row[j] = row[j] * pv / prev;
        }
        continue;
      }
      const Rat f = row[col];
      for (std::size_t j = col + 1; j < cols; ++j) {
        Rat v = pv * row[j];
        if (!prow[j].is_zero()) submul(v, f, prow[j]);
        row[j] = prev_one ? std::move(v) : v / prev;
      }
      row[col] = Rat();
    }
    prev = pv;
    ++rank;
  }
  return rank;
}

std::size_t polytope_dimension(const Scenario& s, const PolytopeOptions& opts) {
  const std::size_t n = strategy_count(s, opts.vertex_cap);
  std::vector<std::vector<Rat>> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Box b = box_from_strategy(s, strategy_at(s, i));
    pts.emplace_back(b.table().begin(), b.table().end());
  }
  return affine_rank(pts);
}

RankTracker::RankTracker(std::size_t dim) : dim_(dim), row_of_col_(dim, npos) {}

bool RankTracker::insert_support(const std::vector<std::size_t>& support) {
  std::vector<Rat> r(dim_);
  std::vector<std::size_t> hits;
  for (std::size_t j : support) {
    if (j >= dim_) throw DomainError("support index out of range");
    if (row_of_col_[j] == npos) {
      r[j] += Rat(1);
    } else {
      hits.push_back(row_of_col_[j]);
    }
  }
  if (hits.empty()) return absorb(std::move(r));
  std::vector<std::size_t> free_cols;
  for (std::size_t j = 0; j < dim_; ++j) {
    if (row_of_col_[j] == npos) free_cols.push_back(j);
  }
  for (std::size_t h : hits) {
    const auto& row = rows_[h];
    for (std::size_t j : free_cols) {
      if (!row[j].is_zero()) r[j] -= row[j];
    }
  }
  return absorb(std::move(r));
}

bool RankTracker::insert(const std::vector<Rat>& v) {
  if (v.size() != dim_) throw DomainError("vector has wrong length");
  std::vector<Rat> r(dim_);
  for (std::size_t j = 0; j < dim_; ++j) {
    if (row_of_col_[j] == npos) r[j] = v[j];
  }
  for (std::size_t c = 0; c < dim_; ++c) {
    if (row_of_col_[c] == npos || v[c].is_zero()) continue;
    const auto& row = rows_[row_of_col_[c]];
    for (std::size_t j = 0; j < dim_; ++j) {
      if (row_of_col_[j] == npos && !row[j].is_zero()) submul(r[j], v[c], row[j]);
    }
  }
  return absorb(std::move(r));
}

// v is already zero on every pivot column.
bool RankTracker::absorb(std::vector<Rat> v) {
  std::size_t p = 0;
  while (p < dim_ && v[p].is_zero()) ++p;
  if (p == dim_) return false;
  const Rat inv = v[p].inverse();
  std::vector<std::size_t> nz;
  for (std::size_t j = p; j < dim_; ++j) {
    if (v[j].is_zero()) continue;
    v[j] *= inv;
    nz.push_back(j);
  }
  for (auto& row : rows_) {
    if (row[p].is_zero()) continue;
    const Rat f = row[p];
    for (std::size_t j : nz) submul(row[j], f, v[j]);
  }
  row_of_col_[p] = rows_.size();
  pivot_of_row_.push_back(p);
  rows_.push_back(std::move(v));
  return true;
}

FacetReport facet_check(const BellExpression& e, const Rat& bound, const PolytopeOptions& opts) {
  const Scenario& s = e.scenario();
  const ClassicalResult cm = classical_max(e, opts);
  if (cm.value != bound) {
    throw DomainError("supplied bound " + bound.str() + " differs from the classical maximum " + cm.value.str());
  }
  const auto sat = opts.threads == 1 ? kernels::saturating_serial(e, bound, opts.vertex_cap)
                                     : kernels::saturating_parallel(e, bound, opts.vertex_cap, opts.threads);
  const std::size_t dim = cg::dimension(s);

  RankTracker all(dim);
  const std::size_t n = strategy_count(s, opts.vertex_cap);
  for (std::size_t i = 0; i < n && all.rank() < dim; ++i) all.insert_support(cg::vertex_support(s, strategy_at(s, i)));

  RankTracker face(dim);
  for (std::size_t i : sat) face.insert_support(cg::vertex_support(s, strategy_at(s, i)));

  FacetReport rep;
  rep.saturating_vertex_count = sat.size();
  rep.bound_attained = !sat.empty();
  rep.affine_rank = sat.empty() ? 0 : face.rank() - 1;
  rep.polytope_dimension = all.rank() - 1;
  rep.is_tight = rep.bound_attained && rep.affine_rank + 1 == rep.polytope_dimension;
  return rep;
}

}  // namespace nqbell
