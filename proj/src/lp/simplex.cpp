#include "nqbell/simplex.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "nqbell/scenario.hpp"

namespace nqbell::lp {

std::string to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

std::size_t Problem::add_variable(Rat cost, std::optional<Rat> lo, std::optional<Rat> hi, std::string name) {
  objective.push_back(std::move(cost));
  lower.push_back(std::move(lo));
  upper.push_back(std::move(hi));
  var_names.push_back(std::move(name));
  return objective.size() - 1;
}

std::size_t Problem::add_row(std::vector<std::pair<std::size_t, Rat>> coeffs, RowType type, Rat rhs, std::string name) {
  rows.push_back({std::move(coeffs), type, std::move(rhs), std::move(name)});
  return rows.size() - 1;
}

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

using Entry = std::pair<std::uint32_t, Rat>;

// x_orig = offset + sign * x[pos] - x[neg]
struct VarMap {
  std::size_t pos = npos;
  std::size_t neg = npos;
  Rat offset;
  int sign = 1;
};

// min c^T x, A x = b, x >= 0, b >= 0
struct StdForm {
  std::size_t m = 0;
  std::vector<std::vector<Entry>> cols;
  std::vector<Rat> cost;
  std::vector<Rat> b;
  std::vector<int> row_sign;
  std::vector<std::size_t> unit_col;  // column equal to e_i, or npos
  std::vector<VarMap> vars;
  Rat constant;  // objective offset from shifted bounds, in the original sense
  std::size_t real_cols = 0;
};

StdForm standardize(const Problem& p) {
  const std::size_t n = p.num_vars();
  if (p.lower.size() != n || p.upper.size() != n) throw DomainError("bounds do not match the variable count");
  StdForm f;
  std::vector<std::vector<Entry>> rows;
  std::vector<Rat> rhs;
  std::size_t ncol = 0;
  f.vars.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    auto& v = f.vars[j];
    if (p.lower[j]) {
      v.pos = ncol++;
      v.offset = *p.lower[j];
    } else if (p.upper[j]) {
      v.pos = ncol++;
      v.offset = *p.upper[j];
      v.sign = -1;
    } else {
      v.pos = ncol++;
      v.neg = ncol++;
    }
  }
  std::vector<Rat> cost(ncol);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& v = f.vars[j];
    Rat c = p.sense == Sense::maximize ? -p.objective[j] : p.objective[j];
    f.constant += p.objective[j] * v.offset;
    cost[v.pos] = v.sign > 0 ? c : -c;
    if (v.neg != npos) cost[v.neg] = -c;
  }
  std::vector<int> slack_sign;
  for (const auto& r : p.rows) {
    std::vector<Entry> row;
    Rat b = r.rhs;
    for (const auto& [j, a] : r.coeffs) {
      if (j >= n) throw DomainError("row references an unknown variable");
      if (a.is_zero()) continue;
      const auto& v = f.vars[j];
      if (!v.offset.is_zero()) submul(b, a, v.offset);
      row.emplace_back(static_cast<std::uint32_t>(v.pos), v.sign > 0 ? a : -a);
      if (v.neg != npos) row.emplace_back(static_cast<std::uint32_t>(v.neg), -a);
    }
    rows.push_back(std::move(row));
    rhs.push_back(std::move(b));
    slack_sign.push_back(r.type == RowType::le ? 1 : r.type == RowType::ge ? -1 : 0);
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (p.lower[j] && p.upper[j]) {
      rows.push_back({{static_cast<std::uint32_t>(f.vars[j].pos), Rat(1)}});
      rhs.push_back(*p.upper[j] - *p.lower[j]);
      slack_sign.push_back(1);
    }
  }
  f.m = rows.size();
  f.row_sign.assign(f.m, 1);
  f.unit_col.assign(f.m, npos);
  for (std::size_t i = 0; i < f.m; ++i) {
    if (rhs[i].sign() < 0) {
      f.row_sign[i] = -1;
      rhs[i] = -rhs[i];
      for (auto& e : rows[i]) e.second = -e.second;
    }
  }
  f.cols.assign(ncol, {});
  for (std::size_t i = 0; i < f.m; ++i) {
    for (auto& [j, a] : rows[i]) f.cols[j].emplace_back(static_cast<std::uint32_t>(i), std::move(a));
  }
  // Merge duplicate row entries that a variable may have picked up.
  for (auto& col : f.cols) {
    std::sort(col.begin(), col.end(), [](const Entry& x, const Entry& y) { return x.first < y.first; });
    std::vector<Entry> merged;
    for (auto& e : col) {
      if (!merged.empty() && merged.back().first == e.first) {
        merged.back().second += e.second;
      } else {
        merged.push_back(std::move(e));
      }
    }
    std::erase_if(merged, [](const Entry& e) { return e.second.is_zero(); });
    col = std::move(merged);
  }
  for (std::size_t i = 0; i < f.m; ++i) {
    if (slack_sign[i] == 0) continue;
    const int s = slack_sign[i] * f.row_sign[i];
    f.cols.push_back({{static_cast<std::uint32_t>(i), Rat(s)}});
    cost.emplace_back();
    if (s > 0) f.unit_col[i] = f.cols.size() - 1;
  }
  f.cost = std::move(cost);
  f.b = std::move(rhs);
  f.real_cols = f.cols.size();
  return f;
}

class Simplex {
 public:
  Simplex(StdForm& f, const Options& o) : f_(f), o_(o), m_(f.m) {
    // Initial basis: unit columns where available, artificials elsewhere.
    basis_.assign(m_, npos);
    for (std::size_t i = 0; i < m_; ++i) {
      if (f_.unit_col[i] != npos) {
        basis_[i] = f_.unit_col[i];
      } else {
        f_.cols.push_back({{static_cast<std::uint32_t>(i), Rat(1)}});
        f_.cost.emplace_back();
        basis_[i] = f_.cols.size() - 1;
      }
    }
    n_ = f_.cols.size();
    pos_.assign(n_, npos);
    for (std::size_t i = 0; i < m_; ++i) pos_[basis_[i]] = i;
    binv_.assign(m_, std::vector<Rat>(m_));
    for (std::size_t i = 0; i < m_; ++i) binv_[i][i] = Rat(1);
    xb_ = f_.b;
    block_ = o_.pricing_block ? o_.pricing_block : std::max<std::size_t>(256, f_.real_cols / 8);
  }

  bool is_artificial(std::size_t j) const { return j >= f_.real_cols; }

  Status run_phase(int phase) {
    phase_ = phase;
    cur_cost_.assign(n_, Rat());
    if (phase == 1) {
      for (std::size_t j = f_.real_cols; j < n_; ++j) cur_cost_[j] = Rat(1);
    } else {
      for (std::size_t j = 0; j < f_.real_cols; ++j) cur_cost_[j] = f_.cost[j];
    }
    recompute_pi();
    std::size_t streak = 0;
    for (;;) {
      if (o_.max_iterations && iterations_ >= o_.max_iterations) return Status::iteration_limit;
      if (o_.progress && iterations_ % 100 == 0) o_.progress(iterations_, phase);
      const bool bland = streak >= o_.bland_after;
      Rat dq;
      const std::size_t q = bland ? price_bland(dq) : price_dantzig(dq);
      if (q == npos) return Status::optimal;
      std::vector<Rat> alpha = ftran(q);
      const std::size_t r = ratio_test(alpha, bland);
      if (r == npos) {
        entering_ = q;
        alpha_ = std::move(alpha);
        return Status::unbounded;
      }
      const bool degenerate = xb_[r].is_zero();
      pivot(r, q, alpha, &dq);
      streak = degenerate ? streak + 1 : 0;
      ++iterations_;
      if (degenerate) ++degenerate_;
      if (bland) ++bland_pivots_;
    }
  }

  // After phase 1, swap zero-valued artificials for real columns where possible.
  void drive_out_artificials() {
    for (std::size_t r = 0; r < m_; ++r) {
      if (!is_artificial(basis_[r])) continue;
      const auto& row = binv_[r];
      for (std::size_t j = 0; j < f_.real_cols; ++j) {
        if (pos_[j] != npos) continue;
        Rat v;
        for (const auto& [k, a] : f_.cols[j]) {
          if (!row[k].is_zero()) v += row[k] * a;
        }
        if (v.is_zero()) continue;
        std::vector<Rat> alpha = ftran(j);
        pivot(r, j, alpha, nullptr);
        break;
      }
    }
  }

  Rat phase1_value() const {
    Rat v;
    for (std::size_t i = 0; i < m_; ++i) {
      if (is_artificial(basis_[i])) v += xb_[i];
    }
    return v;
  }

  std::vector<Rat> point() const {
    std::vector<Rat> x(n_);
    for (std::size_t i = 0; i < m_; ++i) x[basis_[i]] = xb_[i];
    return x;
  }

  std::vector<Rat> ray() const {
    std::vector<Rat> d(n_);
    d[entering_] = Rat(1);
    for (std::size_t i = 0; i < m_; ++i) d[basis_[i]] = -alpha_[i];
    return d;
  }

  const std::vector<Rat>& pi() const { return pi_; }
  std::size_t iterations() const { return iterations_; }
  std::size_t degenerate() const { return degenerate_; }
  std::size_t bland_pivots() const { return bland_pivots_; }
  std::size_t columns() const { return n_; }

 private:
  void recompute_pi() {
    pi_.assign(m_, Rat());
    for (std::size_t i = 0; i < m_; ++i) {
      const Rat& c = cur_cost_[basis_[i]];
      if (c.is_zero()) continue;
      for (std::size_t k = 0; k < m_; ++k) {
        if (!binv_[i][k].is_zero()) pi_[k] += c * binv_[i][k];
      }
    }
  }

  Rat reduced_cost(std::size_t j) const {
    Rat d = cur_cost_[j];
    for (const auto& [i, a] : f_.cols[j]) {
      if (!pi_[i].is_zero()) submul(d, pi_[i], a);
    }
    return d;
  }

  bool eligible(std::size_t j) const { return pos_[j] == npos && !is_artificial(j); }

  std::size_t price_dantzig(Rat& dq) {
    const std::size_t n = f_.real_cols;
    if (n == 0) return npos;
    std::size_t scanned = 0;
    while (scanned < n) {
      std::size_t best = npos;
      Rat best_d;
      const std::size_t len = std::min(block_, n - scanned);
      for (std::size_t t = 0; t < len; ++t) {
        const std::size_t j = (cursor_ + t) % n;
        if (!eligible(j)) continue;
        Rat d = reduced_cost(j);
        if (d.sign() < 0 && (best == npos || d < best_d)) {
          best = j;
          best_d = std::move(d);
        }
      }
      cursor_ = (cursor_ + len) % n;
      scanned += len;
      if (best != npos) {
        dq = std::move(best_d);
        return best;
      }
    }
    return npos;
  }

  std::size_t price_bland(Rat& dq) {
    for (std::size_t j = 0; j < f_.real_cols; ++j) {
      if (!eligible(j)) continue;
      Rat d = reduced_cost(j);
      if (d.sign() < 0) {
        dq = std::move(d);
        return j;
      }
    }
    return npos;
  }

  std::vector<Rat> ftran(std::size_t q) const {
    std::vector<Rat> alpha(m_);
    const auto& col = f_.cols[q];
#pragma omp parallel for num_threads(o_.threads) if (o_.threads > 1) schedule(static)
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& row = binv_[i];
      Rat v;
      for (const auto& [k, a] : col) {
        if (!row[k].is_zero()) v += row[k] * a;
      }
      alpha[i] = std::move(v);
    }
    return alpha;
  }

  // Minimum ratio x_i / alpha_i over alpha_i > 0. Ties are broken by the
  // lexicographic order of the scaled rows of B^-1 (which rules out cycling
  // while every row of [x_B | B^-1] stays lexicographically positive), or by
  // the smallest basic column under Bland's rule.
  std::size_t ratio_test(const std::vector<Rat>& alpha, bool bland) const {
    std::size_t r = npos;
    for (std::size_t i = 0; i < m_; ++i) {
      if (alpha[i].sign() <= 0) continue;
      if (r == npos) {
        r = i;
        continue;
      }
      const Rat lhs = xb_[i] * alpha[r];
      const Rat rhs = xb_[r] * alpha[i];
      if (lhs < rhs) {
        r = i;
      } else if (lhs == rhs) {
        if (bland ? basis_[i] < basis_[r] : lex_less(i, r, alpha)) r = i;
      }
    }
    return r;
  }

  bool lex_less(std::size_t i, std::size_t r, const std::vector<Rat>& alpha) const {
    const auto& bi = binv_[i];
    const auto& br = binv_[r];
    for (std::size_t k = 0; k < m_; ++k) {
      if (bi[k].is_zero() && br[k].is_zero()) continue;
      const Rat lhs = bi[k] * alpha[r];
      const Rat rhs = br[k] * alpha[i];
      if (lhs != rhs) return lhs < rhs;
    }
    return basis_[i] < basis_[r];
  }

  void pivot(std::size_t r, std::size_t q, const std::vector<Rat>& alpha, const Rat* dq) {
    const Rat inv = alpha[r].inverse();
    const Rat theta = xb_[r] * inv;
    if (!theta.is_zero()) {
      for (std::size_t i = 0; i < m_; ++i) {
        if (i != r && !alpha[i].is_zero()) submul(xb_[i], theta, alpha[i]);
      }
    }
    xb_[r] = theta;
    auto& prow = binv_[r];
    std::vector<std::size_t> nz;
    for (std::size_t k = 0; k < m_; ++k) {
      if (!prow[k].is_zero()) {
        prow[k] *= inv;
        nz.push_back(k);
      }
    }
#pragma omp parallel for num_threads(o_.threads) if (o_.threads > 1) schedule(dynamic, 16)
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r || alpha[i].is_zero()) continue;
      auto& row = binv_[i];
      const Rat& a = alpha[i];
      for (std::size_t k : nz) submul(row[k], a, prow[k]);
    }
    if (dq) {
      for (std::size_t k : nz) submul(pi_[k], -*dq, prow[k]);
    }
    pos_[basis_[r]] = npos;
    basis_[r] = q;
    pos_[q] = r;
  }

  StdForm& f_;
  const Options& o_;
  std::size_t m_;
  std::size_t n_ = 0;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> pos_;
  std::vector<std::vector<Rat>> binv_;
  std::vector<Rat> xb_;
  std::vector<Rat> pi_;
  std::vector<Rat> cur_cost_;
  std::size_t block_ = 256;
  std::size_t cursor_ = 0;
  std::size_t iterations_ = 0;
  std::size_t degenerate_ = 0;
  std::size_t bland_pivots_ = 0;
  int phase_ = 1;
  std::size_t entering_ = npos;
  std::vector<Rat> alpha_;
};

std::vector<Rat> to_original(const StdForm& f, const std::vector<Rat>& x, bool with_offset) {
  std::vector<Rat> out(f.vars.size());
  for (std::size_t j = 0; j < f.vars.size(); ++j) {
    const auto& v = f.vars[j];
    Rat val = with_offset ? v.offset : Rat();
    if (v.sign > 0) {
      val += x[v.pos];
    } else {
      val -= x[v.pos];
    }
    if (v.neg != npos) val -= x[v.neg];
    out[j] = std::move(val);
  }
  return out;
}

std::vector<Rat> row_vector(const StdForm& f, const std::vector<Rat>& y, std::size_t rows, int scale) {
  std::vector<Rat> out(rows);
  for (std::size_t i = 0; i < rows; ++i) out[i] = y[i] * Rat(f.row_sign[i] * scale);
  return out;
}

bool verify_optimal(const StdForm& f, const std::vector<Rat>& x, const std::vector<Rat>& pi) {
  std::vector<Rat> ax(f.m);
  for (std::size_t j = 0; j < f.cols.size(); ++j) {
    if (x[j].sign() < 0) return false;
    if (x[j].is_zero()) continue;
    if (j >= f.real_cols) return false;
    for (const auto& [i, a] : f.cols[j]) ax[i] += a * x[j];
  }
  if (ax != f.b) return false;
  Rat primal, dual;
  for (std::size_t j = 0; j < f.real_cols; ++j) {
    Rat d = f.cost[j];
    for (const auto& [i, a] : f.cols[j]) submul(d, pi[i], a);
    if (d.sign() < 0) return false;
    primal += f.cost[j] * x[j];
  }
  for (std::size_t i = 0; i < f.m; ++i) dual += f.b[i] * pi[i];
  return primal == dual;
}

bool verify_farkas(const StdForm& f, const std::vector<Rat>& y) {
  for (std::size_t j = 0; j < f.real_cols; ++j) {
    Rat v;
    for (const auto& [i, a] : f.cols[j]) v += y[i] * a;
    if (v.sign() > 0) return false;
  }
  Rat by;
  for (std::size_t i = 0; i < f.m; ++i) by += f.b[i] * y[i];
  return by.sign() > 0;
}

bool verify_ray(const StdForm& f, const std::vector<Rat>& d) {
  std::vector<Rat> ad(f.m);
  Rat cd;
  for (std::size_t j = 0; j < f.real_cols; ++j) {
    if (d[j].sign() < 0) return false;
    if (d[j].is_zero()) continue;
    for (const auto& [i, a] : f.cols[j]) ad[i] += a * d[j];
    cd += f.cost[j] * d[j];
  }
  for (const auto& v : ad) {
    if (!v.is_zero()) return false;
  }
  return cd.sign() < 0;
}

}  // namespace

Result solve(const Problem& p, const Options& opts) {
  StdForm f = standardize(p);
  Simplex s(f, opts);
  Result res;
  const std::size_t nrows = p.num_rows();

  Status st = s.run_phase(1);
  if (st == Status::iteration_limit) {
    res.status = st;
    res.stats.iterations = s.iterations();
    return res;
  }
  if (s.phase1_value().sign() > 0) {
    res.status = Status::infeasible;
    res.stats.iterations = s.iterations();
    res.verified = verify_farkas(f, s.pi());
    res.farkas = row_vector(f, s.pi(), nrows, 1);
    return res;
  }
  res.stats.phase1_iterations = s.iterations();
  s.drive_out_artificials();
  st = s.run_phase(2);
  res.status = st;
  res.stats.iterations = s.iterations();
  res.stats.degenerate_pivots = s.degenerate();
  res.stats.bland_pivots = s.bland_pivots();
  if (st == Status::unbounded) {
    const auto d = s.ray();
    res.verified = verify_ray(f, d);
    res.ray = to_original(f, d, false);
    return res;
  }
  if (st != Status::optimal) return res;

  const auto x = s.point();
  res.verified = verify_optimal(f, x, s.pi());
  res.x = to_original(f, x, true);
  for (std::size_t j = 0; j < p.num_vars(); ++j) res.objective += p.objective[j] * res.x[j];
  res.duals = row_vector(f, s.pi(), nrows, p.sense == Sense::maximize ? -1 : 1);
  return res;
}

std::optional<std::vector<Rat>> feasible_point(const Problem& p, const Options& opts) {
  Problem q = p;
  std::fill(q.objective.begin(), q.objective.end(), Rat());
  Result r = solve(q, opts);
  if (r.status != Status::optimal) return std::nullopt;
  return std::move(r.x);
}

std::string dump(const Problem& p) {
  std::ostringstream os;
  auto var = [&](std::size_t j) { return p.var_names[j].empty() ? "x" + std::to_string(j) : p.var_names[j]; };
  os << (p.sense == Sense::maximize ? "maximize" : "minimize") << "\n obj:";
  for (std::size_t j = 0; j < p.num_vars(); ++j) {
    if (!p.objective[j].is_zero()) os << ' ' << p.objective[j] << ' ' << var(j);
  }
  os << "\nsubject to\n";
  for (std::size_t i = 0; i < p.num_rows(); ++i) {
    const auto& r = p.rows[i];
    os << ' ' << (r.name.empty() ? "r" + std::to_string(i) : r.name) << ':';
    for (const auto& [j, a] : r.coeffs) os << ' ' << a << ' ' << var(j);
    os << (r.type == RowType::le ? " <= " : r.type == RowType::ge ? " >= " : " = ") << r.rhs << '\n';
  }
  os << "bounds\n";
  for (std::size_t j = 0; j < p.num_vars(); ++j) {
    os << ' ' << (p.lower[j] ? p.lower[j]->str() : "-inf") << " <= " << var(j) << " <= "
       << (p.upper[j] ? p.upper[j]->str() : "+inf") << '\n';
  }
  os << "end\n";
  return os.str();
}

}  // namespace nqbell::lp
