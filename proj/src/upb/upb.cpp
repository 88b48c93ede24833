#include "nqbell/upb.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <sstream>
#include <string>

#include <omp.h>

#include "nqbell/kernels.hpp"

namespace nqbell::upb {

namespace {

std::string describe(const LocalVector& v) {
  std::ostringstream os;
  os.precision(6);
  os << '(';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v[i].real();
    if (v[i].imag() != 0.0) os << (v[i].imag() < 0 ? "-" : "+") << std::abs(v[i].imag()) << 'i';
  }
  os << ')';
  return os.str();
}

}  // namespace

Eigen::VectorXcd kron(const ProductVector& v) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Ones(1);
  for (const auto& f : v) {
    Eigen::VectorXcd next(out.size() * f.size());
    for (Eigen::Index i = 0; i < out.size(); ++i) next.segment(i * f.size(), f.size()) = out[i] * f;
    out = std::move(next);
  }
  return out;
}

Complex overlap(const ProductVector& u, const ProductVector& v) {
  Complex c(1.0, 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) c *= u[i].dot(v[i]);
  return c;
}

bool same_up_to_phase(const LocalVector& u, const LocalVector& v, double tol) {
  return u.size() == v.size() && std::abs(u.dot(v)) > 1.0 - tol;
}

LocalVector qubit_complement(const LocalVector& e) {
  if (e.size() != 2) throw DomainError("qubit complement needs a vector in C^2");
  LocalVector out(2);
  out << -std::conj(e[1]), std::conj(e[0]);
  return out.normalized();
}

ProductVectorSet::ProductVectorSet(std::vector<int> dims, std::vector<ProductVector> vectors)
    : dims_(std::move(dims)), vectors_(std::move(vectors)) {
  validate();
}

std::size_t ProductVectorSet::space_dimension() const noexcept {
  std::size_t d = 1;
  for (const int di : dims_) d *= static_cast<std::size_t>(di);
  return d;
}

void ProductVectorSet::validate() const {
  if (dims_.empty()) throw DomainError("product vector set needs at least one site");
  for (const int d : dims_) {
    if (d < 1) throw DomainError("site dimensions must be positive");
  }
  if (vectors_.empty()) throw DomainError("product vector set is empty");
  for (std::size_t m = 0; m < vectors_.size(); ++m) {
    if (vectors_[m].size() != dims_.size()) {
      throw DomainError("vector " + std::to_string(m) + " has " + std::to_string(vectors_[m].size()) + " factors, expected " +
                        std::to_string(dims_.size()));
    }
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      const auto& f = vectors_[m][i];
      if (f.size() != dims_[i]) {
        throw DomainError("vector " + std::to_string(m) + " site " + std::to_string(i) + " has wrong dimension");
      }
      if (std::abs(f.norm() - 1.0) > kTolerance) {
        throw DomainError("vector " + std::to_string(m) + " site " + std::to_string(i) + " is not unit norm");
      }
    }
  }
  for (std::size_t m = 0; m < vectors_.size(); ++m) {
    for (std::size_t n = m + 1; n < vectors_.size(); ++n) {
      if (std::abs(overlap(vectors_[m], vectors_[n])) > kTolerance) {
        throw DomainError("vectors " + std::to_string(m) + " and " + std::to_string(n) + " are not orthogonal");
      }
    }
  }
}

ProductVectorSet ProductVectorSet::build(std::vector<int> dims, std::vector<ProductVector> vectors) {
  ProductVectorSet s(std::move(dims), std::move(vectors));
  const std::size_t n = s.vectors_.size();
  s.labels_.assign(n, std::vector<SubsetLabel>(s.dims_.size()));
  s.subsets_.resize(s.dims_.size());
  for (std::size_t i = 0; i < s.dims_.size(); ++i) {
    auto& groups = s.subsets_[i];
    for (std::size_t m = 0; m < n; ++m) {
      const LocalVector& v = s.vectors_[m][i];
      bool found = false;
      for (std::size_t k = 0; k < groups.size() && !found; ++k) {
        for (std::size_t p = 0; p < groups[k].size(); ++p) {
          if (same_up_to_phase(v, groups[k][p])) {
            s.labels_[m][i] = {static_cast<int>(k), static_cast<int>(p)};
            found = true;
            break;
          }
        }
      }
      if (found) continue;
      std::vector<std::size_t> candidates;
      for (std::size_t k = 0; k < groups.size(); ++k) {
        const bool orth = std::all_of(groups[k].begin(), groups[k].end(),
                                      [&](const LocalVector& u) { return std::abs(u.dot(v)) <= kTolerance; });
        if (orth) candidates.push_back(k);
      }
      if (candidates.size() > 1) {
        throw DomainError("ambiguous local subsets at site " + std::to_string(i) + ": " + describe(v) +
                          " is orthogonal to both " + describe(groups[candidates[0]].front()) + " and " +
                          describe(groups[candidates[1]].front()) + ", which lie in different groups");
      }
      if (candidates.empty()) {
        groups.push_back({v});
        s.labels_[m][i] = {static_cast<int>(groups.size() - 1), 0};
      } else {
        auto& g = groups[candidates[0]];
        g.push_back(v);
        s.labels_[m][i] = {static_cast<int>(candidates[0]), static_cast<int>(g.size() - 1)};
      }
    }
  }
  return s;
}

ProductVectorSet ProductVectorSet::with_labels(std::vector<int> dims, std::vector<ProductVector> vectors, Labels labels) {
  ProductVectorSet s(std::move(dims), std::move(vectors));
  if (labels.size() != s.vectors_.size()) throw DomainError("one label row per vector required");
  s.subsets_.resize(s.dims_.size());
  for (std::size_t i = 0; i < s.dims_.size(); ++i) {
    auto& groups = s.subsets_[i];
    std::vector<std::vector<std::optional<LocalVector>>> slots;
    for (std::size_t m = 0; m < labels.size(); ++m) {
      if (labels[m].size() != s.dims_.size()) throw DomainError("one label per site required");
      const auto [k, p] = labels[m][i];
      if (k < 0 || p < 0 || p >= s.dims_[i]) throw DomainError("label out of range at site " + std::to_string(i));
      const auto uk = static_cast<std::size_t>(k), up = static_cast<std::size_t>(p);
      if (slots.size() <= uk) slots.resize(uk + 1);
      if (slots[uk].size() <= up) slots[uk].resize(up + 1);
      auto& slot = slots[uk][up];
      if (!slot) {
        slot = s.vectors_[m][i];
      } else if (!same_up_to_phase(*slot, s.vectors_[m][i])) {
        throw DomainError("label (" + std::to_string(k) + ", " + std::to_string(p) + ") at site " + std::to_string(i) +
                          " names two different vectors");
      }
    }
    for (std::size_t k = 0; k < slots.size(); ++k) {
      std::vector<LocalVector> g;
      for (std::size_t p = 0; p < slots[k].size(); ++p) {
        if (!slots[k][p]) {
          throw DomainError("subset " + std::to_string(k) + " at site " + std::to_string(i) + " has a gap at position " +
                            std::to_string(p));
        }
        g.push_back(*slots[k][p]);
      }
      if (g.empty()) throw DomainError("subset indices at site " + std::to_string(i) + " are not contiguous");
      for (std::size_t p = 0; p < g.size(); ++p) {
        for (std::size_t q = p + 1; q < g.size(); ++q) {
          if (std::abs(g[p].dot(g[q])) > kTolerance) {
            throw DomainError("subset " + std::to_string(k) + " at site " + std::to_string(i) + " is not orthogonal");
          }
        }
      }
      groups.push_back(std::move(g));
    }
  }
  s.labels_ = std::move(labels);
  return s;
}

ProductVectorSet ProductVectorSet::from(const RawProductSet& raw) {
  return raw.labels ? with_labels(raw.dims, raw.vectors, *raw.labels) : build(raw.dims, raw.vectors);
}

std::vector<LocalVector> ProductVectorSet::local_set(int site) const {
  std::vector<LocalVector> out;
  for (const auto& v : vectors_) {
    const auto& f = v.at(static_cast<std::size_t>(site));
    if (std::none_of(out.begin(), out.end(), [&](const LocalVector& u) { return same_up_to_phase(u, f); })) {
      out.push_back(f);
    }
  }
  return out;
}

Eigen::VectorXcd ProductVectorSet::full_vector(std::size_t m) const { return kron(vectors_.at(m)); }

bool check_local_independence(const ProductVectorSet& s) {
  for (int i = 0; i < s.sites(); ++i) {
    const auto& groups = s.local_subsets(i);
    for (std::size_t k = 0; k < groups.size(); ++k) {
      for (std::size_t l = k + 1; l < groups.size(); ++l) {
        for (const auto& u : groups[k]) {
          for (const auto& v : groups[l]) {
            if (std::abs(u.dot(v)) <= kTolerance) return false;
          }
        }
      }
    }
  }
  return true;
}

namespace {

// Orthonormal basis of the span of the local vectors assigned to one site.
struct SiteSpan {
  int dim = 0;
  std::vector<LocalVector> basis;

  bool push(const LocalVector& v) {
    LocalVector r = v;
    for (const auto& b : basis) r -= b.dot(r) * b;
    const double nr = r.norm();
    if (nr <= kTolerance) return false;
    basis.push_back(r / nr);
    return true;
  }
  [[nodiscard]] bool full() const { return static_cast<int>(basis.size()) >= dim; }

  // First standard basis vector with a nonzero residual, orthogonalized.
  [[nodiscard]] LocalVector complement() const {
    for (int j = 0; j < dim; ++j) {
      LocalVector r = LocalVector::Unit(dim, j);
      for (const auto& b : basis) r -= b.dot(r) * b;
      const double nr = r.norm();
      if (nr > 1e-6) return r / nr;
    }
    throw std::logic_error("no orthogonal complement in a rank-deficient span");
  }
};

struct Search {
  const ProductVectorSet& s;
  std::vector<SiteSpan> spans;
  std::vector<int> assignment;
  std::size_t visited = 0;

  explicit Search(const ProductVectorSet& set) : s(set), spans(static_cast<std::size_t>(set.sites())) {
    for (int i = 0; i < set.sites(); ++i) spans[static_cast<std::size_t>(i)].dim = set.dims()[static_cast<std::size_t>(i)];
    assignment.assign(set.size(), -1);
  }

  // Assigns members m.. in lexicographic order; true at the first assignment
  // keeping every site rank-deficient.
  bool dfs(std::size_t m) {
    ++visited;
    if (m == s.size()) return true;
    for (int i = 0; i < s.sites(); ++i) {
      auto& sp = spans[static_cast<std::size_t>(i)];
      const bool grew = sp.push(s.vectors()[m][static_cast<std::size_t>(i)]);
      if (!sp.full()) {
        assignment[m] = i;
        if (dfs(m + 1)) return true;
      }
      if (grew) sp.basis.pop_back();
    }
    return false;
  }

  // Replays a fixed prefix; false if it already fills a site.
  bool seed(const std::vector<int>& prefix) {
    for (std::size_t m = 0; m < prefix.size(); ++m) {
      auto& sp = spans[static_cast<std::size_t>(prefix[m])];
      sp.push(s.vectors()[m][static_cast<std::size_t>(prefix[m])]);
      if (sp.full()) return false;
      assignment[m] = prefix[m];
    }
    return true;
  }

  [[nodiscard]] ProductVector witness() const {
    ProductVector out;
    for (const auto& sp : spans) out.push_back(sp.complement());
    return out;
  }
};

}  // namespace

UpbVerdict is_upb(const ProductVectorSet& s, const UpbOptions& opts) {
  if (s.size() >= s.space_dimension()) {
    throw DomainError("a UPB needs fewer members than dim H (" + std::to_string(s.size()) + " >= " +
                      std::to_string(s.space_dimension()) + ")");
  }
  const auto n = static_cast<std::size_t>(s.sites());
  double total = 1.0;
  for (std::size_t m = 0; m < s.size(); ++m) total *= static_cast<double>(n);
  if (total > static_cast<double>(opts.cap)) {
    throw DomainError("assignment search of " + std::to_string(n) + "^" + std::to_string(s.size()) + " exceeds cap " +
                      std::to_string(opts.cap));
  }

  // Blocks are fixed prefixes in lexicographic order; the lowest successful
  // block holds the lowest successful assignment.
  std::size_t prefix_len = 0;
  std::size_t blocks = 1;
  while (prefix_len < s.size() && blocks < 256) {
    ++prefix_len;
    blocks *= n;
  }
  std::vector<std::optional<ProductVector>> found(blocks);
  std::vector<std::size_t> visited(blocks, 0);
  std::atomic<std::size_t> best{std::numeric_limits<std::size_t>::max()};
  const int threads = kernels::resolve_threads(opts.threads);

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::size_t b = 0; b < blocks; ++b) {
    std::vector<int> prefix(prefix_len);
    std::size_t rest = b;
    for (std::size_t j = prefix_len; j-- > 0;) {
      prefix[j] = static_cast<int>(rest % n);
      rest /= n;
    }
    Search search(s);
    if (!search.seed(prefix)) {
      visited[b] = 1;
      continue;
    }
    const bool ok = search.dfs(prefix_len);
    visited[b] = search.visited;
    if (ok) {
      found[b] = search.witness();
      std::size_t cur = best.load();
      while (b < cur && !best.compare_exchange_weak(cur, b)) {
      }
    }
  }

  UpbVerdict v;
  for (const auto c : visited) v.assignments_visited += c;
  const std::size_t hit = best.load();
  if (hit == std::numeric_limits<std::size_t>::max()) {
    v.is_upb = true;
    v.is_wupb = true;
    return v;
  }
  ProductVector w = *found[hit];
  for (std::size_t m = 0; m < s.size(); ++m) {
    if (std::abs(overlap(w, s.vectors()[m])) > kTolerance) {
      throw std::logic_error("extension candidate is not orthogonal to member " + std::to_string(m));
    }
  }
  v.extension_witness = std::move(w);
  v.is_wupb = is_wupb(s);
  return v;
}

bool is_wupb(const ProductVectorSet& s) {
  if (s.size() >= s.space_dimension()) {
    throw DomainError("a weak UPB needs fewer members than dim H (" + std::to_string(s.size()) + " >= " +
                      std::to_string(s.space_dimension()) + ")");
  }
  std::vector<std::vector<LocalVector>> sets;
  for (int i = 0; i < s.sites(); ++i) sets.push_back(s.local_set(i));
  // Per site and member: is the candidate orthogonal to that member's factor?
  const std::size_t n = sets.size();
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    bool orthogonal_to_all = true;
    for (const auto& v : s.vectors()) {
      bool orth = false;
      for (std::size_t i = 0; i < n && !orth; ++i) orth = std::abs(sets[i][idx[i]].dot(v[i])) <= kTolerance;
      if (!orth) {
        orthogonal_to_all = false;
        break;
      }
    }
    if (orthogonal_to_all) return false;
    std::size_t i = n;
    while (i-- > 0) {
      if (++idx[i] < sets[i].size()) break;
      idx[i] = 0;
    }
    if (i == std::numeric_limits<std::size_t>::max()) return true;
  }
}

BellExpression bell_from_set(const ProductVectorSet& s) {
  if (!check_local_independence(s)) throw DomainError("set lacks the local independence property");
  std::vector<int> inputs, outputs;
  for (int i = 0; i < s.sites(); ++i) {
    const auto& groups = s.local_subsets(i);
    inputs.push_back(static_cast<int>(groups.size()));
    std::size_t widest = 0;
    for (const auto& g : groups) widest = std::max(widest, g.size());
    outputs.push_back(static_cast<int>(widest));
  }
  const Scenario sc(inputs, outputs);
  std::vector<BellTerm> terms;
  std::vector<int> xs(static_cast<std::size_t>(s.sites())), as(xs.size());
  for (const auto& row : s.labels()) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      xs[i] = row[i].subset;
      as[i] = row[i].position;
    }
    terms.push_back(make_term(sc, as, xs, Rat(1)));
  }
  return BellExpression(sc, std::move(terms), Rat(1), "UPB inequality");
}

}  // namespace nqbell::upb
