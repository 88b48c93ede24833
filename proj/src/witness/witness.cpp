#include "nqbell/witness.hpp"

#include <limits>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "nqbell/kernels.hpp"

namespace nqbell::witness {

namespace {

constexpr double kHermitianTolerance = 1e-9;
constexpr double kPptTolerance = 1e-9;

std::size_t product(const std::vector<int>& dims) {
  std::size_t d = 1;
  for (const int di : dims) d *= static_cast<std::size_t>(di);
  return d;
}

// Columns: phi_j for j != site, the standard basis at site.
Eigen::MatrixXcd embed_site(const std::vector<int>& dims, const upb::ProductVector& phi, std::size_t site) {
  const int d = dims[site];
  Eigen::MatrixXcd v(static_cast<Eigen::Index>(product(dims)), d);
  upb::ProductVector f = phi;
  for (int b = 0; b < d; ++b) {
    f[site] = upb::LocalVector::Unit(d, b);
    v.col(b) = upb::kron(f);
  }
  return v;
}

}  // namespace

HermitianOp::HermitianOp(std::vector<int> d, Eigen::MatrixXcd m) : dims(std::move(d)), matrix(std::move(m)) {
  if (matrix.rows() != matrix.cols()) throw DomainError("operator must be square");
  if (static_cast<std::size_t>(matrix.rows()) != product(dims)) throw DomainError("operator size does not match site dimensions");
  if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > kHermitianTolerance) {
    throw DomainError("operator is not Hermitian");
  }
}

HermitianOp projector_onto_span(const upb::ProductVectorSet& s) {
  const auto d = static_cast<Eigen::Index>(s.space_dimension());
  Eigen::MatrixXcd pi = Eigen::MatrixXcd::Zero(d, d);
  for (std::size_t m = 0; m < s.size(); ++m) {
    const Eigen::VectorXcd v = s.full_vector(m);
    pi += v * v.adjoint();
  }
  return {s.dims(), std::move(pi)};
}

double expectation(const HermitianOp& op, const upb::ProductVector& phi) {
  const Eigen::VectorXcd v = upb::kron(phi);
  return v.dot(op.matrix * v).real();
}

upb::ProductVector random_product_state(const std::vector<int>& dims, std::uint64_t seed, int start) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(start)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> g;
  upb::ProductVector phi;
  for (const int d : dims) {
    upb::LocalVector v(d);
    for (int k = 0; k < d; ++k) {
      const double re = g(rng);
      const double im = g(rng);
      v[k] = {re, im};
    }
    phi.push_back(v.normalized());
  }
  return phi;
}

double seesaw_run(const HermitianOp& pi, upb::ProductVector& phi, const SeeSawOptions& opts, std::vector<double>* trace,
                  int* sweeps) {
  double value = expectation(pi, phi);
  if (trace) trace->push_back(value);
  int done = 0;
  for (; done < opts.max_sweeps; ++done) {
    const double before = value;
    for (std::size_t i = 0; i < phi.size(); ++i) {
      const Eigen::MatrixXcd v = embed_site(pi.dims, phi, i);
      const Eigen::MatrixXcd local = v.adjoint() * pi.matrix * v;
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(local);
      const double lowest = es.eigenvalues()(0);
      // Keep the current vector when the eigenvector would not improve it.
      if (lowest < value) {
        phi[i] = es.eigenvectors().col(0).normalized();
        value = lowest;
      }
      if (trace) trace->push_back(value);
    }
    if (before - value < opts.tolerance) {
      ++done;
      break;
    }
  }
  if (sweeps) *sweeps = done;
  return value;
}

EpsilonResult epsilon_min(const HermitianOp& pi, const SeeSawOptions& opts) {
  if (opts.starts < 1) throw DomainError("see-saw needs at least one start");
  const auto n = static_cast<std::size_t>(opts.starts);
  std::vector<double> values(n);
  std::vector<upb::ProductVector> states(n);
  std::vector<int> sweeps(n, 0);
  const int threads = kernels::resolve_threads(opts.threads);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int start = 0; start < opts.starts; ++start) {
    const auto us = static_cast<std::size_t>(start);
    states[us] = random_product_state(pi.dims, opts.seed, start);
    values[us] = seesaw_run(pi, states[us], opts, nullptr, &sweeps[us]);
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < n; ++k) {
    if (values[k] < values[best]) best = k;
  }
  return {values[best], states[best], static_cast<int>(best), sweeps[best]};
}

EpsilonResult epsilon_over_local_sets(const HermitianOp& pi, const upb::ProductVectorSet& s) {
  if (pi.dims != s.dims()) throw DomainError("operator and set live on different spaces");
  std::vector<std::vector<upb::LocalVector>> sets;
  for (int i = 0; i < s.sites(); ++i) sets.push_back(s.local_set(i));
  const std::size_t n = sets.size();
  std::vector<std::size_t> idx(n, 0);
  EpsilonResult best;
  best.epsilon = std::numeric_limits<double>::infinity();
  upb::ProductVector phi(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) phi[i] = sets[i][idx[i]];
    const double v = expectation(pi, phi);
    if (v < best.epsilon) {
      best.epsilon = v;
      best.argmin = phi;
    }
    std::size_t i = n;
    while (i-- > 0) {
      if (++idx[i] < sets[i].size()) break;
      idx[i] = 0;
    }
    if (i == std::numeric_limits<std::size_t>::max()) break;
  }
  return best;
}

WitnessReport witness_and_state(const upb::ProductVectorSet& s, double eps) {
  const double size = static_cast<double>(s.size());
  const double dim = static_cast<double>(s.space_dimension());
  if (!(eps > 0.0) || !(eps < size / dim)) {
    throw DomainError("epsilon must lie in (0, |S|/dim H) = (0, " + std::to_string(size / dim) + ")");
  }
  const HermitianOp pi = projector_onto_span(s);
  const auto d = static_cast<Eigen::Index>(s.space_dimension());
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
  HermitianOp w(s.dims(), (pi.matrix - eps * id) / (size - eps * dim));
  HermitianOp rho(s.dims(), (id - pi.matrix) / (dim - size));
  const double twr = (w.matrix * rho.matrix).trace().real();
  std::optional<double> value;
  if (upb::check_local_independence(s)) {
    const NumericBox box = measure_operator(w, s);
    value = bell_value(upb::bell_from_set(s).embedded(box.scenario()), box);
  }
  return {eps, std::move(w), std::move(rho), twr, value};
}

HermitianOp partial_transpose(const HermitianOp& op, const std::vector<int>& sites) {
  const std::size_t n = op.dims.size();
  std::vector<char> flip(n, 0);
  for (const int i : sites) {
    if (i < 0 || static_cast<std::size_t>(i) >= n) throw DomainError("site " + std::to_string(i) + " out of range");
    flip[static_cast<std::size_t>(i)] = 1;
  }
  std::vector<std::size_t> stride(n, 1);
  for (std::size_t i = n; i-- > 1;) stride[i - 1] = stride[i] * static_cast<std::size_t>(op.dims[i]);
  const auto dim = static_cast<std::size_t>(op.matrix.rows());
  Eigen::MatrixXcd out(op.matrix.rows(), op.matrix.cols());
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      std::size_t r2 = r, c2 = c;
      for (std::size_t i = 0; i < n; ++i) {
        if (!flip[i]) continue;
        const auto di = static_cast<std::size_t>(op.dims[i]);
        const std::size_t ri = r / stride[i] % di, ci = c / stride[i] % di;
        r2 = r2 - ri * stride[i] + ci * stride[i];
        c2 = c2 - ci * stride[i] + ri * stride[i];
      }
      out(static_cast<Eigen::Index>(r2), static_cast<Eigen::Index>(c2)) =
          op.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  return {op.dims, std::move(out)};
}

double min_eigenvalue(const HermitianOp& op) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.matrix, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

bool is_ppt(const HermitianOp& state) {
  const std::size_t n = state.dims.size();
  if (n < 2) return true;
  // Subsets of the first n-1 sites cover each bipartition once.
  for (std::size_t mask = 1; mask < (std::size_t{1} << (n - 1)); ++mask) {
    std::vector<int> sites;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (mask >> i & 1u) sites.push_back(static_cast<int>(i));
    }
    if (min_eigenvalue(partial_transpose(state, sites)) < -kPptTolerance) return false;
  }
  return true;
}

std::vector<std::vector<Eigen::MatrixXcd>> completed_bases(const upb::ProductVectorSet& s) {
  std::vector<std::vector<Eigen::MatrixXcd>> out;
  for (int i = 0; i < s.sites(); ++i) {
    const int d = s.dims()[static_cast<std::size_t>(i)];
    std::vector<Eigen::MatrixXcd> site;
    for (const auto& subset : s.local_subsets(i)) {
      Eigen::MatrixXcd b(d, d);
      int filled = 0;
      for (const auto& v : subset) b.col(filled++) = v;
      for (int k = 0; k < d && filled < d; ++k) {
        upb::LocalVector r = upb::LocalVector::Unit(d, k);
        for (int j = 0; j < filled; ++j) r -= b.col(j).dot(r) * b.col(j);
        const double nr = r.norm();
        if (nr > 1e-6) b.col(filled++) = r / nr;
      }
      if (filled != d) throw DomainError("could not complete a local basis at site " + std::to_string(i));
      site.push_back(std::move(b));
    }
    out.push_back(std::move(site));
  }
  return out;
}

NumericBox measure_operator(const HermitianOp& w, const upb::ProductVectorSet& s) {
  if (w.dims != s.dims()) throw DomainError("operator and set live on different spaces");
  const auto bases = completed_bases(s);
  std::vector<int> inputs, outputs;
  for (int i = 0; i < s.sites(); ++i) {
    inputs.push_back(static_cast<int>(bases[static_cast<std::size_t>(i)].size()));
    outputs.push_back(s.dims()[static_cast<std::size_t>(i)]);
  }
  const Scenario sc(inputs, outputs);
  std::vector<double> table(sc.table_size());
  for (std::size_t x = 0; x < sc.input_count(); ++x) {
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Ones(1, 1);
    for (int i = 0; i < s.sites(); ++i) {
      const Eigen::MatrixXcd& b = bases[static_cast<std::size_t>(i)][static_cast<std::size_t>(sc.input_of(x, i))];
      Eigen::MatrixXcd next(u.rows() * b.rows(), u.cols() * b.cols());
      for (Eigen::Index r = 0; r < u.rows(); ++r) {
        for (Eigen::Index c = 0; c < u.cols(); ++c) {
          next.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = u(r, c) * b;
        }
      }
      u = std::move(next);
    }
    const Eigen::MatrixXcd m = u.adjoint() * w.matrix * u;
    for (std::size_t a = 0; a < sc.outcome_count(); ++a) table[sc.entry(x, a)] = m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)).real();
  }
  return {sc, std::move(table)};
}

}  // namespace nqbell::witness
