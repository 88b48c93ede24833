#include <cmath>
#include <numbers>
#include <string>

#include "nqbell/upb.hpp"

namespace nqbell::upb::families {

namespace {

LocalVector basis_vector(int d, int k) { return LocalVector::Unit(d, k); }

LocalVector unit(const LocalVector& v) {
  const double n = v.norm();
  if (n <= kTolerance) throw DomainError("zero local vector");
  return v / n;
}

// A qubit vector distinct (up to phase) from |0> and |1>.
void require_nondegenerate(const LocalVector& e, const std::string& what) {
  if (e.size() != 2) throw DomainError(what + " must lie in C^2");
  if (std::abs(e[0]) <= kTolerance || std::abs(e[1]) <= kTolerance) {
    throw DomainError(what + " coincides with a standard basis vector");
  }
}

}  // namespace

LocalVector hadamard_plus() {
  LocalVector v(2);
  v << 1.0, 1.0;
  return v / std::sqrt(2.0);
}

Eigen::MatrixXcd fourier_basis(int d) {
  if (d < 1) throw DomainError("dimension must be positive");
  Eigen::MatrixXcd f(d, d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>((j * k) % d) / static_cast<double>(d);
      f(k, j) = std::polar(scale, phase);
    }
  }
  return f;
}

RawProductSet shifts(const std::vector<LocalVector>& e) {
  if (e.size() != 3) throw DomainError("shifts needs one vector per site (3)");
  std::vector<LocalVector> es, bars;
  for (const auto& v : e) {
    if (v.size() != 2) throw DomainError("shifts vectors must lie in C^2");
    es.push_back(unit(v));
    bars.push_back(qubit_complement(es.back()));
  }
  const LocalVector k0 = basis_vector(2, 0), k1 = basis_vector(2, 1);
  RawProductSet r;
  r.dims = {2, 2, 2};
  r.vectors = {{k0, k0, k0}, {k1, bars[1], es[2]}, {es[0], k1, bars[2]}, {bars[0], es[1], k1}};
  r.labels = Labels{{{0, 0}, {0, 0}, {0, 0}},
                    {{0, 1}, {1, 1}, {1, 0}},
                    {{1, 0}, {0, 1}, {1, 1}},
                    {{1, 1}, {1, 0}, {0, 1}}};
  return r;
}

RawProductSet shifts(const LocalVector& e) { return shifts(std::vector<LocalVector>{e, e, e}); }

RawProductSet gen_shifts(int k, const std::vector<LocalVector>& bases) {
  if (k < 2) throw DomainError("generalized shifts needs k >= 2");
  if (bases.size() != static_cast<std::size_t>(k - 1)) {
    throw DomainError("generalized shifts needs k - 1 = " + std::to_string(k - 1) + " qubit bases");
  }
  std::vector<LocalVector> es, bars;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    const LocalVector e = unit(bases[i]);
    require_nondegenerate(e, "basis vector e_" + std::to_string(i + 1));
    for (std::size_t j = 0; j < es.size(); ++j) {
      const double ov = std::abs(es[j].dot(e));
      if (ov > 1.0 - kTolerance || ov < kTolerance) {
        throw DomainError("bases e_" + std::to_string(j + 1) + " and e_" + std::to_string(i + 1) + " coincide");
      }
    }
    es.push_back(e);
    bars.push_back(qubit_complement(e));
  }
  const int n = 2 * k - 1;
  // Pattern |1 e_1 .. e_{k-1} e'_{k-1} .. e'_1>
  std::vector<LocalVector> pattern;
  std::vector<SubsetLabel> plabel;
  pattern.push_back(basis_vector(2, 1));
  plabel.push_back({0, 1});
  for (int i = 1; i <= k - 1; ++i) {
    pattern.push_back(es[static_cast<std::size_t>(i - 1)]);
    plabel.push_back({i, 0});
  }
  for (int i = k - 1; i >= 1; --i) {
    pattern.push_back(bars[static_cast<std::size_t>(i - 1)]);
    plabel.push_back({i, 1});
  }
  RawProductSet r;
  r.dims.assign(static_cast<std::size_t>(n), 2);
  r.vectors.emplace_back(static_cast<std::size_t>(n), basis_vector(2, 0));
  Labels labels;
  labels.emplace_back(static_cast<std::size_t>(n), SubsetLabel{0, 0});
  for (int shift = 0; shift < n; ++shift) {
    ProductVector v;
    std::vector<SubsetLabel> l;
    for (int site = 0; site < n; ++site) {
      const auto src = static_cast<std::size_t>(((site - shift) % n + n) % n);
      v.push_back(pattern[src]);
      l.push_back(plabel[src]);
    }
    r.vectors.push_back(std::move(v));
    labels.push_back(std::move(l));
  }
  r.labels = std::move(labels);
  return r;
}

RawProductSet gen_shifts(int k) {
  if (k < 2) throw DomainError("generalized shifts needs k >= 2");
  std::vector<LocalVector> bases;
  for (int i = 1; i <= k - 1; ++i) {
    const double theta = std::numbers::pi * static_cast<double>(i) / static_cast<double>(2 * k);
    LocalVector e(2);
    e << std::cos(theta), std::sin(theta);
    bases.push_back(e);
  }
  return gen_shifts(k, bases);
}

RawProductSet niset_cerf(int n, int d, const Eigen::MatrixXcd& basis) {
  if (n < 3) throw DomainError("Niset-Cerf family needs N >= 3");
  if (d < n - 1) throw DomainError("Niset-Cerf family needs d >= N - 1");
  if (basis.rows() != d || basis.cols() != d) throw DomainError("second basis must be d x d");
  const Eigen::MatrixXcd gram = basis.adjoint() * basis;
  if ((gram - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() > kTolerance) {
    throw DomainError("second basis is not orthonormal");
  }
  bool standard = true;
  for (int j = 0; j < d && standard; ++j) {
    bool matches = false;
    for (int t = 0; t < d && !matches; ++t) matches = same_up_to_phase(basis.col(j), basis_vector(d, t));
    standard = matches;
  }
  if (standard) throw DomainError("second basis must differ from the standard one");

  const auto un = static_cast<std::size_t>(n);
  RawProductSet r;
  r.dims.assign(un, d);
  Labels labels;
  r.vectors.emplace_back(un, LocalVector(basis.col(d - 1)));
  labels.emplace_back(un, SubsetLabel{1, d - 1});
  for (int shift = 0; shift < n; ++shift) {
    for (int j = 0; j <= d - 2; ++j) {
      ProductVector v(un);
      std::vector<SubsetLabel> l(un);
      for (int p = 0; p < n; ++p) {
        const auto site = static_cast<std::size_t>((p + shift) % n);
        if (p < n - 1) {
          v[site] = basis_vector(d, p);
          l[site] = {0, p};
        } else {
          v[site] = basis.col(j);
          l[site] = {1, j};
        }
      }
      r.vectors.push_back(std::move(v));
      labels.push_back(std::move(l));
    }
  }
  r.labels = std::move(labels);
  return r;
}

RawProductSet niset_cerf(int n, int d) { return niset_cerf(n, d, fourier_basis(d)); }

RawProductSet wupb_example() {
  const LocalVector e = hadamard_plus(), eb = qubit_complement(e);
  const Eigen::MatrixXcd f = fourier_basis(3);
  const LocalVector f0 = f.col(0), f1 = f.col(1), f2 = f.col(2);
  const LocalVector z0 = basis_vector(2, 0), z1 = basis_vector(2, 1);
  const LocalVector t0 = basis_vector(3, 0), t1 = basis_vector(3, 1), t2 = basis_vector(3, 2);
  RawProductSet r;
  r.dims = {2, 2, 3};
  r.vectors = {{z0, z0, t0}, {z1, eb, f0}, {e, z1, f1}, {eb, e, t1}, {eb, e, t2}, {e, z1, f2}};
  r.labels = Labels{{{0, 0}, {0, 0}, {0, 0}}, {{0, 1}, {1, 1}, {1, 0}}, {{1, 0}, {0, 1}, {1, 1}},
                    {{1, 1}, {1, 0}, {0, 1}}, {{1, 1}, {1, 0}, {0, 2}}, {{1, 0}, {0, 1}, {1, 2}}};
  return r;
}

RawProductSet tiles() {
  auto v3 = [](double a, double b, double c) {
    LocalVector v(3);
    v << a, b, c;
    return LocalVector(v.normalized());
  };
  RawProductSet r;
  r.dims = {3, 3};
  r.vectors = {{v3(1, 0, 0), v3(1, -1, 0)},
               {v3(0, 0, 1), v3(0, 1, -1)},
               {v3(1, -1, 0), v3(0, 0, 1)},
               {v3(0, 1, -1), v3(1, 0, 0)},
               {v3(1, 1, 1), v3(1, 1, 1)}};
  return r;
}

}  // namespace nqbell::upb::families
