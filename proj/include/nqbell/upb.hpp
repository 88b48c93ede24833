#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "nqbell/box.hpp"

namespace nqbell::upb {

using Complex = std::complex<double>;
/// Unit vector in C^d.
using LocalVector = Eigen::VectorXcd;
/// One local vector per site.
using ProductVector = std::vector<LocalVector>;

inline constexpr double kTolerance = 1e-9;
inline constexpr std::size_t kDefaultAssignmentCap = 10'000'000;

/// Setting (which local subset) and outcome (position inside it) of a local vector.
struct SubsetLabel {
  int subset = 0;
  int position = 0;
  friend bool operator==(const SubsetLabel&, const SubsetLabel&) = default;
};

/// labels[m][site]
using Labels = std::vector<std::vector<SubsetLabel>>;

/// Vectors as produced by a generator or read from a file, before subsets are fixed.
struct RawProductSet {
  std::vector<int> dims;
  std::vector<ProductVector> vectors;
  std::optional<Labels> labels;
};

/// Orthogonal set of product vectors with its per-site partition into
/// mutually orthogonal local subsets.
class ProductVectorSet {
 public:
  /// Infers subsets: deduplicates local vectors up to phase, then groups them
  /// greedily in first-appearance order. Throws DomainError when a vector is
  /// orthogonal to every member of two existing groups.
  static ProductVectorSet build(std::vector<int> dims, std::vector<ProductVector> vectors);
  /// Uses the given labels; equal labels must carry equal vectors up to phase.
  static ProductVectorSet with_labels(std::vector<int> dims, std::vector<ProductVector> vectors, Labels labels);
  static ProductVectorSet from(const RawProductSet& raw);

  [[nodiscard]] const std::vector<int>& dims() const noexcept { return dims_; }
  [[nodiscard]] int sites() const noexcept { return static_cast<int>(dims_.size()); }
  [[nodiscard]] std::size_t size() const noexcept { return vectors_.size(); }
  /// dim H
  [[nodiscard]] std::size_t space_dimension() const noexcept;
  [[nodiscard]] const std::vector<ProductVector>& vectors() const noexcept { return vectors_; }
  [[nodiscard]] const Labels& labels() const noexcept { return labels_; }
  /// Deduplicated local vectors of one site, in first-appearance order.
  [[nodiscard]] std::vector<LocalVector> local_set(int site) const;
  /// subsets[k][position]
  [[nodiscard]] const std::vector<std::vector<LocalVector>>& local_subsets(int site) const {
    return subsets_.at(static_cast<std::size_t>(site));
  }
  [[nodiscard]] Eigen::VectorXcd full_vector(std::size_t m) const;

 private:
  ProductVectorSet(std::vector<int> dims, std::vector<ProductVector> vectors);
  void validate() const;

  std::vector<int> dims_;
  std::vector<ProductVector> vectors_;
  Labels labels_;
  std::vector<std::vector<std::vector<LocalVector>>> subsets_;
};

/// Tensor product, site 0 most significant.
Eigen::VectorXcd kron(const ProductVector& v);
/// prod_i <u_i|v_i>
Complex overlap(const ProductVector& u, const ProductVector& v);
/// |<u|v>| > 1 - tol for unit vectors.
bool same_up_to_phase(const LocalVector& u, const LocalVector& v, double tol = kTolerance);
/// Unit vector orthogonal to a qubit vector.
LocalVector qubit_complement(const LocalVector& e);

bool check_local_independence(const ProductVectorSet& s);

struct UpbVerdict {
  bool is_upb = false;
  bool is_wupb = false;
  /// Present iff !is_upb; orthogonal to every member within kTolerance.
  std::optional<ProductVector> extension_witness;
  std::size_t assignments_visited = 0;
};

struct UpbOptions {
  std::size_t cap = kDefaultAssignmentCap;
  int threads = 1;
};

/// Exhaustive search over assignments of members to sites; an assignment
/// leaving every site rank-deficient yields an orthogonal product vector.
UpbVerdict is_upb(const ProductVectorSet& s, const UpbOptions& opts = {});
/// Only product vectors built from the local sets are candidates.
bool is_wupb(const ProductVectorSet& s);

/// One unit term per member: setting = subset index, outcome = position.
/// Classical bound 1. Throws when local independence fails.
BellExpression bell_from_set(const ProductVectorSet& s);

namespace families {

/// |000>, |1 e' e>, |e 1 e'>, |e' e 1> with e' orthogonal to e; one e per site.
RawProductSet shifts(const std::vector<LocalVector>& e);
RawProductSet shifts(const LocalVector& e);
/// N = 2k - 1 qubits, 2k vectors; bases[i] is e_{i+1}, and must hold k - 1 vectors.
RawProductSet gen_shifts(int k, const std::vector<LocalVector>& bases);
RawProductSet gen_shifts(int k);
/// (C^d)^N with N(d-1)+1 vectors; basis columns are e_0..e_{d-1}.
RawProductSet niset_cerf(int n, int d, const Eigen::MatrixXcd& basis);
/// Uses the Fourier basis.
RawProductSet niset_cerf(int n, int d);
/// Six vectors in C^2 x C^2 x C^3 forming a weak UPB that is not a UPB.
RawProductSet wupb_example();
/// Five two-qutrit vectors; no labels, so subset inference is ambiguous.
RawProductSet tiles();
/// (|0> + |1>)/sqrt 2
LocalVector hadamard_plus();
Eigen::MatrixXcd fourier_basis(int d);

}  // namespace families

}  // namespace nqbell::upb
