#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "nqbell/box.hpp"
#include "nqbell/upb.hpp"

namespace nqbell::witness {

/// Dense operator on the tensor product of the given sites, site 0 most significant.
struct HermitianOp {
  std::vector<int> dims;
  Eigen::MatrixXcd matrix;

  HermitianOp(std::vector<int> d, Eigen::MatrixXcd m);
  [[nodiscard]] std::size_t dimension() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
};

/// Sum of |Psi_m><Psi_m| over the set.
HermitianOp projector_onto_span(const upb::ProductVectorSet& s);

struct SeeSawOptions {
  int starts = 200;
  std::uint64_t seed = 0;
  /// Stop a run once a sweep improves the objective by less than this.
  double tolerance = 1e-12;
  int max_sweeps = 10'000;
  int threads = 1;
};

struct EpsilonResult {
  double epsilon = 0.0;
  upb::ProductVector argmin;
  int best_start = 0;
  int sweeps = 0;
};

/// <phi|op|phi> for a product vector.
double expectation(const HermitianOp& op, const upb::ProductVector& phi);

/// Random unit product vector for a given start of a seeded run.
upb::ProductVector random_product_state(const std::vector<int>& dims, std::uint64_t seed, int start);

/// One alternating-minimization run. trace, when given, receives the objective
/// after every single-site update.
double seesaw_run(const HermitianOp& pi, upb::ProductVector& phi, const SeeSawOptions& opts,
                  std::vector<double>* trace = nullptr, int* sweeps = nullptr);

/// Smallest <phi|Pi|phi> found over product states (an upper bound on the true minimum).
EpsilonResult epsilon_min(const HermitianOp& pi, const SeeSawOptions& opts = {});

/// Exact minimum of <phi|Pi|phi> over product vectors whose factors come from
/// the set's local sets; the relevant epsilon for weak UPBs.
EpsilonResult epsilon_over_local_sets(const HermitianOp& pi, const upb::ProductVectorSet& s);

struct WitnessReport {
  double epsilon = 0.0;
  HermitianOp witness;
  HermitianOp state;
  double trace_w_rho = 0.0;
  /// Value of the set's inequality on measure_operator(W); absent without local independence.
  std::optional<double> bell_value;
};

/// W = (Pi - eps 1)/(|S| - eps D) and rho = (1 - Pi)/(D - |S|).
WitnessReport witness_and_state(const upb::ProductVectorSet& s, double eps);

/// Transposes the listed sites.
HermitianOp partial_transpose(const HermitianOp& op, const std::vector<int>& sites);
double min_eigenvalue(const HermitianOp& op);
/// Every bipartition has a positive partial transpose (min eigenvalue >= -1e-9).
bool is_ppt(const HermitianOp& state);

/// Completes each local subset to an orthonormal basis (standard-basis
/// candidates, Gram-Schmidt in index order) and returns the box
/// P(a|x) = tr(W (x)_i |b_{x_i a_i}><b_{x_i a_i}|). Outcomes per site = d_i.
NumericBox measure_operator(const HermitianOp& w, const upb::ProductVectorSet& s);

/// Completed local bases: bases[site][subset] has orthonormal columns.
std::vector<std::vector<Eigen::MatrixXcd>> completed_bases(const upb::ProductVectorSet& s);

}  // namespace nqbell::witness
