#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "grid_oracle.hpp"
#include "nqbell/upb.hpp"
#include "nqbell/witness.hpp"

using namespace nqbell;
using namespace nqbell::witness;
using upb::ProductVectorSet;

namespace {

// Reference epsilon for Shifts with e = |+>, frozen from the grid oracle below.
constexpr double kShiftsEpsilon = 0.0814413464563;

ProductVectorSet shifts_h() { return ProductVectorSet::from(upb::families::shifts(upb::families::hadamard_plus())); }

}  // namespace

TEST_CASE("projector onto the span") {
  const ProductVectorSet s = shifts_h();
  const HermitianOp pi = projector_onto_span(s);
  CHECK(pi.dimension() == 8);
  CHECK((pi.matrix * pi.matrix).isApprox(pi.matrix, 1e-12));
  CHECK(std::abs(pi.matrix.trace() - std::complex<double>(4, 0)) < 1e-12);
  CHECK(pi.matrix.isApprox(pi.matrix.adjoint(), 1e-12));
  for (const auto& m : s.vectors()) CHECK(std::abs(expectation(pi, m) - 1.0) < 1e-12);
}

TEST_CASE("epsilon for Shifts agrees with an independent grid search") {
  const HermitianOp pi = projector_onto_span(shifts_h());
  const double oracle = testing::grid_oracle(pi.matrix);
  CHECK(std::abs(oracle - kShiftsEpsilon) < 1e-4);
  const EpsilonResult r = epsilon_min(pi);
  CHECK(std::abs(r.epsilon - kShiftsEpsilon) < 1e-4);
  CHECK(r.epsilon <= oracle + 1e-9);
  CHECK(std::abs(expectation(pi, r.argmin) - r.epsilon) < 1e-12);
  for (const auto& f : r.argmin) CHECK(std::abs(f.norm() - 1.0) < 1e-12);
}

TEST_CASE("seesaw objective never increases") {
  const HermitianOp pi = projector_onto_span(ProductVectorSet::from(upb::families::gen_shifts(3)));
  for (int start = 0; start < 20; ++start) {
    upb::ProductVector phi = random_product_state(pi.dims, 5, start);
    std::vector<double> trace;
    const double v = seesaw_run(pi, phi, {}, &trace);
    REQUIRE_FALSE(trace.empty());
    for (std::size_t k = 1; k < trace.size(); ++k) CHECK(trace[k] <= trace[k - 1] + 1e-12);
    CHECK(std::abs(trace.back() - v) < 1e-12);
  }
}

TEST_CASE("epsilon is a lower envelope of random product states") {
  const HermitianOp pi = projector_onto_span(shifts_h());
  const double eps = epsilon_min(pi).epsilon;
  for (int k = 0; k < 1000; ++k) CHECK(expectation(pi, random_product_state(pi.dims, 99, k)) >= eps - 1e-9);
}

TEST_CASE("seeded runs are reproducible and thread independent") {
  const HermitianOp pi = projector_onto_span(shifts_h());
  SeeSawOptions o;
  o.starts = 40;
  o.seed = 7;
  const EpsilonResult a = epsilon_min(pi, o);
  const EpsilonResult b = epsilon_min(pi, o);
  o.threads = 3;
  const EpsilonResult c = epsilon_min(pi, o);
  CHECK(a.epsilon == b.epsilon);
  CHECK(a.epsilon == c.epsilon);
  CHECK(a.best_start == c.best_start);
}

TEST_CASE("epsilon of trivial operators") {
  const HermitianOp id({2, 2, 2}, Eigen::MatrixXcd::Identity(8, 8));
  CHECK(std::abs(epsilon_min(id).epsilon - 1.0) < 1e-12);
  Eigen::MatrixXcd p0 = Eigen::MatrixXcd::Zero(8, 8);
  p0(0, 0) = 1;
  CHECK(std::abs(epsilon_min(HermitianOp({2, 2, 2}, p0)).epsilon) < 1e-12);
}

TEST_CASE("witness and bound entangled state") {
  const ProductVectorSet s = shifts_h();
  const double eps = epsilon_min(projector_onto_span(s)).epsilon;
  const WitnessReport w = witness_and_state(s, eps);
  const double n = 4, d = 8;
  CHECK(std::abs(w.trace_w_rho + eps / (n - eps * d)) < 1e-9);
  CHECK(w.trace_w_rho < 0);
  CHECK(std::abs(w.state.matrix.trace() - std::complex<double>(1, 0)) < 1e-12);
  CHECK(min_eigenvalue(w.state) > -1e-12);
  for (const auto& m : s.vectors()) CHECK(std::abs(expectation(w.state, m)) < 1e-12);
  CHECK(std::abs(w.witness.matrix.trace() - std::complex<double>(1, 0)) < 1e-9);
  // W is nonnegative on product states: its minimum there is (eps - eps)/(...) = 0.
  for (int k = 0; k < 200; ++k) CHECK(expectation(w.witness, random_product_state(w.witness.dims, 3, k)) > -1e-9);
  CHECK(is_ppt(w.state));
}

TEST_CASE("partial transpose") {
  const HermitianOp rho = witness_and_state(shifts_h(), kShiftsEpsilon).state;
  for (const std::vector<int>& sites : {std::vector<int>{0}, {1}, {2}, {0, 2}}) {
    CHECK(partial_transpose(partial_transpose(rho, sites), sites).matrix.isApprox(rho.matrix, 1e-14));
  }
  CHECK(partial_transpose(rho, {0, 1, 2}).matrix.isApprox(rho.matrix.transpose(), 1e-14));
  Eigen::Vector4cd bell(1, 0, 0, 1);
  bell /= std::sqrt(2.0);
  const HermitianOp b({2, 2}, bell * bell.adjoint());
  CHECK_FALSE(is_ppt(b));
  CHECK(std::abs(min_eigenvalue(partial_transpose(b, {1})) + 0.5) < 1e-12);
}

TEST_CASE("measured witness violates the set's inequality") {
  const ProductVectorSet s = shifts_h();
  const double eps = epsilon_min(projector_onto_span(s)).epsilon;
  const WitnessReport w = witness_and_state(s, eps);
  REQUIRE(w.bell_value.has_value());
  const double n = 4, d = 8;
  CHECK(std::abs(*w.bell_value - n * (1 - eps) / (n - eps * d)) < 1e-6);
  CHECK(std::abs(*w.bell_value - (1 - eps) / (1 - 2 * eps)) < 1e-9);
  CHECK(*w.bell_value > 1);
  const NumericBox box = measure_operator(w.witness, s);
  CHECK(is_nonsignaling(box).nonsignaling);
  CHECK(std::abs(bell_value(upb::bell_from_set(s), box) - *w.bell_value) < 1e-12);
}

TEST_CASE("completed local bases are orthonormal and contain the subsets") {
  const ProductVectorSet s = ProductVectorSet::from(upb::families::wupb_example());
  const auto bases = completed_bases(s);
  for (int i = 0; i < s.sites(); ++i) {
    const auto& subsets = s.local_subsets(i);
    REQUIRE(bases[static_cast<std::size_t>(i)].size() == subsets.size());
    for (std::size_t x = 0; x < subsets.size(); ++x) {
      const Eigen::MatrixXcd& b = bases[static_cast<std::size_t>(i)][x];
      CHECK(b.cols() == s.dims()[static_cast<std::size_t>(i)]);
      CHECK((b.adjoint() * b).isApprox(Eigen::MatrixXcd::Identity(b.cols(), b.cols()), 1e-12));
      for (std::size_t a = 0; a < subsets[x].size(); ++a) {
        CHECK(upb::same_up_to_phase(b.col(static_cast<Eigen::Index>(a)), subsets[x][a]));
      }
    }
  }
}

TEST_CASE("a density matrix never violates a UPB inequality") {
  const ProductVectorSet s = shifts_h();
  const auto e = upb::bell_from_set(s);
  for (int k = 0; k < 20; ++k) {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(8, 8);
    for (int r = 0; r < 4; ++r) {
      const upb::ProductVector v = random_product_state({2, 2, 2}, 17, 4 * k + r);
      g += upb::kron(v) * upb::kron(v).adjoint();
    }
    const HermitianOp rho({2, 2, 2}, g / g.trace().real());
    CHECK(bell_value(e, measure_operator(rho, s)) <= 1 + 1e-12);
  }
}

TEST_CASE("weak UPB uses the local-set minimum") {
  const ProductVectorSet s = ProductVectorSet::from(upb::families::wupb_example());
  const HermitianOp pi = projector_onto_span(s);
  const EpsilonResult loc = epsilon_over_local_sets(pi, s);
  CHECK(std::abs(loc.epsilon - 1.0 / 12) < 1e-12);
  const WitnessReport w = witness_and_state(s, loc.epsilon);
  REQUIRE(w.bell_value.has_value());
  CHECK(std::abs(*w.bell_value - 1.1) < 1e-9);
  CHECK(is_nonsignaling(measure_operator(w.witness, s)).nonsignaling);
}

TEST_CASE("generalized Shifts with three settings") {
  const ProductVectorSet s = ProductVectorSet::from(upb::families::gen_shifts(3));
  const double eps = epsilon_min(projector_onto_span(s)).epsilon;
  CHECK(eps > 1e-4);
  const WitnessReport w = witness_and_state(s, eps);
  REQUIRE(w.bell_value.has_value());
  CHECK(*w.bell_value > 1);
  CHECK(w.trace_w_rho < 0);
}
