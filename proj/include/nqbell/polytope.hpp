#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "nqbell/box.hpp"
#include "nqbell/simplex.hpp"

namespace nqbell {

struct PolytopeOptions {
  std::size_t vertex_cap = kDefaultVertexCap;
  /// Largest LP accepted by ns_max / tobl_max / local_membership.
  std::size_t max_lp_rows = 20'000;
  std::size_t max_lp_columns = 2'000'000;
  int threads = 1;
  /// Reduce LPs by party permutations and input relabelings that fix the expression.
  bool use_symmetry = true;
  lp::Options lp;
};

struct LocalPolytope {
  Scenario scenario;
  std::vector<Box> vertices;
};

LocalPolytope local_polytope(const Scenario& s, const PolytopeOptions& opts = {});

struct ClassicalResult {
  Rat value;
  DeterministicStrategy argmax;
  std::size_t argmax_index = 0;
  std::size_t attaining = 0;
};

ClassicalResult classical_max(const BellExpression& e, const PolytopeOptions& opts = {});

struct NsResult {
  Rat value;
  Box box;
  std::size_t lp_rows = 0;
  std::size_t lp_columns = 0;
  /// Symmetries of the expression used to shrink the LP (0 when none).
  std::size_t symmetry_generators = 0;
  lp::Stats stats;
};

/// Maximum over the no-signaling polytope, with an optimal box.
NsResult ns_max(const BellExpression& e, const PolytopeOptions& opts = {});

struct MembershipResult {
  bool is_local = false;
  /// Vertex weights by strategy index (local case), positive entries only.
  std::vector<std::pair<std::size_t, Rat>> weights;
  /// Expression that is <= 0 on every vertex and > 0 on the box (nonlocal case).
  std::optional<BellExpression> separating;
};

MembershipResult local_membership(const Box& b, const PolytopeOptions& opts = {});

struct ToblResult {
  Rat value;
  Box box;
  std::size_t lp_rows = 0;
  std::size_t lp_columns = 0;
  lp::Stats stats;
};

/// Maximum over tripartite boxes that are local across every bipartition with
/// at most one-way signaling inside the pair. Binary three-party scenarios only.
ToblResult tobl_max(const BellExpression& e, const PolytopeOptions& opts = {});

/// Affine dimension of the local polytope, by fraction-free elimination over
/// full table coordinates.
std::size_t polytope_dimension(const Scenario& s, const PolytopeOptions& opts = {});

/// Affine rank of an explicit point set (Bareiss over the table entries).
std::size_t affine_rank(const std::vector<std::vector<Rat>>& points);

struct FacetReport {
  bool is_tight = false;
  std::size_t saturating_vertex_count = 0;
  std::size_t affine_rank = 0;
  std::size_t polytope_dimension = 0;
  bool bound_attained = false;
};

/// Counts vertices on the face {value = bound} and checks it has codimension one.
/// Throws when bound is not the classical maximum.
FacetReport facet_check(const BellExpression& e, const Rat& bound, const PolytopeOptions& opts = {});

/// Streaming exact row reduction; tracks the linear rank of inserted vectors.
class RankTracker {
 public:
  explicit RankTracker(std::size_t dim);
  /// Inserts a 0/1 vector given by its support; returns true if the rank grew.
  bool insert_support(const std::vector<std::size_t>& support);
  bool insert(const std::vector<Rat>& v);
  [[nodiscard]] std::size_t rank() const noexcept { return rows_.size(); }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }

 private:
  bool absorb(std::vector<Rat> v);

  std::size_t dim_;
  std::vector<std::vector<Rat>> rows_;  // reduced echelon form, pivot entry 1
  std::vector<std::size_t> pivot_of_row_;
  std::vector<std::size_t> row_of_col_;  // npos for non-pivot columns
};

}  // namespace nqbell
