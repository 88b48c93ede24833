#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nqbell/rational.hpp"

namespace nqbell::lp {

enum class Sense { maximize, minimize };
enum class RowType { le, ge, eq };
enum class Status { optimal, infeasible, unbounded, iteration_limit };

std::string to_string(Status s);

struct Row {
  std::vector<std::pair<std::size_t, Rat>> coeffs;
  RowType type = RowType::le;
  Rat rhs;
  std::string name;
};

struct Stats {
  std::size_t iterations = 0;
  std::size_t phase1_iterations = 0;
  std::size_t degenerate_pivots = 0;
  std::size_t bland_pivots = 0;
};

/// Linear program over exact rationals. Variables default to [0, +inf).
struct Problem {
  Sense sense = Sense::maximize;
  std::vector<Rat> objective;
  std::vector<std::optional<Rat>> lower;
  std::vector<std::optional<Rat>> upper;
  std::vector<std::string> var_names;
  std::vector<Row> rows;

  std::size_t add_variable(Rat cost, std::optional<Rat> lo = Rat(0), std::optional<Rat> hi = std::nullopt,
                           std::string name = {});
  std::size_t add_row(std::vector<std::pair<std::size_t, Rat>> coeffs, RowType type, Rat rhs, std::string name = {});
  [[nodiscard]] std::size_t num_vars() const noexcept { return objective.size(); }
  [[nodiscard]] std::size_t num_rows() const noexcept { return rows.size(); }
};

struct Options {
  std::size_t max_iterations = 0;  ///< 0 means unlimited
  std::size_t pricing_block = 0;   ///< 0 picks a block from the column count
  std::size_t bland_after = 5000;  ///< degenerate pivots in a row before switching to Bland's rule
  int threads = 1;
  std::function<void(std::size_t iteration, int phase)> progress;
};

struct Result {
  Status status = Status::iteration_limit;
  Rat objective;
  std::vector<Rat> x;      ///< primal point in original variables
  std::vector<Rat> duals;  ///< d(objective)/d(rhs) per original row
  /// Infeasible: y with y^T A <= 0 on every nonnegative column of the internal
  /// standard form and y^T b > 0, reported per original row.
  std::vector<Rat> farkas;
  /// Unbounded: improving direction in original variables.
  std::vector<Rat> ray;
  Stats stats;
  /// Exact check of primal feasibility, dual feasibility and equal objectives.
  bool verified = false;
};

Result solve(const Problem& p, const Options& opts = {});
/// Any point satisfying the constraints, or nullopt if none exists.
std::optional<std::vector<Rat>> feasible_point(const Problem& p, const Options& opts = {});
/// Plain-text listing; rationals as p/q.
std::string dump(const Problem& p);

}  // namespace nqbell::lp
