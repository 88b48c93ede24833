#pragma once

// Hot loops with a serial reference and an OpenMP variant. Both variants
// return identical results; ties always resolve to the smallest index.

#include <cstddef>
#include <vector>

#include "nqbell/box.hpp"

namespace nqbell::kernels {

struct VertexScan {
  Rat best;
  std::size_t argmax = 0;     ///< smallest strategy index attaining best
  std::size_t attaining = 0;  ///< number of vertices attaining best
};

/// Maximum of the expression over all deterministic vertices.
VertexScan vertex_scan_serial(const BellExpression& e, std::size_t cap = kDefaultVertexCap);
VertexScan vertex_scan_parallel(const BellExpression& e, std::size_t cap = kDefaultVertexCap, int threads = 0);

/// Strategy indices whose value equals bound, ascending.
std::vector<std::size_t> saturating_serial(const BellExpression& e, const Rat& bound,
                                           std::size_t cap = kDefaultVertexCap);
std::vector<std::size_t> saturating_parallel(const BellExpression& e, const Rat& bound,
                                             std::size_t cap = kDefaultVertexCap, int threads = 0);

/// Resolves a thread request: values < 1 mean "all available".
int resolve_threads(int requested);

}  // namespace nqbell::kernels
