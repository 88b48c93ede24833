#pragma once

// Collins–Gisin style homogeneous coordinates.
//
// Each party contributes a local space of size 1 + m(d-1): slot 0 is the
// constant, slot 1 + x(d-1) + a holds the marginal P(a|x) for a < d-1. The
// joint space is the tensor product, party 0 most significant. A full table
// entry P(a|x) is a fixed signed 0/1 combination of joint coordinates, and
// every no-signaling box has exactly one joint coordinate vector with slot 0
// equal to 1.

#include <cstddef>
#include <utility>
#include <vector>

#include "nqbell/box.hpp"

namespace nqbell::cg {

std::vector<std::size_t> local_sizes(const Scenario& s);
/// Homogeneous dimension prod_i (1 + m_i(d_i - 1)).
std::size_t dimension(const Scenario& s);

inline std::size_t local_slot(int x, int a, int d) {
  return 1 + static_cast<std::size_t>(x) * static_cast<std::size_t>(d - 1) + static_cast<std::size_t>(a);
}

/// Nonzero (coordinate, +-1) pairs expressing P(a|x), sorted by coordinate.
std::vector<std::pair<std::size_t, int>> table_row(const Scenario& s, std::size_t x, std::size_t a);

/// Support of the 0/1 coordinate vector of a deterministic vertex, sorted.
std::vector<std::size_t> vertex_support(const Scenario& s, const DeterministicStrategy& st);

/// Full table of the box with coordinates p (p[0] must be 1).
Box box_from_coordinates(const Scenario& s, const std::vector<Rat>& p);

}  // namespace nqbell::cg
