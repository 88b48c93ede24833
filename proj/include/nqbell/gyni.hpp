#pragma once

#include "nqbell/box.hpp"

namespace nqbell {

/// q(x) = 2^{1-N} on strings whose first N' bits have even parity
/// (N' = N for odd N, N - 1 for even N), zero elsewhere.
InputDistribution parity_promise(int n);
InputDistribution uniform_inputs(int n);
/// All weight on one input string.
InputDistribution point_mass(int n, std::size_t x);

enum class GyniForm {
  weighted,  ///< coefficient q(x), bound omega_c
  sum,       ///< coefficients scaled by 2^{N-1}
};

struct GyniGame {
  int n = 0;
  InputDistribution q;
  BellExpression expression;
};

/// Guess-your-neighbour's-input: party i must output x_{i+1} (cyclically).
GyniGame gyni_game(int n, const InputDistribution& q, GyniForm form = GyniForm::weighted);

/// max_x q(x) + q(complement of x).
Rat classical_bound_formula(const InputDistribution& q);

/// Structural check that quantum and classical maxima coincide. Terms are
/// orthogonal when some party sees the same input and answers differently.
/// Holds when the only non-orthogonal pairs are complementary-input pairs, or
/// when all terms are pairwise orthogonal with unit coefficients.
bool orthogonality_certificate(const BellExpression& e);

}  // namespace nqbell
