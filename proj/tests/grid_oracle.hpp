#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "nqbell/upb.hpp"

// Independent minimum of <phi|Pi|phi> over three-qubit product states.
namespace nqbell::testing {

inline upb::LocalVector bloch(double theta, double phi) {
  upb::LocalVector v(2);
  v << std::cos(theta / 2), std::polar(1.0, phi) * std::sin(theta / 2);
  return v;
}

// min over the third qubit of <a b c|Pi|a b c>: the smallest eigenvalue of the
// 2x2 operator left after contracting the first two sites.
inline double third_site_min(const Eigen::MatrixXcd& pi, const upb::LocalVector& a, const upb::LocalVector& b) {
  Eigen::Vector4cd ab;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) ab[2 * i + j] = a[i] * b[j];
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      m += std::conj(ab[r]) * ab[c] * pi.block<2, 2>(2 * r, 2 * c);
  const double tr = m.trace().real() / 2;
  const double det = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real();
  return tr - std::sqrt(std::max(0.0, tr * tr - det));
}

inline double oracle_value(const Eigen::MatrixXcd& pi, const std::array<double, 4>& t) {
  return third_site_min(pi, bloch(t[0], t[1]), bloch(t[2], t[3]));
}

// Grid over four Bloch angles followed by pattern-search refinement.
inline double grid_oracle(const Eigen::MatrixXcd& pi) {
  constexpr int kSteps = 50;
  const double pi_c = std::numbers::pi;
  std::array<double, 4> best{};
  double best_v = 2.0;
  for (int i = 0; i <= kSteps; ++i)
    for (int j = 0; j < kSteps; ++j)
      for (int k = 0; k <= kSteps; ++k)
        for (int l = 0; l < kSteps; ++l) {
          const std::array<double, 4> t{pi_c * i / kSteps, 2 * pi_c * j / kSteps, pi_c * k / kSteps,
                                        2 * pi_c * l / kSteps};
          const double v = oracle_value(pi, t);
          if (v < best_v) {
            best_v = v;
            best = t;
          }
        }
  for (double step = 0.1; step > 1e-10; step /= 2) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (std::size_t d = 0; d < 4; ++d) {
        for (const double s : {step, -step}) {
          auto t = best;
          t[d] += s;
          const double v = oracle_value(pi, t);
          if (v < best_v - 1e-15) {
            best_v = v;
            best = t;
            moved = true;
          }
        }
      }
    }
  }
  return best_v;
}

}  // namespace nqbell::testing
