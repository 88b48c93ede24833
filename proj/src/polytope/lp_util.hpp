#pragma once

#include <limits>
#include <stdexcept>
#include <string>

#include "nqbell/kernels.hpp"
#include "nqbell/polytope.hpp"

namespace nqbell::detail {

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

inline void check_lp_size(const char* what, std::size_t rows, std::size_t cols, const PolytopeOptions& o) {
  if (rows > o.max_lp_rows || cols > o.max_lp_columns) {
    throw DomainError(std::string(what) + " LP too large: " + std::to_string(rows) + " rows x " + std::to_string(cols) +
                      " columns (limits " + std::to_string(o.max_lp_rows) + " x " + std::to_string(o.max_lp_columns) +
                      ")");
  }
}

inline lp::Options lp_options(const PolytopeOptions& o) {
  lp::Options l = o.lp;
  if (l.threads < 1) l.threads = kernels::resolve_threads(o.threads);
  return l;
}

inline void require_verified(const lp::Result& r, const char* what) {
  if (r.status != lp::Status::optimal) {
    throw DomainError(std::string(what) + " LP ended with status " + lp::to_string(r.status));
  }
  if (!r.verified) throw std::logic_error(std::string(what) + " LP optimum failed exact verification");
}

}  // namespace nqbell::detail
