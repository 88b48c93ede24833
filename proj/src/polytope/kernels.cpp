#include "nqbell/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>

namespace nqbell::kernels {

int resolve_threads(int requested) { return requested >= 1 ? requested : omp_get_max_threads(); }

namespace {

// A term matches a strategy when every listed digit has the listed value.
// Coefficients are scaled to integers by the common denominator.
struct Compiled {
  std::vector<int> radix;                // per digit, most significant first
  std::vector<std::vector<std::pair<int, int>>> need;  // per term: (digit, value)
  std::vector<std::int64_t> coef;        // scaled, valid when small
  std::vector<Rat> coef_exact;           // scaled, always valid
  Rat denominator{1};
  bool small = true;
  std::size_t count = 0;
};

Compiled compile(const BellExpression& e, std::size_t cap) {
  const Scenario& s = e.scenario();
  Compiled c;
  c.count = strategy_count(s, cap);
  std::vector<int> offset;
  for (int p = 0; p < s.parties(); ++p) {
    offset.push_back(static_cast<int>(c.radix.size()));
    for (int x = 0; x < s.inputs(p); ++x) c.radix.push_back(s.outputs(p));
  }
  for (const auto& t : e.terms()) c.denominator = lcm(c.denominator, t.coefficient.denominator());
  constexpr long double kLimit = static_cast<long double>(std::numeric_limits<std::int64_t>::max() / 4);
  long double total = 0;
  for (const auto& t : e.terms()) {
    std::vector<std::pair<int, int>> need;
    for (int p = 0; p < s.parties(); ++p) {
      need.emplace_back(offset[static_cast<std::size_t>(p)] + s.input_of(t.x, p), s.outcome_of(t.a, p));
    }
    c.need.push_back(std::move(need));
    Rat scaled = t.coefficient * c.denominator;
    total += std::abs(static_cast<long double>(scaled.to_double()));
    if (!scaled.is_inline() || total > kLimit) c.small = false;
    c.coef.push_back(c.small ? *scaled.to_int64() : 0);
    c.coef_exact.push_back(std::move(scaled));
  }
  return c;
}

void decode(const Compiled& c, std::size_t index, std::vector<int>& digits) {
  digits.assign(c.radix.size(), 0);
  for (std::size_t i = c.radix.size(); i-- > 0;) {
    const auto r = static_cast<std::size_t>(c.radix[i]);
    digits[i] = static_cast<int>(index % r);
    index /= r;
  }
}

void advance(const Compiled& c, std::vector<int>& digits) {
  for (std::size_t i = c.radix.size(); i-- > 0;) {
    if (++digits[i] < c.radix[i]) return;
    digits[i] = 0;
  }
}

bool matches(const std::vector<std::pair<int, int>>& need, const std::vector<int>& digits) {
  for (const auto& [d, v] : need) {
    if (digits[static_cast<std::size_t>(d)] != v) return false;
  }
  return true;
}

// Scaled value of the vertex with the given digits.
template <class V>
V value(const Compiled& c, const std::vector<int>& digits) {
  V v{};
  for (std::size_t t = 0; t < c.need.size(); ++t) {
    if (!matches(c.need[t], digits)) continue;
    if constexpr (std::is_same_v<V, std::int64_t>) {
      v += c.coef[t];
    } else {
      v += c.coef_exact[t];
    }
  }
  return v;
}

template <class V>
struct Partial {
  std::optional<V> best;
  std::size_t argmax = 0;
  std::size_t attaining = 0;

  void offer(const V& v, std::size_t idx) {
    if (!best || *best < v) {
      best = v;
      argmax = idx;
      attaining = 1;
    } else if (*best == v) {
      ++attaining;
      argmax = std::min(argmax, idx);
    }
  }

  void merge(const Partial& o) {
    if (!o.best) return;
    if (!best || *best < *o.best) {
      *this = o;
    } else if (*best == *o.best) {
      attaining += o.attaining;
      argmax = std::min(argmax, o.argmax);
    }
  }
};

template <class V>
Partial<V> scan_range(const Compiled& c, std::size_t lo, std::size_t hi) {
  Partial<V> part;
  if (lo >= hi) return part;
  std::vector<int> digits;
  decode(c, lo, digits);
  for (std::size_t i = lo; i < hi; ++i) {
    part.offer(value<V>(c, digits), i);
    advance(c, digits);
  }
  return part;
}

template <class V>
VertexScan finish(const Compiled& c, const Partial<V>& p) {
  VertexScan r;
  if constexpr (std::is_same_v<V, std::int64_t>) {
    r.best = Rat(*p.best) / c.denominator;
  } else {
    r.best = *p.best / c.denominator;
  }
  r.argmax = p.argmax;
  r.attaining = p.attaining;
  return r;
}

template <class V>
VertexScan scan_parallel(const Compiled& c, int threads) {
  const int nt = resolve_threads(threads);
  std::vector<Partial<V>> parts(static_cast<std::size_t>(nt));
#pragma omp parallel num_threads(nt)
  {
    const auto t = static_cast<std::size_t>(omp_get_thread_num());
    const auto n = static_cast<std::size_t>(omp_get_num_threads());
    const std::size_t lo = c.count * t / n;
    const std::size_t hi = c.count * (t + 1) / n;
    parts[t] = scan_range<V>(c, lo, hi);
  }
  Partial<V> total;
  for (const auto& p : parts) total.merge(p);
  return finish(c, total);
}

template <class V>
std::vector<std::size_t> saturating_range(const Compiled& c, const V& target, std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> out;
  if (lo >= hi) return out;
  std::vector<int> digits;
  decode(c, lo, digits);
  for (std::size_t i = lo; i < hi; ++i) {
    if (value<V>(c, digits) == target) out.push_back(i);
    advance(c, digits);
  }
  return out;
}

template <class F>
auto dispatch(const Compiled& c, F&& f) {
  if (c.small) return f(std::int64_t{});
  return f(Rat{});
}

}  // namespace

VertexScan vertex_scan_serial(const BellExpression& e, std::size_t cap) {
  const Compiled c = compile(e, cap);
  return dispatch(c, [&](auto tag) {
    using V = decltype(tag);
    return finish(c, scan_range<V>(c, 0, c.count));
  });
}

VertexScan vertex_scan_parallel(const BellExpression& e, std::size_t cap, int threads) {
  const Compiled c = compile(e, cap);
  return dispatch(c, [&](auto tag) { return scan_parallel<decltype(tag)>(c, threads); });
}

std::vector<std::size_t> saturating_serial(const BellExpression& e, const Rat& bound, std::size_t cap) {
  const Compiled c = compile(e, cap);
  const Rat target = bound * c.denominator;
  if (!target.is_integer()) return {};
  return dispatch(c, [&](auto tag) {
    using V = decltype(tag);
    if constexpr (std::is_same_v<V, std::int64_t>) {
      const auto goal = target.to_int64();
      if (!goal) return std::vector<std::size_t>{};
      return saturating_range<V>(c, *goal, 0, c.count);
    } else {
      return saturating_range<V>(c, target, 0, c.count);
    }
  });
}

std::vector<std::size_t> saturating_parallel(const BellExpression& e, const Rat& bound, std::size_t cap, int threads) {
  const Compiled c = compile(e, cap);
  const Rat target = bound * c.denominator;
  if (!target.is_integer()) return {};
  const int nt = resolve_threads(threads);
  return dispatch(c, [&](auto tag) {
    using V = decltype(tag);
    V goal{};
    if constexpr (std::is_same_v<V, std::int64_t>) {
      const auto g = target.to_int64();
      if (!g) return std::vector<std::size_t>{};
      goal = *g;
    } else {
      goal = target;
    }
    std::vector<std::vector<std::size_t>> parts(static_cast<std::size_t>(nt));
#pragma omp parallel num_threads(nt)
    {
      const auto t = static_cast<std::size_t>(omp_get_thread_num());
      const auto n = static_cast<std::size_t>(omp_get_num_threads());
      parts[t] = saturating_range<V>(c, goal, c.count * t / n, c.count * (t + 1) / n);
    }
    std::vector<std::size_t> out;
    for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
  });
}

}  // namespace nqbell::kernels
