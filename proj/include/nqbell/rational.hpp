#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmp.h>

namespace nqbell {

class ZeroDenominator : public std::domain_error {
 public:
  ZeroDenominator() : std::domain_error("zero denominator") {}
};

/// Exact rational number in canonical form (gcd(|num|, den) = 1, den > 0).
///
/// Values whose numerator and denominator both fit in a signed 64-bit word are
/// held inline; everything else spills into a GMP mpq_t. The representation is
/// always the smallest one that fits, so two equal values compare equal
/// bit-for-bit in either representation.
class Rat {
 public:
  Rat() noexcept = default;
  Rat(long long n);  // NOLINT(google-explicit-constructor)
  Rat(long long n, long long d);
  Rat(const Rat& other);
  Rat(Rat&& other) noexcept;
  Rat& operator=(const Rat& other);
  Rat& operator=(Rat&& other) noexcept;
  ~Rat();

  /// Parses "p/q" or "p" with arbitrary-length integers.
  static Rat parse(std::string_view text);

  [[nodiscard]] int sign() const noexcept;
  [[nodiscard]] bool is_zero() const noexcept { return big_ == nullptr && num_ == 0; }
  [[nodiscard]] bool is_integer() const noexcept;
  [[nodiscard]] bool is_inline() const noexcept { return big_ == nullptr; }

  [[nodiscard]] Rat abs() const;
  [[nodiscard]] Rat inverse() const;
  [[nodiscard]] double to_double() const;
  /// "num/den" in lowest terms, den omitted when it is 1.
  [[nodiscard]] std::string str() const;
  [[nodiscard]] std::string numerator_str() const;
  [[nodiscard]] std::string denominator_str() const;
  [[nodiscard]] Rat numerator() const;
  [[nodiscard]] Rat denominator() const;
  /// Value as int64 when the number is an integer that fits.
  [[nodiscard]] std::optional<std::int64_t> to_int64() const noexcept;

  Rat operator-() const;
  Rat& operator+=(const Rat& rhs);
  Rat& operator-=(const Rat& rhs);
  Rat& operator*=(const Rat& rhs);
  Rat& operator/=(const Rat& rhs);

  friend Rat operator+(const Rat& a, const Rat& b);
  friend Rat operator-(const Rat& a, const Rat& b);
  friend Rat operator*(const Rat& a, const Rat& b);
  friend Rat operator/(const Rat& a, const Rat& b);

  friend bool operator==(const Rat& a, const Rat& b) noexcept;
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) noexcept;

  /// a -= b * c, the inner update of every elimination loop.
  friend void submul(Rat& a, const Rat& b, const Rat& c);

 private:
  static Rat from_i128(__int128 n, __int128 d);
  static Rat from_mpq(mpq_srcptr q);
  void load(mpq_ptr out) const;
  void release() noexcept;

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  mpq_ptr big_ = nullptr;
};

std::ostream& operator<<(std::ostream& os, const Rat& r);

/// Least common multiple of two positive integers.
Rat lcm(const Rat& a, const Rat& b);

}  // namespace nqbell
