#include <doctest.h>

#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>

#include "nqbell/rational.hpp"

using nqbell::Rat;

namespace {

// Reference: reduce n/d with 128-bit integers and print like Rat::str.
std::string reference(__int128 n, __int128 d) {
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 a = n < 0 ? -n : n, b = d;
  while (b != 0) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a != 0) {
    n /= a;
    d /= a;
  } else {
    d = 1;
  }
  auto digits = [](__int128 v) {
    if (v == 0) return std::string("0");
    std::string s;
    const bool neg = v < 0;
    if (neg) v = -v;
    while (v > 0) {
      s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
      v /= 10;
    }
    return neg ? "-" + s : s;
  };
  return d == 1 ? digits(n) : digits(n) + "/" + digits(d);
}

}  // namespace

TEST_CASE("construction normalizes sign and common factors") {
  CHECK(Rat(6, -4).str() == "-3/2");
  CHECK(Rat(0, 7).str() == "0");
  CHECK(Rat(0, 7).denominator() == Rat(1));
  CHECK(Rat(64, 42).str() == "32/21");
  CHECK(Rat(-5, -10).str() == "1/2");
}

TEST_CASE("zero denominator is rejected") {
  CHECK_THROWS_WITH_AS(Rat(1, 0), "zero denominator", nqbell::ZeroDenominator);
  CHECK_THROWS_AS(Rat(1) / Rat(0), std::domain_error);
  CHECK_THROWS_AS(static_cast<void>(Rat(0).inverse()), std::domain_error);
  CHECK_THROWS_AS(Rat::parse("3/0"), std::domain_error);
}

TEST_CASE("small arithmetic") {
  CHECK(Rat(1, 3) + Rat(1, 6) == Rat(1, 2));
  CHECK(Rat(7, 6) > Rat(1));
  CHECK(Rat(1, 4) * Rat(4, 3) == Rat(1, 3));
  CHECK(Rat(1, 2) - Rat(3, 4) == Rat(-1, 4));
  CHECK(Rat(2, 3) / Rat(4, 9) == Rat(3, 2));
  CHECK(Rat(-3, 2).abs() == Rat(3, 2));
}

TEST_CASE("parse and print round-trip, including values beyond 64 bits") {
  for (const char* s : {"0", "-1", "5/7", "-123456789012345678901234567891/7", "1/340282366920938463463374607431768211456"}) {
    CHECK(Rat::parse(s).str() == s);
  }
  CHECK(Rat::parse("10/4").str() == "5/2");
  CHECK(Rat::parse(" 3").str() == "3");
  CHECK_THROWS(Rat::parse("1/2/3"));
  CHECK_THROWS(Rat::parse("abc"));
  std::ostringstream os;
  os << Rat(-7, 3);
  CHECK(os.str() == "-7/3");
}

TEST_CASE("overflow of the inline representation spills and shrinks back") {
  const Rat big(std::int64_t{1} << 62);
  const Rat sq = big * big;
  CHECK_FALSE(sq.is_inline());
  CHECK(sq.str() == "21267647932558653966460912964485513216");
  const Rat back = sq / big;
  CHECK(back.is_inline());
  CHECK(back == big);
  const Rat tiny = Rat(1, 3) / big / big;
  CHECK(tiny * big * big * Rat(3) == Rat(1));
  CHECK(Rat(INT64_MIN).str() == "-9223372036854775808");
  CHECK((-Rat(INT64_MIN)).str() == "9223372036854775808");
}

TEST_CASE("inline arithmetic matches a 128-bit reference on random operands") {
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<std::int64_t> num(-1'000'000, 1'000'000), den(1, 1'000'000);
  for (int i = 0; i < 10'000; ++i) {
    const std::int64_t a = num(rng), b = den(rng), c = num(rng), d = den(rng);
    const Rat x(a, b), y(c, d);
    const __int128 A = a, B = b, C = c, D = d;
    REQUIRE((x + y).str() == reference(A * D + C * B, B * D));
    REQUIRE((x - y).str() == reference(A * D - C * B, B * D));
    REQUIRE((x * y).str() == reference(A * C, B * D));
    if (c != 0) REQUIRE((x / y).str() == reference(A * D, B * C));
    REQUIRE((x < y) == (A * D < C * B));
  }
}

TEST_CASE("field axioms hold on random rationals, large ones included") {
  std::mt19937_64 rng(777);
  std::uniform_int_distribution<std::int64_t> small(-50, 50);
  std::uniform_int_distribution<std::int64_t> wide(INT64_MIN / 2, INT64_MAX / 2);
  auto draw = [&] {
    if (rng() % 3 == 0) {
      std::int64_t d = wide(rng);
      if (d == 0) d = 1;
      return Rat(wide(rng), d) * Rat(wide(rng));
    }
    std::int64_t d = small(rng);
    if (d == 0) d = 1;
    return Rat(small(rng), d);
  };
  for (int i = 0; i < 10'000; ++i) {
    const Rat a = draw(), b = draw(), c = draw();
    REQUIRE((a + b) + c == a + (b + c));
    REQUIRE((a * b) * c == a * (b * c));
    REQUIRE(a * (b + c) == a * b + a * c);
    REQUIRE(a + b == b + a);
    REQUIRE(a - a == Rat(0));
    if (!a.is_zero()) REQUIRE(a * a.inverse() == Rat(1));
    // Canonical form: reduced with a positive denominator.
    const Rat n = a.numerator(), d = a.denominator();
    REQUIRE(d.sign() > 0);
    REQUIRE(n / d == a);
    REQUIRE((n / d).numerator() == n);
  }
}

TEST_CASE("ordering is total and consistent with subtraction") {
  const Rat vals[] = {Rat(-3, 2), Rat(0), Rat(1, 3), Rat(1, 2), Rat(7, 6), Rat::parse("100000000000000000000/3")};
  for (const Rat& a : vals) {
    for (const Rat& b : vals) {
      const auto s = (a - b).sign();
      CHECK((a < b) == (s < 0));
      CHECK((a == b) == (s == 0));
      CHECK((a > b) == (s > 0));
    }
  }
}

TEST_CASE("submul and lcm") {
  Rat a(1, 2);
  submul(a, Rat(1, 3), Rat(3, 4));
  CHECK(a == Rat(1, 4));
  CHECK(nqbell::lcm(Rat(4), Rat(6)) == Rat(12));
  CHECK(Rat(10, 4).to_int64() == std::nullopt);
  CHECK(Rat(12, 4).to_int64() == 3);
  CHECK(Rat(1, 8).to_double() == doctest::Approx(0.125));
}
