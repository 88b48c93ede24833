#include "nqbell/rational.hpp"

#include <limits>
#include <ostream>
#include <utility>

namespace nqbell {

namespace {

constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();

std::uint64_t gcd64(std::uint64_t a, std::uint64_t b) noexcept {
  if (a == 0) return b;
  if (b == 0) return a;
  const int shift = __builtin_ctzll(a | b);
  a >>= __builtin_ctzll(a);
  do {
    b >>= __builtin_ctzll(b);
    if (a > b) std::swap(a, b);
    b -= a;
  } while (b != 0);
  return a << shift;
}

std::uint64_t uabs(std::int64_t v) noexcept {
  return v < 0 ? static_cast<std::uint64_t>(-(v + 1)) + 1 : static_cast<std::uint64_t>(v);
}

void set_mpz(mpz_ptr z, __int128 v) {
  const bool neg = v < 0;
  const unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  mpz_set_ui(z, static_cast<unsigned long>(u >> 64));
  mpz_mul_2exp(z, z, 64);
  mpz_add_ui(z, z, static_cast<unsigned long>(u));
  if (neg) mpz_neg(z, z);
}

bool fits(__int128 v) noexcept { return v >= -static_cast<__int128>(kMax) && v <= kMax; }

// RAII scratch rational.
struct TmpQ {
  mpq_t q;
  TmpQ() { mpq_init(q); }
  ~TmpQ() { mpq_clear(q); }
  TmpQ(const TmpQ&) = delete;
  TmpQ& operator=(const TmpQ&) = delete;
};

// Per-thread scratch operands for the GMP paths; avoids an allocation per op.
struct Scratch {
  mpq_t x, y;
  Scratch() {
    mpq_init(x);
    mpq_init(y);
  }
  ~Scratch() {
    mpq_clear(x);
    mpq_clear(y);
  }
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

}  // namespace

Rat::Rat(long long n) {
  if (n == std::numeric_limits<long long>::min()) {
    big_ = new __mpq_struct;
    mpq_init(big_);
    mpq_set_si(big_, n, 1);
    return;
  }
  num_ = n;
}

Rat::Rat(long long n, long long d) {
  if (d == 0) throw ZeroDenominator();
  __int128 nn = n;
  __int128 dd = d;
  if (dd < 0) {
    nn = -nn;
    dd = -dd;
  }
  if (nn == 0) return;
  unsigned __int128 a = nn < 0 ? -nn : nn;
  unsigned __int128 b = dd;
  while (b != 0) {
    const unsigned __int128 t = a % b;
    a = b;
    b = t;
  }
  const auto g = static_cast<__int128>(a);
  *this = from_i128(nn / g, dd / g);
}

Rat::Rat(const Rat& other) : num_(other.num_), den_(other.den_) {
  if (other.big_ != nullptr) {
    big_ = new __mpq_struct;
    mpq_init(big_);
    mpq_set(big_, other.big_);
  }
}

Rat::Rat(Rat&& other) noexcept : num_(other.num_), den_(other.den_), big_(other.big_) {
  other.big_ = nullptr;
  other.num_ = 0;
  other.den_ = 1;
}

Rat& Rat::operator=(const Rat& other) {
  if (this == &other) return *this;
  if (other.big_ == nullptr) {
    release();
    num_ = other.num_;
    den_ = other.den_;
    return *this;
  }
  if (big_ == nullptr) {
    big_ = new __mpq_struct;
    mpq_init(big_);
  }
  mpq_set(big_, other.big_);
  return *this;
}

Rat& Rat::operator=(Rat&& other) noexcept {
  if (this == &other) return *this;
  release();
  num_ = other.num_;
  den_ = other.den_;
  big_ = other.big_;
  other.big_ = nullptr;
  other.num_ = 0;
  other.den_ = 1;
  return *this;
}

Rat::~Rat() { release(); }

void Rat::release() noexcept {
  if (big_ != nullptr) {
    mpq_clear(big_);
    delete big_;
    big_ = nullptr;
  }
}

Rat Rat::from_i128(__int128 n, __int128 d) {
  Rat r;
  if (fits(n) && d <= kMax) {
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }
  r.big_ = new __mpq_struct;
  mpq_init(r.big_);
  set_mpz(mpq_numref(r.big_), n);
  set_mpz(mpq_denref(r.big_), d);
  return r;
}

Rat Rat::from_mpq(mpq_srcptr q) {
  Rat r;
  if (mpz_fits_slong_p(mpq_numref(q)) && mpz_fits_slong_p(mpq_denref(q))) {
    const long n = mpz_get_si(mpq_numref(q));
    const long d = mpz_get_si(mpq_denref(q));
    if (n != std::numeric_limits<long>::min()) {
      r.num_ = n;
      r.den_ = d;
      return r;
    }
  }
  r.big_ = new __mpq_struct;
  mpq_init(r.big_);
  mpq_set(r.big_, q);
  return r;
}

void Rat::load(mpq_ptr out) const {
  if (big_ != nullptr) {
    mpq_set(out, big_);
  } else {
    mpz_set_si(mpq_numref(out), num_);
    mpz_set_si(mpq_denref(out), den_);
  }
}

Rat Rat::parse(std::string_view text) {
  std::string s(text);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\n')) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && s[start] == ' ') ++start;
  s = s.substr(start);
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  if (s.front() == '+') s.erase(0, 1);
  const auto slash = s.find('/');
  const std::string num = s.substr(0, slash);
  const std::string den = slash == std::string::npos ? std::string("1") : s.substr(slash + 1);
  auto valid = [](const std::string& t) {
    std::size_t i = (!t.empty() && t[0] == '-') ? 1 : 0;
    if (i >= t.size()) return false;
    for (; i < t.size(); ++i) {
      if (t[i] < '0' || t[i] > '9') return false;
    }
    return true;
  };
  if (!valid(num) || !valid(den)) throw std::invalid_argument("malformed rational literal: " + std::string(text));
  TmpQ t;
  mpz_set_str(mpq_numref(t.q), num.c_str(), 10);
  mpz_set_str(mpq_denref(t.q), den.c_str(), 10);
  if (mpz_sgn(mpq_denref(t.q)) == 0) throw ZeroDenominator();
  mpq_canonicalize(t.q);
  return from_mpq(t.q);
}

int Rat::sign() const noexcept {
  if (big_ != nullptr) return mpq_sgn(big_);
  return (num_ > 0) - (num_ < 0);
}

bool Rat::is_integer() const noexcept {
  if (big_ != nullptr) return mpz_cmp_ui(mpq_denref(big_), 1) == 0;
  return den_ == 1;
}

Rat Rat::abs() const { return sign() < 0 ? -*this : *this; }

Rat Rat::inverse() const {
  if (is_zero()) throw std::domain_error("division by zero");
  if (big_ == nullptr) {
    return num_ < 0 ? from_i128(-static_cast<__int128>(den_), -static_cast<__int128>(num_))
                    : from_i128(den_, num_);
  }
  TmpQ t;
  mpq_inv(t.q, big_);
  return from_mpq(t.q);
}

double Rat::to_double() const {
  if (big_ != nullptr) return mpq_get_d(big_);
  return static_cast<double>(num_) / static_cast<double>(den_);
}

Rat Rat::numerator() const {
  if (big_ == nullptr) return Rat(num_);
  TmpQ t;
  mpq_set_z(t.q, mpq_numref(big_));
  return from_mpq(t.q);
}

Rat Rat::denominator() const {
  if (big_ == nullptr) return Rat(den_);
  TmpQ t;
  mpq_set_z(t.q, mpq_denref(big_));
  return from_mpq(t.q);
}

std::optional<std::int64_t> Rat::to_int64() const noexcept {
  if (big_ != nullptr || den_ != 1) return std::nullopt;
  return num_;
}

Rat lcm(const Rat& a, const Rat& b) {
  if (!a.is_integer() || !b.is_integer() || a.sign() <= 0 || b.sign() <= 0) {
    throw std::domain_error("lcm needs positive integers");
  }
  return a * (a / b).denominator();
}

std::string Rat::numerator_str() const {
  if (big_ == nullptr) return std::to_string(num_);
  char* raw = mpz_get_str(nullptr, 10, mpq_numref(big_));
  std::string out(raw);
  void (*freefunc)(void*, size_t);
  mp_get_memory_functions(nullptr, nullptr, &freefunc);
  freefunc(raw, out.size() + 1);
  return out;
}

std::string Rat::denominator_str() const {
  if (big_ == nullptr) return std::to_string(den_);
  char* raw = mpz_get_str(nullptr, 10, mpq_denref(big_));
  std::string out(raw);
  void (*freefunc)(void*, size_t);
  mp_get_memory_functions(nullptr, nullptr, &freefunc);
  freefunc(raw, out.size() + 1);
  return out;
}

std::string Rat::str() const {
  if (is_integer()) return numerator_str();
  return numerator_str() + "/" + denominator_str();
}

Rat Rat::operator-() const {
  if (big_ == nullptr) {
    Rat r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  TmpQ t;
  mpq_neg(t.q, big_);
  return from_mpq(t.q);
}

Rat operator+(const Rat& a, const Rat& b) {
  if (a.big_ == nullptr && b.big_ == nullptr) {
    if (a.den_ == 1 && b.den_ == 1) return Rat::from_i128(static_cast<__int128>(a.num_) + b.num_, 1);
    const std::uint64_t g = gcd64(static_cast<std::uint64_t>(a.den_), static_cast<std::uint64_t>(b.den_));
    if (g == 1) {
      const __int128 n = static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_;
      if (n == 0) return Rat();
      return Rat::from_i128(n, static_cast<__int128>(a.den_) * b.den_);
    }
    const auto sg = static_cast<std::int64_t>(g);
    const __int128 t = static_cast<__int128>(a.num_) * (b.den_ / sg) + static_cast<__int128>(b.num_) * (a.den_ / sg);
    if (t == 0) return Rat();
    __int128 tm = t % static_cast<__int128>(g);
    if (tm < 0) tm = -tm;
    const auto g2 = static_cast<std::int64_t>(gcd64(static_cast<std::uint64_t>(tm), g));
    return Rat::from_i128(t / g2, static_cast<__int128>(a.den_ / sg) * (b.den_ / g2));
  }
  Scratch& sc = scratch();
  a.load(sc.x);
  b.load(sc.y);
  mpq_add(sc.x, sc.x, sc.y);
  return Rat::from_mpq(sc.x);
}

Rat operator-(const Rat& a, const Rat& b) {
  if (b.big_ == nullptr && b.num_ != std::numeric_limits<std::int64_t>::min()) {
    Rat nb;
    nb.num_ = -b.num_;
    nb.den_ = b.den_;
    return a + nb;
  }
  return a + (-b);
}

Rat operator*(const Rat& a, const Rat& b) {
  if (a.big_ == nullptr && b.big_ == nullptr) {
    if (a.num_ == 0 || b.num_ == 0) return Rat();
    if (a.den_ == 1 && b.den_ == 1) return Rat::from_i128(static_cast<__int128>(a.num_) * b.num_, 1);
    const auto g1 = static_cast<std::int64_t>(gcd64(uabs(a.num_), static_cast<std::uint64_t>(b.den_)));
    const auto g2 = static_cast<std::int64_t>(gcd64(uabs(b.num_), static_cast<std::uint64_t>(a.den_)));
    return Rat::from_i128(static_cast<__int128>(a.num_ / g1) * (b.num_ / g2),
                          static_cast<__int128>(a.den_ / g2) * (b.den_ / g1));
  }
  Scratch& sc = scratch();
  a.load(sc.x);
  b.load(sc.y);
  mpq_mul(sc.x, sc.x, sc.y);
  return Rat::from_mpq(sc.x);
}

Rat operator/(const Rat& a, const Rat& b) {
  if (b.is_zero()) throw std::domain_error("division by zero");
  return a * b.inverse();
}

Rat& Rat::operator+=(const Rat& rhs) {
  if (rhs.is_zero()) return *this;
  if (big_ == nullptr && rhs.big_ == nullptr && den_ == 1 && rhs.den_ == 1) {
    const __int128 v = static_cast<__int128>(num_) + rhs.num_;
    if (fits(v)) {
      num_ = static_cast<std::int64_t>(v);
      return *this;
    }
  }
  return *this = *this + rhs;
}
Rat& Rat::operator-=(const Rat& rhs) {
  if (rhs.is_zero()) return *this;
  return *this = *this - rhs;
}
Rat& Rat::operator*=(const Rat& rhs) { return *this = *this * rhs; }
Rat& Rat::operator/=(const Rat& rhs) { return *this = *this / rhs; }

void submul(Rat& a, const Rat& b, const Rat& c) {
  if (b.is_zero() || c.is_zero()) return;
  if (a.big_ == nullptr && b.big_ == nullptr && c.big_ == nullptr && a.den_ == 1 && b.den_ == 1 && c.den_ == 1) {
    const __int128 v = static_cast<__int128>(a.num_) - static_cast<__int128>(b.num_) * c.num_;
    if (fits(v)) {
      a.num_ = static_cast<std::int64_t>(v);
      return;
    }
  }
  Rat p = b * c;
  if (p.big_ == nullptr && p.num_ != std::numeric_limits<std::int64_t>::min()) {
    p.num_ = -p.num_;
    a = a + p;
    return;
  }
  a = a - p;
}

bool operator==(const Rat& a, const Rat& b) noexcept {
  if (a.big_ == nullptr && b.big_ == nullptr) return a.num_ == b.num_ && a.den_ == b.den_;
  if (a.big_ != nullptr && b.big_ != nullptr) return mpq_equal(a.big_, b.big_) != 0;
  return false;
}

std::strong_ordering operator<=>(const Rat& a, const Rat& b) noexcept {
  int c = 0;
  if (a.big_ == nullptr && b.big_ == nullptr) {
    const __int128 l = static_cast<__int128>(a.num_) * b.den_;
    const __int128 r = static_cast<__int128>(b.num_) * a.den_;
    c = (l > r) - (l < r);
  } else {
    Scratch& sc = scratch();
    a.load(sc.x);
    b.load(sc.y);
    c = mpq_cmp(sc.x, sc.y);
  }
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

}  // namespace nqbell
