#pragma once

#include <gmpxx.h>

#include <compare>
#include <concepts>
#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

#include "abmod/error.hpp"

namespace abmod {

// Exact rational number, always in lowest terms with a positive denominator.
// Thin value wrapper over mpq_class so that expression templates never leak
// into `auto` declarations.
class Rational {
 public:
  Rational() = default;

  template <std::signed_integral T>
  Rational(T v) : value_(static_cast<long>(v)) {}

  template <std::unsigned_integral T>
  Rational(T v) : value_(static_cast<unsigned long>(v)) {}

  Rational(long num, long den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    value_ = mpq_class(num, den);
    value_.canonicalize();
  }

  explicit Rational(const mpz_class& v) : value_(v) {}

  explicit Rational(mpq_class v) : value_(std::move(v)) { value_.canonicalize(); }

  Rational(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    value_ = mpq_class(num, den);
    value_.canonicalize();
  }

  // Accepts "p", "-p", "p/q".
  static Rational parse(std::string_view text) {
    std::string s(text);
    if (s.empty()) throw ParseError("empty rational literal", 0);
    auto slash = s.find('/');
    auto check_digits = [&](std::string_view part, std::size_t offset) {
      std::size_t start = (!part.empty() && (part[0] == '-' || part[0] == '+')) ? 1 : 0;
      if (start == part.size()) throw ParseError("malformed rational literal", offset);
      for (std::size_t i = start; i < part.size(); ++i)
        if (part[i] < '0' || part[i] > '9')
          throw ParseError("malformed rational literal", offset + i);
    };
    if (slash == std::string::npos) {
      check_digits(s, 0);
      return Rational(mpz_class(s[0] == '+' ? s.substr(1) : s));
    }
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    check_digits(num, 0);
    check_digits(den, slash + 1);
    mpz_class n(num[0] == '+' ? num.substr(1) : num);
    mpz_class d(den[0] == '+' ? den.substr(1) : den);
    if (d == 0) throw ParseError("zero denominator", slash + 1);
    return Rational(n, d);
  }

  const mpq_class& raw() const noexcept { return value_; }
  mpz_class numerator() const { return value_.get_num(); }
  mpz_class denominator() const { return value_.get_den(); }

  bool is_zero() const noexcept { return sgn(value_) == 0; }
  bool is_one() const noexcept { return value_ == 1; }
  bool is_integer() const noexcept { return value_.get_den() == 1; }
  int sign() const noexcept { return sgn(value_); }

  // Value as a machine integer; only meaningful when is_integer() and small.
  long to_long() const {
    if (!is_integer() || !value_.get_num().fits_slong_p())
      throw DomainError("rational " + to_string() + " is not a machine integer");
    return value_.get_num().get_si();
  }

  std::string to_string() const { return value_.get_str(); }

  Rational operator-() const { return Rational(mpq_class(-value_), raw_tag{}); }

  Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
  Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
  Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw DomainError("division by zero");
    value_ /= o.value_;
    return *this;
  }

  friend Rational operator+(const Rational& x, const Rational& y) {
    return Rational(mpq_class(x.value_ + y.value_), raw_tag{});
  }
  friend Rational operator-(const Rational& x, const Rational& y) {
    return Rational(mpq_class(x.value_ - y.value_), raw_tag{});
  }
  friend Rational operator*(const Rational& x, const Rational& y) {
    return Rational(mpq_class(x.value_ * y.value_), raw_tag{});
  }
  friend Rational operator/(const Rational& x, const Rational& y) {
    if (y.is_zero()) throw DomainError("division by zero");
    return Rational(mpq_class(x.value_ / y.value_), raw_tag{});
  }

  friend bool operator==(const Rational& x, const Rational& y) { return x.value_ == y.value_; }
  friend std::strong_ordering operator<=>(const Rational& x, const Rational& y) {
    int c = cmp(x.value_, y.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.to_string();
  }

  // Largest integer <= value.
  mpz_class floor() const {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), value_.get_num_mpz_t(), value_.get_den_mpz_t());
    return q;
  }
  // Smallest integer >= value.
  mpz_class ceil() const {
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), value_.get_num_mpz_t(), value_.get_den_mpz_t());
    return q;
  }

 private:
  struct raw_tag {};
  Rational(mpq_class v, raw_tag) : value_(std::move(v)) {}

  mpq_class value_;
};

inline Rational pow(const Rational& base, unsigned e) {
  Rational r(1);
  for (unsigned i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace abmod

template <>
struct std::hash<abmod::Rational> {
  std::size_t operator()(const abmod::Rational& r) const noexcept {
    std::size_t h1 = mpz_get_ui(r.raw().get_num_mpz_t());
    std::size_t h2 = mpz_get_ui(r.raw().get_den_mpz_t());
    return h1 * 1000003u ^ h2 ^ (r.sign() < 0 ? 0x9e3779b97f4a7c15ull : 0);
  }
};
