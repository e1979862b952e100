#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "abmod/rational.hpp"

namespace abmod {

// Precision tag shared by series and algebra elements: N means "known modulo
// b^{N+1}", nullopt means exact.
using Precision = std::optional<int>;

inline Precision min_precision(Precision x, Precision y) {
  if (!x) return y;
  if (!y) return x;
  return std::min(*x, *y);
}

inline std::string precision_string(Precision p) {
  return p ? std::to_string(*p) : std::string("exact");
}

// Power series in b over Q, exact (finite) or truncated.
class BSeries {
 public:
  BSeries() = default;
  explicit BSeries(std::vector<Rational> coeffs, Precision precision = std::nullopt)
      : c_(std::move(coeffs)), prec_(precision) {
    if (prec_ && *prec_ < 0) throw DomainError("negative precision");
    normalize();
  }
  BSeries(std::initializer_list<Rational> coeffs) : c_(coeffs) { normalize(); }

  static BSeries constant(const Rational& c) { return BSeries(std::vector<Rational>{c}); }
  static BSeries one() { return constant(Rational(1)); }
  static BSeries monomial(const Rational& c, int power) {
    std::vector<Rational> v(power + 1);
    v[power] = c;
    return BSeries(std::move(v));
  }

  Precision precision() const noexcept { return prec_; }
  bool is_exact() const noexcept { return !prec_.has_value(); }
  const std::vector<Rational>& coeffs() const noexcept { return c_; }

  // Coefficient of b^h; asking beyond the known range is an error.
  Rational coeff(int h) const {
    if (h < 0) return Rational(0);
    if (prec_ && h > *prec_)
      throw DomainError("coefficient of b^" + std::to_string(h) + " is beyond precision " +
                        std::to_string(*prec_));
    return h < static_cast<int>(c_.size()) ? c_[h] : Rational(0);
  }
  // Stored coefficient or zero, without the precision guard.
  Rational stored(int h) const {
    return (h >= 0 && h < static_cast<int>(c_.size())) ? c_[h] : Rational(0);
  }
  int stored_degree() const noexcept { return static_cast<int>(c_.size()) - 1; }

  bool is_zero() const noexcept { return c_.empty(); }

  // Lowest power with a nonzero coefficient; nullopt when zero to precision.
  std::optional<int> valuation() const {
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (!c_[i].is_zero()) return static_cast<int>(i);
    return std::nullopt;
  }

  BSeries truncated(int n) const {
    BSeries r = *this;
    r.prec_ = min_precision(prec_, n);
    r.normalize();
    return r;
  }
  BSeries with_precision(Precision p) const {
    BSeries r = *this;
    r.prec_ = min_precision(prec_, p);
    r.normalize();
    return r;
  }

  BSeries& operator+=(const BSeries& o) {
    prec_ = min_precision(prec_, o.prec_);
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    normalize();
    return *this;
  }
  BSeries& operator-=(const BSeries& o) { return *this += -o; }
  BSeries operator-() const {
    BSeries r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }
  BSeries& operator*=(const Rational& s) {
    for (auto& x : c_) x *= s;
    normalize();
    return *this;
  }
  friend BSeries operator+(BSeries x, const BSeries& y) { return x += y; }
  friend BSeries operator-(BSeries x, const BSeries& y) { return x -= y; }
  friend BSeries operator*(BSeries x, const Rational& s) { return x *= s; }
  friend BSeries operator*(const Rational& s, BSeries x) { return x *= s; }

  friend BSeries operator*(const BSeries& x, const BSeries& y) {
    Precision p = min_precision(x.prec_, y.prec_);
    std::size_t n = x.c_.size() + y.c_.size();
    if (p) n = std::min<std::size_t>(n, *p + 1);
    std::vector<Rational> r(n > 0 ? n : 0);
    for (std::size_t i = 0; i < x.c_.size() && i < r.size(); ++i) {
      if (x.c_[i].is_zero()) continue;
      for (std::size_t j = 0; j < y.c_.size() && i + j < r.size(); ++j)
        r[i + j] += x.c_[i] * y.c_[j];
    }
    return BSeries(std::move(r), p);
  }
  BSeries& operator*=(const BSeries& o) { return *this = *this * o; }

  // Multiplication by b^k.
  BSeries shifted(int k) const {
    std::vector<Rational> r(k, Rational(0));
    r.insert(r.end(), c_.begin(), c_.end());
    Precision p = prec_ ? Precision(*prec_ + k) : std::nullopt;
    return BSeries(std::move(r), p);
  }

  // d/db
  BSeries derivative() const {
    std::vector<Rational> r;
    for (std::size_t i = 1; i < c_.size(); ++i) r.push_back(c_[i] * Rational(static_cast<long>(i)));
    if (prec_ && *prec_ == 0) throw DomainError("derivative of a series known only modulo b");
    Precision p = prec_ ? Precision(*prec_ - 1) : std::nullopt;
    return BSeries(std::move(r), p);
  }

  // Inverse modulo b^{N+1}; requires a nonzero constant term.
  BSeries inverse(int n) const {
    Rational c0 = stored(0);
    if (c0.is_zero()) throw DomainError("series with zero constant term is not invertible");
    int N = prec_ ? std::min(n, *prec_) : n;
    std::vector<Rational> r(N + 1);
    Rational inv0 = Rational(1) / c0;
    r[0] = inv0;
    for (int k = 1; k <= N; ++k) {
      Rational acc(0);
      for (int i = 1; i <= k && i < static_cast<int>(c_.size()); ++i) acc += c_[i] * r[k - i];
      r[k] = -acc * inv0;
    }
    return BSeries(std::move(r), N);
  }

  // Equality of the common known part.
  bool agrees_with(const BSeries& o) const {
    Precision p = min_precision(prec_, o.prec_);
    int top = std::max(stored_degree(), o.stored_degree());
    if (p) top = std::min(top, *p);
    for (int h = 0; h <= top; ++h)
      if (stored(h) != o.stored(h)) return false;
    return true;
  }

  friend bool operator==(const BSeries& x, const BSeries& y) {
    return x.prec_ == y.prec_ && x.c_ == y.c_;
  }

  std::string to_string(const std::string& var = "b") const {
    std::string out;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      const Rational& c = c_[i];
      if (c.is_zero()) continue;
      bool neg = c.sign() < 0;
      Rational mag = neg ? -c : c;
      if (out.empty()) out += neg ? "-" : "";
      else out += neg ? " - " : " + ";
      if (!mag.is_one() || i == 0) out += mag.to_string();
      if (i > 0) {
        if (!mag.is_one()) out += " ";
        out += var;
        if (i > 1) out += "^" + std::to_string(i);
      }
    }
    if (out.empty()) out = "0";
    if (prec_) out += " + O(" + var + "^" + std::to_string(*prec_ + 1) + ")";
    return out;
  }

 private:
  void normalize() {
    if (prec_ && static_cast<int>(c_.size()) > *prec_ + 1) c_.resize(*prec_ + 1);
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }

  std::vector<Rational> c_;
  Precision prec_;
};

}  // namespace abmod
