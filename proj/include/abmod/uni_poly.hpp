#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "abmod/integer_factor.hpp"
#include "abmod/rational.hpp"

namespace abmod {

// Dense univariate polynomial over Q, coefficient i belongs to x^i.
// Used for a-polynomials inside AbElement, for the commutative avatar in
// u = b^{-1}a and for Bernstein polynomials.
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }
  UniPoly(std::initializer_list<Rational> coeffs) : c_(coeffs) { trim(); }

  static UniPoly constant(const Rational& c) { return UniPoly(std::vector<Rational>{c}); }
  static UniPoly monomial(const Rational& c, int degree) {
    std::vector<Rational> v(degree + 1);
    v[degree] = c;
    return UniPoly(std::move(v));
  }
  // x - root
  static UniPoly linear_root(const Rational& root) { return UniPoly({-root, Rational(1)}); }

  bool is_zero() const noexcept { return c_.empty(); }
  std::optional<int> degree() const {
    if (c_.empty()) return std::nullopt;
    return static_cast<int>(c_.size()) - 1;
  }
  // Degree with -1 standing for the zero polynomial; internal convenience.
  int deg_or_minus_one() const noexcept { return static_cast<int>(c_.size()) - 1; }

  const std::vector<Rational>& coeffs() const noexcept { return c_; }
  Rational coeff(int i) const {
    if (i < 0 || i >= static_cast<int>(c_.size())) return Rational(0);
    return c_[i];
  }
  Rational leading() const { return c_.empty() ? Rational(0) : c_.back(); }
  bool is_monic() const { return !c_.empty() && c_.back().is_one(); }

  UniPoly& operator+=(const UniPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
  }
  UniPoly& operator-=(const UniPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
  }
  UniPoly& operator*=(const Rational& s) {
    if (s.is_zero()) { c_.clear(); return *this; }
    for (auto& x : c_) x *= s;
    return *this;
  }
  friend UniPoly operator+(UniPoly x, const UniPoly& y) { return x += y; }
  friend UniPoly operator-(UniPoly x, const UniPoly& y) { return x -= y; }
  friend UniPoly operator*(UniPoly x, const Rational& s) { return x *= s; }
  friend UniPoly operator*(const Rational& s, UniPoly x) { return x *= s; }
  UniPoly operator-() const { return *this * Rational(-1); }

  friend UniPoly operator*(const UniPoly& x, const UniPoly& y) {
    if (x.is_zero() || y.is_zero()) return {};
    std::vector<Rational> r(x.c_.size() + y.c_.size() - 1);
    for (std::size_t i = 0; i < x.c_.size(); ++i) {
      if (x.c_[i].is_zero()) continue;
      for (std::size_t j = 0; j < y.c_.size(); ++j) r[i + j] += x.c_[i] * y.c_[j];
    }
    return UniPoly(std::move(r));
  }
  UniPoly& operator*=(const UniPoly& o) { return *this = *this * o; }

  friend bool operator==(const UniPoly& x, const UniPoly& y) { return x.c_ == y.c_; }

  // x^i coefficient shift: multiply by x^k.
  UniPoly shifted_up(int k) const {
    if (is_zero()) return {};
    std::vector<Rational> r(k, Rational(0));
    r.insert(r.end(), c_.begin(), c_.end());
    return UniPoly(std::move(r));
  }

  Rational operator()(const Rational& x) const {
    Rational acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  // p(x + t), by Horner in the polynomial ring.
  UniPoly compose_shift(const Rational& t) const {
    UniPoly acc;
    UniPoly lin({t, Rational(1)});
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * lin + constant(*it);
    return acc;
  }

  // p(-x)
  UniPoly reflected() const {
    std::vector<Rational> r = c_;
    for (std::size_t i = 1; i < r.size(); i += 2) r[i] = -r[i];
    return UniPoly(std::move(r));
  }

  UniPoly derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<Rational> r(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * Rational(static_cast<long>(i));
    return UniPoly(std::move(r));
  }

  UniPoly monic() const {
    if (is_zero()) return {};
    return *this * (Rational(1) / leading());
  }

  std::string to_string(const std::string& var = "x") const {
    if (is_zero()) return "0";
    std::string out;
    for (int i = deg_or_minus_one(); i >= 0; --i) {
      const Rational& c = c_[i];
      if (c.is_zero()) continue;
      bool neg = c.sign() < 0;
      Rational mag = neg ? -c : c;
      if (out.empty()) out += neg ? "-" : "";
      else out += neg ? " - " : " + ";
      bool unit = mag.is_one();
      if (!unit || i == 0) out += mag.to_string();
      if (i > 0) {
        if (!unit) out += " ";
        out += var;
        if (i > 1) out += "^" + std::to_string(i);
      }
    }
    return out;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }
  std::vector<Rational> c_;
};

// Euclidean division; divisor must be nonzero.
inline std::pair<UniPoly, UniPoly> divmod(const UniPoly& num, const UniPoly& den) {
  if (den.is_zero()) throw DomainError("polynomial division by zero");
  int dd = den.deg_or_minus_one();
  std::vector<Rational> r = num.coeffs();
  int dn = static_cast<int>(r.size()) - 1;
  if (dn < dd) return {UniPoly(), num};
  std::vector<Rational> q(dn - dd + 1);
  Rational inv = Rational(1) / den.leading();
  for (int i = dn; i >= dd; --i) {
    if (r[i].is_zero()) continue;
    Rational f = r[i] * inv;
    q[i - dd] = f;
    for (int j = 0; j <= dd; ++j) r[i - dd + j] -= f * den.coeff(j);
  }
  r.resize(dd);
  return {UniPoly(std::move(q)), UniPoly(std::move(r))};
}

inline UniPoly gcd(UniPoly x, UniPoly y) {
  while (!y.is_zero()) {
    auto r = divmod(x, y).second;
    x = std::move(y);
    y = std::move(r);
  }
  return x.monic();
}

// Rational roots with multiplicities plus the leftover factor without
// rational roots. The leftover is split into square-free pieces (Yun);
// pieces of degree <= 3 are certified irreducible.
struct RationalFactorization {
  Rational leading;
  std::vector<std::pair<Rational, int>> roots;  // ascending
  struct Piece {
    UniPoly factor;  // monic
    int multiplicity;
    bool certified_irreducible;
  };
  std::vector<Piece> nonlinear;

  bool splits() const { return nonlinear.empty(); }
};

namespace detail {

inline std::vector<mpz_class> positive_divisors(const mpz_class& n) {
  std::vector<mpz_class> divs{1};
  for (const auto& [p, e] : factor_integer(n)) {
    std::size_t base = divs.size();
    mpz_class pk = 1;
    for (int k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i) divs.push_back(divs[i] * pk);
    }
  }
  return divs;
}

// Clears denominators: returns integer coefficients of a scalar multiple.
inline std::vector<mpz_class> integer_coefficients(const UniPoly& p) {
  mpz_class l = 1;
  for (const auto& c : p.coeffs()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.raw().get_den_mpz_t());
  std::vector<mpz_class> out;
  mpz_class g = 0;
  for (const auto& c : p.coeffs()) {
    mpz_class v = c.raw().get_num() * (l / c.raw().get_den());
    out.push_back(v);
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
  }
  if (g != 0)
    for (auto& v : out) v /= g;
  return out;
}

// One rational root of a polynomial with nonzero constant term, if any.
inline std::optional<Rational> find_rational_root(const UniPoly& p) {
  auto z = integer_coefficients(p);
  mpz_class a0 = abs(z.front()), an = abs(z.back());
  auto ps = positive_divisors(a0);
  auto qs = positive_divisors(an);
  for (const auto& q : qs)
    for (const auto& num : ps)
      for (int s : {1, -1}) {
        Rational cand(mpz_class(num * s), q);
        if (cand.denominator() != q) continue;  // counted under a smaller q
        if (p(cand).is_zero()) return cand;
      }
  return std::nullopt;
}

}  // namespace detail

inline RationalFactorization factor_rational(const UniPoly& p) {
  if (p.is_zero()) throw DomainError("cannot factor the zero polynomial");
  RationalFactorization out;
  out.leading = p.leading();
  UniPoly rest = p.monic();
  std::map<Rational, int> roots;
  // zero roots
  while (!rest.is_zero() && rest.coeff(0).is_zero() && rest.deg_or_minus_one() > 0) {
    rest = divmod(rest, UniPoly::linear_root(Rational(0))).first;
    ++roots[Rational(0)];
  }
  while (rest.deg_or_minus_one() > 0) {
    auto r = detail::find_rational_root(rest);
    if (!r) break;
    while (rest.deg_or_minus_one() > 0 && rest(*r).is_zero()) {
      rest = divmod(rest, UniPoly::linear_root(*r)).first;
      ++roots[*r];
    }
  }
  for (const auto& [r, m] : roots) out.roots.emplace_back(r, m);
  if (rest.deg_or_minus_one() > 0) {
    // Yun square-free decomposition of the root-free remainder.
    UniPoly a = rest;
    UniPoly b = a.derivative();
    UniPoly c = gcd(a, b);
    UniPoly w = divmod(a, c).first;
    int i = 1;
    while (w.deg_or_minus_one() > 0) {
      UniPoly y = gcd(w, c);
      UniPoly z = divmod(w, y).first;
      if (z.deg_or_minus_one() > 0)
        out.nonlinear.push_back({z.monic(), i, z.deg_or_minus_one() <= 3});
      w = y;
      c = divmod(c, y).first;
      ++i;
    }
  }
  return out;
}

}  // namespace abmod
