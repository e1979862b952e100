#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "abmod/b_series.hpp"
#include "abmod/rational.hpp"
#include "abmod/uni_poly.hpp"

namespace abmod {

// Homogeneous form sum_j lambda_j a^j b^{k-j} of (a,b)-degree k.
struct HomogeneousForm {
  int degree = 0;
  std::vector<Rational> lambda{Rational(1)};  // size degree+1

  HomogeneousForm() = default;
  HomogeneousForm(int k, std::vector<Rational> coeffs) : degree(k), lambda(std::move(coeffs)) {
    if (k < 0) throw DomainError("negative homogeneous degree");
    lambda.resize(k + 1);
  }

  bool is_unitary() const { return lambda[degree].is_one(); }
  bool is_zero() const {
    for (const auto& c : lambda)
      if (!c.is_zero()) return false;
    return true;
  }
  // Degree in a of the form (largest j with lambda_j != 0), -1 when zero.
  int deg_a() const {
    for (int j = degree; j >= 0; --j)
      if (!lambda[j].is_zero()) return j;
    return -1;
  }

  friend bool operator==(const HomogeneousForm&, const HomogeneousForm&) = default;
};

// Element sum_nu P_nu(a) b^nu of the algebra with a b - b a = b^2, in normal
// form (a-polynomials left, b-powers right), exact or known modulo b^{N+1}.
class AbElement {
 public:
  using Terms = std::map<int, UniPoly>;

  AbElement() = default;
  explicit AbElement(Terms terms, Precision precision = std::nullopt)
      : terms_(std::move(terms)), prec_(precision) {
    if (prec_ && *prec_ < 0) throw DomainError("negative precision");
    normalize();
  }

  static AbElement scalar(const Rational& c) {
    return AbElement(Terms{{0, UniPoly::constant(c)}});
  }
  static AbElement one() { return scalar(Rational(1)); }
  static AbElement a() { return monomial(Rational(1), 1, 0); }
  static AbElement b() { return monomial(Rational(1), 0, 1); }
  // c a^i b^nu
  static AbElement monomial(const Rational& c, int i, int nu) {
    return AbElement(Terms{{nu, UniPoly::monomial(c, i)}});
  }
  static AbElement from_series(const BSeries& s) {
    Terms t;
    for (int h = 0; h <= s.stored_degree(); ++h)
      if (!s.stored(h).is_zero()) t[h] = UniPoly::constant(s.stored(h));
    return AbElement(std::move(t), s.precision());
  }
  static AbElement from_form(const HomogeneousForm& h) {
    Terms t;
    for (int j = 0; j <= h.degree; ++j)
      if (!h.lambda[j].is_zero()) t[h.degree - j] += UniPoly::monomial(h.lambda[j], j);
    return AbElement(std::move(t));
  }
  // a - lambda b
  static AbElement linear(const Rational& lambda) { return a() - b() * lambda; }

  const Terms& terms() const noexcept { return terms_; }
  Precision precision() const noexcept { return prec_; }
  bool is_exact() const noexcept { return !prec_.has_value(); }
  bool is_zero() const noexcept { return terms_.empty(); }

  // Coefficient of a^i b^nu.
  Rational coeff(int i, int nu) const {
    auto it = terms_.find(nu);
    return it == terms_.end() ? Rational(0) : it->second.coeff(i);
  }

  // Largest a-exponent, -1 for zero.
  int deg_a() const {
    int d = -1;
    for (const auto& [nu, p] : terms_) d = std::max(d, p.deg_or_minus_one());
    return d;
  }

  // Coefficient of a^i as a series in b (b to the right).
  BSeries a_coefficient(int i) const {
    std::vector<Rational> v;
    for (const auto& [nu, p] : terms_) {
      Rational c = p.coeff(i);
      if (c.is_zero()) continue;
      if (static_cast<int>(v.size()) <= nu) v.resize(nu + 1);
      v[nu] = c;
    }
    return BSeries(std::move(v), prec_);
  }

  // Part of (a,b)-degree d.
  HomogeneousForm homogeneous_part(int d) const {
    HomogeneousForm h(d, std::vector<Rational>(d + 1));
    for (const auto& [nu, p] : terms_)
      if (nu <= d) h.lambda[d - nu] = p.coeff(d - nu);
    return h;
  }

  AbElement truncated(int n) const { return with_precision(Precision(n)); }
  AbElement with_precision(Precision p) const {
    AbElement r = *this;
    r.prec_ = min_precision(prec_, p);
    r.normalize();
    return r;
  }

  AbElement& operator+=(const AbElement& o) {
    prec_ = min_precision(prec_, o.prec_);
    for (const auto& [nu, p] : o.terms_) terms_[nu] += p;
    normalize();
    return *this;
  }
  AbElement& operator-=(const AbElement& o) {
    prec_ = min_precision(prec_, o.prec_);
    for (const auto& [nu, p] : o.terms_) terms_[nu] -= p;
    normalize();
    return *this;
  }
  AbElement operator-() const { return *this * Rational(-1); }
  AbElement& operator*=(const Rational& s) {
    for (auto& [nu, p] : terms_) p *= s;
    normalize();
    return *this;
  }
  friend AbElement operator+(AbElement x, const AbElement& y) { return x += y; }
  friend AbElement operator-(AbElement x, const AbElement& y) { return x -= y; }
  friend AbElement operator*(AbElement x, const Rational& s) { return x *= s; }
  friend AbElement operator*(const Rational& s, AbElement x) { return x *= s; }

  friend AbElement operator*(const AbElement& x, const AbElement& y) { return multiply(x, y); }
  AbElement& operator*=(const AbElement& o) { return *this = multiply(*this, o); }

  // Structural equality, precision included.
  friend bool operator==(const AbElement& x, const AbElement& y) {
    return x.prec_ == y.prec_ && x.terms_ == y.terms_;
  }

  // Equality modulo b^{p+1} with p the weaker of the two precisions.
  bool agrees_with(const AbElement& o) const {
    AbElement d = *this - o;
    return d.is_zero();
  }

 private:
  // Normal form of (P(a) b^m)(Q(a) b^n) uses
  //   b^m a^j = sum_i (-1)^i C(j,i) m(m+1)...(m+i-1) a^{j-i} b^{m+i}.
  static AbElement multiply(const AbElement& x, const AbElement& y) {
    Precision p = min_precision(x.prec_, y.prec_);
    std::map<int, std::vector<Rational>> acc;
    for (const auto& [m, P] : x.terms_) {
      for (const auto& [n, Q] : y.terms_) {
        if (p && m + n > *p) continue;
        const auto& q = Q.coeffs();
        for (int j = 0; j < static_cast<int>(q.size()); ++j) {
          if (q[j].is_zero()) continue;
          Rational binom(1), rising(1);
          for (int i = 0; i <= j; ++i) {
            int nu = m + n + i;
            if (p && nu > *p) break;
            if (i > 0) {
              binom = binom * Rational(j - i + 1) / Rational(i);
              rising *= Rational(m + i - 1);
              if (rising.is_zero()) break;
            }
            Rational t = q[j] * binom * rising;
            if (i % 2 == 1) t = -t;
            auto& v = acc[nu];
            const auto& pc = P.coeffs();
            std::size_t need = pc.size() + (j - i);
            if (v.size() < need) v.resize(need);
            for (std::size_t r = 0; r < pc.size(); ++r)
              if (!pc[r].is_zero()) v[r + (j - i)] += pc[r] * t;
          }
        }
      }
    }
    Terms t;
    for (auto& [nu, v] : acc) t.emplace(nu, UniPoly(std::move(v)));
    return AbElement(std::move(t), p);
  }

  void normalize() {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (it->second.is_zero() || (prec_ && it->first > *prec_)) it = terms_.erase(it);
      else ++it;
    }
  }

  Terms terms_;
  Precision prec_;
};

inline AbElement pow(const AbElement& x, int e) {
  AbElement r = AbElement::one().with_precision(x.precision());
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

// [x, y] = x y - y x
inline AbElement commutator(const AbElement& x, const AbElement& y) { return x * y - y * x; }

// Product of the forms (a - lambda_1 b) ... (a - lambda_k b), as an element.
inline AbElement product_of_linears(const std::vector<Rational>& lambdas) {
  AbElement r = AbElement::one();
  for (const auto& l : lambdas) r *= AbElement::linear(l);
  return r;
}

}  // namespace abmod
