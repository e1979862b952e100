#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "abmod/ab_element.hpp"
#include "abmod/b_series.hpp"

namespace abmod {

// Key of e_{alpha,j} = s^alpha (log s)^j / j!.
struct XiKey {
  Rational alpha;
  int j = 0;
  friend auto operator<=>(const XiKey&, const XiKey&) = default;
  friend bool operator==(const XiKey&, const XiKey&) = default;
};

// Representative of alpha + Z in (-1, 0].
inline Rational class_rep(const Rational& alpha) { return alpha - Rational(alpha.ceil()); }

// Expansion sum c_{beta,j} e_{beta,j} with rational coefficients. A class
// with a cutoff c is known only for exponents beta <= c; classes without a
// cutoff are exact.
struct RawXi {
  std::map<XiKey, Rational> coeffs;
  std::map<Rational, Rational> cutoff;  // class representative -> exponent bound

  std::optional<Rational> cutoff_of(const Rational& alpha) const {
    auto it = cutoff.find(class_rep(alpha));
    if (it == cutoff.end()) return std::nullopt;
    return it->second;
  }
  bool known(const Rational& beta) const {
    auto c = cutoff_of(beta);
    return !c || beta <= *c;
  }
  void restrict_cutoff(const Rational& rep, const Rational& c) {
    auto [it, fresh] = cutoff.emplace(rep, c);
    if (!fresh && c < it->second) it->second = c;
  }
  void add(const XiKey& k, const Rational& v) {
    if (v.is_zero()) return;
    auto& x = coeffs[k];
    x += v;
    if (x.is_zero()) coeffs.erase(k);
  }
  // Drops unknown coefficients.
  void clean() {
    for (auto it = coeffs.begin(); it != coeffs.end();) {
      if (it->second.is_zero() || !known(it->first.alpha)) it = coeffs.erase(it);
      else ++it;
    }
  }
  bool is_zero() const {
    for (const auto& [k, v] : coeffs)
      if (!v.is_zero() && known(k.alpha)) return false;
    return true;
  }
  RawXi& operator+=(const RawXi& o) {
    for (const auto& [rep, c] : o.cutoff) restrict_cutoff(rep, c);
    for (const auto& [k, v] : o.coeffs) add(k, v);
    clean();
    return *this;
  }
  RawXi operator*(const Rational& s) const {
    RawXi r = *this;
    for (auto& [k, v] : r.coeffs) v *= s;
    r.clean();
    return r;
  }
  RawXi operator-(const RawXi& o) const {
    RawXi r = *this;
    r += o * Rational(-1);
    return r;
  }
};

// b e_{alpha,j} = sum_{i<=j} (-1)^{j-i} (alpha+1)^{-(j-i+1)} e_{alpha+1,i}
inline std::vector<std::pair<int, Rational>> b_on_basis(const Rational& alpha, int j) {
  std::vector<std::pair<int, Rational>> r;
  Rational inv = Rational(1) / (alpha + Rational(1));
  Rational p = inv;
  for (int i = j; i >= 0; --i) {
    r.emplace_back(i, (j - i) % 2 == 0 ? p : -p);
    p *= inv;
  }
  return r;
}

// Element sum S_{alpha,j}(b) e_{alpha,j} of Xi.
class XiElement {
 public:
  using Terms = std::map<XiKey, BSeries>;

  XiElement() = default;
  explicit XiElement(Terms t) : terms_(std::move(t)) {
    for (const auto& [k, s] : terms_) check_key(k);
    normalize();
  }
  static XiElement basis(const Rational& alpha, int j, const BSeries& s = BSeries::one()) {
    return XiElement(Terms{{XiKey{alpha, j}, s}});
  }

  const Terms& terms() const noexcept { return terms_; }
  bool is_zero_terms() const noexcept { return terms_.empty(); }
  int log_bound() const {
    int n = 0;
    for (const auto& [k, s] : terms_) n = std::max(n, k.j);
    return n;
  }
  // Weakest coefficient precision.
  Precision precision() const {
    Precision p;
    for (const auto& [k, s] : terms_) p = min_precision(p, s.precision());
    return p;
  }
  XiElement with_precision(Precision p) const {
    Terms t;
    for (const auto& [k, s] : terms_) t[k] = s.with_precision(p);
    return XiElement(std::move(t));
  }

  XiElement& operator+=(const XiElement& o) {
    for (const auto& [k, s] : o.terms_) {
      auto it = terms_.find(k);
      if (it == terms_.end()) terms_.emplace(k, s);
      else it->second += s;
    }
    normalize();
    return *this;
  }
  XiElement& operator-=(const XiElement& o) { return *this += o * Rational(-1); }
  friend XiElement operator+(XiElement x, const XiElement& y) { return x += y; }
  friend XiElement operator-(XiElement x, const XiElement& y) { return x -= y; }
  friend XiElement operator*(XiElement x, const Rational& c) {
    for (auto& [k, s] : x.terms_) s *= c;
    x.normalize();
    return x;
  }
  friend XiElement operator*(const Rational& c, XiElement x) { return std::move(x) * c; }
  // C[[b]]-linear structure: S(b) phi.
  friend XiElement operator*(const BSeries& S, const XiElement& x) {
    Terms t;
    for (const auto& [k, s] : x.terms_) t[k] = S * s;
    return XiElement(std::move(t));
  }

  // Expansion on the e_{beta,j} basis, known below the per-class cutoffs.
  RawXi raw() const {
    RawXi r;
    for (const auto& [k, s] : terms_)
      if (s.precision()) r.restrict_cutoff(class_rep(k.alpha), k.alpha + Rational(*s.precision()));
    for (const auto& [k, s] : terms_) {
      auto cut = r.cutoff_of(k.alpha);
      std::vector<Rational> v(k.j + 1);
      v[k.j] = Rational(1);
      Rational beta = k.alpha;
      for (int m = 0; m <= s.stored_degree(); ++m) {
        if (cut && beta > *cut) break;
        const Rational& c = s.stored(m);
        if (!c.is_zero())
          for (int i = 0; i <= k.j; ++i) r.add(XiKey{beta, i}, c * v[i]);
        std::vector<Rational> w(k.j + 1);
        for (int i = 0; i <= k.j; ++i) {
          if (v[i].is_zero()) continue;
          for (const auto& [l, f] : b_on_basis(beta, i)) w[l] += v[i] * f;
        }
        v = std::move(w);
        beta += Rational(1);
      }
    }
    r.clean();
    return r;
  }

  // Equal as elements of Xi, at the common precision.
  bool agrees_with(const XiElement& o) const { return (*this - o).raw().is_zero(); }

  // Constant coefficients on the raw basis; cutoffs become coefficient
  // precisions.
  static XiElement from_raw(const RawXi& r) {
    Terms t;
    for (const auto& [k, v] : r.coeffs) {
      auto c = r.cutoff_of(k.alpha);
      Precision p = c ? Precision(static_cast<int>((*c - k.alpha).floor().get_si())) : std::nullopt;
      t[k] = BSeries(std::vector<Rational>{v}, p);
    }
    // Keep empty classes' cutoffs visible through a zero coefficient.
    for (const auto& [rep, c] : r.cutoff) {
      bool present = false;
      for (const auto& [k, v] : r.coeffs)
        if (class_rep(k.alpha) == rep) present = true;
      if (!present && c >= rep)
        t[XiKey{rep, 0}] = BSeries(std::vector<Rational>{}, static_cast<int>((c - rep).floor().get_si()));
    }
    XiElement x;
    x.terms_ = std::move(t);
    return x;
  }

 private:
  static void check_key(const XiKey& k) {
    if (k.alpha <= Rational(-1)) throw DomainError("exponent must exceed -1");
    if (k.j < 0) throw DomainError("negative log exponent");
  }
  void normalize() {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (it->second.is_zero() && it->second.is_exact()) it = terms_.erase(it);
      else ++it;
    }
  }

  Terms terms_;
};

// a (S e_{alpha,j}) = S e_{alpha+1,j} + b^2 S' e_{alpha,j}.
inline XiElement act_a(const XiElement& x) {
  XiElement r;
  for (const auto& [k, s] : x.terms()) {
    r += XiElement::basis(k.alpha + Rational(1), k.j, s);
    if (s.precision() && *s.precision() == 0) {
      // b^2 S' is known modulo b^2
      r += XiElement::basis(k.alpha, k.j, BSeries(std::vector<Rational>{}, 1));
    } else {
      r += XiElement::basis(k.alpha, k.j, s.derivative().shifted(2));
    }
  }
  return r;
}

inline XiElement act_b(const XiElement& x) {
  XiElement r;
  for (const auto& [k, s] : x.terms())
    for (const auto& [i, c] : b_on_basis(k.alpha, k.j))
      r += XiElement::basis(k.alpha + Rational(1), i, s * c);
  return r;
}

// X phi for X = sum_nu P_nu(a) b^nu.
inline XiElement act(const AbElement& X, const XiElement& x) {
  XiElement r;
  XiElement bx = x;
  int top = X.terms().empty() ? -1 : X.terms().rbegin()->first;
  for (int nu = 0; nu <= top; ++nu) {
    auto it = X.terms().find(nu);
    if (it != X.terms().end()) {
      XiElement ax = bx;
      const auto& c = it->second.coeffs();
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (!c[i].is_zero()) r += ax * c[i];
        if (i + 1 < c.size()) ax = act_a(ax);
      }
    }
    if (nu < top) bx = act_b(bx);
  }
  if (X.precision()) r = r.with_precision(X.precision());
  return r;
}

}  // namespace abmod
