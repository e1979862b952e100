#pragma once

#include <optional>
#include <utility>

#include "abmod/ab_element.hpp"

namespace abmod {

struct ValuationInitial {
  int valuation;
  HomogeneousForm initial;
};

// Lowest (a,b)-degree among the terms and the homogeneous part of that degree.
inline ValuationInitial valuation_initial(const AbElement& x) {
  if (x.is_zero()) throw DomainError("zero element has no valuation");
  int v = -1;
  for (const auto& [nu, p] : x.terms())
    for (int i = 0; i <= p.deg_or_minus_one(); ++i)
      if (!p.coeff(i).is_zero() && (v < 0 || i + nu < v)) v = i + nu;
  if (x.precision() && v > *x.precision())
    throw DomainError("valuation " + std::to_string(v) + " is not determined at precision " +
                      std::to_string(*x.precision()));
  return {v, x.homogeneous_part(v)};
}

// Inverse of c + xi (xi in b A) modulo b^{N+1} by the geometric series
// c^{-1} sum_n (-c^{-1} xi)^n.
inline AbElement invert_unit(const AbElement& x, int N) {
  auto it = x.terms().find(0);
  if (it == x.terms().end() || it->second.deg_or_minus_one() != 0)
    throw DomainError("not a unit of the algebra: b-free part must be a nonzero constant");
  Rational c = it->second.coeff(0);
  Precision p = min_precision(x.precision(), N);
  AbElement step = (x - AbElement::scalar(c)).with_precision(p) * (Rational(-1) / c);
  AbElement term = AbElement::one().with_precision(p);
  AbElement sum = term;
  for (int n = 1; n <= *p; ++n) {
    term *= step;
    if (term.is_zero()) break;
    sum += term;
  }
  return sum * (Rational(1) / c);
}

struct DivisionResult {
  AbElement quotient;
  AbElement remainder;
};

// X = Q y + R with deg_a R < k, where k is the valuation of y and y is
// a-monic of degree k up to a unit coefficient series. Exact when X and y
// are exact and the a^k coefficient of y is a constant; otherwise modulo
// b^{N+1}.
inline DivisionResult right_divide(const AbElement& X, const AbElement& y, int N) {
  if (y.is_zero()) throw DomainError("division by zero element");
  auto [k, init] = valuation_initial(y);
  if (init.lambda[k].is_zero()) throw DomainError("divisor initial form not a-monic");
  if (y.deg_a() != k)
    throw DomainError("divisor a-degree exceeds its valuation; no division in this algebra");
  BSeries u = y.a_coefficient(k);
  bool exact = X.is_exact() && y.is_exact() && u.stored_degree() == 0;
  Precision p = exact ? std::nullopt : min_precision(min_precision(X.precision(), y.precision()), N);
  BSeries u_inv = exact ? BSeries::constant(Rational(1) / u.stored(0)) : u.inverse(*p);
  AbElement yy = y.with_precision(p);
  AbElement R = X.with_precision(p);
  AbElement Q = AbElement().with_precision(p);
  for (int d = R.deg_a(); d >= k; d = R.deg_a()) {
    BSeries lead = R.a_coefficient(d) * u_inv;
    AbElement q;
    AbElement::Terms t;
    for (int h = 0; h <= lead.stored_degree(); ++h)
      if (!lead.stored(h).is_zero()) t[h] = UniPoly::monomial(lead.stored(h), d - k);
    q = AbElement(std::move(t), p);
    Q += q;
    R -= q * yy;
    if (R.deg_a() >= d) throw DomainError("division failed to lower the a-degree");
  }
  return {Q, R};
}

struct MembershipReport {
  bool member;
  Precision precision;  // nullopt: decided exactly
};

inline MembershipReport membership_report(const AbElement& x, const AbElement& y, int N) {
  auto r = right_divide(x, y, N);
  AbElement rem = r.remainder.is_exact() ? r.remainder : r.remainder.truncated(N);
  return {rem.is_zero(), rem.precision()};
}

// x in A y, to precision N (exactly for exact polynomial inputs).
inline bool ideal_membership(const AbElement& x, const AbElement& y, int N) {
  return membership_report(x, y, N).member;
}

}  // namespace abmod
