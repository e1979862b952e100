#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "abmod/ab_element.hpp"
#include "abmod/uni_poly.hpp"

namespace abmod {

// (lambda_1, ..., lambda_k), standing for (a - lambda_1 b) ... (a - lambda_k b).
using TwistedTuple = std::vector<Rational>;

// One-line permutation notation: sigma[j-1] = sigma(j), values 1..k.
using Permutation = std::vector<int>;

inline void check_permutation(const Permutation& s) {
  std::vector<bool> seen(s.size(), false);
  for (int v : s) {
    if (v < 1 || v > static_cast<int>(s.size()) || seen[v - 1])
      throw DomainError("not a permutation of 1..k");
    seen[v - 1] = true;
  }
}

// (tau o sigma)(j) = tau(sigma(j))
inline Permutation compose(const Permutation& tau, const Permutation& sigma) {
  if (tau.size() != sigma.size()) throw DomainError("permutation length mismatch");
  Permutation r(sigma.size());
  for (std::size_t j = 0; j < sigma.size(); ++j) r[j] = tau[sigma[j] - 1];
  return r;
}

// phi(sigma, t)_j = t_{sigma(j)} + sigma(j) - j. This is a right action:
// phi(tau, phi(sigma, t)) = phi(sigma o tau, t).
inline TwistedTuple twisted_act(const Permutation& sigma, const TwistedTuple& t) {
  if (sigma.size() != t.size()) throw DomainError("permutation and tuple lengths differ");
  check_permutation(sigma);
  TwistedTuple r(t.size());
  for (std::size_t j = 0; j < t.size(); ++j) {
    int s = sigma[j];
    r[j] = t[s - 1] + Rational(s) - Rational(static_cast<long>(j + 1));
  }
  return r;
}

inline HomogeneousForm product_of_linear_factors(const TwistedTuple& t) {
  return product_of_linears(t).homogeneous_part(static_cast<int>(t.size()));
}

// Avatar of a^m b^{k-m}: b^{-k} a^m b^{k-m} = prod_{i=k-m}^{k-1} (u + i).
inline UniPoly avatar_basis(int m, int k) {
  UniPoly r = UniPoly::constant(Rational(1));
  for (int i = k - m; i <= k - 1; ++i) r *= UniPoly({Rational(i), Rational(1)});
  return r;
}

// C with b^k C(b^{-1} a) = H.
inline UniPoly to_commutative_avatar(const HomogeneousForm& h) {
  UniPoly c;
  for (int m = 0; m <= h.degree; ++m)
    if (!h.lambda[m].is_zero()) c += avatar_basis(m, h.degree) * h.lambda[m];
  return c;
}

inline HomogeneousForm from_commutative_avatar(const UniPoly& c, int k) {
  if (c.deg_or_minus_one() > k)
    throw DomainError("avatar degree " + std::to_string(c.deg_or_minus_one()) +
                      " exceeds the homogeneous degree " + std::to_string(k));
  std::vector<Rational> lambda(k + 1);
  UniPoly rest = c;
  for (int m = rest.deg_or_minus_one(); m >= 0; m = rest.deg_or_minus_one()) {
    lambda[m] = rest.coeff(m);
    rest -= avatar_basis(m, k) * lambda[m];
  }
  return HomogeneousForm(k, std::move(lambda));
}

// Monic B with (-1)^k B(-u) = avatar(H); for H = prod (a - lambda_j b)
// this is prod (x + lambda_j + j - k).
inline UniPoly bernstein_polynomial(const HomogeneousForm& h) {
  if (!h.is_unitary()) throw DomainError("homogeneous form is not unitary in a");
  UniPoly b = to_commutative_avatar(h).reflected();
  if (h.degree % 2 == 1) b = -b;
  return b;
}

struct HomogeneousFactorization {
  bool split = false;
  TwistedTuple tuple;                                // when split
  std::vector<std::pair<Rational, int>> avatar_roots;  // ascending
  std::vector<RationalFactorization::Piece> irreducible;  // when not split
};

// Linear factorization over Q ordered so that lambda_1 + 1 <= ... <= lambda_k + k,
// or the avatar's non-linear factors when it does not split.
inline HomogeneousFactorization factor_over_rationals(const HomogeneousForm& h) {
  if (!h.is_unitary()) throw DomainError("homogeneous form is not unitary in a");
  HomogeneousFactorization out;
  int k = h.degree;
  if (k == 0) {
    out.split = true;
    return out;
  }
  auto f = factor_rational(to_commutative_avatar(h));
  out.avatar_roots = f.roots;
  if (!f.splits()) {
    out.irreducible = f.nonlinear;
    return out;
  }
  out.split = true;
  // b^k prod (u - r_j) = prod (a - (r_j + k - j) b); ascending r_j gives the ordering
  int j = 1;
  for (const auto& [r, m] : f.roots)
    for (int e = 0; e < m; ++e, ++j) out.tuple.push_back(r + Rational(k - j));
  return out;
}

// Generator (a - (mu_1 + k - 1) b) ... (a - mu_k b) of the intersection of
// the left ideals A (a - mu_j b).
inline AbElement intersect_principal_linear(const TwistedTuple& mu) {
  std::set<Rational> seen(mu.begin(), mu.end());
  if (seen.size() != mu.size())
    throw DomainError("hypothesis requires pairwise distinct values");
  int k = static_cast<int>(mu.size());
  TwistedTuple shifted(mu.size());
  for (int j = 1; j <= k; ++j) shifted[j - 1] = mu[j - 1] + Rational(k - j);
  return product_of_linears(shifted);
}

}  // namespace abmod
