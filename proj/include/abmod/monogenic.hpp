#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "abmod/ab_division.hpp"
#include "abmod/homogeneous.hpp"
#include "abmod/linear_algebra.hpp"

namespace abmod {

// x = P + tail with P unitary homogeneous of degree k, deg_a tail <= k-1 and
// tail valuation >= k+1.
struct CharacteristicElement {
  int k = 0;
  HomogeneousForm P;
  AbElement tail;

  AbElement element() const { return AbElement::from_form(P).with_precision(tail.precision()) + tail; }
  Precision precision() const { return tail.precision(); }
};

inline CharacteristicElement is_characteristic(const AbElement& x) {
  if (x.is_zero()) throw DomainError("zero element is not characteristic");
  int k = x.deg_a();
  if (x.precision() && *x.precision() < k + 2)
    throw DomainError("precision " + std::to_string(*x.precision()) + " below deg_a + 2 = " +
                      std::to_string(k + 2));
  HomogeneousForm P = x.homogeneous_part(k);
  if (!P.is_unitary()) throw DomainError("initial form not unitary in a");
  AbElement tail = x - AbElement::from_form(P);
  if (tail.deg_a() >= k) throw DomainError("tail deg_a >= k");
  if (!tail.is_zero() && valuation_initial(tail).valuation < k + 1)
    throw DomainError("tail valuation too low");
  return {k, P, tail};
}

struct BernsteinResult {
  UniPoly bernstein;
  HomogeneousForm element;  // unitary initial form
  int certified_rank = 0;   // caller's certificate, recorded as given
};

// Bernstein element and polynomial of A e when x e = 0 and rank(A e) >= r.
inline BernsteinResult bernstein_from_annihilator(const AbElement& x, int r) {
  auto [v, init] = valuation_initial(x);
  if (init.lambda[v].is_zero()) throw DomainError("initial form not a-monic");
  if (r != v)
    throw DomainError("rank certificate " + std::to_string(r) +
                      " differs from the initial-form degree " + std::to_string(v));
  Rational s = Rational(1) / init.lambda[v];
  for (auto& c : init.lambda) c *= s;
  return {bernstein_polynomial(init), init, r};
}

struct Normalized {
  CharacteristicElement x;
  BSeries conjugator;  // 1 + lambda b
};

// Conjugation by 1 + lambda b with lambda = mu/k kills the a^{k-1} b^2
// coefficient mu, since it adds lambda [b, P] = -k lambda a^{k-1} b^2 + ...
// in degree k+1. An exact input is truncated at N when lambda != 0.
inline Normalized normalize_to_b3(const CharacteristicElement& x, int N) {
  Rational mu = x.tail.coeff(x.k - 1, 2);
  if (x.k == 0 || mu.is_zero()) return {x, BSeries::one()};
  Rational lambda = mu / Rational(x.k);
  int n = x.precision() ? *x.precision() : N;
  BSeries c({Rational(1), lambda});
  AbElement y = AbElement::from_series(c) * x.element().truncated(n) *
                AbElement::from_series(c.inverse(n));
  return {is_characteristic(y), c};
}

struct Invariant {
  HomogeneousForm s_part;  // degree k+1 part of the tail
  AbElement comm_a;        // [P, a]
  AbElement comm_b;        // [P, b]
};

inline Invariant extract_invariant(const CharacteristicElement& x) {
  AbElement P = AbElement::from_form(x.P);
  return {x.tail.homogeneous_part(x.k + 1), commutator(P, AbElement::a()),
          commutator(P, AbElement::b())};
}

// Dimension of span{[P,a], [P,b]} inside the degree k+1 forms.
inline int commutator_span_dimension(const HomogeneousForm& P) {
  CharacteristicElement x{P.degree, P, AbElement()};
  auto inv = extract_invariant(x);
  int d = P.degree + 1;
  Matrix m(d + 1, std::vector<Rational>(2));
  auto ca = inv.comm_a.homogeneous_part(d), cb = inv.comm_b.homogeneous_part(d);
  for (int j = 0; j <= d; ++j) m[j] = {ca.lambda[j], cb.lambda[j]};
  return static_cast<int>(matrix_rank(m, 2));
}

// s1 - s2 in C [P,a] + C [P,b], both of degree deg P + 1.
inline bool invariants_equivalent(const HomogeneousForm& P, const HomogeneousForm& s1,
                                  const HomogeneousForm& s2) {
  int d = P.degree + 1;
  if (s1.degree != d || s2.degree != d)
    throw DomainError("invariants must have degree deg P + 1");
  CharacteristicElement x{P.degree, P, AbElement()};
  auto inv = extract_invariant(x);
  auto ca = inv.comm_a.homogeneous_part(d), cb = inv.comm_b.homogeneous_part(d);
  Matrix m(d + 1, std::vector<Rational>(2));
  std::vector<Rational> rhs(d + 1);
  for (int j = 0; j <= d; ++j) {
    m[j] = {ca.lambda[j], cb.lambda[j]};
    rhs[j] = s1.lambda[j] - s2.lambda[j];
  }
  return solve_linear(m, rhs, 2).consistent;
}

// S_0^{-1} (a - l_1 b) S_1^{-1} ... (a - l_k b) S_k^{-1} modulo b^{N+1}.
inline AbElement assemble_product(const TwistedTuple& lambdas, const std::vector<BSeries>& S, int N) {
  if (S.size() != lambdas.size() + 1) throw DomainError("expected k+1 series S_0..S_k");
  AbElement r = AbElement::from_series(S[0].inverse(N));
  for (std::size_t j = 0; j < lambdas.size(); ++j)
    r = r * AbElement::linear(lambdas[j]).truncated(N) * AbElement::from_series(S[j + 1].inverse(N));
  return r;
}

struct SwapResult {
  BSeries U;
  bool identity_check = false;
};

// U with b U' = delta (U - S), U(0) = 1, delta = lambda - mu, and the check of
// (a - mu b) S^{-1} (a - (lambda-1) b) = U^{-1} (a - lambda b) U S^{-1} U (a - (mu-1) b) U^{-1}
// modulo b^{N+1}.
inline SwapResult swap_factors(const Rational& mu, const Rational& lambda, const BSeries& S, int N) {
  Rational delta = lambda - mu;
  if (delta.is_zero()) throw DomainError("delta = lambda - mu must be nonzero");
  if (!S.stored(0).is_one()) throw DomainError("S(0) must be 1");
  bool resonant_slot = delta.is_integer() && delta.sign() > 0;
  long dl = resonant_slot ? delta.to_long() : -1;
  if (resonant_slot && (!S.precision() || dl <= *S.precision()) && !S.stored(dl).is_zero())
    throw DomainError("resonant obstruction: delta = " + delta.to_string() +
                      " is a positive integer and S_delta = " + S.stored(dl).to_string() +
                      " is nonzero");
  std::vector<Rational> u(S.stored_degree() + 1);
  for (int h = 0; h <= S.stored_degree(); ++h)
    if (h != dl) u[h] = delta / (delta - Rational(h)) * S.stored(h);
  BSeries U(std::move(u), S.precision());

  auto as = [](const BSeries& s) { return AbElement::from_series(s); };
  BSeries Si = S.inverse(N), Ui = U.inverse(N);
  AbElement lhs = AbElement::linear(mu).truncated(N) * as(Si) * AbElement::linear(lambda - Rational(1));
  AbElement rhs = as(Ui) * AbElement::linear(lambda).truncated(N) * as(U) * as(Si) * as(U) *
                  AbElement::linear(mu - Rational(1)) * as(Ui);
  return {U, (lhs - rhs).truncated(N).is_zero()};
}

struct ReorderResult {
  TwistedTuple mus;
  std::vector<BSeries> T;  // T_0..T_k
  std::vector<Permutation> swaps;  // adjacent transpositions applied, in order
  bool verified = false;
};

namespace detail {

// Swaps factors at 0-based positions i, i+1.
inline void apply_swap(ReorderResult& st, std::size_t i, int N) {
  Rational mu = st.mus[i], lambda = st.mus[i + 1] + Rational(1);
  SwapResult sw;
  try {
    sw = swap_factors(mu, lambda, st.T[i + 1], N);
  } catch (const DomainError& e) {
    throw DomainError("cannot swap factors " + std::to_string(i + 1) + " and " +
                      std::to_string(i + 2) + " (lambda = " + st.mus[i].to_string() + ", " +
                      st.mus[i + 1].to_string() + "): " + e.what() +
                      "; a rank-2 subquotient E_{l,l-n}(alpha) blocks the exchange");
  }
  BSeries U = sw.U.with_precision(N);
  BSeries Ui = U.inverse(N);
  st.T[i] = U * st.T[i];
  st.T[i + 1] = st.T[i + 1] * Ui * Ui;
  st.T[i + 2] = U * st.T[i + 2];
  st.mus[i] = lambda;
  st.mus[i + 1] = mu - Rational(1);
  Permutation t(st.mus.size());
  for (std::size_t j = 0; j < t.size(); ++j) t[j] = static_cast<int>(j + 1);
  std::swap(t[i], t[i + 1]);
  st.swaps.push_back(t);
}

inline std::vector<BSeries> padded(const TwistedTuple& lambdas, const std::vector<BSeries>& S) {
  if (S.size() == lambdas.size() + 1) return S;
  if (lambdas.size() >= 1 && S.size() + 1 == lambdas.size()) {
    std::vector<BSeries> r{BSeries::one()};
    r.insert(r.end(), S.begin(), S.end());
    r.push_back(BSeries::one());
    return r;
  }
  throw DomainError("expected k+1 series S_0..S_k or k-1 interior series");
}

// Bubble sort on the keys lambda_j + j toward `target_keys`.
inline ReorderResult reorder_by_keys(const TwistedTuple& lambdas, const std::vector<BSeries>& S_in,
                                     const std::vector<Rational>& target_keys, int N) {
  ReorderResult st{lambdas, padded(lambdas, S_in), {}, false};
  for (const auto& s : st.T)
    if (!s.stored(0).is_one()) throw DomainError("S_j(0) must be 1");
  std::size_t k = lambdas.size();
  auto key = [&](std::size_t i) { return st.mus[i] + Rational(static_cast<long>(i + 1)); };
  // position of each current key within the target sequence
  std::vector<std::size_t> rank(k);
  std::vector<bool> used(k, false);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = 0;
    while (j < k && (used[j] || target_keys[j] != key(i))) ++j;
    if (j == k) throw DomainError("target is not in the twisted orbit of the input");
    used[j] = true;
    rank[i] = j;
  }
  for (std::size_t pass = 0; pass < k; ++pass)
    for (std::size_t i = 0; i + 1 < k; ++i)
      if (rank[i] > rank[i + 1]) {
        apply_swap(st, i, N);
        std::swap(rank[i], rank[i + 1]);
      }
  AbElement before = assemble_product(lambdas, padded(lambdas, S_in), N);
  AbElement after = assemble_product(st.mus, st.T, N);
  st.verified = (before - after).truncated(N).is_zero();
  return st;
}

}  // namespace detail

// Moves to the orbit representative with lambda_1 + 1 <= ... <= lambda_k + k.
// Every swap there has delta < 0, so no resonance can occur.
inline ReorderResult reorder_factors(const TwistedTuple& lambdas, const std::vector<BSeries>& S, int N) {
  std::vector<Rational> keys;
  for (std::size_t i = 0; i < lambdas.size(); ++i) keys.push_back(lambdas[i] + Rational(static_cast<long>(i + 1)));
  std::sort(keys.begin(), keys.end());
  return detail::reorder_by_keys(lambdas, S, keys, N);
}

// Moves to an arbitrary member of the twisted orbit; swaps toward a
// non-sorted target can hit the resonant obstruction.
inline ReorderResult reorder_to_target(const TwistedTuple& lambdas, const std::vector<BSeries>& S,
                                       const TwistedTuple& target, int N) {
  if (target.size() != lambdas.size()) throw DomainError("target length differs from input");
  std::vector<Rational> keys;
  for (std::size_t i = 0; i < target.size(); ++i) keys.push_back(target[i] + Rational(static_cast<long>(i + 1)));
  return detail::reorder_by_keys(lambdas, S, keys, N);
}

struct FactoredForm {
  std::vector<BSeries> thetas;
};

inline AbElement assemble_factored(const FactoredForm& f, int N) {
  AbElement r = AbElement::one().truncated(N);
  for (const auto& t : f.thetas) r = r * (AbElement::a() - AbElement::b() * AbElement::from_series(t));
  return r.truncated(N);
}

// x = (a - b theta_1) ... (a - b theta_k) modulo b^{N+1}, lifted one
// homogeneous degree at a time. At degree k+m the unknowns are the b^m
// coefficients of the theta's; free choices are resolved by leaving the
// lowest-index theta's unchanged.
inline FactoredForm factor_characteristic(const CharacteristicElement& x, int N,
                                          const std::optional<TwistedTuple>& ordering = std::nullopt) {
  int k = x.k;
  if (x.precision()) N = std::min(N, *x.precision());
  if (N < 1) throw DomainError("precision must be at least 1");
  TwistedTuple lam;
  if (ordering) {
    if (product_of_linear_factors(*ordering) != x.P)
      throw DomainError("ordering does not factor the initial form");
    lam = *ordering;
  } else {
    auto f = factor_over_rationals(x.P);
    if (!f.split) throw DomainError("initial form does not split over Q");
    lam = f.tuple;
  }
  std::vector<std::vector<Rational>> t(k, std::vector<Rational>(std::max(N, 1)));
  for (int j = 0; j < k; ++j) t[j][0] = lam[j];
  AbElement target = x.element().truncated(N);
  auto build = [&]() {
    FactoredForm f;
    for (int j = 0; j < k; ++j) f.thetas.push_back(BSeries(t[j], N - 1));
    return f;
  };
  for (int m = 1; m <= N - 1; ++m) {
    AbElement residual = (target - assemble_factored(build(), N)).truncated(N);
    int d = k + m;
    // visible equations: coefficients of a^j b^{d-j} with d - j <= N, j < k
    std::vector<int> rows;
    for (int j = 0; j < k; ++j)
      if (d - j <= N) rows.push_back(j);
    Matrix M(rows.size(), std::vector<Rational>(k));
    std::vector<Rational> rhs(rows.size());
    for (int i = 0; i < k; ++i) {
      AbElement g = AbElement::one();
      for (int j = 0; j < k; ++j)
        g = g * (j == i ? AbElement::monomial(Rational(-1), 0, m + 1) : AbElement::linear(lam[j]));
      HomogeneousForm h = g.homogeneous_part(d);
      for (std::size_t r = 0; r < rows.size(); ++r) M[r][i] = h.lambda[rows[r]];
    }
    HomogeneousForm res = residual.homogeneous_part(d);
    for (std::size_t r = 0; r < rows.size(); ++r) rhs[r] = res.lambda[rows[r]];
    std::vector<int> order;
    for (int i = k - 1; i >= 0; --i) order.push_back(i);
    auto sol = solve_linear(M, rhs, k, order);
    if (!sol.consistent)
      throw DomainError("lifting obstruction at order b^" + std::to_string(m) +
                        " of the theta's; reorder the factors and retry");
    for (int i = 0; i < k; ++i) t[i][m] = sol.x[i];
  }
  FactoredForm f = build();
  if (!(target - assemble_factored(f, N)).truncated(N).is_zero())
    throw DomainError("lifting did not reproduce the element; precision exhausted");
  return f;
}

// a e1 = (lambda-1) b e1 + C(b) e2, a e2 = (lambda-n) b e2 with
// C = 1 + alpha b^n, or C = 0 for the direct sum.
struct Rank2Presentation {
  Rational lambda;
  int n = 1;
  Rational alpha;
  int precision = 8;
  bool coupled = true;
};

struct NormalSubmodule {
  Rational mu;
  BSeries S;
  BSeries T;
  std::optional<int> free_degree;  // coefficient of T left free (set to zero)
};

// Generators eps = S e1 + T e2 with a eps = mu b eps and eps not in bE, up to
// scalar. S = c b^p with p = mu - lambda + 1 in N (searched up to the
// precision), or S = 0 and mu = lambda - n.
inline std::vector<NormalSubmodule> rank2_normal_submodules(const Rank2Presentation& p) {
  int n = p.n, N = p.precision;
  if (n < 1) throw DomainError("n must be a positive integer");
  if (N < n + 2) throw DomainError("precision must be at least n + 2");
  std::vector<NormalSubmodule> out;
  std::vector<Rational> C(N + 2);
  if (p.coupled) {
    C[0] += Rational(1);
    if (n <= N + 1) C[n] += p.alpha;
  }
  for (int e = 0; e <= N; ++e) {
    // F = b^e C; equations F_0 = 0 and (i - q) T_i = -F_{i+1}, q = e + n - 1
    std::vector<Rational> F(N + 2);
    for (int i = e; i <= N + 1; ++i) F[i] = C[i - e];
    if (!F[0].is_zero()) continue;
    int q = e + n - 1;
    std::vector<Rational> T(N);
    std::optional<int> free;
    bool obstructed = false;
    for (int i = 0; i < N; ++i) {
      if (i == q) {
        if (!F[i + 1].is_zero()) obstructed = true;
        free = q;
        continue;
      }
      T[i] = -F[i + 1] / Rational(i - q);
    }
    if (obstructed) continue;
    Rational s0 = e == 0 ? Rational(1) : Rational(0);
    Rational scale(1);
    if (s0.is_zero()) {
      if (T[0].is_zero()) continue;  // eps in bE
      scale = Rational(1) / T[0];
    }
    for (auto& c : T) c *= scale;
    out.push_back({p.lambda - Rational(1) + Rational(e), BSeries::monomial(scale, e).with_precision(N),
                   BSeries(T, N - 1), free});
  }
  out.push_back({p.lambda - Rational(n), BSeries(std::vector<Rational>{}, N), BSeries({Rational(1)}),
                 std::nullopt});
  return out;
}

}  // namespace abmod
