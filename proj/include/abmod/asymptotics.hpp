#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "abmod/linear_algebra.hpp"
#include "abmod/monogenic.hpp"
#include "abmod/xi_element.hpp"

namespace abmod {

// Canonical writing sum_{(alpha,j) in A} S_{alpha,j}(b) e_{alpha,j}; the map
// keeps the zero coefficients that saturate A.
struct CanonicalDAS {
  std::map<XiKey, BSeries> entries;

  XiElement element() const {
    XiElement::Terms t;
    for (const auto& [k, s] : entries)
      if (!s.is_zero()) t[k] = s;
    return XiElement(std::move(t));
  }
  int weight() const { return static_cast<int>(entries.size()); }
};

namespace detail {

inline std::set<Rational> classes_of(const RawXi& r) {
  std::set<Rational> out;
  for (const auto& [k, v] : r.coeffs) out.insert(class_rep(k.alpha));
  return out;
}

}  // namespace detail

// Peels off, class by class, the top log power j0 at its lowest exponent
// beta0: S_m = c_{beta0+m,j0} (beta0+1)...(beta0+m) cancels every log^{j0}
// term; then recurses on the lower log powers.
inline CanonicalDAS canonical_form(const XiElement& x) {
  RawXi r = x.raw();
  CanonicalDAS out;
  for (const Rational& rep : detail::classes_of(r)) {
    for (;;) {
      int j0 = -1;
      for (const auto& [k, v] : r.coeffs)
        if (class_rep(k.alpha) == rep) j0 = std::max(j0, k.j);
      if (j0 < 0) break;
      std::optional<Rational> beta0, top;
      for (const auto& [k, v] : r.coeffs)
        if (class_rep(k.alpha) == rep && k.j == j0) {
          if (!beta0 || k.alpha < *beta0) beta0 = k.alpha;
          if (!top || k.alpha > *top) top = k.alpha;
        }
      auto cut = r.cutoff_of(*beta0);
      int M = static_cast<int>(((cut ? *cut : *top) - *beta0).floor().get_si());
      std::vector<Rational> s(M + 1);
      Rational rising(1);
      for (int m = 0; m <= M; ++m) {
        if (m > 0) rising *= *beta0 + Rational(m);
        auto it = r.coeffs.find(XiKey{*beta0 + Rational(m), j0});
        if (it != r.coeffs.end()) s[m] = it->second * rising;
      }
      BSeries S(std::move(s), cut ? Precision(M) : std::nullopt);
      r = r - XiElement::basis(*beta0, j0, S).raw();
      for (const auto& [k, v] : r.coeffs)
        if (class_rep(k.alpha) == rep && k.j == j0)
          throw DomainError("internal: canonical peeling left a log^" + std::to_string(j0) + " term");
      out.entries[XiKey{*beta0, j0}] = S;
      for (int i = 0; i < j0; ++i) out.entries.try_emplace(XiKey{*beta0, i}, BSeries());
    }
  }
  return out;
}

struct ClassInfo {
  int n = 0;             // largest j with S_{alpha,j}(0) != 0
  Rational lambda_plus;  // largest such alpha at level n
};

using ClassData = std::map<Rational, ClassInfo>;  // keyed by representative in (-1, 0]

inline ClassData class_data(const CanonicalDAS& c) {
  ClassData out;
  for (const auto& [k, s] : c.entries) {
    if (s.stored(0).is_zero()) continue;
    Rational rep = class_rep(k.alpha);
    auto [it, fresh] = out.emplace(rep, ClassInfo{k.j, k.alpha});
    if (fresh) continue;
    if (k.j > it->second.n || (k.j == it->second.n && k.alpha > it->second.lambda_plus))
      it->second = {k.j, k.alpha};
  }
  return out;
}

// sum over classes of n(Lambda) + 1
inline int rank_of_generated(const XiElement& x) {
  int r = 0;
  for (const auto& [rep, info] : class_data(canonical_form(x))) r += info.n + 1;
  return r;
}

namespace detail {

struct AnnihilatorSolve {
  bool consistent = false;
  std::vector<BSeries> S;  // S_0..S_{r-1}
};

// a^r x = sum_{i<r} S_i(b) a^i x on raw coefficients with exponent below
// alpha_min(class) + M, unknowns S_{i,m} for m <= M.
inline AnnihilatorSolve solve_annihilator(const XiElement& x, int r, int M,
                                          const std::map<Rational, Rational>& alpha_min) {
  std::vector<XiElement> powers{x};
  for (int i = 1; i <= r; ++i) powers.push_back(act_a(powers.back()));
  auto in_range = [&](const XiKey& k) {
    return k.alpha <= alpha_min.at(class_rep(k.alpha)) + Rational(M);
  };
  std::vector<RawXi> cols;
  for (int i = 0; i < r; ++i) {
    XiElement y = powers[i];
    for (int m = 0; m <= M; ++m) {
      cols.push_back(y.raw());
      if (m < M) y = act_b(y);
    }
  }
  RawXi target = powers[r].raw();
  std::map<XiKey, std::size_t> row_of;
  auto note = [&](const RawXi& v) {
    for (const auto& [k, c] : v.coeffs)
      if (in_range(k)) row_of.emplace(k, 0);
  };
  for (const auto& c : cols) note(c);
  note(target);
  std::size_t n = 0;
  for (auto& [k, idx] : row_of) idx = n++;
  Matrix mat(n, std::vector<Rational>(cols.size()));
  std::vector<Rational> rhs(n);
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (const auto& [k, v] : cols[c].coeffs)
      if (in_range(k)) mat[row_of[k]][c] = v;
  for (const auto& [k, v] : target.coeffs)
    if (in_range(k)) rhs[row_of[k]] = v;
  auto sol = solve_linear(std::move(mat), std::move(rhs), cols.size());
  AnnihilatorSolve out;
  out.consistent = sol.consistent;
  if (!sol.consistent) return out;
  for (int i = 0; i < r; ++i)
    out.S.emplace_back(std::vector<Rational>(sol.x.begin() + i * (M + 1), sol.x.begin() + (i + 1) * (M + 1)));
  return out;
}

}  // namespace detail

// Monic relation a^r - sum_{i<r} S_i(b) a^i killing x, with r minimal, known
// modulo b^{N+1}. A candidate r is accepted when it is solvable at two
// precisions four apart.
inline AbElement annihilator_of(const XiElement& x, int N, int max_rank = 12) {
  RawXi raw = x.raw();
  if (raw.is_zero()) throw DomainError("cannot annihilate the zero element");
  std::map<Rational, Rational> alpha_min;
  for (const auto& [k, v] : raw.coeffs) {
    Rational rep = class_rep(k.alpha);
    auto [it, fresh] = alpha_min.emplace(rep, k.alpha);
    if (!fresh && k.alpha < it->second) it->second = k.alpha;
  }
  const int margin = 4;
  for (int r = 1; r <= max_rank; ++r) {
    int M1 = N + r, M2 = M1 + margin;
    for (const auto& [rep, lo] : alpha_min) {
      auto cut = raw.cutoff_of(lo);
      if (cut && *cut < lo + Rational(M2))
        throw DomainError("precision exhausted: the element is known up to exponent " +
                          cut->to_string() + " but the solver at rank " + std::to_string(r) +
                          " needs " + (lo + Rational(M2)).to_string());
    }
    if (!detail::solve_annihilator(x, r, M1, alpha_min).consistent) continue;
    auto sol = detail::solve_annihilator(x, r, M2, alpha_min);
    if (!sol.consistent) continue;
    AbElement X = pow(AbElement::a(), r);
    for (int i = 0; i < r; ++i)
      X -= AbElement::from_series(sol.S[i].truncated(N)) * pow(AbElement::a(), i);
    return X.truncated(N);
  }
  throw DomainError("no monic annihilator of rank <= " + std::to_string(max_rank) + " found at precision " +
                    std::to_string(N));
}

struct GeneratedBernstein {
  AbElement annihilator;
  int rank = 0;
  UniPoly bernstein;
};

// The working precision is raised to rank + 2 when the rank exceeds N.
inline GeneratedBernstein bernstein_of_generated(const XiElement& x, int N) {
  AbElement X = annihilator_of(x, N);
  int r = X.deg_a();
  if (r + 2 > N) X = annihilator_of(x, r + 2);
  return {X, r, bernstein_from_annihilator(X, r).bernstein};
}

// phi with (a - alpha b) phi = psi. Exponent gamma of psi is reached from
// gamma - 1; when gamma = alpha the log power rises by one and the kernel
// direction e_{alpha-1,0} gets coefficient zero.
inline XiElement solve_linear_factor(const Rational& alpha, const XiElement& psi) {
  RawXi r = psi.raw();
  RawXi out;
  for (const auto& [rep, c] : r.cutoff) out.restrict_cutoff(rep, c - Rational(1));
  std::map<Rational, std::vector<Rational>> by_exp;
  for (const auto& [k, v] : r.coeffs) {
    if (k.alpha <= Rational(0))
      throw DomainError("exponent " + k.alpha.to_string() + " <= 0 is not in the image of a - alpha b");
    auto& vec = by_exp[k.alpha];
    if (static_cast<int>(vec.size()) <= k.j) vec.resize(k.j + 1);
    vec[k.j] = v;
  }
  for (const auto& [gamma, v] : by_exp) {
    Rational beta = gamma - Rational(1);
    Rational g = gamma;  // beta + 1
    int n = static_cast<int>(v.size()) - 1;
    // off-diagonal part of (a - alpha b) e_{beta,l} at level i < l
    auto off = [&](int l, int i) {
      Rational p = Rational(1);
      for (int t = 0; t < l - i + 1; ++t) p /= g;
      Rational c = -alpha * p;
      return (l - i) % 2 == 0 ? c : -c;
    };
    std::vector<Rational> u;
    if (g == alpha) {
      u.assign(n + 2, Rational(0));
      for (int i = n; i >= 0; --i) {
        Rational acc = v[i];
        for (int l = i + 2; l <= n + 1; ++l) acc -= u[l] * off(l, i);
        u[i + 1] = acc / off(i + 1, i);
      }
    } else {
      Rational d = (g - alpha) / g;
      u.assign(n + 1, Rational(0));
      for (int i = n; i >= 0; --i) {
        Rational acc = v[i];
        for (int l = i + 1; l <= n; ++l) acc -= u[l] * off(l, i);
        u[i] = acc / d;
      }
    }
    for (int l = 0; l < static_cast<int>(u.size()); ++l) out.add(XiKey{beta, l}, u[l]);
  }
  out.clean();
  return XiElement::from_raw(out);
}

}  // namespace abmod
