#pragma once

#include <array>
#include <compare>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "abmod/ab_element.hpp"
#include "abmod/error.hpp"
#include "abmod/homogeneous.hpp"
#include "abmod/linear_algebra.hpp"
#include "abmod/monogenic.hpp"

namespace abmod {

// x^e0 y^e1 z^e2. Ordered graded-lexicographically with x > y > z, so the
// largest monomial of a combination is its leading one.
struct Monomial {
  std::array<int, 3> e{};

  int degree() const noexcept { return e[0] + e[1] + e[2]; }
  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend std::strong_ordering operator<=>(const Monomial& x, const Monomial& y) {
    if (auto c = x.degree() <=> y.degree(); c != 0) return c;
    return x.e <=> y.e;
  }
};

using MonoCombo = SparseVector<Monomial>;

inline MonoCombo monomial(int ex, int ey, int ez = 0, const Rational& c = Rational(1)) {
  if (ex < 0 || ey < 0 || ez < 0) throw DomainError("negative monomial exponent");
  MonoCombo v;
  if (!c.is_zero()) v.emplace(Monomial{{ex, ey, ez}}, c);
  return v;
}

inline int degree(const MonoCombo& v) { return v.empty() ? -1 : v.rbegin()->first.degree(); }

inline MonoCombo operator+(MonoCombo x, const MonoCombo& y) {
  axpy(x, Rational(1), y);
  return x;
}
inline MonoCombo operator-(MonoCombo x, const MonoCombo& y) {
  axpy(x, Rational(-1), y);
  return x;
}
inline MonoCombo operator*(const Rational& c, const MonoCombo& x) {
  MonoCombo r;
  axpy(r, c, x);
  return r;
}
inline MonoCombo operator*(const MonoCombo& x, const MonoCombo& y) {
  MonoCombo r;
  for (const auto& [m, c] : x) {
    MonoCombo t;
    for (const auto& [n, d] : y)
      t.emplace(Monomial{{m.e[0] + n.e[0], m.e[1] + n.e[1], m.e[2] + n.e[2]}}, c * d);
    axpy(r, Rational(1), t);
  }
  return r;
}

inline MonoCombo partial_derivative(const MonoCombo& v, int i) {
  MonoCombo r;
  for (const auto& [m, c] : v) {
    if (m.e[i] == 0) continue;
    Monomial n = m;
    --n.e[i];
    r.emplace(n, c * Rational(m.e[i]));
  }
  return r;
}

// Primitive in x_i without constant.
inline MonoCombo primitive(const MonoCombo& v, int i) {
  MonoCombo r;
  for (const auto& [m, c] : v) {
    Monomial n = m;
    ++n.e[i];
    r.emplace(n, c / Rational(n.e[i]));
  }
  return r;
}

// c with u = c v, when it exists; v must be nonzero.
inline std::optional<Rational> proportion(const MonoCombo& u, const MonoCombo& v) {
  if (v.empty()) throw DomainError("proportion to the zero combination");
  if (u.empty()) return Rational(0);
  Rational c = u.rbegin()->second / v.rbegin()->second;
  if (u.rbegin()->first != v.rbegin()->first) return std::nullopt;
  if ((u - c * v).empty()) return c;
  return std::nullopt;
}

// Every monomial of degree <= d in nvars variables.
inline std::vector<Monomial> monomials_up_to(int nvars, int d) {
  std::vector<Monomial> out;
  for (int t = 0; t <= d; ++t)
    for (int i = 0; i <= t; ++i) {
      if (nvars == 2) {
        out.push_back(Monomial{{i, t - i, 0}});
        continue;
      }
      for (int j = 0; i + j <= t; ++j) out.push_back(Monomial{{i, j, t - i - j}});
    }
  return out;
}

// Quotient of C[x_1..x_n] (an n-form m dx_1...dx_n) by the differences
// b_i(m) - b_j(m) of the primitives, up to degree D. a is multiplication by f,
// b_i(v) = (d_i f) * (primitive of v in x_i).
class BrieskornContext {
 public:
  BrieskornContext(int nvars, MonoCombo f, int degree_bound)
      : nvars_(nvars), f_(std::move(f)), bound_(degree_bound) {
    if (nvars != 2 && nvars != 3) throw DomainError("nvars must be 2 or 3");
    if (f_.empty()) throw DomainError("f must be nonzero");
    for (const auto& [m, c] : f_)
      for (int i = nvars; i < 3; ++i)
        if (m.e[i] != 0) throw DomainError("f uses more than " + std::to_string(nvars) + " variables");
    for (int i = 0; i < nvars; ++i) partials_.push_back(partial_derivative(f_, i));
    build();
  }

  int nvars() const noexcept { return nvars_; }
  const MonoCombo& f() const noexcept { return f_; }
  int degree_bound() const noexcept { return bound_; }
  int f_degree() const { return degree(f_); }
  const MonoCombo& partial(int i) const { return partials_.at(i); }
  const SparseEchelon<Monomial>& relations() const noexcept { return relations_; }

  MonoCombo apply_a(const MonoCombo& v) const { return f_ * v; }
  MonoCombo apply_b(int i, const MonoCombo& v) const {
    if (i < 0 || i >= nvars_) throw DomainError("variable index out of range");
    return partials_[i] * primitive(v, i);
  }

  void check_degree(const MonoCombo& v) const {
    if (degree(v) > bound_)
      throw DomainError("degree " + std::to_string(degree(v)) + " exceeds the bound " + std::to_string(bound_) +
                        "; raise degree_bound");
  }
  MonoCombo reduce(const MonoCombo& v) const {
    check_degree(v);
    return relations_.reduce(v);
  }

 private:
  // Differences of consecutive primitives span all pairwise differences.
  void build() {
    int d = f_degree();
    for (const Monomial& m : monomials_up_to(nvars_, bound_ - d)) {
      MonoCombo v{{m, Rational(1)}};
      for (int i = 0; i + 1 < nvars_; ++i) relations_.insert(apply_b(i, v) - apply_b(i + 1, v));
    }
    relations_.interreduce();
  }

  int nvars_;
  MonoCombo f_;
  int bound_;
  std::vector<MonoCombo> partials_;
  SparseEchelon<Monomial> relations_;
};

inline const SparseEchelon<Monomial>& relation_basis(const BrieskornContext& ctx) { return ctx.relations(); }

// constant + a_coeff a + b_coeff b
struct OperatorFactor {
  Rational constant, a_coeff, b_coeff;

  AbElement element() const {
    return AbElement::scalar(constant) + AbElement::a() * a_coeff + AbElement::b() * b_coeff;
  }
};

// Product of factors written left to right; the rightmost acts first.
struct OperatorWord {
  std::vector<OperatorFactor> factors;

  AbElement element() const {
    AbElement r = AbElement::one();
    for (const auto& f : factors) r = r * f.element();
    return r;
  }
};

inline OperatorWord linear_word(const Rational& a_coeff, const Rational& b_coeff) {
  return {{OperatorFactor{Rational(0), a_coeff, b_coeff}}};
}

// Applies b with every primitive choice; the reduced results must agree.
inline MonoCombo apply_b_checked(const BrieskornContext& ctx, const MonoCombo& v) {
  MonoCombo first;
  for (int i = 0; i < ctx.nvars(); ++i) {
    MonoCombo w = ctx.apply_b(i, v);
    ctx.check_degree(w);
    w = ctx.reduce(w);
    if (i == 0) first = std::move(w);
    else if (w != first)
      throw DomainError("primitive choices disagree after reduction; raise degree_bound");
  }
  return first;
}

inline MonoCombo apply_factor(const BrieskornContext& ctx, const OperatorFactor& f, const MonoCombo& v) {
  MonoCombo r = f.constant * v;
  if (!f.a_coeff.is_zero()) {
    MonoCombo av = ctx.apply_a(v);
    ctx.check_degree(av);
    axpy(r, f.a_coeff, av);
  }
  if (!f.b_coeff.is_zero()) axpy(r, f.b_coeff, apply_b_checked(ctx, v));
  return ctx.reduce(r);
}

inline MonoCombo apply_word(const BrieskornContext& ctx, const OperatorWord& w, const MonoCombo& v) {
  MonoCombo r = ctx.reduce(v);
  for (auto it = w.factors.rbegin(); it != w.factors.rend(); ++it) r = apply_factor(ctx, *it, r);
  return r;
}

// X = sum_nu P_nu(a) b^nu acting on v.
inline MonoCombo apply_element(const BrieskornContext& ctx, const AbElement& X, const MonoCombo& v) {
  if (!X.is_exact()) throw DomainError("only exact elements act on the Brieskorn quotient");
  MonoCombo r, bv = ctx.reduce(v);
  int top = X.terms().empty() ? -1 : X.terms().rbegin()->first;
  for (int nu = 0; nu <= top; ++nu) {
    auto it = X.terms().find(nu);
    if (it != X.terms().end()) {
      MonoCombo av = bv;
      const auto& p = it->second;
      for (int i = 0; i <= p.deg_or_minus_one(); ++i) {
        axpy(r, p.coeff(i), av);
        if (i < p.deg_or_minus_one()) {
          av = ctx.apply_a(av);
          ctx.check_degree(av);
          av = ctx.reduce(av);
        }
      }
    }
    if (nu < top) bv = apply_b_checked(ctx, bv);
  }
  return ctx.reduce(r);
}

inline bool verify_operator_identity(const BrieskornContext& ctx, const OperatorWord& w, const MonoCombo& input,
                                     const MonoCombo& expected) {
  return apply_word(ctx, w, input) == ctx.reduce(expected);
}

struct ScalingRelation {
  Rational alpha, beta, c;  // (alpha a + beta b)(m) = c target
};

// alpha is normalized to 1 when it can be, else beta to 1.
inline std::optional<ScalingRelation> find_scaling_relation(const BrieskornContext& ctx, const MonoCombo& m,
                                                            const MonoCombo& target) {
  MonoCombo A = ctx.apply_a(m);
  ctx.check_degree(A);
  std::array<MonoCombo, 3> cols{ctx.reduce(A), apply_b_checked(ctx, m), ctx.reduce(target)};
  if (cols[2].empty()) return std::nullopt;
  std::map<Monomial, std::size_t> row_of;
  for (const auto& c : cols)
    for (const auto& [k, v] : c) row_of.emplace(k, 0);
  std::size_t n = 0;
  for (auto& [k, i] : row_of) i = n++;
  Matrix mat(n, std::vector<Rational>(3));
  for (std::size_t j = 0; j < 3; ++j)
    for (const auto& [k, v] : cols[j]) mat[row_of[k]][j] = v;
  for (const auto& v : nullspace(mat, 3)) {
    if (v[2].is_zero()) continue;
    Rational s = !v[0].is_zero() ? v[0] : v[1];
    if (s.is_zero()) continue;
    return ScalingRelation{v[0] / s, v[1] / s, -v[2] / s};
  }
  return std::nullopt;
}

// Heuristic lower bound for a rank, valid below the degree cutoff; stable
// when the value is unchanged after raising the cutoff by deg f.
struct RankCertificate {
  int rank = 0;
  int degree_bound = 0;
  bool stabilized = false;
};

namespace detail {

inline MonoCombo monic(MonoCombo v) {
  Rational inv = Rational(1) / v.rbegin()->second;
  for (auto& [k, c] : v) c *= inv;
  return v;
}

// Reduced outputs of all words in a, b (at least one b) applied to g whose
// every intermediate value stays within the degree bound, up to scale.
inline SparseEchelon<Monomial> b_multiples(const BrieskornContext& ctx, const MonoCombo& g) {
  SparseEchelon<Monomial> span;
  std::set<std::pair<MonoCombo, bool>> seen;
  std::vector<std::pair<MonoCombo, bool>> level;
  MonoCombo g0 = ctx.reduce(g);
  if (g0.empty()) return span;
  level.emplace_back(monic(g0), false);
  const std::size_t cap = 1u << 16;
  while (!level.empty()) {
    std::vector<std::pair<MonoCombo, bool>> next;
    for (const auto& [v, has_b] : level) {
      MonoCombo av = ctx.apply_a(v);
      if (degree(av) <= ctx.degree_bound()) {
        av = ctx.reduce(av);
        if (!av.empty()) next.emplace_back(monic(av), has_b);
      }
      bool fits = true;
      for (int i = 0; i < ctx.nvars() && fits; ++i) fits = degree(ctx.apply_b(i, v)) <= ctx.degree_bound();
      if (fits) {
        MonoCombo bv = apply_b_checked(ctx, v);
        if (!bv.empty()) next.emplace_back(monic(bv), true);
      }
    }
    level.clear();
    for (auto& e : next)
      if (seen.insert(e).second) {
        if (e.second) span.insert(e.first);
        level.push_back(std::move(e));
      }
    if (seen.size() > cap) throw DomainError("word enumeration exceeds " + std::to_string(cap) + " values");
  }
  return span;
}

inline int independence_rank_at(const BrieskornContext& ctx, const MonoCombo& g, int L) {
  SparseEchelon<Monomial> span = b_multiples(ctx, g);
  int r = 0;
  MonoCombo v = ctx.reduce(g);
  for (int k = 0; k < L; ++k) {
    if (k > 0) {
      v = ctx.apply_a(v);
      ctx.check_degree(v);
      v = ctx.reduce(v);
    }
    if (span.insert(v)) ++r;
  }
  return r;
}

inline int jacobian_rank_at(int nvars, const MonoCombo& f, int D, const std::vector<MonoCombo>& vs) {
  SparseEchelon<Monomial> ideal;
  for (int i = 0; i < nvars; ++i) {
    MonoCombo p = partial_derivative(f, i);
    if (p.empty()) continue;
    for (const Monomial& m : monomials_up_to(nvars, D - degree(p))) ideal.insert(MonoCombo{{m, Rational(1)}} * p);
  }
  int r = 0;
  for (const auto& v : vs) {
    if (degree(v) > D) throw DomainError("combination exceeds the degree bound; raise degree_bound");
    if (ideal.insert(v)) ++r;
  }
  return r;
}

}  // namespace detail

// Dimension of span{g, a g, ..., a^{L-1} g} modulo the relations and the
// truncated b.A.g.
inline RankCertificate independence_rank_bound(const BrieskornContext& ctx, const MonoCombo& g, int L) {
  if (L < 1) throw DomainError("L must be at least 1");
  int r = detail::independence_rank_at(ctx, g, L);
  BrieskornContext wider(ctx.nvars(), ctx.f(), ctx.degree_bound() + ctx.f_degree());
  return {r, ctx.degree_bound(), detail::independence_rank_at(wider, g, L) == r};
}

// Dimension of span(vs) modulo the Jacobian ideal truncated at the degree bound.
inline RankCertificate jacobian_rank(const BrieskornContext& ctx, const std::vector<MonoCombo>& vs) {
  int D = ctx.degree_bound();
  int r = detail::jacobian_rank_at(ctx.nvars(), ctx.f(), D, vs);
  return {r, D, detail::jacobian_rank_at(ctx.nvars(), ctx.f(), D + ctx.f_degree(), vs) == r};
}

// word(input) = output
struct ChainStep {
  OperatorWord word;
  MonoCombo input, output;
};

// Two routes from the generator to proportional end points.
struct BernsteinChain {
  std::vector<ChainStep> first, second;
};

struct DerivedBernstein {
  AbElement annihilator;
  HomogeneousForm initial;  // a-monic
  UniPoly bernstein;
  RankCertificate certificate;
};

namespace detail {

struct RouteValue {
  OperatorWord word;
  Rational scale;  // word(g) = scale * end
  MonoCombo end;
};

inline RouteValue evaluate_route(const BrieskornContext& ctx, const MonoCombo& g,
                                 const std::vector<ChainStep>& steps, const char* name) {
  if (steps.empty()) throw DomainError(std::string("empty ") + name + " route");
  RouteValue out{{}, Rational(1), {}};
  MonoCombo current = ctx.reduce(g);
  for (std::size_t s = 0; s < steps.size(); ++s) {
    const auto& st = steps[s];
    std::string where = std::string(name) + " route, step " + std::to_string(s + 1);
    if (!verify_operator_identity(ctx, st.word, st.input, st.output))
      throw DomainError("chain identity fails at " + where);
    MonoCombo in = ctx.reduce(st.input);
    if (in.empty()) throw DomainError("zero input at " + where);
    auto c = proportion(current, in);
    if (!c || c->is_zero()) throw DomainError("step input is not proportional to the previous value at " + where);
    out.scale *= *c;
    current = ctx.reduce(st.output);
    out.word.factors.insert(out.word.factors.begin(), st.word.factors.begin(), st.word.factors.end());
  }
  if (current.empty()) throw DomainError(std::string(name) + " route ends at zero");
  out.end = std::move(current);
  return out;
}

}  // namespace detail

// Annihilator s2 W1 - s1 k W2 from the routes W1(g) = s1 e1, W2(g) = s2 e2,
// e1 = k e2; its Bernstein polynomial once the rank bound reaches the
// initial-form degree.
inline DerivedBernstein derive_bernstein(const BrieskornContext& ctx, const MonoCombo& g,
                                         const BernsteinChain& chain) {
  auto r1 = detail::evaluate_route(ctx, g, chain.first, "first");
  auto r2 = detail::evaluate_route(ctx, g, chain.second, "second");
  auto k = proportion(r1.end, r2.end);
  if (!k) throw DomainError("the two routes end at non-proportional values");
  AbElement X = r1.word.element() * r2.scale - r2.word.element() * (r1.scale * *k);
  if (X.is_zero()) throw DomainError("the two routes give the same operator");
  auto [v, init] = valuation_initial(X);
  RankCertificate cert = independence_rank_bound(ctx, g, v);
  if (cert.rank < v)
    throw DomainError("rank certificate " + std::to_string(cert.rank) + " below the initial-form degree " +
                      std::to_string(v));
  auto b = bernstein_from_annihilator(X, v);
  return {X, b.element, b.bernstein, cert};
}

}  // namespace abmod
