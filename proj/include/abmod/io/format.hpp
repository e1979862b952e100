#pragma once

#include <string>
#include <vector>

#include "abmod/ab_element.hpp"
#include "abmod/b_series.hpp"
#include "abmod/brieskorn.hpp"
#include "abmod/uni_poly.hpp"
#include "abmod/xi_element.hpp"

namespace abmod {

namespace detail {

inline void append_term(std::string& out, const Rational& c, const std::string& body) {
  bool neg = c.sign() < 0;
  Rational mag = neg ? -c : c;
  if (out.empty()) out += neg ? "-" : "";
  else out += neg ? " - " : " + ";
  if (body.empty()) out += mag.to_string();
  else if (mag.is_one()) out += body;
  else out += mag.to_string() + " " + body;
}

inline std::string power(const char* var, int e) {
  if (e == 0) return "";
  if (e == 1) return var;
  return std::string(var) + "^" + std::to_string(e);
}

}  // namespace detail

// Text form readable back by the expression parser, e.g. "a^2 - 5 a b + 8 b^2".
inline std::string to_string(const AbElement& x) {
  std::string out;
  for (const auto& [nu, p] : x.terms()) {
    for (int i = p.deg_or_minus_one(); i >= 0; --i) {
      if (p.coeff(i).is_zero()) continue;
      std::string body = detail::power("a", i);
      std::string bp = detail::power("b", nu);
      if (!bp.empty()) body += (body.empty() ? "" : " ") + bp;
      detail::append_term(out, p.coeff(i), body);
    }
  }
  if (out.empty()) out = "0";
  if (x.precision()) out += " + O(b^" + std::to_string(*x.precision() + 1) + ")";
  return out;
}

// Leading monomial first, e.g. "x^5 + y^5 + x^2 y^2".
inline std::string to_string(const MonoCombo& v, const std::vector<std::string>& names = {"x", "y", "z"}) {
  std::string out;
  for (auto it = v.rbegin(); it != v.rend(); ++it) {
    std::string body;
    for (int i = 0; i < 3; ++i) {
      if (it->first.e[i] == 0) continue;
      if (i >= static_cast<int>(names.size())) throw DomainError("monomial uses an unnamed variable");
      std::string p = detail::power(names[i].c_str(), it->first.e[i]);
      if (!p.empty()) body += (body.empty() ? "" : " ") + p;
    }
    detail::append_term(out, it->second, body);
  }
  return out.empty() ? "0" : out;
}

inline std::string to_string(const HomogeneousForm& h) { return to_string(AbElement::from_form(h)); }

inline std::string to_string(const UniPoly& p, const std::string& var = "x") { return p.to_string(var); }

inline std::string to_string(const BSeries& s) { return s.to_string("b"); }

inline std::string xi_basis_string(const XiKey& k) {
  std::string out = "s^(" + k.alpha.to_string() + ")";
  if (k.j == 1) out += " log";
  if (k.j > 1) out += " log^" + std::to_string(k.j);
  return out;
}

// Terms S(b) s^(alpha) log^j, where s^(alpha) log^j names e_{alpha,j}.
inline std::string to_string(const XiElement& x) {
  std::string out;
  for (const auto& [k, s] : x.terms()) {
    std::string body = xi_basis_string(k);
    if (s.is_exact() && s.stored_degree() == 0) {
      detail::append_term(out, s.stored(0), body);
    } else {
      if (!out.empty()) out += " + ";
      out += "(" + to_string(s) + ") " + body;
    }
  }
  return out.empty() ? "0" : out;
}

inline std::string linear_factor_string(const Rational& root, const std::string& var) {
  if (root.is_zero()) return var;
  if (root.sign() < 0) return "(" + var + "+" + (-root).to_string() + ")";
  return "(" + var + "-" + root.to_string() + ")";
}

// Factored rendering, linear factors by ascending root, e.g. "(x+1)^2 (x+1/2)^2".
inline std::string factored_string(const UniPoly& p, const std::string& var = "x") {
  if (p.is_zero()) return "0";
  auto f = factor_rational(p);
  std::vector<std::string> parts;
  if (!f.leading.is_one()) parts.push_back(f.leading.to_string());
  for (const auto& [r, m] : f.roots) {
    std::string s = linear_factor_string(r, var);
    if (m > 1) s += "^" + std::to_string(m);
    parts.push_back(s);
  }
  for (const auto& piece : f.nonlinear) {
    std::string s = "(" + piece.factor.to_string(var) + ")";
    if (piece.multiplicity > 1) s += "^" + std::to_string(piece.multiplicity);
    parts.push_back(s);
  }
  if (parts.empty()) return "1";
  std::string out;
  for (const auto& s : parts) out += (out.empty() ? "" : " ") + s;
  return out;
}

}  // namespace abmod
