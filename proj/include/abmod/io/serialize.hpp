#pragma once

#include <cctype>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "abmod/ab_element.hpp"
#include "abmod/brieskorn.hpp"
#include "abmod/error.hpp"
#include "abmod/io/format.hpp"
#include "abmod/io/parser.hpp"
#include "abmod/uni_poly.hpp"
#include "abmod/xi_element.hpp"

namespace abmod {

using Json = nlohmann::json;

inline Json rational_json(const Rational& r) { return r.to_string(); }

inline Rational rational_from_json(const Json& j) {
  if (!j.is_string()) throw ParseError("expected a rational string", 0);
  return Rational::parse(j.get<std::string>());
}

inline Json precision_json(Precision p) { return p ? Json(*p) : Json(nullptr); }

inline Precision precision_from_json(const Json& j) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_number_integer()) throw ParseError("precision must be an integer or null", 0);
  return j.get<int>();
}

inline Json rationals_json(const std::vector<Rational>& v) {
  Json out = Json::array();
  for (const auto& r : v) out.push_back(rational_json(r));
  return out;
}

inline std::vector<Rational> rationals_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("expected an array of rationals", 0);
  std::vector<Rational> out;
  for (const auto& e : j) out.push_back(rational_from_json(e));
  return out;
}

// {"precision": N|null, "terms": [{"bpow": nu, "apoly": [c_0, c_1, ...]}]}
inline Json to_json(const AbElement& x) {
  Json terms = Json::array();
  for (const auto& [nu, p] : x.terms()) terms.push_back({{"bpow", nu}, {"apoly", rationals_json(p.coeffs())}});
  return {{"precision", precision_json(x.precision())}, {"terms", terms}};
}

inline AbElement ab_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("terms")) throw ParseError("AbElement document needs \"terms\"", 0);
  AbElement::Terms t;
  for (const auto& term : j.at("terms")) {
    int nu = term.at("bpow").get<int>();
    if (nu < 0) throw ParseError("negative bpow", 0);
    t[nu] += UniPoly(rationals_from_json(term.at("apoly")));
  }
  return AbElement(std::move(t), precision_from_json(j.value("precision", Json(nullptr))));
}

// {"coeffs": [c_0, ...]} plus "factored" when the polynomial splits over Q.
inline Json to_json(const UniPoly& p) {
  Json out{{"coeffs", rationals_json(p.coeffs())}};
  if (!p.is_zero() && factor_rational(p).nonlinear.empty()) out["factored"] = factored_string(p);
  return out;
}

inline UniPoly uni_from_json(const Json& j) { return UniPoly(rationals_from_json(j.at("coeffs"))); }

inline Json to_json(const BSeries& s) {
  return {{"precision", precision_json(s.precision())}, {"coeffs", rationals_json(s.coeffs())}};
}

inline BSeries series_from_json(const Json& j) {
  return BSeries(rationals_from_json(j.at("coeffs")), precision_from_json(j.value("precision", Json(nullptr))));
}

// {"terms": [{"alpha": "p/q", "log": j, "series": {...}}]}
inline Json to_json(const XiElement& x) {
  Json terms = Json::array();
  for (const auto& [k, s] : x.terms())
    terms.push_back({{"alpha", rational_json(k.alpha)}, {"log", k.j}, {"series", to_json(s)}});
  return {{"terms", terms}};
}

inline XiElement xi_from_json(const Json& j) {
  XiElement::Terms t;
  for (const auto& term : j.at("terms"))
    t[XiKey{rational_from_json(term.at("alpha")), term.at("log").get<int>()}] = series_from_json(term.at("series"));
  return XiElement(std::move(t));
}

// A word such as "(2a-8b)(2a-6b)" or "5a - 2b"; every factor is c + alpha a + beta b.
inline OperatorWord parse_operator_word(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> groups;
  std::size_t i = 0;
  bool grouped = false;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    if (text[i] != '(') {
      grouped = false;
      break;
    }
    int depth = 0;
    std::size_t start = i;
    for (; i < text.size(); ++i) {
      if (text[i] == '(') ++depth;
      if (text[i] == ')' && --depth == 0) break;
    }
    if (i == text.size()) throw ParseError("expected ')'", text.size());
    groups.emplace_back(start + 1, text.substr(start + 1, i - start - 1));
    grouped = true;
    ++i;
  }
  if (!grouped) groups = {{0, text}};
  OperatorWord w;
  for (const auto& [offset, g] : groups) {
    AbElement e;
    try {
      e = parse_ab(g);
    } catch (const ParseError& err) {
      throw ParseError("malformed word factor", offset + err.position());
    }
    OperatorFactor f{e.coeff(0, 0), e.coeff(1, 0), e.coeff(0, 1)};
    if (!e.is_exact() || !(f.element() == e))
      throw DomainError("word factor '" + std::string(g) + "' is not of the form c + alpha a + beta b");
    w.factors.push_back(f);
  }
  return w;
}

inline std::string to_string(const OperatorWord& w) {
  std::string out;
  for (const auto& f : w.factors) out += "(" + to_string(f.element()) + ")";
  return out.empty() ? "1" : out;
}

struct GeneratorChain {
  std::string name;  // text as written in the config
  MonoCombo generator;
  BernsteinChain chain;
};

struct BrieskornConfig {
  std::vector<std::string> variables;
  std::string f_text;
  MonoCombo f;
  int degree_bound = 0;
  std::vector<GeneratorChain> generators;

  BrieskornContext context() const { return BrieskornContext(static_cast<int>(variables.size()), f, degree_bound); }
  MonoCombo parse(std::string_view text) const { return parse_mono(text, variables); }

  const GeneratorChain& chain_for(const MonoCombo& g) const {
    for (const auto& c : generators)
      if (c.generator == g) return c;
    throw DomainError("no chain for generator " + to_string(g, variables) + " in the config");
  }
};

// {"variables": [...], "f": "<expr>", "degree_bound": D, "generators": [{"generator": "<expr>",
//  "first": [{"word": "<word>", "input": "<expr>", "output": "<expr>"}], "second": [...]}]}
inline BrieskornConfig config_from_json(const Json& j) {
  BrieskornConfig c;
  try {
    c.variables = j.at("variables").get<std::vector<std::string>>();
    c.f_text = j.at("f").get<std::string>();
    c.degree_bound = j.at("degree_bound").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed config: ") + e.what(), 0);
  }
  c.f = c.parse(c.f_text);
  if (!j.contains("generators")) return c;
  auto steps = [&](const Json& arr) {
    std::vector<ChainStep> out;
    for (const auto& s : arr)
      out.push_back({parse_operator_word(s.at("word").get<std::string>()), c.parse(s.at("input").get<std::string>()),
                     c.parse(s.at("output").get<std::string>())});
    return out;
  };
  try {
    for (const auto& g : j.at("generators")) {
      std::string name = g.at("generator").get<std::string>();
      c.generators.push_back({name, c.parse(name), {steps(g.at("first")), steps(g.at("second"))}});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed chain: ") + e.what(), 0);
  }
  return c;
}

inline BrieskornConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("config " + path + " is not valid JSON", e.byte);
  }
  return config_from_json(j);
}

}  // namespace abmod
