#pragma once

// Grammar, lowest precedence first:
//   sum     := unary (('+' | '-') unary)*
//   unary   := '-' unary | product
//   product := power (['*'] power)*        noncommutative, left to right
//   power   := primary ['^' integer]
//   primary := number | symbol | '(' sum ')' | 's^(' rational ')' [log ['^' integer]]
//            | log ['^' integer] | 'O(b^' integer ')'
// Numbers are integers or p/q with no inner spaces. Symbols are single
// letters, so "ab" reads as a*b.

#include <array>
#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "abmod/ab_element.hpp"
#include "abmod/brieskorn.hpp"
#include "abmod/error.hpp"
#include "abmod/xi_element.hpp"

namespace abmod {

enum class ParseMode { ab, xi, mono };

namespace detail {

using ParsedValue = std::variant<AbElement, XiElement, MonoCombo>;

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, ParseMode mode, std::vector<std::string> variables)
      : text_(text), mode_(mode), vars_(std::move(variables)) {}

  ParsedValue run() {
    ParsedValue v = sum();
    skip_space();
    if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }
  [[noreturn]] void fail_at(const std::string& what, std::size_t at) const { throw ParseError(what, at); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  bool at_keyword(std::string_view k) {
    skip_space();
    return text_.substr(pos_, k.size()) == k;
  }

  std::string digits() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a digit");
    return std::string(text_.substr(start, pos_ - start));
  }
  int small_integer() {
    std::size_t at = pos_;
    std::string d = digits();
    if (d.size() > 6) fail_at("exponent too large", at);
    return std::stoi(d);
  }
  Rational number() {
    std::size_t start = pos_;
    std::string lit = digits();
    if (pos_ < text_.size() && text_[pos_] == '/') {
      ++pos_;
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
        fail("expected a denominator");
      lit += "/" + digits();
    }
    try {
      return Rational::parse(lit);
    } catch (const ParseError& e) {
      fail_at(e.what(), start);
    }
  }
  Rational signed_number() {
    bool neg = accept('-');
    Rational r = number();
    return neg ? -r : r;
  }

  ParsedValue constant(const Rational& c) const {
    if (mode_ == ParseMode::mono) return ParsedValue(monomial(0, 0, 0, c));
    return ParsedValue(AbElement::scalar(c));
  }

  bool starts_primary() {
    char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || std::isalpha(static_cast<unsigned char>(c)) || c == '(';
  }

  ParsedValue sum() {
    ParsedValue v = unary();
    for (;;) {
      std::size_t at = (skip_space(), pos_);
      if (accept('+')) v = add(v, unary(), at, false);
      else if (accept('-')) v = add(v, unary(), at, true);
      else return v;
    }
  }

  ParsedValue unary() {
    std::size_t at = (skip_space(), pos_);
    if (accept('-')) return add(constant(Rational(0)), unary(), at, true);
    return product();
  }

  ParsedValue product() {
    ParsedValue v = power();
    for (;;) {
      std::size_t at = (skip_space(), pos_);
      if (accept('*')) v = multiply(v, power(), at);
      else if (starts_primary()) v = multiply(v, power(), at);
      else return v;
    }
  }

  ParsedValue power() {
    ParsedValue v = primary();
    std::size_t at = (skip_space(), pos_);
    if (!accept('^')) return v;
    int e = small_integer();
    return std::visit(
        [&](const auto& x) -> ParsedValue {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, XiElement>) {
            fail_at("a Xi element has no powers", at);
          } else if constexpr (std::is_same_v<T, AbElement>) {
            return pow(x, e);
          } else {
            MonoCombo r = monomial(0, 0, 0);
            for (int i = 0; i < e; ++i) r = r * x;
            return r;
          }
        },
        v);
  }

  ParsedValue primary() {
    std::size_t at = (skip_space(), pos_);
    char c = peek();
    if (c == '\0') fail("unexpected end of input");
    if (accept('(')) {
      ParsedValue v = sum();
      expect(')');
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return constant(number());
    if (!std::isalpha(static_cast<unsigned char>(c))) fail("unexpected '" + std::string(1, c) + "'");
    if (mode_ == ParseMode::xi && at_keyword("log")) {
      pos_ += 3;
      return XiElement::basis(Rational(0), log_power());
    }
    if (mode_ != ParseMode::mono && at_keyword("O(")) {
      pos_ += 2;
      expect('b');
      int k = accept('^') ? small_integer() : 1;
      if (k < 1) fail("O(b^k) needs k >= 1");
      expect(')');
      return AbElement().truncated(k - 1);
    }
    ++pos_;
    switch (mode_) {
      case ParseMode::ab:
      case ParseMode::xi:
        if (c == 'a') return AbElement::a();
        if (c == 'b') return AbElement::b();
        if (mode_ == ParseMode::xi && c == 's') {
          Rational alpha(1);
          if (accept('^')) {
            expect('(');
            alpha = signed_number();
            expect(')');
          }
          int j = 0;
          if (at_keyword("log")) {
            pos_ += 3;
            j = log_power();
          }
          if (alpha <= Rational(-1)) fail_at("exponent must exceed -1", at);
          return XiElement::basis(alpha, j);
        }
        break;
      case ParseMode::mono:
        for (std::size_t i = 0; i < vars_.size(); ++i)
          if (vars_[i].size() == 1 && vars_[i][0] == c) {
            std::array<int, 3> e{};
            e[i] = 1;
            return monomial(e[0], e[1], e[2]);
          }
        break;
    }
    fail_at("unknown symbol '" + std::string(1, c) + "'", at);
  }

  int log_power() { return accept('^') ? small_integer() : 1; }

  static bool is_constant(const AbElement& x) {
    return x.is_exact() && (x.is_zero() || (x.terms().size() == 1 && x.terms().begin()->first == 0 && x.deg_a() == 0));
  }

  ParsedValue add(const ParsedValue& l, const ParsedValue& r, std::size_t at, bool subtract) {
    if (l.index() != r.index()) {
      // 0 and exact Xi elements mix through the zero element.
      const AbElement* ab = std::get_if<AbElement>(&l);
      const XiElement* xi = std::get_if<XiElement>(&r);
      if (!ab) {
        ab = std::get_if<AbElement>(&r);
        xi = std::get_if<XiElement>(&l);
      }
      if (ab && xi && ab->is_zero() && ab->is_exact()) {
        XiElement out = std::holds_alternative<XiElement>(l) ? *xi : XiElement();
        if (std::holds_alternative<XiElement>(r)) out = subtract ? out - *xi : out + *xi;
        return out;
      }
      fail_at("cannot add an operator and a Xi element", at);
    }
    return std::visit(
        [&](const auto& x) -> ParsedValue {
          using T = std::decay_t<decltype(x)>;
          const T& y = std::get<T>(r);
          if constexpr (std::is_same_v<T, MonoCombo>) return subtract ? x - y : x + y;
          else return subtract ? x - y : x + y;
        },
        l);
  }

  ParsedValue multiply(const ParsedValue& l, const ParsedValue& r, std::size_t at) {
    if (auto* x = std::get_if<MonoCombo>(&l)) return *x * std::get<MonoCombo>(r);
    if (auto* x = std::get_if<AbElement>(&l)) {
      if (auto* y = std::get_if<AbElement>(&r)) return *x * *y;
      const XiElement& phi = std::get<XiElement>(r);
      if (x->deg_a() <= 0) return x->a_coefficient(0) * phi;
      return act(*x, phi);
    }
    const XiElement& phi = std::get<XiElement>(l);
    if (auto* y = std::get_if<AbElement>(&r); y && is_constant(*y)) return phi * y->coeff(0, 0);
    fail_at("a Xi element can only be scaled on the right by a number", at);
  }

  std::string_view text_;
  ParseMode mode_;
  std::vector<std::string> vars_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline AbElement parse_ab(std::string_view text) {
  auto v = detail::ExpressionParser(text, ParseMode::ab, {}).run();
  return std::get<AbElement>(v);
}

// Exact zero reads as the zero element.
inline XiElement parse_xi(std::string_view text) {
  auto v = detail::ExpressionParser(text, ParseMode::xi, {}).run();
  if (auto* x = std::get_if<XiElement>(&v)) return *x;
  const AbElement& ab = std::get<AbElement>(v);
  if (ab.is_zero() && ab.is_exact()) return XiElement();
  throw ParseError("expected a Xi element, got an operator", 0);
}

inline MonoCombo parse_mono(std::string_view text, std::vector<std::string> variables = {"x", "y", "z"}) {
  if (variables.size() > 3) throw DomainError("at most three variables are supported");
  for (const auto& v : variables)
    if (v.size() != 1 || !std::isalpha(static_cast<unsigned char>(v[0])))
      throw DomainError("variable names must be single letters, got '" + v + "'");
  auto v = detail::ExpressionParser(text, ParseMode::mono, std::move(variables)).run();
  return std::get<MonoCombo>(v);
}

// Comma-separated rationals, e.g. "1, -1/2, 3".
inline std::vector<Rational> parse_rational_list(std::string_view text) {
  std::vector<Rational> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = text.find(',', start);
    std::string_view piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    std::size_t lo = 0, hi = piece.size();
    while (lo < hi && std::isspace(static_cast<unsigned char>(piece[lo]))) ++lo;
    while (hi > lo && std::isspace(static_cast<unsigned char>(piece[hi - 1]))) --hi;
    if (lo == hi) throw ParseError("empty list entry", start + lo);
    try {
      out.push_back(Rational::parse(piece.substr(lo, hi - lo)));
    } catch (const ParseError& e) {
      throw ParseError("malformed rational in list", start + lo + e.position());
    }
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

}  // namespace abmod
