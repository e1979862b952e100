#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <string>
#include <vector>

#include "abmod/asymptotics.hpp"
#include "abmod/homogeneous.hpp"
#include "abmod/io/parser.hpp"
#include "abmod/io/serialize.hpp"
#include "support/printing.hpp"
#include "support/random.hpp"

using namespace abmod;
using abmod::testing::Rng;

namespace {

Rational q(long n, long d = 1) { return Rational(n, d); }
AbElement A() { return AbElement::a(); }
AbElement B() { return AbElement::b(); }
AbElement lin(long a, long b) { return A() * q(a) + B() * q(b); }

std::size_t error_position(const std::string& text) {
  try {
    parse_ab(text);
  } catch (const ParseError& e) {
    return e.position();
  }
  ADD_FAILURE() << "no parse error for '" << text << "'";
  return 0;
}

MonoCombo random_mono(Rng& rng) {
  MonoCombo v;
  int terms = rng.integer(0, 4);
  for (int t = 0; t < terms; ++t)
    v = v + monomial(rng.integer(0, 6), rng.integer(0, 6), rng.integer(0, 3), rng.nonzero_rational());
  return v;
}

BSeries random_series(Rng& rng, bool truncated) {
  std::vector<Rational> c(rng.integer(0, 4));
  for (auto& x : c) x = rng.rational();
  if (!truncated) return BSeries(std::move(c));
  return BSeries(std::move(c), rng.integer(0, 5));
}

XiElement random_xi(Rng& rng) {
  XiElement::Terms t;
  int terms = rng.integer(1, 3);
  for (int i = 0; i < terms; ++i) {
    Rational alpha = Rational(rng.integer(-2, 8), rng.integer(1, 3));
    if (alpha <= q(-1)) alpha = q(0);
    t[XiKey{alpha, rng.integer(0, 2)}] = random_series(rng, rng.integer(0, 1) == 1);
  }
  return XiElement(std::move(t));
}

struct Run {
  int status;
  std::string out;
};

std::string quoted(const std::string& s) {
  std::string r = "'";
  for (char c : s) r += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return r + "'";
}

Run run_cli(const std::vector<std::string>& args, const std::string& env = "") {
  std::string cmd = env + (env.empty() ? "" : " ") + quoted(ABMOD_CLI_PATH);
  for (const auto& a : args) cmd += " " + quoted(a);
  cmd += " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  Run r{-1, ""};
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string data_file(const std::string& name) { return std::string(ABMOD_DATA_DIR) + "/" + name; }

}  // namespace

TEST(Parser, Literals) {
  EXPECT_EQ(parse_ab("(2a-b)"), lin(2, -1));
  EXPECT_EQ(parse_ab("a^2 + 1/2 b^3"), pow(A(), 2) + pow(B(), 3) * q(1, 2));
  AbElement five = lin(5, -18) * lin(5, -14) * lin(5, -10) * lin(5, -6) * lin(5, -2);
  EXPECT_EQ(parse_ab("(5a-18b)(5a-14b)(5a-10b)(5a-6b)(5a-2b)"), five);
  EXPECT_EQ(parse_ab("  -7/14 "), AbElement::scalar(q(-1, 2)));
}

TEST(Parser, JuxtapositionIsNoncommutative) {
  EXPECT_EQ(parse_ab("ab"), A() * B());
  EXPECT_EQ(parse_ab("a*b"), A() * B());
  EXPECT_EQ(parse_ab("ba"), A() * B() - B() * B());
  EXPECT_EQ(parse_ab("ab - ba"), pow(B(), 2));
  EXPECT_EQ(parse_ab("(a)(b)(a)"), A() * B() * A());
}

TEST(Parser, Precedence) {
  EXPECT_EQ(parse_ab("-a^2"), -pow(A(), 2));
  EXPECT_EQ(parse_ab("2a^2"), pow(A(), 2) * q(2));
  EXPECT_EQ(parse_ab("-ab"), -(A() * B()));
  EXPECT_EQ(parse_ab("a - b - a"), -B());
  EXPECT_EQ(parse_ab("a - -b"), A() + B());
  EXPECT_EQ(parse_ab("(a+b)^2"), (A() + B()) * (A() + B()));
  EXPECT_EQ(parse_ab("ab^2"), A() * pow(B(), 2));
  EXPECT_EQ(parse_ab("(ab)^2"), A() * B() * A() * B());
  EXPECT_EQ(parse_ab("2 3 a"), A() * q(6));
}

TEST(Parser, Truncation) {
  AbElement x = parse_ab("a + b + b^3 + O(b^3)");
  EXPECT_EQ(x.precision(), Precision(2));
  EXPECT_EQ(x, (A() + B()).truncated(2));
  EXPECT_EQ(parse_ab("O(b)"), AbElement().truncated(0));
}

TEST(Parser, ErrorsCarryPosition) {
  EXPECT_EQ(error_position("a + "), 4u);
  EXPECT_EQ(error_position("a $ b"), 2u);
  EXPECT_EQ(error_position("(a + b"), 6u);
  EXPECT_EQ(error_position("a + c"), 4u);
  EXPECT_EQ(error_position("a^b"), 2u);
  EXPECT_EQ(error_position("1/0"), 0u);
  EXPECT_EQ(error_position("1/ 2"), 2u);
  EXPECT_EQ(error_position("a)"), 1u);
  EXPECT_EQ(error_position("O(a)"), 2u);
  EXPECT_THROW(parse_ab("s^(1/2)"), ParseError);
  EXPECT_THROW(parse_xi("s^(-1)"), ParseError);
  EXPECT_THROW(parse_xi("a"), ParseError);
  EXPECT_THROW(parse_xi("s^(1/2) a"), ParseError);
  EXPECT_THROW(parse_xi("s^(1/2)^2"), ParseError);
  EXPECT_THROW(parse_mono("a"), ParseError);
}

TEST(Parser, XiLiterals) {
  EXPECT_TRUE(parse_xi("s^(1/2)").terms() == XiElement::basis(q(1, 2), 0).terms());
  EXPECT_TRUE(parse_xi("s^(1/2) log^2").terms() == XiElement::basis(q(1, 2), 2).terms());
  EXPECT_TRUE(parse_xi("log").terms() == XiElement::basis(q(0), 1).terms());
  EXPECT_TRUE(parse_xi("(1 + 2b) s^(-1/3)").terms() == XiElement::basis(q(-1, 3), 0, BSeries{q(1), q(2)}).terms());
  // a acts on the basis element
  EXPECT_TRUE(parse_xi("a s^(1/2) log").agrees_with(act_a(XiElement::basis(q(1, 2), 1))));
  EXPECT_TRUE(parse_xi("s^(0) - s^(0)").terms().empty());
  EXPECT_TRUE(parse_xi("0").terms().empty());
  XiElement z = parse_xi("(O(b^3)) s^(1/2)");
  ASSERT_EQ(z.terms().size(), 1u);
  EXPECT_EQ(z.terms().begin()->second.precision(), Precision(2));
}

TEST(Parser, MonomialCombinations) {
  EXPECT_EQ(parse_mono("x^5 + y^5 + x^2 y^2"), monomial(5, 0) + monomial(0, 5) + monomial(2, 2));
  EXPECT_EQ(parse_mono("x*y"), parse_mono("yx"));
  EXPECT_EQ(parse_mono("(x + y)^2"), monomial(2, 0) + monomial(1, 1, 0, q(2)) + monomial(0, 2));
  EXPECT_EQ(parse_mono("-1/2 x y z"), monomial(1, 1, 1, q(-1, 2)));
  EXPECT_EQ(parse_mono("u v", {"u", "v"}), monomial(1, 1));
  EXPECT_THROW(parse_mono("z", {"x", "y"}), ParseError);
  EXPECT_THROW(parse_mono("x", {"xx"}), DomainError);
}

TEST(RoundTrip, PrintThenParseOnCorpus) {
  Rng rng(20261015);
  int checked = 0;
  for (int i = 0; i < 40; ++i, ++checked) {
    AbElement x = rng.element(rng.integer(0, 4), rng.integer(0, 4), 40);
    if (i % 3 == 0) x = x.truncated(rng.integer(0, 5));
    std::string s = to_string(x);
    EXPECT_EQ(parse_ab(s), x) << s;
    EXPECT_EQ(to_string(parse_ab(s)), s);
  }
  for (int i = 0; i < 30; ++i, ++checked) {
    MonoCombo v = random_mono(rng);
    std::string s = to_string(v);
    EXPECT_EQ(parse_mono(s), v) << s;
  }
  for (int i = 0; i < 30; ++i, ++checked) {
    XiElement x = random_xi(rng);
    std::string s = to_string(x);
    EXPECT_TRUE(parse_xi(s).terms() == x.terms()) << s << " vs " << to_string(parse_xi(s));
    EXPECT_EQ(to_string(parse_xi(s)), s);
  }
  EXPECT_EQ(checked, 100);
}

TEST(RoundTrip, JsonDocuments) {
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    AbElement x = rng.element(3, 3, 50);
    if (i % 2) x = x.truncated(rng.integer(0, 4));
    Json j = to_json(x);
    EXPECT_EQ(ab_from_json(Json::parse(j.dump())), x);
    XiElement xi = random_xi(rng);
    EXPECT_TRUE(xi_from_json(Json::parse(to_json(xi).dump())).terms() == xi.terms());
    BSeries s = random_series(rng, i % 2 == 1);
    EXPECT_EQ(series_from_json(to_json(s)), s);
  }
  AbElement b3 = parse_ab("a^2 + 1/2 b^3");
  EXPECT_EQ(to_json(b3).dump(),
            R"({"precision":null,"terms":[{"apoly":["0","0","1"],"bpow":0},{"apoly":["1/2"],"bpow":3}]})");
  UniPoly p = UniPoly::linear_root(q(-1)) * UniPoly::linear_root(q(-1, 2));
  Json jp = to_json(p);
  EXPECT_EQ(jp.at("factored"), "(x+1) (x+1/2)");
  EXPECT_EQ(uni_from_json(jp), p);
  EXPECT_FALSE(to_json(UniPoly{q(1), q(0), q(1)}).contains("factored"));
  EXPECT_THROW(ab_from_json(Json::parse(R"({"terms":[{"bpow":0,"apoly":["1/0"]}]})")), ParseError);
}

TEST(OperatorWords, FactorsAndErrors) {
  OperatorWord w = parse_operator_word("(2a-8b)(2a-6b)");
  ASSERT_EQ(w.factors.size(), 2u);
  EXPECT_EQ(w.element(), lin(2, -8) * lin(2, -6));
  EXPECT_EQ(parse_operator_word("5a - 2b").element(), lin(5, -2));
  EXPECT_EQ(parse_operator_word("(1 + a)").factors[0].constant, q(1));
  EXPECT_EQ(to_string(w), "(2 a - 8 b)(2 a - 6 b)");
  EXPECT_THROW(parse_operator_word("(a^2)"), DomainError);
  EXPECT_THROW(parse_operator_word("(ab)"), DomainError);
  EXPECT_THROW(parse_operator_word("(a + )"), ParseError);
}

TEST(Config, LoadsChains) {
  BrieskornConfig c = load_config(data_file("f5.json"));
  EXPECT_EQ(c.variables, (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(c.degree_bound, 32);
  EXPECT_EQ(c.f, monomial(5, 0) + monomial(0, 5) + monomial(2, 2));
  ASSERT_EQ(c.generators.size(), 3u);
  const auto& xy = c.chain_for(monomial(1, 1));
  EXPECT_EQ(xy.chain.first.size(), 5u);
  EXPECT_EQ(xy.chain.second.front().word.element(), lin(2, -2));
  EXPECT_THROW(c.chain_for(monomial(2, 0)), DomainError);
  for (int n = 4; n <= 7; ++n) {
    BrieskornConfig x = load_config(data_file("xyz" + std::to_string(n) + ".json"));
    EXPECT_EQ(x.degree_bound, 3 * n + 8);
    EXPECT_EQ(x.generators.at(0).chain.first.size(), static_cast<std::size_t>(n));
  }
  EXPECT_THROW(config_from_json(Json::parse(R"({"variables":["x"]})")), ParseError);
  EXPECT_THROW(load_config(data_file("missing.json")), DomainError);
}

TEST(Cli, Goldens) {
  auto r = run_cli({"bernstein", "(5a-18b)(5a-14b)(5a-10b)(5a-6b)(5a-2b) - (2a-8b)(2a-6b)(2a-3b)(2a-b)", "--rank", "4"});
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "(x+1)^2 (x+1/2)^2\n");
  r = run_cli({"initial", "a^2 + b^3"});
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "a^2\n");
  r = run_cli({"mul", "a", "b", "--json"});
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(ab_from_json(Json::parse(r.out).at("product")), A() * B());
  r = run_cli({"brieskorn", "bernstein", "--config", data_file("f5.json")});
  EXPECT_EQ(r.out, "(x+1)^2 (x+1/2)^2\n");
  r = run_cli({"brieskorn", "bernstein", "--config", data_file("f5.json"), "--generator", "x"});
  EXPECT_EQ(r.out, "(x+13/10) (x+6/5) (x+4/5) (x+7/10)\n");
  r = run_cli({"brieskorn", "bernstein", "--config", data_file("xyz5.json")});
  EXPECT_EQ(r.out, "(x+1)^3\n");
}

TEST(Cli, CommandsAgreeWithLibrary) {
  auto r = run_cli({"divide", "a^3", "a - b", "--prec", "4", "--json"});
  ASSERT_EQ(r.status, 0);
  Json j = Json::parse(r.out);
  AbElement Q = ab_from_json(j.at("quotient")), R = ab_from_json(j.at("remainder"));
  EXPECT_EQ(Q * lin(1, -1) + R, pow(A(), 3));
  EXPECT_FALSE(j.at("member").get<bool>());

  r = run_cli({"factor-homog", "a^2 - 5ab + 8b^2", "--json"});
  ASSERT_EQ(r.status, 0);
  j = Json::parse(r.out);
  EXPECT_TRUE(j.at("split").get<bool>());
  EXPECT_EQ(rationals_from_json(j.at("tuple")), (std::vector<Rational>{q(2), q(3)}));

  r = run_cli({"intersect", "1, 2, 3"});
  EXPECT_EQ(r.out, to_string(intersect_principal_linear({q(1), q(2), q(3)})) + "\n");

  r = run_cli({"swap", "--lambda", "1/2", "--mu", "0", "--S", "1 + b + b^3", "--prec", "12"});
  EXPECT_EQ(r.out, "U = 1 - b - 1/5 b^3\nidentity: holds modulo b^13\n");

  r = run_cli({"reorder", "--lambdas", "3, 0", "--S", "1; 1 + b; 1", "--prec", "6", "--json"});
  ASSERT_EQ(r.status, 0);
  EXPECT_TRUE(Json::parse(r.out).at("verified").get<bool>());

  r = run_cli({"factor-char", "a^2 - 3ab + b^3", "--prec", "6", "--json"});
  ASSERT_EQ(r.status, 0);
  FactoredForm f;
  j = Json::parse(r.out);
  for (const auto& t : j.at("thetas")) f.thetas.push_back(series_from_json(t));
  EXPECT_TRUE(assemble_factored(f, 6).agrees_with(parse_ab("a^2 - 3ab + b^3").truncated(6)));

  r = run_cli({"xi", "rank", "s^(1/2) log + s^(-1/2)"});
  EXPECT_EQ(r.out, "2\n");
  r = run_cli({"xi", "canon", "s^(1/2) + 3/2 s^(3/2) log"});
  EXPECT_EQ(r.status, 0);
  r = run_cli({"xi", "bernstein", "s^(1/2) log + s^(-1/3)", "--prec", "6"});
  EXPECT_EQ(r.out, factored_string(bernstein_of_generated(parse_xi("s^(1/2) log + s^(-1/3)"), 6).bernstein) + "\n");

  r = run_cli({"brieskorn", "find", "--config", data_file("f5.json"), "--m", "1", "--target", "x^2 y^2"});
  EXPECT_EQ(r.out, "(a - 2/5 b)(1) = 1/5 (x^2 y^2)\n");
  r = run_cli({"brieskorn", "rank", "--config", data_file("f5.json"), "--L", "4", "--json"});
  EXPECT_EQ(Json::parse(r.out).at("rank"), 4);
  r = run_cli({"brieskorn", "verify", "--config", data_file("xyz4.json")});
  EXPECT_EQ(r.status, 0);
  r = run_cli({"brieskorn", "verify", "--config", data_file("f5.json"), "--word", "5a - 2b", "--input", "1",
               "--output", "x^2 y^2"});
  EXPECT_EQ(r.out, "holds\n");

  // the CLI agrees with the engine for the x y generator
  BrieskornConfig c = load_config(data_file("f5.json"));
  MonoCombo xy = monomial(1, 1);
  auto d = derive_bernstein(c.context(), xy, c.chain_for(xy).chain);
  r = run_cli({"brieskorn", "bernstein", "--config", data_file("f5.json"), "--generator", "x*y"});
  EXPECT_EQ(r.out, factored_string(d.bernstein) + "\n");
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli({"initial", "a + )"}).status, 2);
  EXPECT_EQ(run_cli({"bernstein", "a^2", "--rank", "3"}).status, 1);
  EXPECT_EQ(run_cli({"factor-homog", "a^2 + b^3"}).status, 1);
  EXPECT_EQ(run_cli({"brieskorn", "verify", "--config", data_file("f5.json"), "--word", "5a - 4b", "--input", "1",
                     "--output", "x^2 y^2"})
                .status,
            1);
  EXPECT_EQ(run_cli({"brieskorn", "bernstein", "--config", data_file("f5.json"), "--generator", "y"}).status, 1);
  EXPECT_EQ(run_cli({"nosuch"}).status, 2);
  EXPECT_EQ(run_cli({"xi", "annihilator", "s^(1/2"}).status, 2);
}

TEST(Cli, PrecisionFromEnvironment) {
  auto r = run_cli({"xi", "annihilator", "(1 + b) s^(1/2)"}, "ABMOD_PRECISION=3");
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("O(b^4)"), std::string::npos) << r.out;
  r = run_cli({"xi", "annihilator", "(1 + b) s^(1/2)"});
  EXPECT_NE(r.out.find("O(b^17)"), std::string::npos) << r.out;
  EXPECT_EQ(run_cli({"xi", "rank", "s"}, "ABMOD_PRECISION=x").status, 2);
}
