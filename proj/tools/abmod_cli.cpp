#include <cstdlib>
#include <functional>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "abmod/ab_division.hpp"
#include "abmod/asymptotics.hpp"
#include "abmod/brieskorn.hpp"
#include "abmod/homogeneous.hpp"
#include "abmod/io/format.hpp"
#include "abmod/io/serialize.hpp"
#include "abmod/io/parser.hpp"
#include "abmod/monogenic.hpp"

using namespace abmod;

namespace {

struct Output {
  std::string text;
  Json json;
};

int default_precision() {
  const char* env = std::getenv("ABMOD_PRECISION");
  if (!env || !*env) return 16;
  std::string s(env);
  for (char c : s)
    if (c < '0' || c > '9') throw ParseError("ABMOD_PRECISION must be a nonnegative integer", 0);
  return std::stoi(s);
}

std::string lines(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += s + "\n";
  return out;
}

Json strings_json(const std::vector<Rational>& v) { return rationals_json(v); }

std::string list_string(const std::vector<Rational>& v) {
  std::string out;
  for (const auto& r : v) out += (out.empty() ? "" : ", ") + r.to_string();
  return out;
}

// A series in b given as an expression free of a.
BSeries parse_series(const std::string& text) {
  AbElement x = parse_ab(text);
  if (x.deg_a() > 0) throw DomainError("'" + text + "' is not a series in b");
  return x.a_coefficient(0);
}

std::vector<BSeries> parse_series_list(const std::string& text) {
  std::vector<BSeries> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t semi = text.find(';', start);
    std::string piece = text.substr(start, semi == std::string::npos ? std::string::npos : semi - start);
    try {
      out.push_back(parse_series(piece));
    } catch (const ParseError& e) {
      throw ParseError("malformed series in list", start + e.position());
    }
    if (semi == std::string::npos) return out;
    start = semi + 1;
  }
}

HomogeneousForm homogeneous_of(const AbElement& x) {
  if (!x.is_exact()) throw DomainError("expected an exact homogeneous element");
  auto [v, h] = valuation_initial(x);
  if (!(AbElement::from_form(h) == x)) throw DomainError("element is not homogeneous");
  return h;
}

Output bernstein_cmd(const std::string& expr, int rank) {
  auto r = bernstein_from_annihilator(parse_ab(expr), rank);
  std::string init = to_string(AbElement::from_form(r.element));
  return {lines({factored_string(r.bernstein)}),
          {{"bernstein", to_json(r.bernstein)}, {"initial", init}, {"rank", rank}}};
}

Output initial_cmd(const std::string& expr) {
  auto [v, h] = valuation_initial(parse_ab(expr));
  AbElement init = AbElement::from_form(h);
  return {lines({to_string(init)}), {{"valuation", v}, {"initial", to_json(init)}, {"text", to_string(init)}}};
}

Output mul_cmd(const std::string& x, const std::string& y) {
  AbElement p = parse_ab(x) * parse_ab(y);
  return {lines({to_string(p)}), {{"product", to_json(p)}, {"text", to_string(p)}}};
}

Output divide_cmd(const std::string& x, const std::string& y, int N) {
  auto r = right_divide(parse_ab(x), parse_ab(y), N);
  auto m = membership_report(parse_ab(x), parse_ab(y), N);
  std::string member = m.member ? (m.precision ? "yes, to precision " + std::to_string(*m.precision) : "yes, exactly")
                                : "no";
  return {lines({"quotient: " + to_string(r.quotient), "remainder: " + to_string(r.remainder), "member: " + member}),
          {{"quotient", to_json(r.quotient)},
           {"remainder", to_json(r.remainder)},
           {"member", m.member},
           {"member_precision", precision_json(m.precision)}}};
}

Output factor_homog_cmd(const std::string& expr) {
  HomogeneousForm h = homogeneous_of(parse_ab(expr));
  auto f = factor_over_rationals(h);
  UniPoly B = bernstein_polynomial(h);
  Json j{{"split", f.split}, {"bernstein", to_json(B)}};
  if (f.split) {
    std::string prod;
    for (const auto& l : f.tuple) prod += "(" + to_string(AbElement::linear(l)) + ")";
    j["tuple"] = strings_json(f.tuple);
    return {lines({prod.empty() ? "1" : prod, "bernstein: " + factored_string(B)}), j};
  }
  std::vector<std::string> out{"does not split over Q", "bernstein: " + factored_string(B)};
  Json pieces = Json::array();
  for (const auto& p : f.irreducible) {
    out.push_back("avatar factor: (" + p.factor.to_string("u") + ")^" + std::to_string(p.multiplicity) +
                  (p.certified_irreducible ? "" : " (irreducibility not certified)"));
    pieces.push_back({{"factor", to_json(p.factor)}, {"multiplicity", p.multiplicity},
                      {"certified_irreducible", p.certified_irreducible}});
  }
  j["irreducible"] = pieces;
  return {lines(out), j};
}

Output intersect_cmd(const std::string& mus) {
  AbElement g = intersect_principal_linear(parse_rational_list(mus));
  return {lines({to_string(g)}), {{"generator", to_json(g)}, {"text", to_string(g)}}};
}

Output swap_cmd(const std::string& lambda, const std::string& mu, const std::string& S, int N) {
  auto r = swap_factors(Rational::parse(mu), Rational::parse(lambda), parse_series(S), N);
  return {lines({"U = " + to_string(r.U), std::string("identity: ") + (r.identity_check ? "holds" : "fails") +
                                              " modulo b^" + std::to_string(N + 1)}),
          {{"U", to_json(r.U)}, {"identity", r.identity_check}}};
}

Output reorder_cmd(const std::string& lambdas, const std::string& S, int N) {
  auto r = reorder_factors(parse_rational_list(lambdas), parse_series_list(S), N);
  std::vector<std::string> out{"mu = " + list_string(r.mus)};
  Json T = Json::array();
  for (std::size_t i = 0; i < r.T.size(); ++i) {
    out.push_back("T_" + std::to_string(i) + " = " + to_string(r.T[i]));
    T.push_back(to_json(r.T[i]));
  }
  out.push_back(std::string("product check: ") + (r.verified ? "holds" : "fails"));
  return {lines(out), {{"mus", strings_json(r.mus)}, {"T", T}, {"verified", r.verified}}};
}

Output factor_char_cmd(const std::string& expr, int N) {
  auto f = factor_characteristic(is_characteristic(parse_ab(expr)), N);
  std::vector<std::string> out;
  Json thetas = Json::array();
  for (std::size_t i = 0; i < f.thetas.size(); ++i) {
    out.push_back("theta_" + std::to_string(i + 1) + " = " + to_string(f.thetas[i]));
    thetas.push_back(to_json(f.thetas[i]));
  }
  return {lines(out), {{"thetas", thetas}}};
}

Output xi_cmd(const std::string& action, const std::string& expr, int N) {
  XiElement x = parse_xi(expr);
  if (action == "canon") {
    auto c = canonical_form(x);
    XiElement e = c.element();
    return {lines({to_string(e), "weight: " + std::to_string(c.weight())}),
            {{"canonical", to_json(e)}, {"text", to_string(e)}, {"weight", c.weight()}}};
  }
  if (action == "rank") {
    int r = rank_of_generated(x);
    return {lines({std::to_string(r)}), {{"rank", r}}};
  }
  if (action == "annihilator") {
    AbElement X = annihilator_of(x, N);
    return {lines({to_string(X)}), {{"annihilator", to_json(X)}, {"text", to_string(X)}}};
  }
  auto g = bernstein_of_generated(x, N);
  return {lines({factored_string(g.bernstein)}),
          {{"bernstein", to_json(g.bernstein)}, {"rank", g.rank}, {"annihilator", to_json(g.annihilator)}}};
}

struct BrieskornArgs {
  std::string config, generator = "1", word, input, output, m, target;
  int L = 0;
};

Output brieskorn_verify(const BrieskornConfig& cfg, const BrieskornContext& ctx, const BrieskornArgs& a) {
  if (!a.word.empty()) {
    bool ok = verify_operator_identity(ctx, parse_operator_word(a.word), cfg.parse(a.input), cfg.parse(a.output));
    if (!ok) throw DomainError("identity fails: " + a.word + " (" + a.input + ") != " + a.output);
    return {lines({"holds"}), {{"holds", true}}};
  }
  std::vector<std::string> out;
  Json steps = Json::array();
  bool all = true;
  for (const auto& g : cfg.generators) {
    for (const auto* route : {&g.chain.first, &g.chain.second}) {
      for (const auto& st : *route) {
        bool ok = verify_operator_identity(ctx, st.word, st.input, st.output);
        all = all && ok;
        std::string line = to_string(st.word) + " (" + to_string(st.input, cfg.variables) +
                           ") = " + to_string(st.output, cfg.variables);
        out.push_back((ok ? "ok    " : "FAIL  ") + line);
        steps.push_back({{"generator", g.name}, {"identity", line}, {"holds", ok}});
      }
    }
  }
  if (!all) {
    std::cout << lines(out);
    throw DomainError("some chain identities fail");
  }
  return {lines(out), {{"steps", steps}, {"all_hold", all}}};
}

Output brieskorn_cmd(const std::string& action, const BrieskornArgs& a) {
  BrieskornConfig cfg = load_config(a.config);
  BrieskornContext ctx = cfg.context();
  auto show = [&](const MonoCombo& v) { return to_string(v, cfg.variables); };
  if (action == "verify") return brieskorn_verify(cfg, ctx, a);
  if (action == "find") {
    auto r = find_scaling_relation(ctx, cfg.parse(a.m), cfg.parse(a.target));
    if (!r) throw DomainError("no relation (alpha a + beta b)(" + a.m + ") = c (" + a.target + ")");
    std::string op = to_string(AbElement::a() * r->alpha + AbElement::b() * r->beta);
    return {lines({"(" + op + ")(" + show(cfg.parse(a.m)) + ") = " + r->c.to_string() + " (" +
                   show(cfg.parse(a.target)) + ")"}),
            {{"alpha", rational_json(r->alpha)}, {"beta", rational_json(r->beta)}, {"c", rational_json(r->c)}}};
  }
  MonoCombo g = cfg.parse(a.generator);
  if (action == "rank") {
    if (a.L < 1) throw DomainError("rank needs --L >= 1");
    auto c = independence_rank_bound(ctx, g, a.L);
    return {lines({"rank >= " + std::to_string(c.rank) + " at degree bound " + std::to_string(c.degree_bound) +
                   (c.stabilized ? ", stabilized" : ", not stabilized")}),
            {{"rank", c.rank}, {"degree_bound", c.degree_bound}, {"stabilized", c.stabilized}}};
  }
  auto d = derive_bernstein(ctx, g, cfg.chain_for(g).chain);
  return {lines({factored_string(d.bernstein)}),
          {{"bernstein", to_json(d.bernstein)},
           {"annihilator", to_json(d.annihilator)},
           {"initial", to_string(AbElement::from_form(d.initial))},
           {"rank", d.certificate.rank},
           {"stabilized", d.certificate.stabilized}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Computations in the algebra generated by a, b with ab - ba = b^2"};
  app.require_subcommand(1);
  app.fallthrough();
  bool json = false;
  app.add_flag("--json", json, "Print JSON instead of text");

  std::function<Output()> run;
  int prec = 0;
  auto add_prec = [&](CLI::App* sub) { sub->add_option("--prec", prec, "Truncation: results modulo b^(N+1)"); };

  std::string e1, e2, e3;
  int rank = 0;
  auto* bern = app.add_subcommand("bernstein", "Bernstein polynomial from an annihilator");
  bern->add_option("expr", e1)->required();
  bern->add_option("--rank", rank, "Rank certificate")->required();
  bern->callback([&] { run = [&] { return bernstein_cmd(e1, rank); }; });

  auto* init = app.add_subcommand("initial", "Valuation and initial form");
  init->add_option("expr", e1)->required();
  init->callback([&] { run = [&] { return initial_cmd(e1); }; });

  auto* mul = app.add_subcommand("mul", "Product x y");
  mul->add_option("x", e1)->required();
  mul->add_option("y", e2)->required();
  mul->callback([&] { run = [&] { return mul_cmd(e1, e2); }; });

  auto* div = app.add_subcommand("divide", "Right division X = Q y + R");
  div->add_option("X", e1)->required();
  div->add_option("y", e2)->required();
  add_prec(div);
  div->callback([&] { run = [&] { return divide_cmd(e1, e2, prec); }; });

  auto* fh = app.add_subcommand("factor-homog", "Linear factorization of a homogeneous element");
  fh->add_option("expr", e1)->required();
  fh->callback([&] { run = [&] { return factor_homog_cmd(e1); }; });

  auto* inter = app.add_subcommand("intersect", "Generator of the intersection of the ideals A(a - mu_j b)");
  inter->add_option("mus", e1, "Comma-separated rationals")->required();
  inter->callback([&] { run = [&] { return intersect_cmd(e1); }; });

  auto* sw = app.add_subcommand("swap", "Exchange two adjacent linear factors");
  sw->add_option("--lambda", e1)->required();
  sw->add_option("--mu", e2)->required();
  sw->add_option("--S", e3, "Series in b with S(0) = 1")->required();
  add_prec(sw);
  sw->callback([&] { run = [&] { return swap_cmd(e1, e2, e3, prec); }; });

  auto* ro = app.add_subcommand("reorder", "Sorted member of the twisted orbit");
  ro->add_option("--lambdas", e1, "Comma-separated rationals")->required();
  ro->add_option("--S", e2, "Semicolon-separated series S_0; ...; S_k")->required();
  add_prec(ro);
  ro->callback([&] { run = [&] { return reorder_cmd(e1, e2, prec); }; });

  auto* fc = app.add_subcommand("factor-char", "Factor a characteristic element into linear factors");
  fc->add_option("expr", e1)->required();
  add_prec(fc);
  fc->callback([&] { run = [&] { return factor_char_cmd(e1, prec); }; });

  auto* xi = app.add_subcommand("xi", "Elements of the asymptotic expansion module");
  xi->require_subcommand(1);
  const std::pair<const char*, const char*> xi_cmds[] = {
      {"canon", "Canonical writing and weight"},
      {"rank", "Rank of the generated submodule"},
      {"annihilator", "Generator of the annihilator ideal"},
      {"bernstein", "Bernstein polynomial of the generated submodule"}};
  for (const auto& [name, help] : xi_cmds) {
    auto* s = xi->add_subcommand(name, help);
    s->add_option("expr", e1)->required();
    add_prec(s);
    std::string action = name;
    s->callback([&, action] { run = [&, action] { return xi_cmd(action, e1, prec); }; });
  }

  BrieskornArgs ba;
  auto* br = app.add_subcommand("brieskorn", "Quotient of the polynomial ring attached to f");
  br->require_subcommand(1);
  const std::pair<const char*, const char*> br_cmds[] = {
      {"verify", "Check operator identities in the quotient"},
      {"find", "Find (a + beta b) m = c target"},
      {"rank", "Lower bound for the rank of the generated submodule"},
      {"bernstein", "Bernstein polynomial from the chains of a generator"}};
  for (const auto& [name, help] : br_cmds) {
    auto* s = br->add_subcommand(name, help);
    s->add_option("--config", ba.config)->required();
    std::string action = name;
    if (action == "verify") {
      s->add_option("--word", ba.word, "Single identity to check instead of the config chains");
      s->add_option("--input", ba.input);
      s->add_option("--output", ba.output);
    }
    if (action == "find") {
      s->add_option("--m", ba.m)->required();
      s->add_option("--target", ba.target)->required();
    }
    if (action == "rank" || action == "bernstein") s->add_option("--generator", ba.generator);
    if (action == "rank") s->add_option("--L", ba.L, "Number of powers a^k g to test")->required();
    s->callback([&, action] { run = [&, action] { return brieskorn_cmd(action, ba); }; });
  }

  try {
    prec = default_precision();
    app.parse(argc, argv);
    if (prec < 0) throw DomainError("precision must be nonnegative");
    Output out = run();
    if (json) std::cout << out.json.dump(2) << "\n";
    else std::cout << out.text;
    return 0;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
