#include <gtest/gtest.h>

#include "ksep/errors.hpp"
#include "ksep/properties.hpp"
#include "ksep/syntax.hpp"

using namespace ksep;

namespace {

Signature sig_with(std::initializer_list<TruthTable> ts) {
  Signature s;
  for (const auto& t : ts) s.add(t);
  return s;
}

const Formula p = Formula::atom("p");
const Formula q = Formula::atom("q");
const Formula r = Formula::atom("r");
const Formula s = Formula::atom("s");

}  // namespace

TEST(Formula, ConnChecksArity) {
  EXPECT_THROW(Formula::conn(standard::nand(), {p}), UsageError);
  EXPECT_NO_THROW(Formula::conn(standard::top(), {}));
}

TEST(Formula, StructuralEqualityIncludesTables) {
  const auto a = Formula::conn(standard::conj(), {p, q});
  const auto b = Formula::conn(standard::conj(), {p, q});
  const auto c = Formula::conn(TruthTable("and", 2, "0111"), {p, q});
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  EXPECT_NE(a, Formula::conn(standard::conj(), {q, p}));
}

TEST(FreeVars, Examples) {
  const auto pxy = Formula::atom("p", {"x", "y"});
  EXPECT_EQ(free_vars(pxy), (std::set<Variable>{"x", "y"}));
  EXPECT_EQ(free_vars(Formula::forall("x", pxy)), (std::set<Variable>{"y"}));
  const auto c = Formula::conn(standard::conj(),
                               {Formula::atom("p", {"x"}), Formula::exists("x", Formula::atom("q", {"x"}))});
  EXPECT_EQ(free_vars(c), (std::set<Variable>{"x"}));
  EXPECT_TRUE(is_closed(Formula::forall("x", Formula::atom("P", {"x"}))));
}

TEST(FreeVars, SequentIsUnionOfSides) {
  const Sequent seq({Formula::atom("P", {"x"})}, {Formula::atom("Q", {"y"})});
  EXPECT_EQ(free_vars(seq), (std::set<Variable>{"x", "y"}));
}

TEST(IsPropositional, QuantifierFreeOverZeroAryAtoms) {
  EXPECT_TRUE(is_propositional(Formula::conn(standard::conj(), {p, q})));
  EXPECT_FALSE(is_propositional(Formula::atom("p", {"x"})));
  EXPECT_FALSE(is_propositional(Formula::forall("x", p)));
}

TEST(Sequent, IsASetOnEachSide) {
  const Sequent a({p, q, p}, {r});
  const Sequent b({q, p}, {r, r});
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.antecedent().size(), 2u);
}

TEST(SubstituteSymbol, Examples) {
  const auto c = standard::nand();
  const auto tau = Formula::conn(c, {s, s});
  EXPECT_EQ(substitute_symbol(Formula::conn(c, {tau, p}), tau, r), Formula::conn(c, {r, p}));
  EXPECT_EQ(substitute_symbol(tau, tau, r), r);
  EXPECT_EQ(substitute_symbol(Formula::conn(c, {tau, tau}), tau, r), Formula::conn(c, {r, r}));
  EXPECT_THROW(substitute_symbol(tau, Formula::atom("P", {"x"}), r), UsageError);
}

TEST(SubstituteSymbol, MatchesRecursiveOracleAndKeepsFreeVars) {
  SplitMix64 rng(7);
  const auto tau = Formula::conn(standard::conj(), {s, s});
  const std::vector<TruthTable> conns = {standard::conj(), standard::disj(), standard::neg()};
  // oracle: rebuild bottom-up, replacing matches top-down
  std::function<Formula(const Formula&)> oracle = [&](const Formula& g) -> Formula {
    if (g == tau) return r;
    if (g.is_conn()) {
      std::vector<Formula> kids;
      for (const auto& k : g.children()) kids.push_back(oracle(k));
      return Formula::conn(g.table(), kids);
    }
    if (g.is_quantifier()) {
      auto b = oracle(g.body());
      return g.kind() == Formula::Kind::Forall ? Formula::forall(g.bound_var(), b) : Formula::exists(g.bound_var(), b);
    }
    return g;
  };
  for (int i = 0; i < 300; ++i) {
    Formula f = gen::random_formula(rng, conns, 4);
    if (rng.coin()) f = Formula::conn(standard::conj(), {f, tau});
    const auto out = substitute_symbol(f, tau, r);
    EXPECT_EQ(out, oracle(f));
    EXPECT_EQ(free_vars(out), free_vars(f));
  }
}

TEST(Parse, Examples) {
  const auto sig = sig_with({standard::nand(), standard::conj()});
  EXPECT_EQ(parse_formula("nand(p, q)", sig), Formula::conn(standard::nand(), {p, q}));
  EXPECT_EQ(parse_formula("forall x. P(x)", sig), Formula::forall("x", Formula::atom("P", {"x"})));
  EXPECT_EQ(parse_formula("  nand( p,q )", sig), Formula::conn(standard::nand(), {p, q}));
  EXPECT_THROW(parse_formula("nand(p)", sig), ParseError);
}

TEST(Parse, ReportsPositions) {
  const auto sig = sig_with({standard::nand()});
  try {
    parse_formula("nand(p, q", sig);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 9u);
  }
  EXPECT_THROW(parse_formula("P(x), ", sig), ParseError);
  EXPECT_THROW(parse_formula("P(x) and P(x, y)", sig), ParseError);
  EXPECT_THROW(parse_formula("and(P(x), P(x, y))", sig_with({standard::conj()})), ParseError);
  EXPECT_THROW(parse_formula("foo(nand(p, p))", sig), ParseError);
}

TEST(Parse, Sequents) {
  const auto sig = sig_with({standard::implies()});
  const auto peirce = parse_sequent("=> implies(implies(implies(p, q), p), p)", sig);
  EXPECT_TRUE(peirce.antecedent().empty());
  ASSERT_EQ(peirce.succedent().size(), 1u);
  EXPECT_EQ(print_sequent(parse_sequent("p =>", sig)), "p =>");
  EXPECT_EQ(print_sequent(parse_sequent("=>", sig)), "=>");
  EXPECT_EQ(print_sequent(parse_sequent("q, p => r", sig)), "p, q => r");
  EXPECT_THROW(parse_sequent("p => q => r", sig), ParseError);
}

TEST(Parse, RoundTripsRandomFormulas) {
  SplitMix64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto conns = gen::connectives(rng, false);
    Signature sig;
    for (const auto& t : conns) {
      if (!sig.contains(t.name())) sig.add(t);
    }
    const Formula f = gen::random_formula(rng, conns, 4);
    const std::string text = print_formula(f);
    const Formula g = parse_formula(text, sig);
    EXPECT_EQ(g, f) << text;
    EXPECT_EQ(print_formula(g), text);
  }
}
