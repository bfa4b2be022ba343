#include <gtest/gtest.h>

#include "ksep/collapse.hpp"
#include "ksep/errors.hpp"
#include "ksep/properties.hpp"
#include "ksep/separator.hpp"

using namespace ksep;

namespace {

Signature sig_of(std::initializer_list<TruthTable> ts) {
  Signature s;
  for (const auto& t : ts) s.add(t);
  return s;
}

Formula fml(const std::string& text) {
  return parse_formula(text, sig_of({standard::conj(), standard::disj(), standard::implies()}));
}

}  // namespace

TEST(ProjectWorld, CopiesTheWorldInterpretation) {
  const auto m1 = project_world(k_star(), 1);
  EXPECT_EQ(m1.domain(), std::vector<std::string>{"a1"});
  EXPECT_EQ(m1.get("p"), 1);
  EXPECT_EQ(m1.get("q"), 0);
  const auto m0 = project_world(k_plus(), 0);
  EXPECT_EQ(m0.get("p"), 0);
  EXPECT_EQ(m0.get("r"), 1);
  EXPECT_THROW(project_world(k_star(), 2), UsageError);
}

TEST(ProjectWorld, RefusesVaryingDomains) {
  RawKripkeModel raw;
  raw.worlds = {"w0", "w1"};
  raw.order = {{"w0", "w1"}};
  raw.domains = {{"w0", {"a1"}}, {"w1", {"a1", "a2"}}};
  EXPECT_THROW(project_world(make_kripke_model(raw), 0), UsageError);
}

TEST(LiftClassical, RoundTripsThroughProjection) {
  SplitMix64 rng(31);
  for (int i = 0; i < 300; ++i) {
    const auto m = gen::random_classical(rng, 3);
    const auto k = lift_classical(m);
    ASSERT_EQ(k.world_count(), 1u);
    EXPECT_TRUE(k.constant_domain());
    EXPECT_EQ(project_world(k, 0), m);
  }
}

TEST(LiftClassical, PreservesEveryFormulaValue) {
  SplitMix64 rng(37);
  for (int i = 0; i < 1000; ++i) {
    const auto m = gen::random_classical(rng, 3);
    const auto k = lift_classical(m);
    const Formula f = gen::random_formula(rng, gen::connectives(rng, false), 4);
    Assignment rho;
    for (const auto& x : free_vars(f)) rho.set(x, static_cast<Individual>(rng.below(m.size())));
    ASSERT_EQ(eval_kripke(k, 0, rho, f), eval_classical(m, rho, f)) << f;
  }
}

TEST(CheckCollapse, AgreesForMonotoneFormulas) {
  RawKripkeModel raw;
  raw.worlds = {"w0", "w1"};
  raw.order = {{"w0", "w1"}};
  raw.set_constant_domain({"a1", "a2"});
  raw.interp = {{"w0", "P", {"a1"}, 1}, {"w1", "P", {"a1"}, 1}, {"w1", "P", {"a2"}, 1}, {"w1", "q", {}, 1}};
  const auto k = make_kripke_model(raw);
  const std::vector<Formula> fs = {fml("and(P(x), q)"), fml("or(forall x. P(x), q)"), fml("forall x. P(x)"),
                                   fml("exists y. and(P(y), P(x))")};
  const auto report = check_collapse(k, fs);
  EXPECT_TRUE(report.agreement);
  EXPECT_EQ(report.disagreements, 0u);
  // two worlds x (2 + 1 + 1 + 2) points
  EXPECT_EQ(report.entries.size(), 12u);
  const auto& e = report.entries[2];
  EXPECT_EQ(e.world, 0u);
  EXPECT_EQ(e.formula, 1u);
  EXPECT_EQ(e.kripke, 0);
}

TEST(CheckCollapse, RefusesNonMonotoneConnectives) {
  try {
    check_collapse(k_star(), {fml("implies(p, q)")});
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("witness 00 <= 10"), std::string::npos) << e.what();
  }
  EXPECT_THROW(collapse_closure(k_star(), sig_of({standard::nand()}), {fml("p")}, {}, 2), UsageError);
}

TEST(CheckCollapse, HoldsOnRandomHereditaryModels) {
  SplitMix64 rng(41);
  for (int i = 0; i < 500; ++i) {
    const auto k = gen::random_kripke(rng, 3, 2, true);
    const Formula f = gen::random_formula(rng, gen::connectives(rng, true), 4);
    EXPECT_TRUE(check_collapse(k, {f}).agreement) << f;
  }
}

TEST(CdTables, MatchEvaluatorsPointwise) {
  SplitMix64 rng(43);
  const std::vector<Variable> vars = {"x", "y"};
  for (int i = 0; i < 400; ++i) {
    const auto k = gen::random_kripke(rng, 3, 2, true);
    const Formula f = gen::random_formula(rng, gen::connectives(rng, false), 3);
    const CdTables t(k, vars);
    const auto kt = t.kripke(f);
    const auto ct = t.classical(f);
    ASSERT_EQ(kt.size(), t.cells());
    for (std::size_t w = 0; w < k.world_count(); ++w) {
      const auto m = project_world(k, w);
      for (std::size_t a = 0; a < t.assignment_count(); ++a) {
        const auto rho = t.assignment(a);
        ASSERT_EQ(kt[w * t.assignment_count() + a], eval_kripke(k, w, rho, f)) << f;
        ASSERT_EQ(ct[w * t.assignment_count() + a], eval_classical(m, rho, f)) << f;
      }
    }
  }
}

TEST(CollapseClosure, AgreesOnKStarAndCountsClasses) {
  const auto atoms = std::vector<Formula>{fml("p"), fml("q")};
  const auto r = collapse_closure(k_star(), sig_of({standard::conj(), standard::disj()}), atoms, {}, 3);
  EXPECT_TRUE(r.agreement());
  // q is false everywhere, so and/or only ever reproduce the tables of p and q
  EXPECT_EQ(r.classes, 2u);
  EXPECT_GT(r.candidates, 0u);
}

TEST(CollapseClosure, FindsDisagreementWhenHeredityIsBroken) {
  RawKripkeModel raw;
  raw.worlds = {"w0", "w1"};
  raw.order = {{"w0", "w1"}};
  raw.set_constant_domain({"a1"});
  raw.interp = {{"w0", "p", {}, 1}, {"w1", "p", {}, 0}, {"w1", "q", {}, 1}};
  const auto k = KripkeModel::unchecked(raw);
  const auto r = collapse_closure(k, sig_of({standard::conj()}), {fml("p"), fml("q")}, {}, 2);
  EXPECT_FALSE(r.agreement());
}

// Literal enumeration of every formula of depth <= 2 over {and, or}, the
// quantifiers on x and atoms P(x), q, r, on every hereditary model of the
// two-world chain with two individuals. Cross-checks the pair-class
// deduplication used by collapse_closure.
TEST(CollapseClosure, LiteralEnumerationAgreesAtDepthTwo) {
  const std::vector<TruthTable> conns = {standard::conj(), standard::disj()};
  std::vector<Formula> fs = {Formula::atom("P", {"x"}), Formula::atom("q"), Formula::atom("r")};
  for (int level = 0; level < 2; ++level) {
    const auto prev = fs;
    for (const auto& x : prev) {
      fs.push_back(Formula::forall("x", x));
      fs.push_back(Formula::exists("x", x));
      for (const auto& c : conns) {
        for (const auto& y : prev) fs.push_back(Formula::conn(c, {x, y}));
      }
    }
  }
  ASSERT_EQ(fs.size(), 1539u);
  const std::map<std::string, std::size_t> preds = {{"P", 1}, {"q", 0}, {"r", 0}};
  const auto chain = canonical_preorders(2)[1];
  ASSERT_TRUE(chain(0, 1) != chain(1, 0));
  std::size_t models = 0;
  for_each_hereditary_model(chain, 2, preds, [&](const KripkeModel& k) {
    ++models;
    const auto rep = check_collapse(k, fs, {Assignment{{"x", 0}}, Assignment{{"x", 1}}});
    EXPECT_TRUE(rep.agreement);
    const auto closure = collapse_closure(k, sig_of({standard::conj(), standard::disj()}),
                                          {fs[0], fs[1], fs[2]}, {"x"}, 2);
    EXPECT_TRUE(closure.agreement());
    return rep.agreement;
  });
  EXPECT_EQ(models, 81u);
}
