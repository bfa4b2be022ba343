#include <gtest/gtest.h>

#include <functional>

#include "ksep/errors.hpp"
#include "ksep/kripke_sem.hpp"
#include "ksep/properties.hpp"
#include "ksep/separator.hpp"

using namespace ksep;

namespace {

Signature standard_sig() {
  Signature s;
  for (const auto& t : {standard::conj(), standard::disj(), standard::implies(), standard::neg(), standard::nand()}) {
    s.add(t);
  }
  return s;
}

Sequent seq(const std::string& text) { return parse_sequent(text, standard_sig()); }
Formula fml(const std::string& text) { return parse_formula(text, standard_sig()); }

RawKripkeModel two_chain() {
  RawKripkeModel raw;
  raw.worlds = {"w0", "w1"};
  raw.order = {{"w0", "w1"}};
  raw.set_constant_domain({"a1"});
  return raw;
}

std::vector<std::string> codes(const KripkeValidation& v) {
  std::vector<std::string> out;
  for (const auto& x : v.violations) out.push_back(x.code);
  return out;
}

// Textbook intuitionistic clauses: conjunction and disjunction local,
// implication and negation over successors.
int textbook(const KripkeModel& k, std::size_t w, const Formula& f) {
  if (f.is_atom()) return k.atom(w, f.name(), {});
  const auto& name = f.table().name();
  const auto& c = f.children();
  if (name == "and") return textbook(k, w, c[0]) & textbook(k, w, c[1]);
  if (name == "or") return textbook(k, w, c[0]) | textbook(k, w, c[1]);
  for (std::size_t v : k.successors(w)) {
    if (name == "implies" && textbook(k, v, c[0]) && !textbook(k, v, c[1])) return 0;
    if (name == "not" && textbook(k, v, c[0])) return 0;
  }
  return 1;
}

}  // namespace

TEST(ValidateKripke, AcceptsWellFormedModel) {
  auto raw = two_chain();
  raw.interp = {{"w0", "p", {}, 0}, {"w1", "p", {}, 1}};
  const auto v = validate_kripke_model(raw);
  ASSERT_TRUE(v.ok());
  EXPECT_TRUE(v.model->constant_domain());
  EXPECT_TRUE(v.model->leq(0, 1));
  EXPECT_FALSE(v.model->leq(1, 0));
}

TEST(ValidateKripke, ReportsHeredityWithWitness) {
  auto raw = two_chain();
  raw.interp = {{"w0", "p", {}, 1}, {"w1", "p", {}, 0}};
  const auto v = validate_kripke_model(raw);
  ASSERT_EQ(codes(v), std::vector<std::string>{"heredity"});
  EXPECT_EQ(v.violations[0].world, "w0");
  EXPECT_EQ(v.violations[0].other_world, "w1");
  EXPECT_EQ(v.violations[0].pred, "p");
  EXPECT_THROW(make_kripke_model(raw), UsageError);
}

TEST(ValidateKripke, HeredityFollowsTransitiveClosure) {
  RawKripkeModel raw;
  raw.worlds = {"u", "v", "w"};
  raw.order = {{"u", "v"}, {"v", "w"}};
  raw.set_constant_domain({"a1"});
  raw.interp = {{"u", "p", {}, 1}, {"v", "p", {}, 1}};
  const auto v = validate_kripke_model(raw);
  ASSERT_EQ(v.violations.size(), 2u);
  EXPECT_EQ(v.violations[0].world, "u");
  EXPECT_EQ(v.violations[0].other_world, "w");
}

TEST(ValidateKripke, ReportsDomainShrinkingAndEmptyDomains) {
  RawKripkeModel raw;
  raw.worlds = {"w0", "w1"};
  raw.order = {{"w0", "w1"}};
  raw.domains = {{"w0", {"a1", "a2"}}, {"w1", {"a1"}}};
  EXPECT_EQ(codes(validate_kripke_model(raw)), std::vector<std::string>{"domain-monotonicity"});
  raw.domains = {{"w0", {}}, {"w1", {"a1"}}};
  EXPECT_EQ(codes(validate_kripke_model(raw)), std::vector<std::string>{"empty-domain"});
  raw.worlds.clear();
  raw.order.clear();
  raw.domains.clear();
  EXPECT_FALSE(validate_kripke_model(raw).ok());
}

TEST(ValidateKripke, ReportsBadReferences) {
  auto raw = two_chain();
  raw.interp = {{"w9", "p", {}, 1}};
  EXPECT_EQ(codes(validate_kripke_model(raw)), std::vector<std::string>{"unknown-world"});
  raw.interp = {{"w0", "P", {"a7"}, 1}};
  EXPECT_EQ(codes(validate_kripke_model(raw)), std::vector<std::string>{"unknown-individual"});
  raw.interp = {{"w0", "P", {"a1"}, 1}, {"w1", "P", {"a1", "a1"}, 1}};
  EXPECT_EQ(codes(validate_kripke_model(raw)), std::vector<std::string>{"arity-mismatch"});
  raw = two_chain();
  raw.domains[1].second.push_back("a2");
  EXPECT_EQ(codes(validate_kripke_model(raw)), std::vector<std::string>{"constant-domain"});
}

TEST(EvalKripke, ExamplesOnKStar) {
  const auto k = k_star();
  EXPECT_EQ(eval_kripke(k, 0, {}, fml("p")), 0);
  EXPECT_EQ(eval_kripke(k, 1, {}, fml("p")), 1);
  EXPECT_EQ(eval_kripke(k, 0, {}, fml("nand(p, p)")), 0);
  EXPECT_EQ(eval_kripke(k, 0, {}, fml("nand(nand(p, p), nand(p, p))")), 1);
  EXPECT_EQ(eval_kripke(k, 0, {}, fml("implies(implies(implies(p, q), p), p)")), 0);
  EXPECT_EQ(eval_kripke(k, 1, {}, fml("implies(implies(implies(p, q), p), p)")), 1);
  EXPECT_EQ(eval_kripke(k, 0, {}, fml("or(p, not(p))")), 0);
}

TEST(EvalKripke, QuantifiersOnGrowingDomain) {
  RawKripkeModel raw;
  raw.worlds = {"w0", "w1"};
  raw.order = {{"w0", "w1"}};
  raw.domains = {{"w0", {"a1"}}, {"w1", {"a1", "a2"}}};
  raw.interp = {{"w0", "P", {"a1"}, 1}, {"w1", "P", {"a1"}, 1}};
  const auto k = make_kripke_model(raw);
  EXPECT_FALSE(k.constant_domain());
  EXPECT_EQ(eval_kripke(k, 0, {}, fml("forall x. P(x)")), 0);
  EXPECT_EQ(eval_kripke(k, 0, {}, fml("exists x. P(x)")), 1);
  EXPECT_EQ(eval_kripke(k, 1, {}, fml("exists x. not(P(x))")), 1);
  EXPECT_THROW(eval_kripke(k, 0, {{"x", 1}}, fml("P(x)")), UsageError);
}

TEST(EvalSequentKripke, Examples) {
  const auto k = k_star();
  EXPECT_EQ(eval_sequent_kripke(k, 0, {}, seq("=> p")), 0);
  EXPECT_EQ(eval_sequent_kripke(k, 1, {}, seq("=> p")), 1);
  EXPECT_EQ(eval_sequent_kripke(k, 0, {}, seq("nand(nand(p, p), nand(p, p)) => p")), 0);
  EXPECT_EQ(eval_sequent_kripke(k, 0, {}, seq("q =>")), 1);
  EXPECT_EQ(eval_sequent_kripke(k, 0, {}, seq("=>")), 0);
}

TEST(ModelValidity, ReportsFirstFailingWorld) {
  const auto k = k_star();
  const auto v = model_validity(k, seq("=> implies(implies(implies(p, q), p), p)"));
  ASSERT_TRUE(std::holds_alternative<KripkeFailure>(v));
  EXPECT_EQ(std::get<KripkeFailure>(v).world, 0u);
  EXPECT_TRUE(std::holds_alternative<Valid>(model_validity(k, seq("p => p"))));
  EXPECT_TRUE(std::holds_alternative<KripkeFailure>(model_validity(k, seq("=> q"))));
}

TEST(Heredity, HoldsForEveryFormulaOnRandomModels) {
  SplitMix64 rng(21);
  for (int i = 0; i < 1000; ++i) {
    const auto k = gen::random_kripke(rng, 3, 2, rng.coin());
    const Formula f = gen::random_formula(rng, gen::connectives(rng, false), 4);
    Assignment rho;
    for (const auto& x : free_vars(f)) rho.set(x, static_cast<Individual>(rng.below(k.individuals().size())));
    EXPECT_TRUE(check_heredity(k, f, rho, ForallMode::Successors)) << f;
  }
}

TEST(Heredity, DetectsNonHereditaryAtoms) {
  auto raw = two_chain();
  raw.interp = {{"w0", "p", {}, 1}, {"w1", "p", {}, 0}};
  const auto k = KripkeModel::unchecked(raw);
  EXPECT_FALSE(check_heredity(k, fml("p"), {}));
  EXPECT_THROW(check_heredity(k, fml("P(x)"), {}), UsageError);
}

// Over every hereditary propositional model on <= 3 worlds with symbols p, q,
// the uniform clause agrees with the textbook clauses on and/or/implies/not.
TEST(ConnClause, MatchesTextbookClausesExhaustively) {
  const std::vector<TruthTable> conns = {standard::conj(), standard::disj(), standard::implies(), standard::neg()};
  std::vector<Formula> fs = {Formula::atom("p"), Formula::atom("q")};
  for (int level = 0; level < 2; ++level) {
    const auto prev = fs;
    for (const auto& c : conns) {
      for (const auto& x : prev) {
        if (c.arity() == 1) {
          fs.push_back(Formula::conn(c, {x}));
          continue;
        }
        for (const auto& y : prev) fs.push_back(Formula::conn(c, {x, y}));
      }
    }
  }
  const std::map<std::string, std::size_t> preds = {{"p", 0}, {"q", 0}};
  std::size_t models = 0;
  for (std::size_t n = 1; n <= 3; ++n) {
    for (const auto& order : canonical_preorders(n)) {
      for_each_hereditary_model(order, 1, preds, [&](const KripkeModel& k) {
        ++models;
        for (std::size_t w = 0; w < n; ++w) {
          for (const auto& f : fs) {
            if (eval_kripke(k, w, {}, f) != textbook(k, w, f)) {
              ADD_FAILURE() << f << " at world " << w;
              return false;
            }
          }
        }
        return true;
      });
    }
  }
  EXPECT_GT(models, 100u);
}

TEST(ForallModes, AgreeOnConstantDomainModels) {
  SplitMix64 rng(23);
  for (int i = 0; i < 1000; ++i) {
    const auto k = gen::random_kripke(rng, 3, 2, true);
    const Formula f = gen::random_formula(rng, gen::connectives(rng, false), 4);
    for (std::size_t w = 0; w < k.world_count(); ++w) {
      Assignment rho;
      for (const auto& x : free_vars(f)) rho.set(x, static_cast<Individual>(rng.below(k.individuals().size())));
      ASSERT_EQ(eval_kripke(k, w, rho, f, ForallMode::Successors), eval_kripke(k, w, rho, f, ForallMode::PresentWorld))
          << f;
      EXPECT_NO_THROW(eval_kripke(k, w, rho, f, ForallMode::Checked));
    }
  }
}

TEST(Preorders, CountsMatchKnownSequence) {
  EXPECT_EQ(canonical_preorders(1).size(), 1u);
  EXPECT_EQ(canonical_preorders(2).size(), 4u);
  EXPECT_EQ(canonical_preorders(3).size(), 29u);
  EXPECT_EQ(canonical_preorders(4).size(), 355u);
  EXPECT_THROW(canonical_preorders(0), UsageError);
}

TEST(Preorders, HereditaryModelCountMatchesEnumeration) {
  const std::map<std::string, std::size_t> preds = {{"P", 1}, {"q", 0}};
  for (const auto& order : canonical_preorders(3)) {
    std::uint64_t seen = 0;
    for_each_hereditary_model(order, 2, preds, [&](const KripkeModel& k) {
      ++seen;
      EXPECT_TRUE(validate_kripke_model(to_raw(k)).ok());
      return true;
    });
    EXPECT_EQ(seen, hereditary_model_count(order, 2, preds));
  }
}

TEST(CdSearch, Examples) {
  const auto peirce = bounded_cd_countermodel_search(seq("=> implies(implies(implies(p, q), p), p)"), 2, 1);
  ASSERT_TRUE(std::holds_alternative<KripkeCountermodel>(peirce));
  const auto& cm = std::get<KripkeCountermodel>(peirce);
  EXPECT_EQ(cm.model.world_count(), 2u);
  EXPECT_EQ(eval_sequent_kripke(cm.model, cm.world, cm.assignment, seq("=> implies(implies(implies(p, q), p), p)")),
            0);

  EXPECT_TRUE(std::holds_alternative<NoCountermodelUpTo>(bounded_cd_countermodel_search(seq("p => p"), 3, 2)));
  const auto tau = seq("=> implies(implies(s, s), implies(s, s))");
  EXPECT_TRUE(std::holds_alternative<NoCountermodelUpTo>(bounded_cd_countermodel_search(tau, 3, 2)));
}

TEST(CdSearch, FindsConstantDomainCountermodelForQuantifierShift) {
  // forall x. (q or P(x)) => q or forall x. P(x) holds on CD frames.
  const auto cd = seq("forall x. or(q, P(x)) => or(q, forall x. P(x))");
  EXPECT_TRUE(std::holds_alternative<NoCountermodelUpTo>(bounded_cd_countermodel_search(cd, 3, 2)));
  const auto lem = seq("=> forall x. or(P(x), not(P(x)))");
  EXPECT_TRUE(std::holds_alternative<KripkeCountermodel>(bounded_cd_countermodel_search(lem, 2, 1)));
}

TEST(CdSearch, RespectsResourceCeiling) {
  SearchLimits tight;
  tight.max_interpretations = 5;
  EXPECT_THROW(bounded_cd_countermodel_search(seq("p => q"), 2, 1, tight), ResourceError);
}
