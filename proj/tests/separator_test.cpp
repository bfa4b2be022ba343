#include <gtest/gtest.h>

#include "ksep/errors.hpp"
#include "ksep/golden.hpp"
#include "ksep/separator.hpp"

using namespace ksep;

namespace {

Signature sig_of(std::initializer_list<TruthTable> ts) {
  Signature s;
  for (const auto& t : ts) s.add(t);
  return s;
}

const Formula p = Formula::atom("p");
const Formula q = Formula::atom("q");
const Formula r = Formula::atom("r");

// Independent propositional Kripke evaluator: a connective holds at w iff
// its table accepts the argument values at every successor.
int kripke_oracle(const KripkeModel& k, std::size_t w, const Formula& f) {
  if (f.is_atom()) return k.atom(w, f.name(), {});
  for (std::size_t v = 0; v < k.world_count(); ++v) {
    if (!k.leq(w, v)) continue;
    std::string bits;
    for (const auto& c : f.children()) bits += static_cast<char>('0' + kripke_oracle(k, v, c));
    if (f.table()(TruthVector::from_string(bits)) == 0) return 0;
  }
  return 1;
}

int classical_oracle(const std::map<std::string, int>& val, const Formula& f) {
  if (f.is_atom()) {
    auto it = val.find(f.name());
    return it == val.end() ? 0 : it->second;
  }
  std::string bits;
  for (const auto& c : f.children()) bits += static_cast<char>('0' + classical_oracle(val, c));
  return f.table()(TruthVector::from_string(bits));
}

int sequent_value(const std::function<int(const Formula&)>& ev, const Sequent& s) {
  for (const auto& a : s.antecedent()) {
    if (!ev(a)) return 1;
  }
  for (const auto& b : s.succedent()) {
    if (ev(b)) return 1;
  }
  return 0;
}

// Checks the separation claim without the library's verifier.
void expect_separates(const SeparationResult& res) {
  for (int mask = 0; mask < 16; ++mask) {
    const std::map<std::string, int> val = {
        {"p", mask & 1}, {"q", (mask >> 1) & 1}, {"r", (mask >> 2) & 1}, {"s", (mask >> 3) & 1}};
    ASSERT_EQ(sequent_value([&](const Formula& f) { return classical_oracle(val, f); }, res.sequent), 1)
        << res.connective.name() << " falsified classically";
  }
  const auto& k = res.countermodel;
  EXPECT_TRUE(k.constant_domain());
  EXPECT_TRUE(validate_kripke_model(to_raw(k)).ok());
  EXPECT_EQ(sequent_value([&](const Formula& f) { return kripke_oracle(k, res.failing_world, f); }, res.sequent), 0)
      << res.connective.name() << " not refuted at the stated world";
}

Case case_oracle(const TruthTable& t) {
  const int lo = t(TruthVector::zeros(t.arity()));
  const int hi = t(invert(TruthVector::zeros(t.arity())));
  return lo ? (hi ? Case::D : Case::C) : (hi ? Case::B : Case::A);
}

}  // namespace

TEST(Separate, ImpliesYieldsPeirce) {
  const auto res = separate_connective(standard::implies());
  EXPECT_EQ(res.case_label, Case::D);
  EXPECT_EQ(res.subcase, 1);
  EXPECT_EQ(res.variant, "P");
  EXPECT_EQ(res.model_name, "K*");
  EXPECT_EQ(res.countermodel.world_name(res.failing_world), "w0");
  const auto& imp = standard::implies();
  const Formula peirce =
      Formula::conn(imp, {Formula::conn(imp, {Formula::conn(imp, {p, q}), p}), p});
  EXPECT_EQ(res.sequent, Sequent({}, {peirce}));
  EXPECT_EQ(res.formula("sigma_P"), Formula::conn(imp, {p, q}));
  EXPECT_TRUE(res.verification.passed());
  expect_separates(res);
}

TEST(Separate, ImpliesTables) {
  const auto res = separate_connective(standard::implies());
  ASSERT_EQ(res.tables.size(), 2u);
  const auto& kt = res.tables[1];
  EXPECT_EQ(kt.id, "d1-kripke");
  ASSERT_EQ(kt.rows.size(), 2u);
  EXPECT_EQ(kt.rows[0].label, "w1");
  // sigma, psi, phi at w1 and w0 for Peirce on K*
  const std::vector<std::vector<int>> expected = {{0, 1, 1}, {0, 1, 0}};
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(kt.rows[i].cells[j].value, expected[i][j]) << i << "," << j;
  }
  EXPECT_EQ(kt.rows[1].cells[1].vector, TruthVector({0, 0}));
}

TEST(Separate, XorUsesCaseA) {
  const auto res = separate_connective(standard::xor_());
  EXPECT_EQ(res.case_label, Case::A);
  EXPECT_EQ(res.a, TruthVector({0, 1}));
  const auto& x = standard::xor_();
  const Formula psi = Formula::conn(x, {p, r});
  EXPECT_EQ(res.formula("psi"), psi);
  EXPECT_EQ(res.sequent, Sequent({Formula::conn(x, {psi, r})}, {p}));
  EXPECT_EQ(res.model_name, "K+");
  // phi holds at both worlds of K+, p fails at w0
  EXPECT_EQ(kripke_oracle(res.countermodel, 0, res.formula("phi")), 1);
  EXPECT_EQ(kripke_oracle(res.countermodel, 1, res.formula("phi")), 1);
  expect_separates(res);
}

TEST(Separate, NegationLikeConnectivesUseDoubleNegation) {
  for (const auto& c : {standard::nand(), TruthTable("neg", 1, "10")}) {
    const auto res = separate_connective(c);
    EXPECT_EQ(res.case_label, Case::C);
    EXPECT_EQ(res.model_name, "K*|p");
    const Formula nn = build_negation(c, build_negation(c, p));
    EXPECT_EQ(res.sequent, Sequent({nn}, {p}));
    EXPECT_EQ(res.countermodel.world_name(res.failing_world), "w0");
    expect_separates(res);
  }
}

TEST(Separate, PicksFirstNonMonotoneConnectiveByName) {
  const auto out = separate(sig_of({standard::conj(), standard::nand()}));
  ASSERT_TRUE(std::holds_alternative<SeparationResult>(out));
  EXPECT_EQ(std::get<SeparationResult>(out).connective.name(), "nand");

  const auto mono = separate(sig_of({standard::conj(), standard::disj(), standard::top()}));
  ASSERT_TRUE(std::holds_alternative<AllMonotone>(mono));
  EXPECT_EQ(std::get<AllMonotone>(mono).connectives, (std::vector<std::string>{"and", "or", "top"}));
}

TEST(Separate, RejectsMonotoneAndMiscasedInput) {
  EXPECT_THROW(separate_connective(standard::conj()), UsageError);
  EXPECT_THROW(build_case_a(standard::implies()), UsageError);
  EXPECT_THROW(build_tau(standard::nand()), UsageError);
}

TEST(Separate, TamperedModelFailsVerification) {
  auto res = separate_connective(standard::implies());
  RawKripkeModel raw = to_raw(res.countermodel);
  for (auto& f : raw.interp) {
    if (f.pred == "p") f.value = 1;
  }
  res.countermodel = make_kripke_model(raw);
  const auto v = verify_separation(res);
  EXPECT_FALSE(v.passed());
  EXPECT_FALSE(v.fails_at_stated_world);
}

TEST(Separate, TamperedSequentFailsClassicalCheck) {
  auto res = separate_connective(standard::xor_());
  res.sequent = Sequent({}, {p});
  const auto v = verify_separation(res);
  EXPECT_FALSE(v.classically_valid);
  EXPECT_FALSE(v.passed());
}

TEST(Separate, TernaryCaseBSubcases) {
  // t(010) = 1 but t(011) = 0
  const TruthTable t1("c", 3, "00100011");
  const auto w1 = monotonicity_witness(t1);
  ASSERT_TRUE(w1);
  const auto res1 = separate_connective(t1);
  EXPECT_EQ(res1.case_label, Case::B);
  EXPECT_EQ(res1.subcase, t1(invert(w1->a)) == 1 ? 1 : 2);
  expect_separates(res1);

  // find one instance of each subcase among ternary tables
  bool seen[3] = {false, false, false};
  for (std::size_t f = 0; f < 256; ++f) {
    std::string bits;
    for (std::size_t row = 0; row < 8; ++row) bits += static_cast<char>('0' + ((f >> (7 - row)) & 1U));
    const TruthTable t("c", 3, bits);
    if (is_monotonic(t) || case_oracle(t) != Case::B) continue;
    const auto res = separate_connective(t);
    seen[res.subcase] = true;
    if (res.subcase == 1) {
      EXPECT_EQ(res.model_name, "K+");
      EXPECT_EQ(res.sequent.succedent().size(), 1u);
      EXPECT_EQ(res.sequent.succedent()[0], res.formula("chi"));
    } else {
      EXPECT_TRUE(res.variant == "PP" || res.variant == "QQ");
      ASSERT_EQ(res.notes.size(), 1u);
    }
  }
  EXPECT_TRUE(seen[1]);
  EXPECT_TRUE(seen[2]);
}

// Every non-monotone table of arity <= 3 is separated; the result is
// checked against independent evaluators and the case dispatch.
TEST(Separate, ExhaustiveUpToArityThree) {
  std::size_t separated = 0, preferred_variant = 0, subcase2 = 0;
  for (const auto& t : all_tables(3)) {
    if (is_monotonic(t)) continue;
    const auto res = separate_connective(t);
    ++separated;
    EXPECT_EQ(res.case_label, case_oracle(t)) << t.outputs().to_string();
    EXPECT_TRUE(res.verification.passed()) << t.outputs().to_string();
    expect_separates(res);
    if (res.case_label == Case::B && res.subcase == 2) {
      ++subcase2;
      const bool prefer_p = t(relative_invert(*res.a, *res.b)) == 1;
      if (res.variant == (prefer_p ? "PP" : "QQ")) ++preferred_variant;
    }
  }
  // 1 unary, 10 binary and 236 ternary non-monotone tables
  EXPECT_EQ(separated, 247u);
  EXPECT_EQ(subcase2, 21u);
  EXPECT_EQ(preferred_variant, subcase2);
}
