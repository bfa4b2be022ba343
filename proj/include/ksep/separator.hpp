#pragma once

// Separating sequents for non-monotone connectives: for each such connective
// a closed propositional sequent that is classically valid yet fails in a
// two-world constant-domain Kripke model.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ksep/classical_sem.hpp"
#include "ksep/errors.hpp"
#include "ksep/kripke_sem.hpp"
#include "ksep/reference_tables.hpp"
#include "ksep/syntax.hpp"
#include "ksep/truthfn.hpp"

namespace ksep {

struct NamedFormula {
  std::string name;
  Formula formula;
};

struct TableCell {
  std::optional<TruthVector> vector;  // argument values; absent for atoms
  int value = 0;

  friend bool operator==(const TableCell&, const TableCell&) = default;
};

struct TableRow {
  std::string label;
  std::optional<std::size_t> world;      // set on Kripke rows
  std::map<std::string, int> valuation;  // set on classical rows
  std::vector<TableCell> cells;
};

/// Values of the construction's formulas, one column per formula, one row per
/// classical valuation or per world of the countermodel.
struct ConstructionTable {
  std::string id;
  bool kripke = false;
  std::vector<std::string> columns;
  std::vector<TableRow> rows;
};

struct VerificationReport {
  bool propositional = false;  // closed, quantifier-free, atoms among p, q, r, s
  bool classically_valid = false;
  std::size_t valuations = 0;
  bool model_well_formed = false;
  bool constant_domain = false;
  bool fails_in_model = false;
  bool fails_at_stated_world = false;
  bool tables_reproduce = false;
  bool tables_match_pattern = false;
  std::vector<std::string> issues;

  bool passed() const { return issues.empty(); }
};

struct SeparationResult {
  TruthTable connective;
  Case case_label = Case::A;
  int subcase = 0;      // 0 for cases without subcases
  std::string variant;  // "P", "Q", "PP", "QQ" or empty
  std::optional<TruthVector> a, b;
  std::vector<NamedFormula> formulas;
  Sequent sequent;
  std::string model_name;
  KripkeModel countermodel;
  std::size_t failing_world = 0;
  std::vector<ConstructionTable> tables;
  std::vector<std::string> notes;
  VerificationReport verification;

  const Formula& formula(const std::string& name) const {
    for (const auto& nf : formulas) {
      if (nf.name == name) return nf.formula;
    }
    throw UsageError("no formula named '" + name + "' in the separation result");
  }
};

struct AllMonotone {
  std::vector<std::string> connectives;
};

using SeparationOutcome = std::variant<SeparationResult, AllMonotone>;

// ---------------------------------------------------------------------------
// Countermodels

/// w0 <= w1, D = {a1}; p false then true, q false at both.
inline KripkeModel k_star() {
  RawKripkeModel raw;
  raw.worlds = {"w0", "w1"};
  raw.order = {{"w0", "w1"}};
  raw.set_constant_domain({"a1"});
  raw.interp = {{"w0", "p", {}, 0}, {"w1", "p", {}, 1}, {"w0", "q", {}, 0}, {"w1", "q", {}, 0}};
  return make_kripke_model(raw);
}

/// K* with r true at both worlds.
inline KripkeModel k_plus() {
  RawKripkeModel raw = to_raw(k_star());
  raw.interp.push_back({"w0", "r", {}, 1});
  raw.interp.push_back({"w1", "r", {}, 1});
  return make_kripke_model(raw);
}

/// K* restricted to p.
inline KripkeModel k_star_p() {
  RawKripkeModel raw;
  raw.worlds = {"w0", "w1"};
  raw.order = {{"w0", "w1"}};
  raw.set_constant_domain({"a1"});
  raw.interp = {{"w0", "p", {}, 0}, {"w1", "p", {}, 1}};
  return make_kripke_model(raw);
}

// ---------------------------------------------------------------------------
// Tables

namespace detail {

inline const Formula& prop(char name) {
  static const Formula p = Formula::atom("p"), q = Formula::atom("q"), r = Formula::atom("r"),
                       s = Formula::atom("s");
  switch (name) {
    case 'p': return p;
    case 'q': return q;
    case 'r': return r;
    default: return s;
  }
}

/// Every 0/1 valuation of `atoms` (first most significant) joined with `fixed`.
inline std::vector<TableRow> valuation_rows(const std::vector<std::string>& atoms,
                                            const std::map<std::string, int>& fixed = {}) {
  std::vector<TableRow> rows;
  const std::size_t n = atoms.size();
  for (std::size_t row = 0; row < (std::size_t{1} << n); ++row) {
    TableRow r;
    for (std::size_t i = 0; i < n; ++i) {
      const int v = static_cast<int>((row >> (n - 1 - i)) & 1u);
      r.valuation[atoms[i]] = v;
      r.label += (i ? "," : "") + atoms[i] + "=" + std::to_string(v);
    }
    for (const auto& [atom, v] : fixed) {
      r.valuation[atom] = v;
      r.label += "," + atom + "=" + std::to_string(v);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::vector<TableRow> world_rows(const KripkeModel& k, const std::vector<std::string>& worlds) {
  std::vector<TableRow> rows;
  for (const auto& name : worlds) {
    auto w = k.world_index(name);
    if (!w) throw InternalError("table row names unknown world '" + name + "'");
    TableRow r;
    r.label = name;
    r.world = *w;
    rows.push_back(std::move(r));
  }
  return rows;
}

inline const Formula& lookup(const std::vector<NamedFormula>& fs, const std::string& name) {
  for (const auto& nf : fs) {
    if (nf.name == name) return nf.formula;
  }
  throw InternalError("table column names unknown formula '" + name + "'");
}

template <class Eval>
TableCell cell_for(const Formula& f, Eval eval) {
  TableCell cell;
  cell.value = eval(f);
  if (f.is_conn()) {
    std::vector<int> kids;
    for (const auto& c : f.children()) kids.push_back(eval(c));
    cell.vector = TruthVector(kids);
  }
  return cell;
}

}  // namespace detail

/// Fills (or refills) the cells of `t` from the formulas and the model.
inline void compute_table(ConstructionTable& t, const std::vector<NamedFormula>& formulas, const KripkeModel& k) {
  for (auto& row : t.rows) {
    row.cells.clear();
    if (t.kripke) {
      const std::size_t w = row.world.value();
      for (const auto& col : t.columns) {
        row.cells.push_back(detail::cell_for(detail::lookup(formulas, col), [&](const Formula& f) {
          return eval_kripke(k, w, Assignment{}, f, ForallMode::Successors);
        }));
      }
    } else {
      ClassicalModel m({"a1"});
      for (const auto& [atom, v] : row.valuation) m.set(atom, {}, v);
      for (const auto& col : t.columns) {
        row.cells.push_back(detail::cell_for(detail::lookup(formulas, col), [&](const Formula& f) {
          return eval_classical(m, Assignment{}, f);
        }));
      }
    }
  }
}

/// Differences between a computed table and a symbolic pattern instantiated
/// with the given witnesses; empty when they agree cell for cell.
inline std::vector<std::string> pattern_mismatches(const ConstructionTable& t, const TablePattern& p,
                                                   const std::optional<TruthVector>& a,
                                                   const std::optional<TruthVector>& b, std::size_t arity) {
  std::vector<std::string> out;
  const std::string where = t.id + ": ";
  if (t.columns != p.columns) return {where + "columns differ from the reference layout"};
  if (t.rows.size() != p.rows.size()) return {where + "row count differs from the reference layout"};
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const auto& prow = p.rows[i];
    if (row.label != prow.label) {
      out.push_back(where + "row " + std::to_string(i) + " is '" + row.label + "', reference has '" + prow.label + "'");
      continue;
    }
    for (std::size_t j = 0; j < row.cells.size(); ++j) {
      const auto& cell = row.cells[j];
      const auto& pc = prow.cells[j];
      const std::string at = where + "row " + row.label + ", column " + t.columns[j];
      if (cell.value != pc.value) {
        out.push_back(at + ": value " + std::to_string(cell.value) + ", reference " + std::to_string(pc.value));
      }
      if (pc.vector.has_value() != cell.vector.has_value()) {
        out.push_back(at + ": vector presence differs");
        continue;
      }
      if (!pc.vector) continue;
      const bool needs_a = *pc.vector == Sym::A || *pc.vector == Sym::RelInv;
      const bool needs_b = *pc.vector == Sym::B || *pc.vector == Sym::RelInv;
      if ((needs_a && !a) || (needs_b && !b)) {
        out.push_back(at + ": reference names " + sym_name(*pc.vector) + " but no such witness exists");
        continue;
      }
      const TruthVector zero = TruthVector::zeros(arity);
      const TruthVector expected = instantiate(*pc.vector, a.value_or(zero), b.value_or(a.value_or(zero)));
      if (*cell.vector != expected) {
        out.push_back(at + ": vector " + cell.vector->to_string() + ", reference " + sym_name(*pc.vector) + " = " +
                      expected.to_string());
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Verification

/// Re-checks a result from scratch: classical validity by truth tables,
/// well-formedness of the countermodel, failure at the stated world, and the
/// embedded tables against both recomputation and their symbolic patterns.
inline VerificationReport verify_separation(const SeparationResult& r) {
  VerificationReport v;
  auto issue = [&](std::string s) { v.issues.push_back(std::move(s)); };

  v.propositional = is_propositional(r.sequent);
  if (v.propositional) {
    for (const auto& [pred, arity] : predicates_of(r.sequent)) {
      if (pred.size() != 1 || std::string("pqrs").find(pred) == std::string::npos) v.propositional = false;
    }
  }
  if (!v.propositional) issue("sequent is not a closed formula over p, q, r, s");

  if (v.propositional) {
    auto pv = decide_propositional(r.sequent);
    if (auto* ok = std::get_if<Valid>(&pv)) {
      v.classically_valid = true;
      v.valuations = ok->checked;
    } else {
      issue("sequent is not classically valid");
    }
  }

  const auto validation = validate_kripke_model(to_raw(r.countermodel));
  v.model_well_formed = validation.ok();
  for (const auto& viol : validation.violations) issue("countermodel [" + viol.code + "] " + viol.message);
  v.constant_domain = r.countermodel.constant_domain();
  if (!v.constant_domain) issue("countermodel is not constant-domain");

  if (r.failing_world >= r.countermodel.world_count()) {
    issue("stated failing world is out of range");
  } else {
    v.fails_in_model =
        std::holds_alternative<KripkeFailure>(model_validity(r.countermodel, r.sequent, ForallMode::Successors));
    v.fails_at_stated_world =
        eval_sequent_kripke(r.countermodel, r.failing_world, Assignment{}, r.sequent, ForallMode::Successors) == 0;
    if (!v.fails_at_stated_world) {
      issue("sequent holds at " + r.countermodel.world_name(r.failing_world) + " of " + r.model_name);
    }
  }

  v.tables_reproduce = true;
  v.tables_match_pattern = true;
  try {
    for (const auto& t : r.tables) {
      ConstructionTable again = t;
      compute_table(again, r.formulas, r.countermodel);
      for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (again.rows[i].cells != t.rows[i].cells) {
          v.tables_reproduce = false;
          issue(t.id + ": row " + t.rows[i].label + " does not reproduce");
        }
      }
      if (auto p = pattern_for(t.id, r.variant)) {
        for (auto& m : pattern_mismatches(again, *p, r.a, r.b, r.connective.arity())) {
          v.tables_match_pattern = false;
          issue(std::move(m));
        }
      }
    }
  } catch (const Error& e) {
    v.tables_reproduce = false;
    issue(std::string("table recomputation failed: ") + e.what());
  }
  return v;
}

// ---------------------------------------------------------------------------
// Constructions

/// The formula c(f, ..., f).
inline Formula build_negation(const TruthTable& c, const Formula& f) {
  if (c.arity() == 0) throw UsageError("connective '" + c.name() + "' has arity 0");
  return Formula::conn(c, std::vector<Formula>(c.arity(), f));
}

/// c(s, ..., s); in case (d) it is true under every valuation and at every world.
inline Formula build_tau(const TruthTable& c) {
  if (classify_case(c) != Case::D) throw UsageError("tau is defined only for case (d) connectives");
  return build_negation(c, detail::prop('s'));
}

namespace detail {

template <class Pick>
Formula pointwise(const TruthTable& c, Pick pick) {
  std::vector<Formula> args;
  for (std::size_t i = 0; i < c.arity(); ++i) args.push_back(pick(i));
  return Formula::conn(c, std::move(args));
}

struct Layers {
  Formula sigma, psi, phi;
};

/// The three case-(d) layers; `top` fills the indices where a is 1.
inline Layers d_layers(const TruthTable& c, const TruthVector& a, const TruthVector& b, const Formula& top,
                       bool p_variant) {
  const Formula &p = prop('p'), &q = prop('q');
  auto slot = [&](std::size_t i, const Formula& a0b0, const Formula& a0b1) -> Formula {
    if (a[i] == 1) return top;
    return b[i] == 1 ? a0b1 : a0b0;
  };
  Formula sigma = pointwise(c, [&](std::size_t i) { return slot(i, q, p); });
  if (p_variant) {
    Formula psi = pointwise(c, [&](std::size_t i) { return slot(i, p, sigma); });
    Formula phi = pointwise(c, [&](std::size_t i) { return slot(i, p, psi); });
    return {sigma, psi, phi};
  }
  Formula psi = pointwise(c, [&](std::size_t i) { return slot(i, sigma, q); });
  Formula phi = pointwise(c, [&](std::size_t i) { return slot(i, psi, p); });
  return {sigma, psi, phi};
}

inline ConstructionTable make_table(std::string id, bool kripke, std::vector<std::string> columns,
                                    std::vector<TableRow> rows) {
  return {std::move(id), kripke, std::move(columns), std::move(rows)};
}

/// Fills tables, verifies, and throws if the construction does not separate.
inline SeparationResult finish(SeparationResult r) {
  for (auto& t : r.tables) compute_table(t, r.formulas, r.countermodel);
  r.verification = verify_separation(r);
  return r;
}

inline SeparationResult require_passed(SeparationResult r) {
  if (!r.verification.passed()) {
    std::string msg = "construction for '" + r.connective.name() + "' failed verification:";
    for (const auto& i : r.verification.issues) msg += " " + i + ";";
    throw InternalError(msg);
  }
  return r;
}

inline MonotonicityWitness require_witness(const TruthTable& c) {
  auto w = monotonicity_witness(c);
  if (!w) throw UsageError("connective '" + c.name() + "' is monotone; nothing to separate");
  return *w;
}

inline void require_case(const TruthTable& c, Case expected) {
  if (classify_case(c) != expected) {
    throw UsageError(std::string("connective '") + c.name() + "' is in case (" + case_label(classify_case(c)) +
                     "), not (" + case_label(expected) + ")");
  }
}

}  // namespace detail

/// t(0...0) = 1, t(1...1) = 1.
inline SeparationResult build_case_d(const TruthTable& c) {
  detail::require_case(c, Case::D);
  const auto [a, b] = detail::require_witness(c);
  const bool first = c(relative_invert(a, b)) == 1;
  const std::string v = first ? "P" : "Q";
  const Formula tau = build_tau(c);
  const auto layers = detail::d_layers(c, a, b, tau, first);

  SeparationResult r{c, Case::D, first ? 1 : 2, v, a, b, {}, {}, "K*", k_star(), 0, {}, {}, {}};
  r.formulas = {{"tau", tau}, {"sigma_" + v, layers.sigma}, {"psi_" + v, layers.psi}, {"phi_" + v, layers.phi}};
  r.sequent = Sequent({}, {layers.phi});
  r.failing_world = *r.countermodel.world_index("w0");
  const std::string tag = first ? "d1" : "d2";
  const std::vector<std::string> cols = {"sigma_" + v, "psi_" + v, "phi_" + v};
  r.tables = {detail::make_table(tag + "-classical", false, cols, detail::valuation_rows({"p", "q"})),
              detail::make_table(tag + "-kripke", true, cols, detail::world_rows(r.countermodel, {"w1", "w0"}))};
  return detail::require_passed(detail::finish(std::move(r)));
}

/// t(0...0) = 1, t(1...1) = 0: double c-negation elimination.
inline SeparationResult build_case_c(const TruthTable& c) {
  detail::require_case(c, Case::C);
  const auto w = detail::require_witness(c);
  const Formula& p = detail::prop('p');
  const Formula neg = build_negation(c, p);
  const Formula negneg = build_negation(c, neg);

  SeparationResult r{c, Case::C, 0, "", w.a, w.b, {}, {}, "K*|p", k_star_p(), 0, {}, {}, {}};
  r.formulas = {{"p", p}, {"neg_p", neg}, {"neg_neg_p", negneg}};
  r.sequent = Sequent({negneg}, {p});
  r.failing_world = *r.countermodel.world_index("w0");
  const std::vector<std::string> cols = {"p", "neg_p", "neg_neg_p"};
  r.tables = {detail::make_table("c-classical", false, cols, detail::valuation_rows({"p"})),
              detail::make_table("c-kripke", true, cols, detail::world_rows(r.countermodel, {"w1", "w0"}))};
  return detail::require_passed(detail::finish(std::move(r)));
}

namespace detail {

inline SeparationResult case_b_second(const TruthTable& c, const TruthVector& a, const TruthVector& b,
                                      bool p_variant) {
  const Formula &q = prop('q'), &rr = prop('r');
  const std::string v = p_variant ? "PP" : "QQ";
  const Formula tau = build_negation(c, prop('s'));
  const auto layers = d_layers(c, a, b, tau, p_variant);
  const Formula sigma = substitute_symbol(layers.sigma, tau, rr);
  const Formula psi_v = substitute_symbol(layers.psi, tau, rr);
  const Formula phi_v = substitute_symbol(layers.phi, tau, rr);
  const Formula psi = pointwise(c, [&](std::size_t i) { return a[i] == 1 ? rr : q; });

  SeparationResult r{c, Case::B, 2, v, a, b, {}, {}, "K+", k_plus(), 0, {}, {}, {}};
  r.formulas = {{"psi", psi}, {"sigma_" + v, sigma}, {"psi_" + v, psi_v}, {"phi_" + v, phi_v}};
  r.sequent = Sequent({psi}, {phi_v});
  r.failing_world = *r.countermodel.world_index("w0");
  const std::vector<std::string> cols = {"psi", "sigma_" + v, "psi_" + v, "phi_" + v};
  r.tables = {make_table("b2-classical", false, cols, valuation_rows({"p", "q"}, {{"r", 1}})),
              make_table("b2-kripke", true, cols, world_rows(r.countermodel, {"w1", "w0"}))};
  return finish(std::move(r));
}

}  // namespace detail

/// t(0...0) = 0, t(1...1) = 1, t non-monotone.
inline SeparationResult build_case_b(const TruthTable& c) {
  detail::require_case(c, Case::B);
  const auto [a, b] = detail::require_witness(c);
  const Formula &p = detail::prop('p'), &q = detail::prop('q'), &rr = detail::prop('r');

  if (c(invert(a)) == 1) {
    const Formula chi = detail::pointwise(c, [&](std::size_t i) { return a[i] == 1 ? p : q; });
    const Formula psi = detail::pointwise(c, [&](std::size_t i) { return a[i] == 1 ? rr : (b[i] == 1 ? p : q); });
    const Formula phi = detail::pointwise(c, [&](std::size_t i) { return a[i] == 1 ? rr : (b[i] == 1 ? psi : q); });
    SeparationResult r{c, Case::B, 1, "", a, b, {}, {}, "K+", k_plus(), 0, {}, {}, {}};
    r.formulas = {{"chi", chi}, {"psi", psi}, {"phi", phi}};
    r.sequent = Sequent({phi}, {chi});
    r.failing_world = *r.countermodel.world_index("w0");
    const std::vector<std::string> cols = {"chi", "psi", "phi"};
    r.tables = {detail::make_table("b1-classical", false, cols, detail::valuation_rows({"p", "q", "r"})),
                detail::make_table("b1-kripke", true, cols, detail::world_rows(r.countermodel, {"w1", "w0"}))};
    return detail::require_passed(detail::finish(std::move(r)));
  }

  // Subcase 2: both variants are built and verified; the one selected by
  // t(b^a) is returned when it passes, the other one otherwise.
  const bool prefer_p = c(relative_invert(a, b)) == 1;
  SeparationResult first = detail::case_b_second(c, a, b, prefer_p);
  SeparationResult second = detail::case_b_second(c, a, b, !prefer_p);
  const std::string other = "variant " + second.variant + " " + (second.verification.passed() ? "also separates" : "does not separate");
  if (first.verification.passed()) {
    first.notes.push_back(other);
    return first;
  }
  if (second.verification.passed()) {
    second.notes.push_back("variant " + first.variant + " does not separate; used " + second.variant);
    return second;
  }
  return detail::require_passed(std::move(first));
}

/// t(0...0) = 0, t(1...1) = 0; a is the least vector with t(a) = 1.
inline SeparationResult build_case_a(const TruthTable& c) {
  detail::require_case(c, Case::A);
  std::optional<TruthVector> least;
  for (std::size_t row = 0; row < (std::size_t{1} << c.arity()); ++row) {
    if (c.at_row(row) == 1) {
      least = TruthVector::from_row(row, c.arity());
      break;
    }
  }
  if (!least) throw UsageError("connective '" + c.name() + "' is constantly 0 and therefore monotone");
  const TruthVector a = *least;
  const Formula &p = detail::prop('p'), &rr = detail::prop('r');
  const Formula psi = detail::pointwise(c, [&](std::size_t i) { return a[i] == 1 ? rr : p; });
  const Formula phi = detail::pointwise(c, [&](std::size_t i) { return a[i] == 1 ? rr : psi; });

  SeparationResult r{c, Case::A, 0, "", a, std::nullopt, {}, {}, "K+", k_plus(), 0, {}, {}, {}};
  r.formulas = {{"p", p}, {"psi", psi}, {"phi", phi}};
  r.sequent = Sequent({phi}, {p});
  r.failing_world = *r.countermodel.world_index("w0");
  const std::vector<std::string> cols = {"psi", "phi"};
  r.tables = {detail::make_table("a-classical", false, {"p", "psi", "phi"}, detail::valuation_rows({"p", "r"})),
              detail::make_table("a-kripke", true, cols, detail::world_rows(r.countermodel, {"w1", "w0"}))};
  return detail::require_passed(detail::finish(std::move(r)));
}

/// Dispatches on the case of a non-monotone connective.
inline SeparationResult separate_connective(const TruthTable& c) {
  detail::require_witness(c);
  switch (classify_case(c)) {
    case Case::A: return build_case_a(c);
    case Case::B: return build_case_b(c);
    case Case::C: return build_case_c(c);
    case Case::D: return build_case_d(c);
  }
  throw InternalError("unreachable case");
}

/// Separates the first non-monotone connective in name order.
inline SeparationOutcome separate(const Signature& sig) {
  AllMonotone all;
  for (const auto& [name, table] : sig) {
    if (!is_monotonic(table)) return separate_connective(table);
    all.connectives.push_back(name);
  }
  return all;
}

}  // namespace ksep
