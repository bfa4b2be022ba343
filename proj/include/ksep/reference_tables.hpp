#pragma once

// Symbolic value tables for the separating constructions, in the reference
// layout. A vector cell names which of a, b, b^a (b inverted relative to a),
// 0...0 or 1...1 the argument vector of that column's formula equals; the
// scalar is the formula's value.

#include <optional>
#include <string>
#include <vector>

#include "ksep/truthfn.hpp"

namespace ksep {

enum class Sym { A, B, RelInv, Zero, One };

inline std::string sym_name(Sym s) {
  switch (s) {
    case Sym::A: return "a";
    case Sym::B: return "b";
    case Sym::RelInv: return "b^a";
    case Sym::Zero: return "0bar";
    case Sym::One: return "1bar";
  }
  return "?";
}

inline TruthVector instantiate(Sym s, const TruthVector& a, const TruthVector& b) {
  switch (s) {
    case Sym::A: return a;
    case Sym::B: return b;
    case Sym::RelInv: return relative_invert(a, b);
    case Sym::Zero: return TruthVector::zeros(a.size());
    case Sym::One: return TruthVector::ones(a.size());
  }
  return a;
}

struct PatternCell {
  std::optional<Sym> vector;  // absent for atomic columns
  int value = 0;
};

struct PatternRow {
  std::string label;
  std::vector<PatternCell> cells;
};

struct TablePattern {
  std::string id;
  bool transcribed = false;  // transcribed reference fixture, not derived here
  std::vector<std::string> columns;
  std::vector<PatternRow> rows;
};

namespace detail {
inline PatternCell c(Sym s, int v) { return {s, v}; }
inline PatternCell atom_cell(int v) { return {std::nullopt, v}; }
}  // namespace detail

/// Case (d), t(b^a) = 1: classical rows over (p, q), Kripke rows at w1, w0 of K*.
inline TablePattern d1_classical() {
  using detail::c;
  using S = Sym;
  return {"d1-classical", true, {"sigma_P", "psi_P", "phi_P"},
          {{"p=0,q=0", {c(S::A, 1), c(S::B, 0), c(S::A, 1)}},
           {"p=0,q=1", {c(S::RelInv, 1), c(S::B, 0), c(S::A, 1)}},
           {"p=1,q=0", {c(S::B, 0), c(S::RelInv, 1), c(S::One, 1)}},
           {"p=1,q=1", {c(S::One, 1), c(S::One, 1), c(S::One, 1)}}}};
}

inline TablePattern d1_kripke() {
  using detail::c;
  using S = Sym;
  return {"d1-kripke", true, {"sigma_P", "psi_P", "phi_P"},
          {{"w1", {c(S::B, 0), c(S::RelInv, 1), c(S::One, 1)}},
           {"w0", {c(S::A, 0), c(S::A, 1), c(S::B, 0)}}}};
}

/// Case (d), t(b^a) = 0.
inline TablePattern d2_classical() {
  using detail::c;
  using S = Sym;
  return {"d2-classical", true, {"sigma_Q", "psi_Q", "phi_Q"},
          {{"p=0,q=0", {c(S::A, 1), c(S::RelInv, 0), c(S::A, 1)}},
           {"p=0,q=1", {c(S::RelInv, 0), c(S::B, 0), c(S::A, 1)}},
           {"p=1,q=0", {c(S::B, 0), c(S::A, 1), c(S::One, 1)}},
           {"p=1,q=1", {c(S::One, 1), c(S::One, 1), c(S::One, 1)}}}};
}

inline TablePattern d2_kripke() {
  using detail::c;
  using S = Sym;
  return {"d2-kripke", true, {"sigma_Q", "psi_Q", "phi_Q"},
          {{"w1", {c(S::B, 0), c(S::A, 1), c(S::One, 1)}},
           {"w0", {c(S::A, 0), c(S::A, 1), c(S::RelInv, 0)}}}};
}

/// Case (b), t(inverted a) = 1, in K+.
inline TablePattern b1_kripke() {
  using detail::c;
  using S = Sym;
  return {"b1-kripke", true, {"chi", "psi", "phi"},
          {{"w1", {c(S::A, 1), c(S::B, 0), c(S::A, 1)}},
           {"w0", {c(S::Zero, 0), c(S::A, 0), c(S::A, 1)}}}};
}

/// Case (a), in K+.
inline TablePattern a_kripke() {
  using detail::c;
  using S = Sym;
  return {"a-kripke", true, {"psi", "phi"},
          {{"w1", {c(S::One, 0), c(S::A, 1)}},
           {"w0", {c(S::A, 0), c(S::A, 1)}}}};
}

/// Case (c): p, its c-negation and double c-negation.
inline TablePattern c_classical() {
  using detail::c;
  using detail::atom_cell;
  using S = Sym;
  return {"c-classical", false, {"p", "neg_p", "neg_neg_p"},
          {{"p=0", {atom_cell(0), c(S::Zero, 1), c(S::One, 0)}},
           {"p=1", {atom_cell(1), c(S::One, 0), c(S::Zero, 1)}}}};
}

inline TablePattern c_kripke() {
  using detail::c;
  using detail::atom_cell;
  using S = Sym;
  return {"c-kripke", false, {"p", "neg_p", "neg_neg_p"},
          {{"w1", {atom_cell(1), c(S::One, 0), c(S::Zero, 1)}},
           {"w0", {atom_cell(0), c(S::Zero, 0), c(S::Zero, 1)}}}};
}

/// Case (b), t(inverted a) = 0: the case-(d) layers with tau replaced by r
/// behave as in case (d) once r holds; `variant` is "PP" or "QQ".
inline TablePattern b2_classical(const std::string& variant) {
  using detail::c;
  using S = Sym;
  const TablePattern base = variant == "PP" ? d1_classical() : d2_classical();
  TablePattern out{"b2-classical", false, {"psi"}, {}};
  for (const auto& col : base.columns) out.columns.push_back(col.substr(0, col.size() - 1) + variant);
  const PatternCell psi_by_q[] = {c(S::A, 1), c(S::One, 1)};
  for (std::size_t i = 0; i < base.rows.size(); ++i) {
    PatternRow row{base.rows[i].label + ",r=1", {psi_by_q[i % 2]}};
    row.cells.insert(row.cells.end(), base.rows[i].cells.begin(), base.rows[i].cells.end());
    out.rows.push_back(std::move(row));
  }
  return out;
}

inline TablePattern b2_kripke(const std::string& variant) {
  using detail::c;
  using S = Sym;
  const TablePattern base = variant == "PP" ? d1_kripke() : d2_kripke();
  TablePattern out{"b2-kripke", false, {"psi"}, {}};
  for (const auto& col : base.columns) out.columns.push_back(col.substr(0, col.size() - 1) + variant);
  for (const auto& r : base.rows) {
    PatternRow row{r.label, {c(S::A, 1)}};
    row.cells.insert(row.cells.end(), r.cells.begin(), r.cells.end());
    out.rows.push_back(std::move(row));
  }
  return out;
}

/// The pattern a construction table with this id must follow, if any.
inline std::optional<TablePattern> pattern_for(const std::string& id, const std::string& variant = "") {
  if (id == "d1-classical") return d1_classical();
  if (id == "d1-kripke") return d1_kripke();
  if (id == "d2-classical") return d2_classical();
  if (id == "d2-kripke") return d2_kripke();
  if (id == "b1-kripke") return b1_kripke();
  if (id == "a-kripke") return a_kripke();
  if (id == "c-classical") return c_classical();
  if (id == "c-kripke") return c_kripke();
  if (id == "b2-classical") return b2_classical(variant);
  if (id == "b2-kripke") return b2_kripke(variant);
  return std::nullopt;
}

}  // namespace ksep
