#pragma once

// Per-world classical projection of constant-domain Kripke models, one-world
// lifting of classical models, and checks that Kripke and projected classical
// values coincide over monotone signatures.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ksep/classical_sem.hpp"
#include "ksep/errors.hpp"
#include "ksep/kripke_sem.hpp"
#include "ksep/syntax.hpp"
#include "ksep/truthfn.hpp"

namespace ksep {

/// Classical model over D whose interpretation is the one at world w.
inline ClassicalModel project_world(const KripkeModel& k, std::size_t w) {
  if (!k.constant_domain()) throw UsageError("project_world: model is not constant-domain");
  if (w >= k.world_count()) throw UsageError("project_world: world index out of range");
  ClassicalModel m(k.individuals());
  for (const auto& [name, rel] : k.interp(w).relations()) m.interp().relation(name, rel.arity()) = rel;
  return m;
}

/// The classical model as a one-world constant-domain Kripke model.
inline KripkeModel lift_classical(const ClassicalModel& m, const std::string& world = "w0") {
  RawKripkeModel raw;
  raw.worlds = {world};
  raw.set_constant_domain(m.domain());
  for (const auto& [name, rel] : m.interp().relations()) {
    std::vector<Variable> vars;
    for (std::size_t i = 0; i < rel.arity(); ++i) vars.push_back("#" + std::to_string(i));
    bool any = false;
    for_each_assignment(vars, iota_domain(m.size()), [&](const Assignment& rho) {
      Tuple t;
      std::vector<std::string> args;
      for (const auto& x : vars) {
        t.push_back(*rho.get(x));
        args.push_back(m.domain()[static_cast<std::size_t>(t.back())]);
      }
      if (rel.get(t)) {
        raw.interp.push_back({world, name, args, 1});
        any = true;
      }
      return true;
    });
    // keep the predicate's arity visible even when it is empty
    if (!any) {
      std::vector<std::string> args(rel.arity(), m.domain().front());
      raw.interp.push_back({world, name, args, 0});
    }
  }
  return make_kripke_model(raw);
}

struct CollapseEntry {
  std::size_t world = 0;
  std::size_t formula = 0;  // index into CollapseReport::formulas
  Assignment assignment;
  int kripke = 0;
  int classical = 0;
};

struct CollapseReport {
  std::string model_id;
  std::vector<Formula> formulas;
  std::vector<CollapseEntry> entries;
  std::size_t disagreements = 0;
  bool agreement = true;
};

/// Throws UsageError naming the first non-monotonic connective and its
/// witness pair, if any.
inline void require_monotone(const std::map<std::string, TruthTable>& connectives, const char* where) {
  for (const auto& [name, t] : connectives) {
    if (auto w = monotonicity_witness(t)) {
      throw UsageError(std::string(where) + ": connective '" + name + "' is not monotonic (witness " +
                       w->a.to_string() + " <= " + w->b.to_string() + ")");
    }
  }
}

/// Records, for every world, formula and assignment, the Kripke value and the
/// value in the projected classical model. When `assignments` is empty, all
/// assignments of each formula's free variables into D are used.
inline CollapseReport check_collapse(const KripkeModel& k, const std::vector<Formula>& formulas,
                                     const std::vector<Assignment>& assignments = {},
                                     std::string model_id = "model") {
  if (!k.constant_domain()) throw UsageError("check_collapse: model is not constant-domain");
  std::map<std::string, TruthTable> conns;
  for (const auto& f : formulas) collect_connectives(f, conns);
  require_monotone(conns, "check_collapse");

  CollapseReport report;
  report.model_id = std::move(model_id);
  report.formulas = formulas;
  std::vector<ClassicalModel> projections;
  for (std::size_t w = 0; w < k.world_count(); ++w) projections.push_back(project_world(k, w));

  for (std::size_t w = 0; w < k.world_count(); ++w) {
    for (std::size_t i = 0; i < formulas.size(); ++i) {
      auto record = [&](const Assignment& rho) {
        CollapseEntry e{w, i, rho, eval_kripke(k, w, rho, formulas[i]), eval_classical(projections[w], rho, formulas[i])};
        if (e.kripke != e.classical) ++report.disagreements;
        report.entries.push_back(std::move(e));
        return true;
      };
      if (assignments.empty()) {
        const auto fv = free_vars(formulas[i]);
        for_each_assignment(std::vector<Variable>(fv.begin(), fv.end()), k.domain(w), record);
      } else {
        for (const auto& rho : assignments) record(rho);
      }
    }
  }
  report.agreement = report.disagreements == 0;
  return report;
}

// ---------------------------------------------------------------------------
// Whole-model value tables

/// Values of formulas at every (world, assignment) point of a constant-domain
/// model, for a fixed variable list. Assignments are total on `vars` and
/// indexed in mixed radix (first variable most significant). Cell index is
/// world * assignment_count + assignment.
///
/// `kripke_*` apply the Kripke clauses; `classical_*` apply the classical
/// clauses world by world, i.e. in the projected model of each world.
class CdTables {
 public:
  using Table = std::vector<uint8_t>;

  CdTables(const KripkeModel& k, std::vector<Variable> vars) : k_(k), vars_(std::move(vars)) {
    if (!k.constant_domain()) throw UsageError("CdTables: model is not constant-domain");
    n_ = k.individuals().size();
    assignments_ = 1;
    for (std::size_t i = 0; i < vars_.size(); ++i) assignments_ *= n_;
    stride_.assign(vars_.size(), 1);
    for (std::size_t i = vars_.size(); i-- > 1;) stride_[i - 1] = stride_[i] * n_;
  }

  std::size_t worlds() const { return k_.world_count(); }
  std::size_t assignment_count() const { return assignments_; }
  std::size_t cells() const { return worlds() * assignments_; }
  const std::vector<Variable>& vars() const { return vars_; }

  Assignment assignment(std::size_t index) const {
    Assignment rho;
    for (std::size_t i = 0; i < vars_.size(); ++i) rho.set(vars_[i], static_cast<Individual>((index / stride_[i]) % n_));
    return rho;
  }

  Table atom(const Formula& f) const {
    Table out(cells());
    for (std::size_t w = 0; w < worlds(); ++w) {
      for (std::size_t a = 0; a < assignments_; ++a) {
        Tuple t;
        for (const auto& x : f.args()) t.push_back(digit(a, x));
        out[w * assignments_ + a] = static_cast<uint8_t>(k_.atom(w, f.name(), t));
      }
    }
    return out;
  }

  Table kripke_conn(const TruthTable& t, const std::vector<const Table*>& kids) const {
    Table out(cells());
    for (std::size_t w = 0; w < worlds(); ++w) {
      for (std::size_t a = 0; a < assignments_; ++a) {
        uint8_t value = 1;
        for (std::size_t v : k_.successors(w)) {
          if (!t.at_row(row(kids, v * assignments_ + a))) {
            value = 0;
            break;
          }
        }
        out[w * assignments_ + a] = value;
      }
    }
    return out;
  }

  Table classical_conn(const TruthTable& t, const std::vector<const Table*>& kids) const {
    Table out(cells());
    for (std::size_t c = 0; c < cells(); ++c) out[c] = static_cast<uint8_t>(t.at_row(row(kids, c)));
    return out;
  }

  /// Universal clause over all successors and all of D.
  Table kripke_forall(const Variable& x, const Table& body) const {
    Table out(cells());
    for (std::size_t w = 0; w < worlds(); ++w) {
      for (std::size_t a = 0; a < assignments_; ++a) {
        uint8_t value = 1;
        for (std::size_t v : k_.successors(w)) {
          for (std::size_t e = 0; e < n_ && value; ++e) value = body[v * assignments_ + rebind(a, x, e)];
        }
        out[w * assignments_ + a] = value;
      }
    }
    return out;
  }

  Table classical_forall(const Variable& x, const Table& body) const { return local_quantifier(x, body, true); }
  Table exists(const Variable& x, const Table& body) const { return local_quantifier(x, body, false); }

  Table kripke(const Formula& f) const { return eval(f, true); }
  Table classical(const Formula& f) const { return eval(f, false); }

 private:
  Individual digit(std::size_t a, const Variable& x) const {
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i] == x) return static_cast<Individual>((a / stride_[i]) % n_);
    }
    throw UsageError("CdTables: variable '" + x + "' is not in the table's variable list");
  }

  std::size_t rebind(std::size_t a, const Variable& x, std::size_t e) const {
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i] == x) return a - ((a / stride_[i]) % n_) * stride_[i] + e * stride_[i];
    }
    throw UsageError("CdTables: variable '" + x + "' is not in the table's variable list");
  }

  static std::size_t row(const std::vector<const Table*>& kids, std::size_t cell) {
    std::size_t r = 0;
    for (const Table* k : kids) r = (r << 1U) | (*k)[cell];
    return r;
  }

  Table local_quantifier(const Variable& x, const Table& body, bool universal) const {
    Table out(cells());
    for (std::size_t w = 0; w < worlds(); ++w) {
      for (std::size_t a = 0; a < assignments_; ++a) {
        uint8_t value = universal ? 1 : 0;
        for (std::size_t e = 0; e < n_; ++e) {
          if (body[w * assignments_ + rebind(a, x, e)] != value) {
            value = static_cast<uint8_t>(1 - value);
            break;
          }
        }
        out[w * assignments_ + a] = value;
      }
    }
    return out;
  }

  Table eval(const Formula& f, bool kripke_clauses) const {
    switch (f.kind()) {
      case Formula::Kind::Atom:
        return atom(f);
      case Formula::Kind::Conn: {
        std::vector<Table> kids;
        for (const auto& c : f.children()) kids.push_back(eval(c, kripke_clauses));
        std::vector<const Table*> ptrs;
        for (const auto& t : kids) ptrs.push_back(&t);
        return kripke_clauses ? kripke_conn(f.table(), ptrs) : classical_conn(f.table(), ptrs);
      }
      case Formula::Kind::Forall: {
        Table body = eval(f.body(), kripke_clauses);
        return kripke_clauses ? kripke_forall(f.bound_var(), body) : classical_forall(f.bound_var(), body);
      }
      case Formula::Kind::Exists:
        return exists(f.bound_var(), eval(f.body(), kripke_clauses));
    }
    return {};
  }

  const KripkeModel& k_;
  std::vector<Variable> vars_;
  std::size_t n_ = 0;
  std::size_t assignments_ = 1;
  std::vector<std::size_t> stride_;
};

struct ClosureDisagreement {
  Formula formula;
  std::size_t world = 0;
  Assignment assignment;
  int kripke = 0;
  int classical = 0;
};

struct ClosureReport {
  std::size_t depth = 0;
  std::size_t classes = 0;     // distinct (Kripke, classical) value pairs of depth < `depth`
  std::size_t candidates = 0;  // compositions checked
  std::vector<ClosureDisagreement> disagreements;
  bool agreement() const { return disagreements.empty(); }
};

/// Compares Kripke and projected-classical values of every formula of depth
/// <= `depth` built from `atoms` with the connectives of `sig` and the
/// quantifiers over `vars`.
///
/// Formulas are handled up to their value pair (Kripke table, classical
/// table): both interpretations are compositional, so a compound formula's
/// pair depends only on its immediate subformulas' pairs. Each depth level
/// therefore composes one representative per pair class of the previous
/// levels, which covers every formula of that depth.
inline ClosureReport collapse_closure(const KripkeModel& k, const Signature& sig, const std::vector<Formula>& atoms,
                                      const std::vector<Variable>& vars, std::size_t depth,
                                      std::size_t max_reported = 100) {
  std::map<std::string, TruthTable> conns;
  for (const auto& [name, t] : sig) conns.emplace(name, t);
  require_monotone(conns, "collapse_closure");

  CdTables tables(k, vars);
  struct Rep {
    Formula formula;
    CdTables::Table kripke;
    CdTables::Table classical;
  };
  std::vector<Rep> reps;
  std::map<std::pair<CdTables::Table, CdTables::Table>, std::size_t> seen;
  ClosureReport report;
  report.depth = depth;

  auto consider = [&](auto&& make_formula, CdTables::Table kt, CdTables::Table ct, bool keep) {
    ++report.candidates;
    if (kt != ct && report.disagreements.size() < max_reported) {
      Formula f = make_formula();
      for (std::size_t c = 0; c < kt.size(); ++c) {
        if (kt[c] != ct[c]) {
          report.disagreements.push_back({f, c / tables.assignment_count(), tables.assignment(c % tables.assignment_count()),
                                          kt[c], ct[c]});
          break;
        }
      }
    }
    if (!keep) return;
    auto key = std::make_pair(kt, ct);
    if (seen.contains(key)) return;
    seen.emplace(key, reps.size());
    reps.push_back({make_formula(), std::move(kt), std::move(ct)});
  };

  for (const auto& a : atoms) {
    consider([&] { return a; }, tables.atom(a), tables.atom(a), depth > 0);
  }
  for (std::size_t level = 1; level <= depth; ++level) {
    const bool keep = level < depth;
    const std::size_t frontier = reps.size();
    for (const auto& [name, t] : sig) {
      const std::size_t arity = t.arity();
      std::vector<std::size_t> pick(arity, 0);
      while (true) {
        std::vector<const CdTables::Table*> kk, cc;
        for (std::size_t i : pick) {
          kk.push_back(&reps[i].kripke);
          cc.push_back(&reps[i].classical);
        }
        auto make = [&, pick] {
          std::vector<Formula> kids;
          for (std::size_t i : pick) kids.push_back(reps[i].formula);
          return Formula::conn(t, std::move(kids));
        };
        consider(make, tables.kripke_conn(t, kk), tables.classical_conn(t, cc), keep);
        std::size_t j = arity;
        while (j > 0 && ++pick[j - 1] == frontier) pick[--j] = 0;
        if (j == 0) break;
      }
    }
    for (const auto& x : vars) {
      for (std::size_t i = 0; i < frontier; ++i) {
        consider([&] { return Formula::forall(x, reps[i].formula); }, tables.kripke_forall(x, reps[i].kripke),
                 tables.classical_forall(x, reps[i].classical), keep);
        consider([&] { return Formula::exists(x, reps[i].formula); }, tables.exists(x, reps[i].kripke),
                 tables.exists(x, reps[i].classical), keep);
      }
    }
  }
  report.classes = reps.size();
  return report;
}

}  // namespace ksep
