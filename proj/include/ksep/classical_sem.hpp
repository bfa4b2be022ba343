#pragma once

// Finite classical models and the two-valued interpretation of formulas and
// sequents, with exact propositional decision and bounded first-order search.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ksep/errors.hpp"
#include "ksep/syntax.hpp"
#include "ksep/truthfn.hpp"

namespace ksep {

/// Individuals are referred to by their index in the model's universe.
using Individual = int;
using Tuple = std::vector<Individual>;

/// Characteristic function of an n-ary relation over a universe of size N,
/// stored densely; tuples index in mixed radix with the first argument most
/// significant.
class Relation {
 public:
  Relation(std::size_t arity, std::size_t universe) : arity_(arity), universe_(universe) {
    std::size_t cells = 1;
    for (std::size_t i = 0; i < arity; ++i) cells *= universe;
    bits_.assign(cells, 0);
  }

  std::size_t arity() const { return arity_; }
  std::size_t universe() const { return universe_; }

  std::size_t index(const Tuple& t) const {
    std::size_t idx = 0;
    for (Individual a : t) idx = idx * universe_ + static_cast<std::size_t>(a);
    return idx;
  }

  int get(const Tuple& t) const { return bits_[index(t)]; }
  void set(const Tuple& t, int v) { bits_[index(t)] = static_cast<uint8_t>(v != 0); }
  int at(std::size_t idx) const { return bits_[idx]; }
  void set_at(std::size_t idx, int v) { bits_[idx] = static_cast<uint8_t>(v != 0); }
  std::size_t cells() const { return bits_.size(); }

  bool all_zero() const { return std::all_of(bits_.begin(), bits_.end(), [](uint8_t b) { return b == 0; }); }

  friend bool operator==(const Relation&, const Relation&) = default;

 private:
  std::size_t arity_;
  std::size_t universe_;
  std::vector<uint8_t> bits_;
};

/// Predicate name -> relation. Absent predicates read as constantly 0.
class Interpretation {
 public:
  explicit Interpretation(std::size_t universe = 0) : universe_(universe) {}

  std::size_t universe() const { return universe_; }

  int get(const std::string& pred, const Tuple& t) const {
    auto it = relations_.find(pred);
    if (it == relations_.end()) return 0;
    if (it->second.arity() != t.size()) {
      throw UsageError("predicate '" + pred + "' has arity " + std::to_string(it->second.arity()) +
                       " in the model but is applied to " + std::to_string(t.size()) + " arguments");
    }
    return it->second.get(t);
  }

  void set(const std::string& pred, const Tuple& t, int v) { relation(pred, t.size()).set(t, v); }

  /// The relation for `pred`, created all-zero if absent.
  Relation& relation(const std::string& pred, std::size_t arity) {
    auto it = relations_.find(pred);
    if (it == relations_.end()) it = relations_.emplace(pred, Relation(arity, universe_)).first;
    if (it->second.arity() != arity) {
      throw UsageError("predicate '" + pred + "' used with arities " + std::to_string(it->second.arity()) + " and " +
                       std::to_string(arity));
    }
    return it->second;
  }

  const Relation* find(const std::string& pred) const {
    auto it = relations_.find(pred);
    return it == relations_.end() ? nullptr : &it->second;
  }

  const std::map<std::string, Relation>& relations() const { return relations_; }

  /// Equality with absent relations read as all-zero.
  friend bool operator==(const Interpretation& x, const Interpretation& y) {
    if (x.universe_ != y.universe_) return false;
    auto covered = [](const Interpretation& a, const Interpretation& b) {
      for (const auto& [name, rel] : a.relations_) {
        const Relation* other = b.find(name);
        if (other ? !(*other == rel) : !rel.all_zero()) return false;
      }
      return true;
    };
    return covered(x, y) && covered(y, x);
  }

 private:
  std::size_t universe_;
  std::map<std::string, Relation> relations_;
};

/// A classical model: non-empty finite domain of named individuals and an
/// interpretation of predicate symbols.
class ClassicalModel {
 public:
  explicit ClassicalModel(std::vector<std::string> domain) : domain_(std::move(domain)), interp_(domain_.size()) {
    if (domain_.empty()) throw UsageError("classical model: domain must be non-empty");
    auto sorted = domain_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw UsageError("classical model: duplicate individual in domain");
    }
  }

  const std::vector<std::string>& domain() const { return domain_; }
  std::size_t size() const { return domain_.size(); }

  std::optional<Individual> index_of(const std::string& id) const {
    auto it = std::find(domain_.begin(), domain_.end(), id);
    if (it == domain_.end()) return std::nullopt;
    return static_cast<Individual>(it - domain_.begin());
  }

  const Interpretation& interp() const { return interp_; }
  Interpretation& interp() { return interp_; }

  int get(const std::string& pred, const Tuple& t = {}) const { return interp_.get(pred, t); }
  void set(const std::string& pred, const Tuple& t, int v) { interp_.set(pred, t, v); }

  friend bool operator==(const ClassicalModel&, const ClassicalModel&) = default;

 private:
  std::vector<std::string> domain_;
  Interpretation interp_;
};

/// Partial map from variables to individuals.
class Assignment {
 public:
  Assignment() = default;
  Assignment(std::initializer_list<std::pair<Variable, Individual>> init) {
    for (const auto& [x, a] : init) set(x, a);
  }

  std::optional<Individual> get(const Variable& x) const {
    auto it = find(x);
    if (it == entries_.end() || it->first != x) return std::nullopt;
    return it->second;
  }

  void set(const Variable& x, Individual a) {
    auto it = find(x);
    if (it != entries_.end() && it->first == x) {
      it->second = a;
    } else {
      entries_.insert(it, {x, a});
    }
  }

  Assignment bind(const Variable& x, Individual a) const {
    Assignment copy = *this;
    copy.set(x, a);
    return copy;
  }

  bool empty() const { return entries_.empty(); }
  const std::vector<std::pair<Variable, Individual>>& entries() const { return entries_; }

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<std::pair<Variable, Individual>>::iterator find(const Variable& x) {
    return std::lower_bound(entries_.begin(), entries_.end(), x,
                            [](const auto& e, const Variable& v) { return e.first < v; });
  }
  std::vector<std::pair<Variable, Individual>>::const_iterator find(const Variable& x) const {
    return std::lower_bound(entries_.begin(), entries_.end(), x,
                            [](const auto& e, const Variable& v) { return e.first < v; });
  }

  std::vector<std::pair<Variable, Individual>> entries_;
};

/// Calls `visit(assignment)` for every total assignment of `vars` into
/// `domain`, in mixed-radix order (first variable most significant, domain
/// order within a digit). Stops early when `visit` returns false.
template <class Visit>
bool for_each_assignment(const std::vector<Variable>& vars, const std::vector<Individual>& domain, Visit&& visit,
                         Assignment base = {}) {
  if (domain.empty() && !vars.empty()) return true;
  std::vector<std::size_t> digit(vars.size(), 0);
  while (true) {
    Assignment rho = base;
    for (std::size_t i = 0; i < vars.size(); ++i) rho.set(vars[i], domain[digit[i]]);
    if (!visit(rho)) return false;
    std::size_t i = vars.size();
    while (i > 0) {
      --i;
      if (++digit[i] < domain.size()) break;
      digit[i] = 0;
      if (i == 0) return true;
    }
    if (vars.empty()) return true;
  }
}

inline std::vector<Individual> iota_domain(std::size_t n) {
  std::vector<Individual> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = static_cast<Individual>(i);
  return d;
}

inline std::string format_assignment(const Assignment& rho, const std::vector<std::string>& names) {
  std::string out = "{";
  bool first = true;
  for (const auto& [x, a] : rho.entries()) {
    if (!first) out += ", ";
    first = false;
    out += x + " -> " + names.at(static_cast<std::size_t>(a));
  }
  return out + "}";
}

namespace detail {

inline void require_bound(const std::set<Variable>& fv, const Assignment& rho, std::size_t universe,
                          const char* where) {
  for (const auto& x : fv) {
    auto a = rho.get(x);
    if (!a) throw UsageError(std::string(where) + ": free variable '" + x + "' is unassigned");
    if (*a < 0 || static_cast<std::size_t>(*a) >= universe) {
      throw UsageError(std::string(where) + ": variable '" + x + "' is assigned an individual outside the domain");
    }
  }
}

inline Tuple atom_tuple(const Formula& f, const Assignment& rho) {
  Tuple t;
  t.reserve(f.args().size());
  for (const auto& x : f.args()) t.push_back(*rho.get(x));
  return t;
}

inline int eval_classical_unchecked(const ClassicalModel& m, const Assignment& rho, const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
      return m.get(f.name(), atom_tuple(f, rho));
    case Formula::Kind::Conn: {
      std::size_t row = 0;
      for (const auto& c : f.children()) row = (row << 1U) | static_cast<std::size_t>(eval_classical_unchecked(m, rho, c));
      return f.table().at_row(row);
    }
    case Formula::Kind::Forall:
      for (std::size_t a = 0; a < m.size(); ++a) {
        if (!eval_classical_unchecked(m, rho.bind(f.bound_var(), static_cast<Individual>(a)), f.body())) return 0;
      }
      return 1;
    case Formula::Kind::Exists:
      for (std::size_t a = 0; a < m.size(); ++a) {
        if (eval_classical_unchecked(m, rho.bind(f.bound_var(), static_cast<Individual>(a)), f.body())) return 1;
      }
      return 0;
  }
  return 0;
}

}  // namespace detail

inline int eval_classical(const ClassicalModel& m, const Assignment& rho, const Formula& f) {
  detail::require_bound(free_vars(f), rho, m.size(), "eval_classical");
  return detail::eval_classical_unchecked(m, rho, f);
}

/// 0 iff every antecedent formula is 1 and every succedent formula is 0.
inline int eval_sequent_classical(const ClassicalModel& m, const Assignment& rho, const Sequent& s) {
  detail::require_bound(free_vars(s), rho, m.size(), "eval_sequent_classical");
  for (const auto& a : s.antecedent()) {
    if (!detail::eval_classical_unchecked(m, rho, a)) return 1;
  }
  for (const auto& b : s.succedent()) {
    if (detail::eval_classical_unchecked(m, rho, b)) return 1;
  }
  return 0;
}

struct Valid {
  std::size_t checked = 0;  // valuations, models or (world, assignment) points examined
};

struct ClassicalCountermodel {
  ClassicalModel model;
  Assignment assignment;
};

struct NoCountermodelUpTo {
  std::size_t max_domain = 0;
  std::size_t max_worlds = 1;
  std::size_t models_checked = 0;
};

using PropositionalVerdict = std::variant<Valid, ClassicalCountermodel>;
using BoundedClassicalVerdict = std::variant<NoCountermodelUpTo, ClassicalCountermodel>;

/// Ceiling on the number of interpretations an exhaustive search may visit.
struct SearchLimits {
  static constexpr const char* kEnvVar = "KSEP_MAX_INTERPRETATIONS";
  std::uint64_t max_interpretations = std::uint64_t{1} << 24;

  static SearchLimits from_env() {
    SearchLimits limits;
    if (const char* v = std::getenv(kEnvVar)) {
      char* end = nullptr;
      unsigned long long n = std::strtoull(v, &end, 10);
      if (end == v || *end != '\0' || n == 0) {
        throw UsageError(std::string(kEnvVar) + " must be a positive integer, got '" + v + "'");
      }
      limits.max_interpretations = n;
    }
    return limits;
  }
};

inline std::vector<std::string> individual_names(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= n; ++i) names.push_back("a" + std::to_string(i));
  return names;
}

/// Exact classical validity of a propositional sequent by enumerating the
/// 2^k valuations of its k symbols (name order, first symbol most
/// significant). A countermodel is the first falsifying valuation, as a
/// one-element model.
inline PropositionalVerdict decide_propositional(const Sequent& s) {
  if (!is_propositional(s)) throw UsageError("decide_propositional: sequent is not propositional");
  const auto preds = predicates_of(s);
  std::vector<std::string> symbols;
  for (const auto& [name, arity] : preds) symbols.push_back(name);
  if (symbols.size() >= 31) throw ResourceError("decide_propositional: too many propositional symbols");

  const std::size_t rows = std::size_t{1} << symbols.size();
  for (std::size_t row = 0; row < rows; ++row) {
    ClassicalModel m(individual_names(1));
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      m.set(symbols[i], {}, static_cast<int>((row >> (symbols.size() - 1 - i)) & 1U));
    }
    if (eval_sequent_classical(m, {}, s) == 0) return ClassicalCountermodel{std::move(m), {}};
  }
  return Valid{rows};
}

/// Exhaustive search for a classical countermodel with domain size 1..n.
/// Order: domain size ascending; interpretations as a binary counter over
/// (predicate name, argument tuple) instances, first instance most
/// significant; then assignments of the free variables. Finding nothing does
/// not certify validity.
inline BoundedClassicalVerdict bounded_fo_validity(const Sequent& s, std::size_t max_domain,
                                                   SearchLimits limits = {}) {
  if (max_domain < 1) throw UsageError("bounded_fo_validity: bound must be >= 1");
  const auto preds = predicates_of(s);
  const auto fv_set = free_vars(s);
  const std::vector<Variable> fv(fv_set.begin(), fv_set.end());

  auto instance_count = [&](std::size_t d) {
    std::uint64_t total = 0;
    for (const auto& [name, arity] : preds) {
      std::uint64_t cells = 1;
      for (std::size_t i = 0; i < arity; ++i) {
        cells *= d;
        if (cells > 64) return std::uint64_t{64};
      }
      total += cells;
      if (total > 64) return std::uint64_t{64};
    }
    return total;
  };

  std::uint64_t space = 0;
  for (std::size_t d = 1; d <= max_domain; ++d) {
    const std::uint64_t inst = instance_count(d);
    if (inst >= 63) throw ResourceError("bounded_fo_validity: bound infeasible (2^" + std::to_string(inst) + " interpretations)");
    space += std::uint64_t{1} << inst;
    if (space > limits.max_interpretations) {
      throw ResourceError("bounded_fo_validity: bound infeasible (" + std::to_string(space) +
                          "+ interpretations exceed the ceiling of " + std::to_string(limits.max_interpretations) + ")");
    }
  }

  std::size_t checked = 0;
  for (std::size_t d = 1; d <= max_domain; ++d) {
    // instance j -> (predicate, flat relation index)
    std::vector<std::pair<std::string, std::size_t>> instances;
    ClassicalModel m(individual_names(d));
    for (const auto& [name, arity] : preds) {
      Relation& rel = m.interp().relation(name, arity);
      for (std::size_t idx = 0; idx < rel.cells(); ++idx) instances.emplace_back(name, idx);
    }
    const std::uint64_t count = std::uint64_t{1} << instances.size();
    const auto dom = iota_domain(d);
    for (std::uint64_t code = 0; code < count; ++code) {
      for (std::size_t j = 0; j < instances.size(); ++j) {
        const auto& [name, idx] = instances[j];
        m.interp().relation(name, preds.at(name)).set_at(idx, static_cast<int>((code >> (instances.size() - 1 - j)) & 1U));
      }
      ++checked;
      std::optional<Assignment> failing;
      for_each_assignment(fv, dom, [&](const Assignment& rho) {
        if (eval_sequent_classical(m, rho, s) == 0) {
          failing = rho;
          return false;
        }
        return true;
      });
      if (failing) return ClassicalCountermodel{m, *failing};
    }
  }
  return NoCountermodelUpTo{max_domain, 1, checked};
}

}  // namespace ksep
