#pragma once

// Finite Kripke models for truth-table connectives: validation, the
// forcing-style interpretation, sequent validity in a model, heredity checks
// and bounded search for constant-domain countermodels.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ksep/classical_sem.hpp"
#include "ksep/errors.hpp"
#include "ksep/syntax.hpp"

namespace ksep {

struct KripkeFact {
  std::string world;
  std::string pred;
  std::vector<std::string> args;
  int value = 1;
};

/// Model as read from a file, before closure and validation.
struct RawKripkeModel {
  std::vector<std::string> worlds;
  std::vector<std::pair<std::string, std::string>> order;
  std::vector<std::pair<std::string, std::vector<std::string>>> domains;
  std::vector<KripkeFact> interp;
  bool declared_constant = false;

  /// Gives every world the same domain and marks the model constant-domain.
  void set_constant_domain(const std::vector<std::string>& ids) {
    domains.clear();
    for (const auto& w : worlds) domains.emplace_back(w, ids);
    declared_constant = true;
  }
};

struct Violation {
  std::string code;  // machine-readable, e.g. "heredity"
  std::string message;
  std::string world;
  std::string other_world;
  std::string pred;
  std::vector<std::string> tuple;
};

struct KripkeValidation;

/// Reflexive-transitive preorder on n points as a dense matrix.
struct Preorder {
  std::size_t size = 0;
  std::vector<uint8_t> leq;  // leq[w * size + v] == 1 iff w <= v
  std::uint64_t code = 0;    // row-major bits of the matrix

  bool operator()(std::size_t w, std::size_t v) const { return leq[w * size + v] != 0; }
  static Preorder closure_of(std::size_t n, std::vector<uint8_t> rel) {
    for (std::size_t i = 0; i < n; ++i) rel[i * n + i] = 1;
    for (std::size_t m = 0; m < n; ++m) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!rel[i * n + m]) continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (rel[m * n + j]) rel[i * n + j] = 1;
        }
      }
    }
    Preorder p{n, std::move(rel), 0};
    for (std::size_t i = 0; i < n * n; ++i) p.code |= std::uint64_t{p.leq[i]} << i;
    return p;
  }
};

/// A validated (or explicitly unchecked) finite Kripke model. Worlds and
/// individuals are indices; names are kept for I/O.
class KripkeModel {
 public:
  std::size_t world_count() const { return worlds_.size(); }
  const std::vector<std::string>& worlds() const { return worlds_; }
  const std::string& world_name(std::size_t w) const { return worlds_.at(w); }
  std::optional<std::size_t> world_index(const std::string& name) const {
    auto it = std::find(worlds_.begin(), worlds_.end(), name);
    if (it == worlds_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - worlds_.begin());
  }

  bool leq(std::size_t w, std::size_t v) const { return order_(w, v); }
  const Preorder& order() const { return order_; }
  /// All v with w <= v, ascending (w itself included).
  const std::vector<std::size_t>& successors(std::size_t w) const { return succ_[w]; }

  const std::vector<std::string>& individuals() const { return individuals_; }
  const std::vector<Individual>& domain(std::size_t w) const { return domains_[w]; }
  bool in_domain(std::size_t w, Individual a) const {
    return a >= 0 && static_cast<std::size_t>(a) < individuals_.size() &&
           member_[w * individuals_.size() + static_cast<std::size_t>(a)];
  }
  bool constant_domain() const { return constant_; }

  const Interpretation& interp(std::size_t w) const { return interp_[w]; }
  int atom(std::size_t w, const std::string& pred, const Tuple& t) const { return interp_[w].get(pred, t); }

  /// Predicates mentioned anywhere in the interpretation, with arities.
  std::map<std::string, std::size_t> predicates() const {
    std::map<std::string, std::size_t> out;
    for (const auto& i : interp_) {
      for (const auto& [name, rel] : i.relations()) out.emplace(name, rel.arity());
    }
    return out;
  }

  /// Direct write access for enumerators; the caller keeps heredity intact.
  Interpretation& unchecked_interp(std::size_t w) { return interp_[w]; }

  /// Constant-domain skeleton with all atoms false.
  static KripkeModel constant_domain_frame(const Preorder& order, std::size_t domain_size) {
    KripkeModel k;
    for (std::size_t w = 0; w < order.size; ++w) k.worlds_.push_back("w" + std::to_string(w));
    k.individuals_ = individual_names(domain_size);
    k.order_ = order;
    k.domains_.assign(order.size, iota_domain(domain_size));
    k.member_.assign(order.size * domain_size, 1);
    k.interp_.assign(order.size, Interpretation(domain_size));
    k.constant_ = true;
    k.index_successors();
    return k;
  }

  /// Builds the model without the heredity and domain-monotonicity checks
  /// (the order is still closed). Malformed references still throw.
  static KripkeModel unchecked(const RawKripkeModel& raw);

  friend KripkeValidation validate_kripke_model(const RawKripkeModel& raw);

 private:
  void index_successors() {
    succ_.assign(worlds_.size(), {});
    for (std::size_t w = 0; w < worlds_.size(); ++w) {
      for (std::size_t v = 0; v < worlds_.size(); ++v) {
        if (order_(w, v)) succ_[w].push_back(v);
      }
    }
  }

  // Resolves names and closes the order. Structural problems are appended to
  // `violations`; the result is usable only when none were added.
  static KripkeModel assemble(const RawKripkeModel& raw, std::vector<Violation>& violations,
                              std::vector<std::string>& warnings);

  std::vector<std::string> worlds_;
  Preorder order_;
  std::vector<std::vector<std::size_t>> succ_;
  std::vector<std::string> individuals_;
  std::vector<std::vector<Individual>> domains_;
  std::vector<uint8_t> member_;
  std::vector<Interpretation> interp_;
  bool constant_ = false;
};

struct KripkeValidation {
  std::optional<KripkeModel> model;
  std::vector<Violation> violations;
  std::vector<std::string> warnings;
  bool ok() const { return violations.empty(); }
};

inline KripkeModel KripkeModel::assemble(const RawKripkeModel& raw, std::vector<Violation>& violations,
                                         std::vector<std::string>& warnings) {
  KripkeModel k;
  auto violate = [&](std::string code, std::string msg, std::string w = {}, std::string v = {}, std::string p = {},
                     std::vector<std::string> tuple = {}) {
    violations.push_back({std::move(code), std::move(msg), std::move(w), std::move(v), std::move(p), std::move(tuple)});
  };

  if (raw.worlds.empty()) violate("empty-worlds", "the model has no worlds");
  std::map<std::string, std::size_t> world_ix;
  for (const auto& w : raw.worlds) {
    if (!world_ix.emplace(w, k.worlds_.size()).second) {
      violate("duplicate-world", "world '" + w + "' is listed twice", w);
      continue;
    }
    k.worlds_.push_back(w);
  }
  const std::size_t n = k.worlds_.size();

  std::vector<uint8_t> rel(n * n, 0);
  for (const auto& [a, b] : raw.order) {
    auto ia = world_ix.find(a), ib = world_ix.find(b);
    if (ia == world_ix.end() || ib == world_ix.end()) {
      violate("unknown-world", "order pair (" + a + ", " + b + ") names an unknown world",
              ia == world_ix.end() ? a : b);
      continue;
    }
    rel[ia->second * n + ib->second] = 1;
  }
  k.order_ = Preorder::closure_of(n, std::move(rel));

  std::map<std::string, Individual> ind_ix;
  std::vector<std::optional<std::vector<std::string>>> dom_names(n);
  for (const auto& [w, ids] : raw.domains) {
    auto iw = world_ix.find(w);
    if (iw == world_ix.end()) {
      violate("unknown-world", "domain given for unknown world '" + w + "'", w);
      continue;
    }
    dom_names[iw->second] = ids;
    for (const auto& id : ids) {
      if (ind_ix.emplace(id, static_cast<Individual>(k.individuals_.size())).second) k.individuals_.push_back(id);
    }
  }
  const std::size_t universe = k.individuals_.size();
  k.member_.assign(n * universe, 0);
  k.domains_.assign(n, {});
  for (std::size_t w = 0; w < n; ++w) {
    if (!dom_names[w] || dom_names[w]->empty()) {
      violate("empty-domain", "world '" + k.worlds_[w] + "' has an empty domain", k.worlds_[w]);
      continue;
    }
    for (const auto& id : *dom_names[w]) {
      const Individual a = ind_ix.at(id);
      if (k.member_[w * universe + static_cast<std::size_t>(a)]) {
        violate("duplicate-individual", "individual '" + id + "' listed twice at world '" + k.worlds_[w] + "'",
                k.worlds_[w]);
        continue;
      }
      k.member_[w * universe + static_cast<std::size_t>(a)] = 1;
      k.domains_[w].push_back(a);
    }
    std::sort(k.domains_[w].begin(), k.domains_[w].end());
  }
  k.constant_ = n > 0 && std::all_of(k.domains_.begin(), k.domains_.end(),
                                     [&](const auto& d) { return d == k.domains_.front(); });
  if (raw.declared_constant && !k.constant_) {
    violate("constant-domain", "model is declared constant-domain but world domains differ");
  }

  k.interp_.assign(n, Interpretation(universe));
  std::map<std::string, std::size_t> arity;
  std::set<std::tuple<std::size_t, std::string, Tuple>> mentioned;
  for (const auto& fact : raw.interp) {
    auto iw = world_ix.find(fact.world);
    if (iw == world_ix.end()) {
      violate("unknown-world", "interpretation entry names unknown world '" + fact.world + "'", fact.world, {},
              fact.pred, fact.args);
      continue;
    }
    const std::size_t w = iw->second;
    if (fact.value != 0 && fact.value != 1) {
      violate("bad-value", "interpretation value must be 0 or 1", fact.world, {}, fact.pred, fact.args);
      continue;
    }
    auto [ai, fresh] = arity.emplace(fact.pred, fact.args.size());
    if (!fresh && ai->second != fact.args.size()) {
      violate("arity-mismatch", "predicate '" + fact.pred + "' used with differing arities", fact.world, {}, fact.pred,
              fact.args);
      continue;
    }
    Tuple t;
    bool ok = true;
    for (const auto& id : fact.args) {
      auto ii = ind_ix.find(id);
      if (ii == ind_ix.end()) {
        violate("unknown-individual", "individual '" + id + "' appears in no domain", fact.world, {}, fact.pred,
                fact.args);
        ok = false;
        break;
      }
      if (!k.member_[w * universe + static_cast<std::size_t>(ii->second)]) {
        violate("individual-outside-domain", "individual '" + id + "' is not in the domain of '" + fact.world + "'",
                fact.world, {}, fact.pred, fact.args);
        ok = false;
        break;
      }
      t.push_back(ii->second);
    }
    if (!ok) continue;
    k.interp_[w].set(fact.pred, t, fact.value);
    mentioned.emplace(w, fact.pred, t);
  }
  // Give every predicate a relation at every world so arities are uniform.
  for (const auto& [p, ar] : arity) {
    for (auto& i : k.interp_) i.relation(p, ar);
  }

  std::size_t absent = 0;
  for (std::size_t w = 0; w < n; ++w) {
    for (const auto& [p, ar] : arity) {
      std::vector<Variable> vars;
      for (std::size_t i = 0; i < ar; ++i) vars.push_back("#" + std::to_string(i));
      for_each_assignment(vars, k.domains_[w], [&](const Assignment& rho) {
        Tuple t;
        for (const auto& x : vars) t.push_back(*rho.get(x));
        if (!mentioned.contains({w, p, t})) ++absent;
        return true;
      });
    }
  }
  if (absent > 0) warnings.push_back(std::to_string(absent) + " interpretation entries are absent and read as 0");

  k.index_successors();
  return k;
}

/// Closes the order, then checks domain monotonicity and atomic heredity.
/// Every violation is reported with its witnesses.
inline KripkeValidation validate_kripke_model(const RawKripkeModel& raw) {
  KripkeValidation out;
  KripkeModel k = KripkeModel::assemble(raw, out.violations, out.warnings);
  if (!out.violations.empty()) return out;

  const std::size_t n = k.world_count();
  for (std::size_t w = 0; w < n; ++w) {
    for (std::size_t v : k.successors(w)) {
      if (v == w) continue;
      for (Individual a : k.domain(w)) {
        if (!k.in_domain(v, a)) {
          out.violations.push_back({"domain-monotonicity",
                                    "individual '" + k.individuals()[static_cast<std::size_t>(a)] + "' is in D(" +
                                        k.world_name(w) + ") but not in D(" + k.world_name(v) + ")",
                                    k.world_name(w), k.world_name(v), {}, {k.individuals()[static_cast<std::size_t>(a)]}});
        }
      }
    }
  }
  const auto preds = k.predicates();
  for (std::size_t w = 0; w < n; ++w) {
    for (std::size_t v : k.successors(w)) {
      if (v == w) continue;
      for (const auto& [p, ar] : preds) {
        std::vector<Variable> vars;
        for (std::size_t i = 0; i < ar; ++i) vars.push_back("#" + std::to_string(i));
        for_each_assignment(vars, k.domain(w), [&](const Assignment& rho) {
          Tuple t;
          for (const auto& x : vars) t.push_back(*rho.get(x));
          if (k.atom(w, p, t) > k.atom(v, p, t)) {
            std::vector<std::string> names;
            for (Individual a : t) names.push_back(k.individuals()[static_cast<std::size_t>(a)]);
            out.violations.push_back({"heredity",
                                      "'" + p + "' holds at " + k.world_name(w) + " but not at its successor " +
                                          k.world_name(v),
                                      k.world_name(w), k.world_name(v), p, names});
          }
          return true;
        });
      }
    }
  }
  if (out.violations.empty()) out.model = std::move(k);
  return out;
}

inline KripkeModel KripkeModel::unchecked(const RawKripkeModel& raw) {
  std::vector<Violation> violations;
  std::vector<std::string> warnings;
  KripkeModel k = assemble(raw, violations, warnings);
  if (!violations.empty()) throw UsageError("malformed Kripke model: " + violations.front().message);
  return k;
}

/// Validates and returns the model, or throws listing the first violation.
inline KripkeModel make_kripke_model(const RawKripkeModel& raw) {
  auto v = validate_kripke_model(raw);
  if (!v.ok()) {
    std::string msg = "invalid Kripke model:";
    for (const auto& viol : v.violations) msg += " [" + viol.code + "] " + viol.message + ";";
    throw UsageError(msg);
  }
  return std::move(*v.model);
}

/// Explicit raw form of a model: every order pair, every domain and every
/// atomic cell over the world's own domain, zeros included.
inline RawKripkeModel to_raw(const KripkeModel& k) {
  RawKripkeModel raw;
  raw.worlds = k.worlds();
  for (std::size_t w = 0; w < k.world_count(); ++w) {
    for (std::size_t v = 0; v < k.world_count(); ++v) {
      if (w != v && k.leq(w, v)) raw.order.emplace_back(k.world_name(w), k.world_name(v));
    }
    std::vector<std::string> ids;
    for (Individual a : k.domain(w)) ids.push_back(k.individuals()[static_cast<std::size_t>(a)]);
    raw.domains.emplace_back(k.world_name(w), ids);
  }
  raw.declared_constant = k.constant_domain();
  for (std::size_t w = 0; w < k.world_count(); ++w) {
    for (const auto& [p, rel] : k.interp(w).relations()) {
      std::vector<Variable> vars;
      for (std::size_t i = 0; i < rel.arity(); ++i) vars.push_back("#" + std::to_string(i));
      for_each_assignment(vars, k.domain(w), [&](const Assignment& rho) {
        Tuple t;
        std::vector<std::string> args;
        for (const auto& x : vars) {
          t.push_back(*rho.get(x));
          args.push_back(k.individuals()[static_cast<std::size_t>(t.back())]);
        }
        raw.interp.push_back({k.world_name(w), p, args, rel.get(t)});
        return true;
      });
    }
  }
  return raw;
}

// ---------------------------------------------------------------------------
// Interpretation

/// How the universal clause is computed. `Successors` is the general clause
/// (all v >= w, all a in D(v)); `PresentWorld` quantifies over D(w) at w only
/// and is correct for constant-domain models; `Checked` computes both on
/// constant-domain models and throws InternalError if they differ.
enum class ForallMode { Successors, PresentWorld, Checked };

#ifdef NDEBUG
inline constexpr ForallMode kDefaultForallMode = ForallMode::Successors;
#else
inline constexpr ForallMode kDefaultForallMode = ForallMode::Checked;
#endif

namespace detail {

inline int eval_kripke_unchecked(const KripkeModel& k, std::size_t w, const Assignment& rho, const Formula& f,
                                 ForallMode mode) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
      return k.atom(w, f.name(), atom_tuple(f, rho));
    case Formula::Kind::Conn:
      for (std::size_t v : k.successors(w)) {
        std::size_t row = 0;
        for (const auto& c : f.children()) row = (row << 1U) | static_cast<std::size_t>(eval_kripke_unchecked(k, v, rho, c, mode));
        if (f.table().at_row(row) == 0) return 0;
      }
      return 1;
    case Formula::Kind::Forall: {
      auto over_successors = [&] {
        for (std::size_t v : k.successors(w)) {
          for (Individual a : k.domain(v)) {
            if (!eval_kripke_unchecked(k, v, rho.bind(f.bound_var(), a), f.body(), mode)) return 0;
          }
        }
        return 1;
      };
      auto at_present = [&] {
        for (Individual a : k.domain(w)) {
          if (!eval_kripke_unchecked(k, w, rho.bind(f.bound_var(), a), f.body(), mode)) return 0;
        }
        return 1;
      };
      if (mode == ForallMode::Successors || !k.constant_domain()) return over_successors();
      if (mode == ForallMode::PresentWorld) return at_present();
      const int general = over_successors();
      if (general != at_present()) {
        throw InternalError("universal clause disagrees between successor and present-world evaluation at world " +
                            k.world_name(w));
      }
      return general;
    }
    case Formula::Kind::Exists:
      for (Individual a : k.domain(w)) {
        if (eval_kripke_unchecked(k, w, rho.bind(f.bound_var(), a), f.body(), mode)) return 1;
      }
      return 0;
  }
  return 0;
}

inline void require_world_assignment(const KripkeModel& k, std::size_t w, const std::set<Variable>& fv,
                                     const Assignment& rho, const char* where) {
  if (w >= k.world_count()) throw UsageError(std::string(where) + ": world index out of range");
  for (const auto& x : fv) {
    auto a = rho.get(x);
    if (!a) throw UsageError(std::string(where) + ": free variable '" + x + "' is unassigned");
    if (!k.in_domain(w, *a)) {
      throw UsageError(std::string(where) + ": variable '" + x + "' is assigned an individual outside D(" +
                       k.world_name(w) + ")");
    }
  }
}

}  // namespace detail

inline int eval_kripke(const KripkeModel& k, std::size_t w, const Assignment& rho, const Formula& f,
                       ForallMode mode = kDefaultForallMode) {
  detail::require_world_assignment(k, w, free_vars(f), rho, "eval_kripke");
  return detail::eval_kripke_unchecked(k, w, rho, f, mode);
}

inline int eval_sequent_kripke(const KripkeModel& k, std::size_t w, const Assignment& rho, const Sequent& s,
                               ForallMode mode = kDefaultForallMode) {
  detail::require_world_assignment(k, w, free_vars(s), rho, "eval_sequent_kripke");
  for (const auto& a : s.antecedent()) {
    if (!detail::eval_kripke_unchecked(k, w, rho, a, mode)) return 1;
  }
  for (const auto& b : s.succedent()) {
    if (detail::eval_kripke_unchecked(k, w, rho, b, mode)) return 1;
  }
  return 0;
}

struct KripkeFailure {
  std::size_t world = 0;
  Assignment assignment;
};

using ModelVerdict = std::variant<Valid, KripkeFailure>;

/// Checks every world (in index order) and every assignment of the free
/// variables into D(w); returns the first failure.
inline ModelVerdict model_validity(const KripkeModel& k, const Sequent& s, ForallMode mode = kDefaultForallMode) {
  const auto fv_set = free_vars(s);
  const std::vector<Variable> fv(fv_set.begin(), fv_set.end());
  std::size_t checked = 0;
  for (std::size_t w = 0; w < k.world_count(); ++w) {
    std::optional<Assignment> failing;
    for_each_assignment(fv, k.domain(w), [&](const Assignment& rho) {
      ++checked;
      if (eval_sequent_kripke(k, w, rho, s, mode) == 0) {
        failing = rho;
        return false;
      }
      return true;
    });
    if (failing) return KripkeFailure{w, *failing};
  }
  return Valid{checked};
}

/// True iff the value of `f` never drops from a world to a successor, over
/// every world whose domain contains the values of `rho`.
inline bool check_heredity(const KripkeModel& k, const Formula& f, const Assignment& rho,
                           ForallMode mode = kDefaultForallMode) {
  const auto fv = free_vars(f);
  for (const auto& x : fv) {
    if (!rho.get(x)) throw UsageError("check_heredity: free variable '" + x + "' is unassigned");
  }
  for (std::size_t w = 0; w < k.world_count(); ++w) {
    bool fits = std::all_of(fv.begin(), fv.end(), [&](const Variable& x) { return k.in_domain(w, *rho.get(x)); });
    if (!fits) continue;
    const int here = detail::eval_kripke_unchecked(k, w, rho, f, mode);
    if (here == 0) continue;
    for (std::size_t v : k.successors(w)) {
      if (detail::eval_kripke_unchecked(k, v, rho, f, mode) < here) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Bounded constant-domain search

/// Distinct reflexive-transitive closures of all digraphs on n points,
/// ordered by their adjacency-matrix code.
inline std::vector<Preorder> canonical_preorders(std::size_t n) {
  if (n == 0 || n > 5) throw UsageError("canonical_preorders: supported sizes are 1..5");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) edges.emplace_back(i, j);
    }
  }
  std::map<std::uint64_t, Preorder> seen;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << edges.size()); ++mask) {
    std::vector<uint8_t> rel(n * n, 0);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if ((mask >> e) & 1U) rel[edges[e].first * n + edges[e].second] = 1;
    }
    Preorder p = Preorder::closure_of(n, std::move(rel));
    seen.emplace(p.code, std::move(p));
  }
  std::vector<Preorder> out;
  for (auto& [code, p] : seen) out.push_back(std::move(p));
  return out;
}

/// Upward-closed world sets of a preorder as bitmasks, ascending.
inline std::vector<std::uint32_t> up_sets(const Preorder& p) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << p.size); ++mask) {
    bool closed = true;
    for (std::size_t w = 0; w < p.size && closed; ++w) {
      if (!((mask >> w) & 1U)) continue;
      for (std::size_t v = 0; v < p.size; ++v) {
        if (p(w, v) && !((mask >> v) & 1U)) {
          closed = false;
          break;
        }
      }
    }
    if (closed) out.push_back(mask);
  }
  return out;
}

/// Enumerates every hereditary interpretation of `preds` over the
/// constant-domain frame (order, domain size). Each (predicate, tuple)
/// instance is assigned an up-set; instances are ordered by predicate name
/// then tuple, the first instance varying slowest. `visit(model)` returns
/// false to stop; the function then returns false.
template <class Visit>
bool for_each_hereditary_model(const Preorder& order, std::size_t domain_size,
                               const std::map<std::string, std::size_t>& preds, Visit&& visit) {
  KripkeModel k = KripkeModel::constant_domain_frame(order, domain_size);
  const auto ups = up_sets(order);
  std::vector<std::pair<std::string, std::size_t>> instances;
  for (const auto& [name, arity] : preds) {
    for (std::size_t w = 0; w < order.size; ++w) k.unchecked_interp(w).relation(name, arity);
    const std::size_t cells = k.interp(0).find(name)->cells();
    for (std::size_t idx = 0; idx < cells; ++idx) instances.emplace_back(name, idx);
  }
  std::vector<std::size_t> digit(instances.size(), 0);
  auto apply = [&](std::size_t j) {
    const auto& [name, idx] = instances[j];
    const std::uint32_t mask = ups[digit[j]];
    for (std::size_t w = 0; w < order.size; ++w) {
      k.unchecked_interp(w).relation(name, preds.at(name)).set_at(idx, static_cast<int>((mask >> w) & 1U));
    }
  };
  for (std::size_t j = 0; j < instances.size(); ++j) apply(j);
  while (true) {
    if (!visit(static_cast<const KripkeModel&>(k))) return false;
    std::size_t j = instances.size();
    while (true) {
      if (j == 0) return true;
      --j;
      if (++digit[j] < ups.size()) {
        apply(j);
        break;
      }
      digit[j] = 0;
      apply(j);
    }
  }
}

/// Number of hereditary interpretations for_each_hereditary_model visits.
inline std::uint64_t hereditary_model_count(const Preorder& order, std::size_t domain_size,
                                            const std::map<std::string, std::size_t>& preds) {
  const std::uint64_t base = up_sets(order).size();
  std::uint64_t total = 1;
  for (const auto& [name, arity] : preds) {
    std::uint64_t cells = 1;
    for (std::size_t i = 0; i < arity; ++i) cells *= domain_size;
    for (std::uint64_t c = 0; c < cells; ++c) {
      if (total > (std::uint64_t{1} << 62) / base) return std::uint64_t{1} << 62;
      total *= base;
    }
  }
  return total;
}

struct KripkeCountermodel {
  KripkeModel model;
  std::size_t world = 0;
  Assignment assignment;
};

using BoundedKripkeVerdict = std::variant<NoCountermodelUpTo, KripkeCountermodel>;

/// Exhaustive search for a constant-domain countermodel. Order: world count
/// ascending, domain size ascending, canonical preorder code ascending,
/// hereditary interpretation (see for_each_hereditary_model), world index,
/// then assignment. Finding nothing does not certify CD-validity.
inline BoundedKripkeVerdict bounded_cd_countermodel_search(const Sequent& s, std::size_t max_worlds,
                                                           std::size_t max_domain, SearchLimits limits = {}) {
  if (max_worlds < 1 || max_domain < 1) throw UsageError("bounded_cd_countermodel_search: bounds must be >= 1");
  const auto preds = predicates_of(s);
  const auto fv_set = free_vars(s);
  const std::vector<Variable> fv(fv_set.begin(), fv_set.end());

  std::vector<std::vector<Preorder>> frames;
  std::uint64_t space = 0;
  for (std::size_t n = 1; n <= max_worlds; ++n) {
    frames.push_back(canonical_preorders(n));
    for (std::size_t d = 1; d <= max_domain; ++d) {
      for (const auto& p : frames.back()) {
        space += hereditary_model_count(p, d, preds);
        if (space > limits.max_interpretations) {
          throw ResourceError("bounded_cd_countermodel_search: bound infeasible (more than " +
                              std::to_string(limits.max_interpretations) + " interpretations)");
        }
      }
    }
  }

  std::size_t checked = 0;
  std::optional<KripkeCountermodel> found;
  for (std::size_t n = 1; n <= max_worlds && !found; ++n) {
    for (std::size_t d = 1; d <= max_domain && !found; ++d) {
      const auto dom = iota_domain(d);
      for (const auto& p : frames[n - 1]) {
        for_each_hereditary_model(p, d, preds, [&](const KripkeModel& k) {
          ++checked;
          for (std::size_t w = 0; w < n; ++w) {
            std::optional<Assignment> failing;
            for_each_assignment(fv, dom, [&](const Assignment& rho) {
              if (eval_sequent_kripke(k, w, rho, s) == 0) {
                failing = rho;
                return false;
              }
              return true;
            });
            if (failing) {
              found = KripkeCountermodel{k, w, *failing};
              return false;
            }
          }
          return true;
        });
        if (found) break;
      }
    }
  }
  if (found) return std::move(*found);
  return NoCountermodelUpTo{max_domain, max_worlds, checked};
}

}  // namespace ksep
