#pragma once

// Randomized property suites: heredity of Kripke values, agreement of a
// classical model with its one-world lift, and agreement of Kripke and
// projected-classical values for monotone connectives on constant-domain
// models. Reproducible from the seed alone.

#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ksep/classical_sem.hpp"
#include "ksep/collapse.hpp"
#include "ksep/kripke_sem.hpp"
#include "ksep/syntax.hpp"
#include "ksep/truthfn.hpp"

namespace ksep {

/// splitmix64; `below(n)` uses plain modulo so sequences are identical on
/// every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
  bool coin() { return (next() & 1U) != 0; }

 private:
  std::uint64_t state_;
};

struct FuzzConfig {
  std::uint64_t seed = 20240601;
  std::size_t trials = 10000;  // per suite
  std::size_t max_depth = 4;
  std::size_t max_worlds = 3;
  std::size_t max_domain = 2;
  // Negative control: heredity trials use unvalidated models whose atoms
  // may drop along the order.
  bool inject_non_hereditary = false;
};

struct PropertyViolation {
  std::size_t trial = 0;
  std::string formula;  // after shrinking
  std::string original_formula;
  std::string model;  // JSON-free one-line description
  std::string detail;
};

struct SuiteReport {
  std::string name;
  std::size_t trials = 0;
  std::size_t checks = 0;  // (world, assignment) points evaluated
  std::size_t violations = 0;
  std::optional<PropertyViolation> first;
};

struct FuzzReport {
  FuzzConfig config;
  std::vector<SuiteReport> suites;

  bool ok() const {
    for (const auto& s : suites) {
      if (s.violations) return false;
    }
    return true;
  }
};

// ---------------------------------------------------------------------------
// Generators

namespace gen {

inline const std::vector<Variable>& variables() {
  static const std::vector<Variable> v = {"x", "y"};
  return v;
}

/// P/1, R/2, q/0, r/0.
inline const std::map<std::string, std::size_t>& predicates() {
  static const std::map<std::string, std::size_t> p = {{"P", 1}, {"R", 2}, {"q", 0}, {"r", 0}};
  return p;
}

inline TruthTable random_table(SplitMix64& rng, std::size_t index) {
  const std::size_t arity = rng.below(4);
  std::string bits;
  for (std::size_t i = 0; i < (std::size_t{1} << arity); ++i) bits += rng.coin() ? '1' : '0';
  return TruthTable("f" + std::to_string(index), arity, bits);
}

/// A random monotone table: the up-closure of a random set of rows.
inline TruthTable random_monotone_table(SplitMix64& rng, std::size_t index) {
  const std::size_t arity = rng.below(4);
  const std::size_t rows = std::size_t{1} << arity;
  std::vector<int> out(rows, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    if (rng.below(4) != 0) continue;
    for (std::size_t s = 0; s < rows; ++s) {
      if ((r & ~s) == 0) out[s] = 1;
    }
  }
  return TruthTable("m" + std::to_string(index), arity, TruthVector(out));
}

/// Connective pool: the standard tables plus a few random ones.
inline std::vector<TruthTable> connectives(SplitMix64& rng, bool monotone_only) {
  std::vector<TruthTable> out = {standard::conj(), standard::disj()};
  if (!monotone_only) {
    out.push_back(standard::implies());
    out.push_back(standard::neg());
    out.push_back(standard::xor_());
  }
  for (std::size_t i = 0; i < 3; ++i) {
    out.push_back(monotone_only ? random_monotone_table(rng, i) : random_table(rng, i));
  }
  return out;
}

inline Formula random_atom(SplitMix64& rng) {
  const auto& preds = predicates();
  auto it = preds.begin();
  std::advance(it, static_cast<std::ptrdiff_t>(rng.below(preds.size())));
  std::vector<Variable> args;
  for (std::size_t i = 0; i < it->second; ++i) args.push_back(variables()[rng.below(variables().size())]);
  return Formula::atom(it->first, args);
}

inline Formula random_formula(SplitMix64& rng, const std::vector<TruthTable>& conns, std::size_t depth) {
  if (depth == 0 || rng.below(4) == 0) return random_atom(rng);
  const std::size_t pick = rng.below(conns.size() + 2);
  if (pick >= conns.size()) {
    const Variable& x = variables()[rng.below(variables().size())];
    Formula body = random_formula(rng, conns, depth - 1);
    return pick == conns.size() ? Formula::forall(x, body) : Formula::exists(x, body);
  }
  const TruthTable& t = conns[pick];
  std::vector<Formula> kids;
  for (std::size_t i = 0; i < t.arity(); ++i) kids.push_back(random_formula(rng, conns, depth - 1));
  return Formula::conn(t, std::move(kids));
}

inline ClassicalModel random_classical(SplitMix64& rng, std::size_t max_domain) {
  ClassicalModel m(individual_names(1 + rng.below(max_domain)));
  for (const auto& [p, arity] : predicates()) {
    Relation& rel = m.interp().relation(p, arity);
    for (std::size_t i = 0; i < rel.cells(); ++i) rel.set_at(i, rng.coin() ? 1 : 0);
  }
  return m;
}

/// Random preorder, growing domains and hereditary atoms. With `constant`
/// every world gets the same domain. With `break_heredity` the atoms are
/// left unclosed and the model is built without validation.
inline KripkeModel random_kripke(SplitMix64& rng, std::size_t max_worlds, std::size_t max_domain, bool constant,
                                 bool break_heredity = false) {
  const std::size_t n = 1 + rng.below(max_worlds);
  const auto orders = canonical_preorders(n);
  const Preorder& order = orders[rng.below(orders.size())];
  const auto names = individual_names(1 + rng.below(max_domain));

  std::vector<std::vector<uint8_t>> member(n, std::vector<uint8_t>(names.size(), 0));
  for (std::size_t w = 0; w < n; ++w) {
    if (constant) {
      std::fill(member[w].begin(), member[w].end(), 1);
    } else {
      member[w][rng.below(names.size())] = 1;
      for (auto& m : member[w]) m = m || rng.coin();
    }
  }
  for (std::size_t w = 0; w < n; ++w) {
    for (std::size_t v = 0; v < n; ++v) {
      if (!order(w, v)) continue;
      for (std::size_t a = 0; a < names.size(); ++a) member[v][a] = member[v][a] || member[w][a];
    }
  }

  RawKripkeModel raw;
  for (std::size_t w = 0; w < n; ++w) raw.worlds.push_back("w" + std::to_string(w));
  for (std::size_t w = 0; w < n; ++w) {
    for (std::size_t v = 0; v < n; ++v) {
      if (w != v && order(w, v)) raw.order.emplace_back(raw.worlds[w], raw.worlds[v]);
    }
    std::vector<std::string> ids;
    for (std::size_t a = 0; a < names.size(); ++a) {
      if (member[w][a]) ids.push_back(names[a]);
    }
    raw.domains.emplace_back(raw.worlds[w], ids);
  }
  raw.declared_constant = constant;

  // value[w][pred][tuple], tuples over the full universe; cells outside D(w) stay 0
  std::map<std::string, std::vector<std::vector<int>>> value;
  for (const auto& [p, arity] : predicates()) {
    std::size_t cells = 1;
    for (std::size_t i = 0; i < arity; ++i) cells *= names.size();
    auto& vw = value[p];
    vw.assign(n, std::vector<int>(cells, 0));
    for (std::size_t w = 0; w < n; ++w) {
      for (std::size_t c = 0; c < cells; ++c) {
        bool inside = true;
        std::size_t rest = c;
        for (std::size_t i = 0; i < arity; ++i, rest /= names.size()) inside = inside && member[w][rest % names.size()];
        if (inside && rng.below(3) == 0) vw[w][c] = 1;
      }
    }
    if (!break_heredity) {
      for (std::size_t w = 0; w < n; ++w) {
        for (std::size_t v = 0; v < n; ++v) {
          if (!order(w, v)) continue;
          for (std::size_t c = 0; c < cells; ++c) vw[v][c] = vw[v][c] || vw[w][c];
        }
      }
    }
    for (std::size_t w = 0; w < n; ++w) {
      for (std::size_t c = 0; c < cells; ++c) {
        if (!vw[w][c]) continue;
        std::vector<std::string> args(arity);
        std::size_t rest = c;
        for (std::size_t i = 0; i < arity; ++i, rest /= names.size()) args[arity - 1 - i] = names[rest % names.size()];
        raw.interp.push_back({raw.worlds[w], p, args, 1});
      }
    }
  }
  return break_heredity ? KripkeModel::unchecked(raw) : make_kripke_model(raw);
}

}  // namespace gen

inline std::string describe_model(const KripkeModel& k) {
  std::ostringstream os;
  for (std::size_t w = 0; w < k.world_count(); ++w) {
    os << (w ? " " : "") << k.world_name(w) << ":D={";
    for (std::size_t i = 0; i < k.domain(w).size(); ++i) {
      os << (i ? "," : "") << k.individuals()[static_cast<std::size_t>(k.domain(w)[i])];
    }
    os << "}";
    for (const auto& [p, rel] : k.interp(w).relations()) {
      for (std::size_t c = 0; c < rel.cells(); ++c) {
        if (!rel.at(c)) continue;
        std::vector<std::string> args(rel.arity());
        std::size_t rest = c;
        for (std::size_t i = rel.arity(); i-- > 0; rest /= rel.universe()) {
          args[i] = k.individuals()[rest % rel.universe()];
        }
        os << " " << p;
        if (!args.empty()) {
          os << "(";
          for (std::size_t i = 0; i < args.size(); ++i) os << (i ? "," : "") << args[i];
          os << ")";
        }
      }
    }
  }
  os << " order:";
  for (std::size_t w = 0; w < k.world_count(); ++w) {
    for (std::size_t v = 0; v < k.world_count(); ++v) {
      if (w != v && k.leq(w, v)) os << " " << k.world_name(w) << "<=" << k.world_name(v);
    }
  }
  return os.str();
}

/// Greedily replaces `f` by an immediate subformula while `fails` still holds.
inline Formula shrink_formula(Formula f, const std::function<bool(const Formula&)>& fails) {
  bool progress = true;
  while (progress) {
    progress = false;
    for (const auto& child : f.children()) {
      if (fails(child)) {
        f = child;
        progress = true;
        break;
      }
    }
  }
  return f;
}

namespace detail {

/// Runs `check(w, rho)` at every world and every assignment of the formula's
/// free variables into D(w); false as soon as one check fails.
template <class Check>
bool all_points(const KripkeModel& k, const Formula& f, std::size_t& checks, Check check) {
  const auto fv = free_vars(f);
  const std::vector<Variable> vars(fv.begin(), fv.end());
  bool ok = true;
  for (std::size_t w = 0; w < k.world_count() && ok; ++w) {
    for_each_assignment(vars, k.domain(w), [&](const Assignment& rho) {
      ++checks;
      ok = check(w, rho);
      return ok;
    });
  }
  return ok;
}

template <class Holds>
void run_suite(SuiteReport& rep, std::size_t trial, const Formula& f, const std::string& model, Holds holds) {
  ++rep.trials;
  if (holds(f)) return;
  ++rep.violations;
  if (rep.first) return;
  const Formula small = shrink_formula(f, [&](const Formula& g) { return !holds(g); });
  rep.first = PropertyViolation{trial, print_formula(small), print_formula(f), model, ""};
}

}  // namespace detail

inline SuiteReport heredity_suite(const FuzzConfig& cfg, SplitMix64& rng) {
  SuiteReport rep{"heredity", 0, 0, 0, std::nullopt};
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const auto conns = gen::connectives(rng, false);
    const Formula f = gen::random_formula(rng, conns, 1 + rng.below(cfg.max_depth));
    const KripkeModel k = gen::random_kripke(rng, cfg.max_worlds, cfg.max_domain, rng.coin(), cfg.inject_non_hereditary);
    detail::run_suite(rep, t, f, describe_model(k), [&](const Formula& g) {
      return detail::all_points(k, g, rep.checks, [&](std::size_t w, const Assignment& rho) {
        const int here = eval_kripke(k, w, rho, g, ForallMode::Successors);
        for (std::size_t v : k.successors(w)) {
          if (eval_kripke(k, v, rho, g, ForallMode::Successors) < here) return false;
        }
        return true;
      });
    });
    if (rep.first && rep.first->trial == t && rep.first->detail.empty()) {
      rep.first->detail = "value drops from a world to a successor";
    }
  }
  return rep;
}

inline SuiteReport lift_suite(const FuzzConfig& cfg, SplitMix64& rng) {
  SuiteReport rep{"lift", 0, 0, 0, std::nullopt};
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const auto conns = gen::connectives(rng, false);
    const Formula f = gen::random_formula(rng, conns, 1 + rng.below(cfg.max_depth));
    const ClassicalModel m = gen::random_classical(rng, cfg.max_domain + 1);
    const KripkeModel k = lift_classical(m);
    detail::run_suite(rep, t, f, describe_model(k), [&](const Formula& g) {
      return detail::all_points(k, g, rep.checks, [&](std::size_t w, const Assignment& rho) {
        return eval_kripke(k, w, rho, g) == eval_classical(m, rho, g);
      });
    });
    if (rep.first && rep.first->trial == t && rep.first->detail.empty()) {
      rep.first->detail = "one-world lift disagrees with the classical model";
    }
  }
  return rep;
}

inline SuiteReport collapse_suite(const FuzzConfig& cfg, SplitMix64& rng) {
  SuiteReport rep{"monotone-collapse", 0, 0, 0, std::nullopt};
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const auto conns = gen::connectives(rng, true);
    const Formula f = gen::random_formula(rng, conns, 1 + rng.below(cfg.max_depth));
    const KripkeModel k = gen::random_kripke(rng, cfg.max_worlds, cfg.max_domain, true);
    std::vector<ClassicalModel> proj;
    for (std::size_t w = 0; w < k.world_count(); ++w) proj.push_back(project_world(k, w));
    detail::run_suite(rep, t, f, describe_model(k), [&](const Formula& g) {
      return detail::all_points(k, g, rep.checks, [&](std::size_t w, const Assignment& rho) {
        return eval_kripke(k, w, rho, g) == eval_classical(proj[w], rho, g);
      });
    });
    if (rep.first && rep.first->trial == t && rep.first->detail.empty()) {
      rep.first->detail = "Kripke value differs from the projected classical value";
    }
  }
  return rep;
}

/// Each suite draws from its own stream derived from the seed, so changing
/// one suite's trial count does not perturb the others.
inline FuzzReport run_fuzz(const FuzzConfig& cfg) {
  if (cfg.trials == 0) throw UsageError("fuzz: trials must be at least 1");
  FuzzReport rep{cfg, {}};
  SplitMix64 streams(cfg.seed);
  SplitMix64 h(streams.next()), l(streams.next()), c(streams.next());
  rep.suites.push_back(heredity_suite(cfg, h));
  rep.suites.push_back(lift_suite(cfg, l));
  rep.suites.push_back(collapse_suite(cfg, c));
  return rep;
}

inline std::string render_fuzz(const FuzzReport& r) {
  std::ostringstream os;
  os << "fuzz seed=" << r.config.seed << " trials=" << r.config.trials << " max_depth=" << r.config.max_depth
     << " max_worlds=" << r.config.max_worlds << " max_domain=" << r.config.max_domain
     << (r.config.inject_non_hereditary ? " inject=non-hereditary" : "") << "\n";
  for (const auto& s : r.suites) {
    os << "  " << s.name << ": " << s.trials << " trials, " << s.checks << " points, " << s.violations
       << " violations\n";
    if (s.first) {
      os << "    first violation (trial " << s.first->trial << "): " << s.first->detail << "\n"
         << "      formula:  " << s.first->formula << "\n"
         << "      original: " << s.first->original_formula << "\n"
         << "      model:    " << s.first->model << "\n";
    }
  }
  os << (r.ok() ? "no violations\n" : "VIOLATIONS FOUND\n");
  return os.str();
}

}  // namespace ksep
