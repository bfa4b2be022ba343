#pragma once

// Command dispatch for the ksep tool. Exit codes: 0 success, 1 negative
// analysis result, 2 input error, 3 all connectives monotone, 4 internal
// verification failure.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ksep/classical_sem.hpp"
#include "ksep/collapse.hpp"
#include "ksep/errors.hpp"
#include "ksep/golden.hpp"
#include "ksep/io.hpp"
#include "ksep/kripke_sem.hpp"
#include "ksep/properties.hpp"
#include "ksep/separator.hpp"
#include "ksep/syntax.hpp"
#include "ksep/truthfn.hpp"

namespace ksep::cli {

enum Exit : int { kOk = 0, kNegative = 1, kInputError = 2, kAllMonotone = 3, kInternal = 4 };

struct RunConfig {
  std::string sig_path;
  std::string model_path;
  std::string formula;
  std::string sequent;
  std::string world;
  std::string mode;
  std::vector<std::string> assign;
  bool all_worlds = false;
  std::optional<std::size_t> max_domain;
  std::size_t max_worlds = 3;
  std::size_t trials = 10000;
  std::uint64_t seed = FuzzConfig{}.seed;
  std::size_t max_arity = 3;
  bool inject_non_hereditary = false;
  std::string format = "human";

  bool json() const { return format == "json"; }
};

/// and, or, implies, not, nand, xor, bot, top.
inline Signature standard_signature() {
  Signature sig;
  for (const auto& t : {standard::conj(), standard::disj(), standard::implies(), standard::neg(), standard::nand(),
                        standard::xor_(), standard::bot(), standard::top()}) {
    sig.add(t);
  }
  return sig;
}

inline Signature load_signature(const RunConfig& cfg, bool required) {
  if (cfg.sig_path.empty()) {
    if (required) throw UsageError("--sig is required for this command");
    return standard_signature();
  }
  return parse_signature(read_file(cfg.sig_path));
}

/// `@path` reads the text from a file.
inline std::string text_arg(const std::string& s) {
  if (!s.empty() && s.front() == '@') {
    std::string t = read_file(s.substr(1));
    while (!t.empty() && (t.back() == '\n' || t.back() == '\r')) t.pop_back();
    return t;
  }
  return s;
}

struct LoadedModel {
  std::optional<ClassicalModel> classical;
  std::optional<KripkeModel> kripke;
};

/// Classical if the file has no "worlds" field. Kripke models that fail
/// validation are reported and rejected.
inline LoadedModel load_model(const std::string& path, std::ostream& err) {
  if (path.empty()) throw UsageError("--model is required for this command");
  const json j = parse_json(read_file(path), path);
  LoadedModel out;
  try {
    if (!j.contains("worlds")) {
      out.classical = classical_model_from_json(j);
      return out;
    }
    auto v = validate_kripke_model(raw_kripke_from_json(j));
    for (const auto& w : v.warnings) err << "warning: " << w << "\n";
    if (!v.ok()) {
      for (const auto& viol : v.violations) err << "violation [" << viol.code << "] " << viol.message << "\n";
      throw UsageError(path + ": Kripke model has " + std::to_string(v.violations.size()) + " violation(s)");
    }
    out.kripke = std::move(*v.model);
  } catch (const json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
  return out;
}

inline Assignment parse_assignments(const std::vector<std::string>& items, const std::vector<std::string>& names) {
  Assignment rho;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--assign expects x=individual, got '" + item + "'");
    const std::string x = item.substr(0, eq), id = item.substr(eq + 1);
    auto it = std::find(names.begin(), names.end(), id);
    if (it == names.end()) throw UsageError("--assign: unknown individual '" + id + "'");
    rho.set(x, static_cast<Individual>(it - names.begin()));
  }
  return rho;
}

// ---------------------------------------------------------------------------
// Commands

inline int cmd_check_mono(const RunConfig& cfg, std::ostream& out) {
  const Signature sig = load_signature(cfg, true);
  bool all = true;
  json rows = json::array();
  for (const auto& [name, t] : sig) {
    const auto w = monotonicity_witness(t);
    all = all && !w;
    const std::string label(1, case_label(classify_case(t)));
    if (cfg.json()) {
      json r{{"connective", name}, {"arity", t.arity()}, {"outputs", t.outputs().to_string()}, {"monotone", !w},
             {"case", label}};
      if (w) r["witness"] = {w->a.to_string(), w->b.to_string()};
      rows.push_back(r);
    } else {
      out << name << "/" << t.arity() << " " << t.outputs().to_string() << ": ";
      if (w) {
        out << "not monotone, witness (" << w->a.to_string() << ", " << w->b.to_string() << "), case " << label << "\n";
      } else {
        out << "monotone, case " << label << "\n";
      }
    }
  }
  if (cfg.json()) {
    out << json{{"all_monotone", all}, {"connectives", rows}}.dump(2) << "\n";
  } else if (all) {
    out << "all monotone\n";
  }
  return all ? kOk : kNegative;
}

inline int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Signature sig = load_signature(cfg, false);
  if (cfg.formula.empty()) throw UsageError("--formula is required");
  const Formula f = parse_formula(text_arg(cfg.formula), sig);
  const LoadedModel m = load_model(cfg.model_path, err);

  if (m.classical) {
    const Assignment rho = parse_assignments(cfg.assign, m.classical->domain());
    const int v = eval_classical(*m.classical, rho, f);
    if (cfg.json()) {
      out << json{{"formula", print_formula(f)}, {"value", v}}.dump(2) << "\n";
    } else {
      out << v << "\n";
    }
    return kOk;
  }

  const KripkeModel& k = *m.kripke;
  const Assignment rho = parse_assignments(cfg.assign, k.individuals());
  if (cfg.all_worlds) {
    json values = json::object();
    for (std::size_t w = 0; w < k.world_count(); ++w) {
      // worlds whose domain misses an assigned individual have no value
      const auto fv = free_vars(f);
      const bool fits = std::all_of(fv.begin(), fv.end(), [&](const Variable& x) {
        auto a = rho.get(x);
        return a && k.in_domain(w, *a);
      });
      if (!fits) {
        if (!cfg.json()) out << k.world_name(w) << ": -\n";
        continue;
      }
      const int v = eval_kripke(k, w, rho, f);
      values[k.world_name(w)] = v;
      if (!cfg.json()) out << k.world_name(w) << ": " << v << "\n";
    }
    if (cfg.json()) out << json{{"formula", print_formula(f)}, {"values", values}}.dump(2) << "\n";
    return kOk;
  }
  if (cfg.world.empty()) throw UsageError("--world (or --all-worlds) is required for Kripke models");
  const auto w = k.world_index(cfg.world);
  if (!w) throw UsageError("unknown world '" + cfg.world + "'");
  const int v = eval_kripke(k, *w, rho, f);
  if (cfg.json()) {
    out << json{{"formula", print_formula(f)}, {"world", cfg.world}, {"value", v}}.dump(2) << "\n";
  } else {
    out << v << "\n";
  }
  return kOk;
}

inline int cmd_valid(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Signature sig = load_signature(cfg, false);
  if (cfg.sequent.empty()) throw UsageError("--sequent is required");
  const Sequent s = parse_sequent(text_arg(cfg.sequent), sig);
  const SearchLimits limits = SearchLimits::from_env();
  json j{{"sequent", print_sequent(s)}, {"mode", cfg.mode}};
  std::string human;
  int code = kOk;

  auto classical_cm = [&](const ClassicalCountermodel& c) {
    j["verdict"] = "countermodel";
    j["model"] = classical_model_to_json(c.model);
    j["assignment"] = assignment_to_json(c.assignment, c.model.domain());
    human = "countermodel: " + classical_model_to_json(c.model).dump();
    if (!c.assignment.empty()) human += " under " + format_assignment(c.assignment, c.model.domain());
    code = kNegative;
  };

  if (cfg.mode == "classical-prop") {
    if (!is_propositional(s)) throw UsageError("classical-prop needs a quantifier-free sequent of 0-ary atoms");
    auto v = decide_propositional(s);
    if (auto* ok = std::get_if<Valid>(&v)) {
      j["verdict"] = "valid";
      j["valuations"] = ok->checked;
      human = "valid (" + std::to_string(ok->checked) + " valuations)";
    } else {
      classical_cm(std::get<ClassicalCountermodel>(v));
    }
  } else if (cfg.mode == "classical-bounded") {
    const std::size_t n = cfg.max_domain.value_or(3);
    auto v = bounded_fo_validity(s, n, limits);
    if (auto* none = std::get_if<NoCountermodelUpTo>(&v)) {
      j["verdict"] = "no-countermodel-up-to";
      j["max_domain"] = none->max_domain;
      j["models_checked"] = none->models_checked;
      human = "no countermodel with domain size <= " + std::to_string(none->max_domain) + " (" +
              std::to_string(none->models_checked) + " models)";
    } else {
      classical_cm(std::get<ClassicalCountermodel>(v));
    }
  } else if (cfg.mode == "kripke-model") {
    const LoadedModel m = load_model(cfg.model_path, err);
    if (!m.kripke) throw UsageError("kripke-model mode needs a Kripke model file");
    const KripkeModel& k = *m.kripke;
    auto v = model_validity(k, s);
    if (auto* ok = std::get_if<Valid>(&v)) {
      j["verdict"] = "valid";
      j["points"] = ok->checked;
      human = "valid in the model (" + std::to_string(ok->checked) + " points)";
    } else {
      const auto& fail = std::get<KripkeFailure>(v);
      j["verdict"] = "failure";
      j["world"] = k.world_name(fail.world);
      j["assignment"] = assignment_to_json(fail.assignment, k.individuals());
      human = "failure at " + k.world_name(fail.world);
      if (!fail.assignment.empty()) human += " under " + format_assignment(fail.assignment, k.individuals());
      code = kNegative;
    }
  } else if (cfg.mode == "cd-search") {
    const std::size_t d = cfg.max_domain.value_or(2);
    auto v = bounded_cd_countermodel_search(s, cfg.max_worlds, d, limits);
    if (auto* none = std::get_if<NoCountermodelUpTo>(&v)) {
      j["verdict"] = "no-countermodel-up-to";
      j["max_worlds"] = none->max_worlds;
      j["max_domain"] = none->max_domain;
      j["models_checked"] = none->models_checked;
      human = "no constant-domain countermodel with <= " + std::to_string(none->max_worlds) + " worlds and domain <= " +
              std::to_string(none->max_domain) + " (" + std::to_string(none->models_checked) + " models)";
    } else {
      const auto& c = std::get<KripkeCountermodel>(v);
      j["verdict"] = "countermodel";
      j["model"] = kripke_model_to_json(c.model);
      j["world"] = c.model.world_name(c.world);
      j["assignment"] = assignment_to_json(c.assignment, c.model.individuals());
      human = "countermodel failing at " + c.model.world_name(c.world) + ": " + kripke_model_to_json(c.model).dump();
      code = kNegative;
    }
  } else {
    throw UsageError("--mode must be classical-prop, classical-bounded, kripke-model or cd-search");
  }
  out << (cfg.json() ? j.dump(2) : human) << "\n";
  return code;
}

inline int cmd_separate(const RunConfig& cfg, std::ostream& out) {
  const Signature sig = load_signature(cfg, true);
  const auto outcome = separate(sig);
  if (const auto* all = std::get_if<AllMonotone>(&outcome)) {
    if (cfg.json()) {
      out << all_monotone_to_json(*all).dump(2) << "\n";
    } else {
      out << "all monotone:";
      for (const auto& c : all->connectives) out << " " << c;
      out << "\n";
    }
    return kAllMonotone;
  }
  const auto& r = std::get<SeparationResult>(outcome);
  out << (cfg.json() ? separation_to_json(r).dump(2) + "\n" : render_separation(r));
  return r.verification.passed() ? kOk : kInternal;
}

inline int cmd_verify_paper(const RunConfig& cfg, std::ostream& out) {
  const GoldenReport g = verify_reference_tables(cfg.max_arity);
  out << (cfg.json() ? golden_report_to_json(g).dump(2) + "\n" : render_golden(g));
  return g.ok() ? kOk : kInternal;
}

inline int cmd_fuzz(const RunConfig& cfg, std::ostream& out) {
  FuzzConfig f;
  f.seed = cfg.seed;
  f.trials = cfg.trials;
  f.max_worlds = cfg.max_worlds;
  if (cfg.max_domain) f.max_domain = *cfg.max_domain;
  f.inject_non_hereditary = cfg.inject_non_hereditary;
  const FuzzReport r = run_fuzz(f);
  if (cfg.json()) {
    json suites = json::array();
    for (const auto& s : r.suites) {
      json e{{"name", s.name}, {"trials", s.trials}, {"points", s.checks}, {"violations", s.violations}};
      if (s.first) {
        e["first_violation"] = {{"trial", s.first->trial},
                                {"detail", s.first->detail},
                                {"formula", s.first->formula},
                                {"original_formula", s.first->original_formula},
                                {"model", s.first->model}};
      }
      suites.push_back(e);
    }
    out << json{{"seed", f.seed}, {"trials", f.trials}, {"ok", r.ok()}, {"suites", suites}}.dump(2) << "\n";
  } else {
    out << render_fuzz(r);
  }
  return r.ok() ? kOk : kNegative;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monotone connectives: Kripke and classical semantics, separating sequents", "ksep"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"human", "json"}));
  };
  auto sig_opt = [&](CLI::App* sub) {
    sub->add_option("--sig", cfg.sig_path, "Signature file (lines: conn NAME ARITY BITS)");
  };

  auto* mono = app.add_subcommand("check-mono", "Monotonicity, witness pair and case of each connective");
  sig_opt(mono);
  common(mono);

  auto* eval = app.add_subcommand("eval", "Evaluate a formula in a classical or Kripke model");
  sig_opt(eval);
  eval->add_option("--model", cfg.model_path, "Model file (JSON)");
  eval->add_option("--formula", cfg.formula, "Formula text, or @file");
  eval->add_option("--world", cfg.world, "World of a Kripke model");
  eval->add_flag("--all-worlds", cfg.all_worlds, "Print the value at every world");
  eval->add_option("--assign", cfg.assign, "Variable assignment x=individual (repeatable)");
  common(eval);

  auto* valid = app.add_subcommand("valid", "Decide or search for a countermodel to a sequent");
  sig_opt(valid);
  valid->add_option("--sequent", cfg.sequent, "Sequent text, or @file");
  valid->add_option("--mode", cfg.mode, "classical-prop | classical-bounded | kripke-model | cd-search")->required();
  valid->add_option("--model", cfg.model_path, "Kripke model file for kripke-model mode");
  valid->add_option("--max-domain", cfg.max_domain, "Largest domain (default 3; cd-search 2)")
      ->check(CLI::PositiveNumber);
  valid->add_option("--max-worlds", cfg.max_worlds, "Largest frame for cd-search")->check(CLI::Range(1, 5));
  common(valid);

  auto* sep = app.add_subcommand("separate", "Separating sequent for the first non-monotone connective");
  sig_opt(sep);
  common(sep);

  auto* golden = app.add_subcommand("verify-paper", "Regenerate the reference construction tables and compare");
  golden->add_option("--max-arity", cfg.max_arity, "Largest connective arity to sweep")->check(CLI::Range(1, 4));
  common(golden);

  auto* fuzz = app.add_subcommand("fuzz", "Randomized property suites");
  fuzz->add_option("--trials", cfg.trials, "Trials per suite")->check(CLI::PositiveNumber);
  fuzz->add_option("--seed", cfg.seed, "64-bit seed");
  fuzz->add_option("--max-worlds", cfg.max_worlds, "Largest random frame")->check(CLI::Range(1, 5));
  fuzz->add_option("--max-domain", cfg.max_domain, "Largest random domain")->check(CLI::Range(1, 4));
  fuzz->add_flag("--inject-non-hereditary", cfg.inject_non_hereditary,
                 "Negative control: feed unvalidated non-hereditary models to the heredity suite");
  common(fuzz);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // help requests exit 0; every other parse failure is an input error
    return app.exit(e, out, err) == 0 ? kOk : kInputError;
  }

  try {
    if (*mono) return cmd_check_mono(cfg, out);
    if (*eval) return cmd_eval(cfg, out, err);
    if (*valid) return cmd_valid(cfg, out, err);
    if (*sep) return cmd_separate(cfg, out);
    if (*golden) return cmd_verify_paper(cfg, out);
    if (*fuzz) return cmd_fuzz(cfg, out);
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace ksep::cli
