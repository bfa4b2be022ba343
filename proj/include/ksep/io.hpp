#pragma once

// JSON model files and structured/human renderings of results.
//
// Classical model:  {"domain": [ids], "interp": [{"pred", "args", "value"}]}
// Kripke model:     {"worlds": [ids], "order": [[w, v]],
//                    "domain": [ids] | "domains": {w: [ids]},
//                    "interp": [{"world", "pred", "args", "value"}],
//                    "constant_domain": bool (optional)}
// Absent interpretation entries read as 0.

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ksep/classical_sem.hpp"
#include "ksep/collapse.hpp"
#include "ksep/errors.hpp"
#include "ksep/golden.hpp"
#include "ksep/kripke_sem.hpp"
#include "ksep/separator.hpp"

namespace ksep {

using json = nlohmann::ordered_json;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(what + ": malformed JSON (" + std::string(e.what()) + ")", e.byte);
  }
}

namespace detail {

inline const json& field(const json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) throw UsageError(what + ": missing field '" + key + "'");
  return j.at(key);
}

inline std::vector<std::string> string_list(const json& j, const std::string& what) {
  if (!j.is_array()) throw UsageError(what + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) throw UsageError(what + ": expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

inline int bit_value(const json& e, const std::string& what) {
  if (!e.contains("value")) return 1;
  const auto& v = e.at("value");
  if (v.is_boolean()) return v.get<bool>() ? 1 : 0;
  if (v.is_number_integer()) return v.get<int>();
  throw UsageError(what + ": 'value' must be 0, 1 or a boolean");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Classical models

inline ClassicalModel classical_model_from_json(const json& j) {
  const std::string what = "classical model";
  ClassicalModel m(detail::string_list(detail::field(j, "domain", what), what + " domain"));
  if (!j.contains("interp")) return m;
  for (const auto& e : j.at("interp")) {
    const auto pred = detail::field(e, "pred", what + " interp").get<std::string>();
    const auto args = e.contains("args") ? detail::string_list(e.at("args"), what + " args")
                                         : std::vector<std::string>{};
    const int value = detail::bit_value(e, what);
    if (value != 0 && value != 1) throw UsageError(what + ": value for '" + pred + "' must be 0 or 1");
    Tuple t;
    for (const auto& id : args) {
      auto ix = m.index_of(id);
      if (!ix) throw UsageError(what + ": individual '" + id + "' is not in the domain");
      t.push_back(*ix);
    }
    m.set(pred, t, value);
  }
  return m;
}

inline json classical_model_to_json(const ClassicalModel& m) {
  json j;
  j["domain"] = m.domain();
  json interp = json::array();
  for (const auto& [pred, rel] : m.interp().relations()) {
    std::vector<Variable> vars;
    for (std::size_t i = 0; i < rel.arity(); ++i) vars.push_back("#" + std::to_string(i));
    for_each_assignment(vars, iota_domain(m.size()), [&](const Assignment& rho) {
      std::vector<std::string> args;
      Tuple t;
      for (const auto& x : vars) {
        t.push_back(*rho.get(x));
        args.push_back(m.domain()[static_cast<std::size_t>(t.back())]);
      }
      interp.push_back({{"pred", pred}, {"args", args}, {"value", rel.get(t)}});
      return true;
    });
  }
  j["interp"] = interp;
  return j;
}

// ---------------------------------------------------------------------------
// Kripke models

inline RawKripkeModel raw_kripke_from_json(const json& j) {
  const std::string what = "Kripke model";
  RawKripkeModel raw;
  raw.worlds = detail::string_list(detail::field(j, "worlds", what), what + " worlds");
  if (j.contains("order")) {
    for (const auto& pair : j.at("order")) {
      auto p = detail::string_list(pair, what + " order");
      if (p.size() != 2) throw UsageError(what + ": order entries must be [w, v] pairs");
      raw.order.emplace_back(p[0], p[1]);
    }
  }
  const bool constant = j.contains("domain");
  if (constant && j.contains("domains")) throw UsageError(what + ": give either 'domain' or 'domains', not both");
  if (constant) {
    raw.set_constant_domain(detail::string_list(j.at("domain"), what + " domain"));
  } else {
    const auto& doms = detail::field(j, "domains", what);
    if (!doms.is_object()) throw UsageError(what + ": 'domains' must map worlds to individual lists");
    for (const auto& [w, ids] : doms.items()) raw.domains.emplace_back(w, detail::string_list(ids, what + " domains"));
  }
  if (j.contains("constant_domain")) raw.declared_constant = j.at("constant_domain").get<bool>();
  if (j.contains("interp")) {
    for (const auto& e : j.at("interp")) {
      KripkeFact f;
      f.world = detail::field(e, "world", what + " interp").get<std::string>();
      f.pred = detail::field(e, "pred", what + " interp").get<std::string>();
      if (e.contains("args")) f.args = detail::string_list(e.at("args"), what + " args");
      f.value = detail::bit_value(e, what);
      raw.interp.push_back(std::move(f));
    }
  }
  return raw;
}

inline RawKripkeModel load_raw_kripke(const std::string& path) {
  try {
    return raw_kripke_from_json(parse_json(read_file(path), path));
  } catch (const json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

inline ClassicalModel load_classical(const std::string& path) {
  try {
    return classical_model_from_json(parse_json(read_file(path), path));
  } catch (const json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

inline json kripke_model_to_json(const KripkeModel& k) {
  const RawKripkeModel raw = to_raw(k);
  json j;
  j["worlds"] = raw.worlds;
  json order = json::array();
  for (const auto& [w, v] : raw.order) order.push_back({w, v});
  j["order"] = order;
  if (k.constant_domain()) {
    j["domain"] = raw.domains.front().second;
  } else {
    json doms = json::object();
    for (const auto& [w, ids] : raw.domains) doms[w] = ids;
    j["domains"] = doms;
  }
  json interp = json::array();
  for (const auto& f : raw.interp) {
    interp.push_back({{"world", f.world}, {"pred", f.pred}, {"args", f.args}, {"value", f.value}});
  }
  j["interp"] = interp;
  return j;
}

inline json violations_to_json(const KripkeValidation& v) {
  json out = json::array();
  for (const auto& x : v.violations) {
    json e{{"code", x.code}, {"message", x.message}};
    if (!x.world.empty()) e["world"] = x.world;
    if (!x.other_world.empty()) e["other_world"] = x.other_world;
    if (!x.pred.empty()) e["pred"] = x.pred;
    if (!x.tuple.empty()) e["tuple"] = x.tuple;
    out.push_back(e);
  }
  return out;
}

inline json assignment_to_json(const Assignment& rho, const std::vector<std::string>& names) {
  json j = json::object();
  for (const auto& [x, a] : rho.entries()) j[x] = names.at(static_cast<std::size_t>(a));
  return j;
}

// ---------------------------------------------------------------------------
// Separation results

inline json table_to_json(const ConstructionTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json cells = json::array();
    for (const auto& c : r.cells) {
      json cell{{"value", c.value}};
      if (c.vector) cell["vector"] = c.vector->to_string();
      cells.push_back(cell);
    }
    rows.push_back({{"label", r.label}, {"cells", cells}});
  }
  return {{"id", t.id}, {"kind", t.kripke ? "kripke" : "classical"}, {"columns", t.columns}, {"rows", rows}};
}

inline json verification_to_json(const VerificationReport& v) {
  return {{"passed", v.passed()},
          {"propositional", v.propositional},
          {"classically_valid", v.classically_valid},
          {"valuations_checked", v.valuations},
          {"model_well_formed", v.model_well_formed},
          {"constant_domain", v.constant_domain},
          {"fails_in_model", v.fails_in_model},
          {"fails_at_stated_world", v.fails_at_stated_world},
          {"tables_reproduce", v.tables_reproduce},
          {"tables_match_pattern", v.tables_match_pattern},
          {"issues", v.issues}};
}

inline json separation_to_json(const SeparationResult& r) {
  json j;
  j["status"] = "separated";
  j["connective"] = {{"name", r.connective.name()},
                     {"arity", r.connective.arity()},
                     {"outputs", r.connective.outputs().to_string()}};
  j["case"] = std::string(1, case_label(r.case_label));
  if (r.subcase) j["subcase"] = r.subcase;
  if (!r.variant.empty()) j["variant"] = r.variant;
  if (r.a) j["a"] = r.a->to_string();
  if (r.b) j["b"] = r.b->to_string();
  json fs = json::array();
  for (const auto& nf : r.formulas) fs.push_back({{"name", nf.name}, {"formula", print_formula(nf.formula)}});
  j["formulas"] = fs;
  j["sequent"] = print_sequent(r.sequent);
  j["countermodel"] = {{"name", r.model_name},
                       {"failing_world", r.countermodel.world_name(r.failing_world)},
                       {"model", kripke_model_to_json(r.countermodel)}};
  json tables = json::array();
  for (const auto& t : r.tables) tables.push_back(table_to_json(t));
  j["tables"] = tables;
  if (!r.notes.empty()) j["notes"] = r.notes;
  j["verification"] = verification_to_json(r.verification);
  return j;
}

inline json all_monotone_to_json(const AllMonotone& m) {
  return {{"status", "all-monotone"}, {"connectives", m.connectives}};
}

namespace detail {

inline std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace detail

/// Table layout: one row per valuation or world, for each column its argument
/// vector and its value.
inline std::string render_table(const ConstructionTable& t) {
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> head = {t.kripke ? "world" : "valuation"};
  for (const auto& c : t.columns) {
    head.push_back(c + " vec");
    head.push_back(c);
  }
  grid.push_back(head);
  for (const auto& r : t.rows) {
    std::vector<std::string> line = {r.label};
    for (const auto& c : r.cells) {
      line.push_back(c.vector ? c.vector->to_string() : "-");
      line.push_back(std::to_string(c.value));
    }
    grid.push_back(line);
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& line : grid) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  std::string out = "  [" + t.id + "]\n";
  for (const auto& line : grid) {
    out += "   ";
    for (std::size_t i = 0; i < line.size(); ++i) out += " " + detail::pad(line[i], width[i]);
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += "\n";
  }
  return out;
}

inline std::string render_separation(const SeparationResult& r) {
  std::ostringstream os;
  os << "connective " << r.connective.name() << "/" << r.connective.arity() << " ("
     << r.connective.outputs().to_string() << ") is not monotone\n";
  os << "case (" << case_label(r.case_label) << ")";
  if (r.subcase) os << ", subcase " << r.subcase;
  if (!r.variant.empty()) os << ", variant " << r.variant;
  os << "\n";
  if (r.a) os << "a = " << r.a->to_string();
  if (r.b) os << ", b = " << r.b->to_string() << ", b^a = " << relative_invert(*r.a, *r.b).to_string();
  if (r.a) os << "\n";
  for (const auto& nf : r.formulas) os << "  " << nf.name << " = " << print_formula(nf.formula) << "\n";
  os << "sequent: " << print_sequent(r.sequent) << "\n";
  os << "countermodel " << r.model_name << ":";
  for (std::size_t w = 0; w < r.countermodel.world_count(); ++w) {
    os << " " << r.countermodel.world_name(w) << "{";
    bool first = true;
    for (const auto& [pred, rel] : r.countermodel.interp(w).relations()) {
      if (rel.arity() != 0) continue;
      os << (first ? "" : " ") << pred << "=" << rel.get({});
      first = false;
    }
    os << "}";
  }
  os << "; order";
  for (std::size_t w = 0; w < r.countermodel.world_count(); ++w) {
    for (std::size_t v = 0; v < r.countermodel.world_count(); ++v) {
      if (w != v && r.countermodel.leq(w, v)) os << " " << r.countermodel.world_name(w) << "<=" << r.countermodel.world_name(v);
    }
  }
  os << "\nfails at " << r.countermodel.world_name(r.failing_world) << "\n";
  for (const auto& t : r.tables) os << render_table(t);
  for (const auto& n : r.notes) os << "note: " << n << "\n";
  const auto& v = r.verification;
  os << "verification: " << (v.passed() ? "passed" : "FAILED") << " (classically valid over " << v.valuations
     << " valuations; fails at stated world: " << (v.fails_at_stated_world ? "yes" : "no")
     << "; tables reproduce: " << (v.tables_reproduce ? "yes" : "no")
     << "; tables match pattern: " << (v.tables_match_pattern ? "yes" : "no") << ")\n";
  for (const auto& i : v.issues) os << "  issue: " << i << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Collapse and golden reports

inline json collapse_report_to_json(const CollapseReport& r, const std::vector<std::string>& individuals,
                                    const std::vector<std::string>& worlds, std::size_t max_listed = 100) {
  json dis = json::array();
  for (const auto& e : r.entries) {
    if (e.kripke == e.classical) continue;
    if (dis.size() >= max_listed) break;
    dis.push_back({{"world", worlds.at(e.world)},
                   {"formula", print_formula(r.formulas.at(e.formula))},
                   {"assignment", assignment_to_json(e.assignment, individuals)},
                   {"kripke", e.kripke},
                   {"classical", e.classical}});
  }
  return {{"model", r.model_id},
          {"points", r.entries.size()},
          {"disagreements", r.disagreements},
          {"agreement", r.agreement},
          {"first_disagreements", dis}};
}

inline json golden_report_to_json(const GoldenReport& g) {
  auto checks = [](const std::vector<GoldenCheck>& cs) {
    json out = json::array();
    for (const auto& c : cs) {
      out.push_back({{"id", c.id},
                     {"description", c.description},
                     {"connectives", c.instances},
                     {"cells", c.cells},
                     {"ok", c.ok()},
                     {"mismatches", c.mismatches}});
    }
    return out;
  };
  json devs = json::array();
  for (const auto& d : g.deviations) {
    devs.push_back({{"id", d.id}, {"printed", d.printed}, {"engine", d.engine}, {"expected", d.expected}});
  }
  return {{"ok", g.ok()},
          {"max_arity", g.max_arity},
          {"connectives", g.connectives},
          {"tables", checks(g.tables)},
          {"claims", checks(g.claims)},
          {"deviations", devs},
          {"missing_deviations", g.missing_deviations}};
}

inline std::string render_golden(const GoldenReport& g) {
  std::ostringstream os;
  os << "reference tables, " << g.connectives << " non-monotone connectives of arity <= " << g.max_arity << "\n";
  auto list = [&](const char* title, const std::vector<GoldenCheck>& cs) {
    os << title << "\n";
    for (const auto& c : cs) {
      os << "  " << (c.ok() ? "ok      " : "MISMATCH") << " " << detail::pad(c.id, 24) << " " << c.instances
         << " connectives, " << c.cells << " cells\n";
      for (const auto& m : c.mismatches) os << "           " << m << "\n";
    }
  };
  list("tables:", g.tables);
  list("claims:", g.claims);
  os << "deviations:\n";
  for (const auto& d : g.deviations) {
    os << "  " << (d.expected ? "expected  " : "UNEXPECTED") << " " << d.id << "\n"
       << "             printed: " << d.printed << "\n"
       << "             engine:  " << d.engine << "\n";
  }
  for (const auto& id : g.missing_deviations) os << "  MISSING    " << id << " was not reproduced\n";
  os << (g.ok() ? "all checks passed\n" : "golden check FAILED\n");
  return os.str();
}

}  // namespace ksep
