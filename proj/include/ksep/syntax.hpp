#pragma once

// First-order formulas over truth-table connectives, sequents, and the
// concrete text syntax:
//
//   F ::= ID | ID '(' X (',' X)* ')' | ID '(' F (',' F)* ')'
//       | 'forall' X '.' F | 'exists' X '.' F
//   S ::= [F (',' F)*] '=>' [F (',' F)*]
//
// An ID names a connective when the signature has it, a predicate otherwise.

#include <algorithm>
#include <cctype>
#include <compare>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ksep/errors.hpp"
#include "ksep/truthfn.hpp"

namespace ksep {

using Variable = std::string;

struct PredicateSymbol {
  std::string name;
  std::size_t arity = 0;
  friend auto operator<=>(const PredicateSymbol&, const PredicateSymbol&) = default;
};

/// Immutable formula handle. Copies share structure; equality is structural
/// (no alpha-equivalence).
class Formula {
 public:
  enum class Kind { Atom, Conn, Forall, Exists };

  static Formula atom(std::string predicate, std::vector<Variable> args = {}) {
    if (predicate.empty()) throw UsageError("predicate name must not be empty");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Atom;
    n->name = std::move(predicate);
    n->vars = std::move(args);
    return Formula(std::move(n));
  }

  static Formula conn(const TruthTable& table, std::vector<Formula> args) {
    return conn(std::make_shared<const TruthTable>(table), std::move(args));
  }

  static Formula conn(std::shared_ptr<const TruthTable> table, std::vector<Formula> args) {
    if (args.size() != table->arity()) {
      throw UsageError("connective '" + table->name() + "' expects " + std::to_string(table->arity()) +
                       " arguments, got " + std::to_string(args.size()));
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::Conn;
    n->name = table->name();
    n->table = std::move(table);
    n->children = std::move(args);
    for (const auto& c : n->children) n->depth = std::max(n->depth, c.depth() + 1);
    return Formula(std::move(n));
  }

  static Formula forall(Variable x, Formula body) { return quantifier(Kind::Forall, std::move(x), std::move(body)); }
  static Formula exists(Variable x, Formula body) { return quantifier(Kind::Exists, std::move(x), std::move(body)); }

  Kind kind() const { return node_->kind; }
  bool is_atom() const { return kind() == Kind::Atom; }
  bool is_conn() const { return kind() == Kind::Conn; }
  bool is_quantifier() const { return kind() == Kind::Forall || kind() == Kind::Exists; }

  /// Predicate name for atoms, connective name for Conn nodes.
  const std::string& name() const { return node_->name; }
  const std::vector<Variable>& args() const { return node_->vars; }
  const TruthTable& table() const { return *node_->table; }
  const std::vector<Formula>& children() const { return node_->children; }
  const Variable& bound_var() const { return node_->vars.front(); }
  const Formula& body() const { return node_->children.front(); }
  std::size_t depth() const { return node_->depth; }

  /// Identity of the shared node; stable for the lifetime of any copy.
  const void* id() const { return node_.get(); }

  friend bool operator==(const Formula& x, const Formula& y) { return compare(x, y) == 0; }
  friend std::strong_ordering operator<=>(const Formula& x, const Formula& y) { return compare(x, y) <=> 0; }

 private:
  struct Node {
    Kind kind = Kind::Atom;
    std::string name;
    std::vector<Variable> vars;  // atom arguments, or the single bound variable
    std::shared_ptr<const TruthTable> table;
    std::vector<Formula> children;
    std::size_t depth = 0;
  };

  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static Formula quantifier(Kind k, Variable x, Formula body) {
    if (x.empty()) throw UsageError("bound variable name must not be empty");
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->vars = {std::move(x)};
    n->depth = body.depth() + 1;
    n->children = {std::move(body)};
    return Formula(std::move(n));
  }

  static int compare(const Formula& x, const Formula& y) {
    if (x.node_ == y.node_) return 0;
    const Node& a = *x.node_;
    const Node& b = *y.node_;
    if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
    if (int c = a.name.compare(b.name); c != 0) return c < 0 ? -1 : 1;
    if (a.vars != b.vars) return a.vars < b.vars ? -1 : 1;
    if (a.kind == Kind::Conn && *a.table != *b.table) return *a.table < *b.table ? -1 : 1;
    if (a.children.size() != b.children.size()) return a.children.size() < b.children.size() ? -1 : 1;
    for (std::size_t i = 0; i < a.children.size(); ++i) {
      if (int c = compare(a.children[i], b.children[i]); c != 0) return c;
    }
    return 0;
  }

  std::shared_ptr<const Node> node_;
};

/// Gamma => Delta with both sides kept as sorted duplicate-free sets.
class Sequent {
 public:
  Sequent() = default;
  Sequent(std::vector<Formula> antecedent, std::vector<Formula> succedent)
      : antecedent_(normalize(std::move(antecedent))), succedent_(normalize(std::move(succedent))) {}

  const std::vector<Formula>& antecedent() const { return antecedent_; }
  const std::vector<Formula>& succedent() const { return succedent_; }

  friend bool operator==(const Sequent&, const Sequent&) = default;

 private:
  static std::vector<Formula> normalize(std::vector<Formula> fs) {
    std::sort(fs.begin(), fs.end());
    fs.erase(std::unique(fs.begin(), fs.end()), fs.end());
    return fs;
  }

  std::vector<Formula> antecedent_;
  std::vector<Formula> succedent_;
};

namespace detail {
inline void collect_free(const Formula& f, std::multiset<Variable>& bound, std::set<Variable>& out) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
      for (const auto& x : f.args()) {
        if (!bound.contains(x)) out.insert(x);
      }
      break;
    case Formula::Kind::Conn:
      for (const auto& c : f.children()) collect_free(c, bound, out);
      break;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      auto it = bound.insert(f.bound_var());
      collect_free(f.body(), bound, out);
      bound.erase(it);
      break;
    }
  }
}
}  // namespace detail

inline std::set<Variable> free_vars(const Formula& f) {
  std::set<Variable> out;
  std::multiset<Variable> bound;
  detail::collect_free(f, bound, out);
  return out;
}

inline std::set<Variable> free_vars(const Sequent& s) {
  std::set<Variable> out;
  for (const auto* side : {&s.antecedent(), &s.succedent()}) {
    for (const auto& f : *side) out.merge(free_vars(f));
  }
  return out;
}

inline bool is_closed(const Formula& f) { return free_vars(f).empty(); }

/// Quantifier-free with only 0-ary atoms.
inline bool is_propositional(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
      return f.args().empty();
    case Formula::Kind::Conn:
      return std::all_of(f.children().begin(), f.children().end(), [](const Formula& c) { return is_propositional(c); });
    default:
      return false;
  }
}

inline bool is_propositional(const Sequent& s) {
  auto prop = [](const Formula& f) { return is_propositional(f); };
  return std::all_of(s.antecedent().begin(), s.antecedent().end(), prop) &&
         std::all_of(s.succedent().begin(), s.succedent().end(), prop);
}

/// Every predicate occurring in the formula, with its arity. Throws if one
/// name is used with two arities.
inline void collect_predicates(const Formula& f, std::map<std::string, std::size_t>& out) {
  if (f.is_atom()) {
    auto [it, fresh] = out.emplace(f.name(), f.args().size());
    if (!fresh && it->second != f.args().size()) {
      throw UsageError("predicate '" + f.name() + "' used with arities " + std::to_string(it->second) + " and " +
                       std::to_string(f.args().size()));
    }
    return;
  }
  for (const auto& c : f.children()) collect_predicates(c, out);
}

inline std::map<std::string, std::size_t> predicates_of(const Formula& f) {
  std::map<std::string, std::size_t> out;
  collect_predicates(f, out);
  return out;
}

inline std::map<std::string, std::size_t> predicates_of(const Sequent& s) {
  std::map<std::string, std::size_t> out;
  for (const auto* side : {&s.antecedent(), &s.succedent()}) {
    for (const auto& f : *side) collect_predicates(f, out);
  }
  return out;
}

/// Connectives occurring in the formula, by name.
inline void collect_connectives(const Formula& f, std::map<std::string, TruthTable>& out) {
  if (f.is_conn()) out.emplace(f.name(), f.table());
  for (const auto& c : f.children()) collect_connectives(c, out);
}

/// Replaces each subformula equal to `target` by `replacement`, outermost
/// first; a replaced subtree is not searched again. Both must be closed
/// propositional formulas.
inline Formula substitute_symbol(const Formula& f, const Formula& target, const Formula& replacement) {
  if (!is_propositional(target) || !is_propositional(replacement)) {
    throw UsageError("substitute_symbol: target and replacement must be closed propositional formulas");
  }
  struct Rec {
    const Formula& target;
    const Formula& replacement;
    Formula operator()(const Formula& g) const {
      if (g == target) return replacement;
      switch (g.kind()) {
        case Formula::Kind::Atom:
          return g;
        case Formula::Kind::Conn: {
          std::vector<Formula> kids;
          kids.reserve(g.children().size());
          for (const auto& c : g.children()) kids.push_back((*this)(c));
          return Formula::conn(g.table(), std::move(kids));
        }
        case Formula::Kind::Forall:
          return Formula::forall(g.bound_var(), (*this)(g.body()));
        case Formula::Kind::Exists:
          return Formula::exists(g.bound_var(), (*this)(g.body()));
      }
      return g;
    }
  };
  return Rec{target, replacement}(f);
}

// ---------------------------------------------------------------------------
// Printing

inline void print_to(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
      out += f.name();
      if (!f.args().empty()) {
        out += '(';
        for (std::size_t i = 0; i < f.args().size(); ++i) {
          if (i) out += ", ";
          out += f.args()[i];
        }
        out += ')';
      }
      break;
    case Formula::Kind::Conn:
      out += f.name();
      if (!f.children().empty()) {
        out += '(';
        for (std::size_t i = 0; i < f.children().size(); ++i) {
          if (i) out += ", ";
          print_to(f.children()[i], out);
        }
        out += ')';
      }
      break;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      out += f.kind() == Formula::Kind::Forall ? "forall " : "exists ";
      out += f.bound_var();
      out += ". ";
      print_to(f.body(), out);
      break;
  }
}

inline std::string print_formula(const Formula& f) {
  std::string out;
  print_to(f, out);
  return out;
}

inline std::string print_sequent(const Sequent& s) {
  std::string out;
  auto side = [&](const std::vector<Formula>& fs) {
    for (std::size_t i = 0; i < fs.size(); ++i) {
      if (i) out += ", ";
      print_to(fs[i], out);
    }
  };
  side(s.antecedent());
  out += s.antecedent().empty() ? "=>" : " =>";
  if (!s.succedent().empty()) out += ' ';
  side(s.succedent());
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const Formula& f) { return os << print_formula(f); }
inline std::ostream& operator<<(std::ostream& os, const Sequent& s) { return os << print_sequent(s); }

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, const Signature& sig) : text_(text), sig_(sig) {}

  Formula formula_only() {
    Formula f = formula();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return f;
  }

  Sequent sequent_only() {
    std::vector<Formula> lhs, rhs;
    skip_ws();
    if (!at_arrow()) lhs = formula_list();
    skip_ws();
    if (!at_arrow()) fail("expected '=>'");
    pos_ += 2;
    skip_ws();
    if (pos_ != text_.size()) rhs = formula_list();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return Sequent(std::move(lhs), std::move(rhs));
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_arrow() const { return text_.substr(pos_, 2) == "=>"; }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  std::string identifier() {
    skip_ws();
    if (pos_ >= text_.size() || !ident_start(text_[pos_])) fail("expected identifier");
    std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  Variable variable() {
    std::size_t at = pos_;
    std::string x = identifier();
    if (x == "forall" || x == "exists") {
      pos_ = at;
      fail("keyword '" + x + "' cannot be a variable");
    }
    return x;
  }

  std::vector<Formula> formula_list() {
    std::vector<Formula> out{formula()};
    while (peek(',')) {
      ++pos_;
      out.push_back(formula());
    }
    return out;
  }

  Formula formula() {
    skip_ws();
    const std::size_t start = pos_;
    std::string id = identifier();
    if (id == "forall" || id == "exists") {
      Variable x = variable();
      expect('.');
      Formula body = formula();
      return id == "forall" ? Formula::forall(std::move(x), std::move(body))
                            : Formula::exists(std::move(x), std::move(body));
    }
    if (const TruthTable* t = sig_.find(id)) {
      std::vector<Formula> args;
      if (peek('(')) {
        ++pos_;
        args = formula_list();
        expect(')');
      }
      if (args.size() != t->arity()) {
        pos_ = start;
        fail("connective '" + id + "' expects " + std::to_string(t->arity()) + " arguments, got " +
             std::to_string(args.size()));
      }
      auto shared = tables_.find(id);
      if (shared == tables_.end()) shared = tables_.emplace(id, std::make_shared<const TruthTable>(*t)).first;
      return Formula::conn(shared->second, std::move(args));
    }
    std::vector<Variable> vars;
    if (peek('(')) {
      ++pos_;
      vars.push_back(argument_variable(id));
      while (peek(',')) {
        ++pos_;
        vars.push_back(argument_variable(id));
      }
      expect(')');
    }
    auto [it, fresh] = predicate_arity_.emplace(id, vars.size());
    if (!fresh && it->second != vars.size()) {
      pos_ = start;
      fail("predicate '" + id + "' used with arity " + std::to_string(vars.size()) + " after arity " +
           std::to_string(it->second));
    }
    return Formula::atom(std::move(id), std::move(vars));
  }

  Variable argument_variable(const std::string& head) {
    Variable x = variable();
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      fail("unknown connective '" + head + "' (predicate arguments must be variables)");
    }
    return x;
  }

  std::string_view text_;
  const Signature& sig_;
  std::size_t pos_ = 0;
  std::map<std::string, std::size_t> predicate_arity_;
  std::map<std::string, std::shared_ptr<const TruthTable>> tables_;
};

}  // namespace detail

inline Formula parse_formula(std::string_view text, const Signature& sig) {
  return detail::Parser(text, sig).formula_only();
}

inline Sequent parse_sequent(std::string_view text, const Signature& sig) {
  return detail::Parser(text, sig).sequent_only();
}

}  // namespace ksep
