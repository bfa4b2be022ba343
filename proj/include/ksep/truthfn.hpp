#pragma once

// Truth-value vectors, truth tables and the monotonicity analysis of
// truth-table connectives.

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ksep/errors.hpp"

namespace ksep {

/// Fixed-length sequence over {0,1}. Index 0 is the first argument.
class TruthVector {
 public:
  TruthVector() = default;

  TruthVector(std::initializer_list<int> bits) {
    bits_.reserve(bits.size());
    for (int b : bits) push(b);
  }

  explicit TruthVector(const std::vector<int>& bits) {
    bits_.reserve(bits.size());
    for (int b : bits) push(b);
  }

  static TruthVector zeros(std::size_t n) { return TruthVector(std::vector<uint8_t>(n, 0)); }
  static TruthVector ones(std::size_t n) { return TruthVector(std::vector<uint8_t>(n, 1)); }

  /// Parses "0110"-style text.
  static TruthVector from_string(std::string_view text) {
    std::vector<uint8_t> bits;
    bits.reserve(text.size());
    for (char ch : text) {
      if (ch != '0' && ch != '1') throw UsageError("truth vector must consist of 0/1 characters: '" + std::string(text) + "'");
      bits.push_back(static_cast<uint8_t>(ch - '0'));
    }
    return TruthVector(std::move(bits));
  }

  /// The vector whose binary reading (first component most significant) is `row`.
  static TruthVector from_row(std::size_t row, std::size_t n) {
    std::vector<uint8_t> bits(n);
    for (std::size_t i = 0; i < n; ++i) bits[n - 1 - i] = static_cast<uint8_t>((row >> i) & 1U);
    return TruthVector(std::move(bits));
  }

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  int operator[](std::size_t i) const { return bits_.at(i); }

  std::size_t row_index() const {
    std::size_t row = 0;
    for (uint8_t b : bits_) row = (row << 1U) | b;
    return row;
  }

  std::string to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (uint8_t b : bits_) s.push_back(static_cast<char>('0' + b));
    return s;
  }

  friend bool operator==(const TruthVector&, const TruthVector&) = default;
  friend auto operator<=>(const TruthVector&, const TruthVector&) = default;

 private:
  explicit TruthVector(std::vector<uint8_t> bits) : bits_(std::move(bits)) {}

  void push(int b) {
    if (b != 0 && b != 1) throw UsageError("truth values must be 0 or 1");
    bits_.push_back(static_cast<uint8_t>(b));
  }

  std::vector<uint8_t> bits_;
};

inline std::ostream& operator<<(std::ostream& os, const TruthVector& v) { return os << '<' << v.to_string() << '>'; }

namespace detail {
inline void require_same_length(const TruthVector& a, const TruthVector& b, const char* op) {
  if (a.size() != b.size()) {
    throw UsageError(std::string(op) + ": length mismatch (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
}
}  // namespace detail

/// Pointwise order: a[i] <= b[i] for every i.
inline bool leq_vec(const TruthVector& a, const TruthVector& b) {
  detail::require_same_length(a, b, "leq_vec");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
  }
  return true;
}

inline TruthVector meet(const TruthVector& a, const TruthVector& b) {
  detail::require_same_length(a, b, "meet");
  std::vector<int> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] & b[i];
  return TruthVector(out);
}

inline TruthVector invert(const TruthVector& a) {
  std::vector<int> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = 1 - a[i];
  return TruthVector(out);
}

/// Inverts b only on the positions where it rises above a: component i is 0
/// exactly when a[i] = 0 and b[i] = 1. Requires a below b.
inline TruthVector relative_invert(const TruthVector& a, const TruthVector& b) {
  detail::require_same_length(a, b, "relative_invert");
  if (!leq_vec(a, b)) throw UsageError("relative_invert: " + a.to_string() + " is not below " + b.to_string());
  std::vector<int> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] == 0 && b[i] == 1) ? 0 : 1;
  return TruthVector(out);
}

/// A named connective with its complete truth function. Row i of `outputs`
/// is the value on the argument vector whose binary encoding (argument 1 most
/// significant) is i.
class TruthTable {
 public:
  static constexpr std::size_t kMaxArity = 20;

  TruthTable(std::string name, std::size_t arity, TruthVector outputs)
      : name_(std::move(name)), arity_(arity), outputs_(std::move(outputs)) {
    if (name_.empty()) throw UsageError("connective name must not be empty");
    if (arity_ > kMaxArity) throw UsageError("connective '" + name_ + "': arity " + std::to_string(arity_) + " too large");
    if (outputs_.size() != (std::size_t{1} << arity_)) {
      throw UsageError("connective '" + name_ + "': expected " + std::to_string(std::size_t{1} << arity_) +
                       " output bits for arity " + std::to_string(arity_) + ", got " +
                       std::to_string(outputs_.size()));
    }
  }

  TruthTable(std::string name, std::size_t arity, std::string_view bits)
      : TruthTable(std::move(name), arity, TruthVector::from_string(bits)) {}

  const std::string& name() const { return name_; }
  std::size_t arity() const { return arity_; }
  const TruthVector& outputs() const { return outputs_; }

  int operator()(const TruthVector& args) const {
    if (args.size() != arity_) {
      throw UsageError("connective '" + name_ + "' has arity " + std::to_string(arity_) + " but got " +
                       std::to_string(args.size()) + " arguments");
    }
    return outputs_[args.row_index()];
  }

  /// Row lookup by pre-encoded index; no arity check.
  int at_row(std::size_t row) const { return outputs_[row]; }

  friend bool operator==(const TruthTable&, const TruthTable&) = default;
  friend auto operator<=>(const TruthTable&, const TruthTable&) = default;

 private:
  std::string name_;
  std::size_t arity_;
  TruthVector outputs_;
};

inline int eval_table(const TruthTable& t, const TruthVector& args) { return t(args); }

struct MonotonicityWitness {
  TruthVector a;
  TruthVector b;
  friend bool operator==(const MonotonicityWitness&, const MonotonicityWitness&) = default;
};

/// None iff the table is monotonic. Otherwise the pair a <= b with t(a)=1 and
/// t(b)=0 that is least by (row index of a, row index of b).
inline std::optional<MonotonicityWitness> monotonicity_witness(const TruthTable& t) {
  const std::size_t rows = std::size_t{1} << t.arity();
  for (std::size_t ra = 0; ra < rows; ++ra) {
    if (t.at_row(ra) != 1) continue;
    for (std::size_t rb = 0; rb < rows; ++rb) {
      // ra <= rb pointwise iff ra's bits are a subset of rb's
      if (t.at_row(rb) == 0 && (ra & ~rb) == 0) {
        return MonotonicityWitness{TruthVector::from_row(ra, t.arity()), TruthVector::from_row(rb, t.arity())};
      }
    }
  }
  return std::nullopt;
}

inline bool is_monotonic(const TruthTable& t) { return !monotonicity_witness(t).has_value(); }

/// Classification by the values on the all-zero and all-one vectors:
/// (0,0) -> A, (0,1) -> B, (1,0) -> C, (1,1) -> D.
enum class Case { A, B, C, D };

inline char case_label(Case c) { return static_cast<char>('a' + static_cast<int>(c)); }

inline Case classify_case(const TruthTable& t) {
  const int at_zero = t(TruthVector::zeros(t.arity()));
  const int at_one = t(TruthVector::ones(t.arity()));
  return static_cast<Case>(at_zero * 2 + at_one);
}

/// Connectives by name. Iteration is in name order.
class Signature {
 public:
  Signature() = default;
  Signature(std::initializer_list<TruthTable> tables) {
    for (const auto& t : tables) add(t);
  }

  void add(TruthTable t) {
    const std::string name = t.name();
    if (!tables_.emplace(name, std::move(t)).second) throw UsageError("duplicate connective '" + name + "'");
  }

  const TruthTable* find(std::string_view name) const {
    auto it = tables_.find(std::string(name));
    return it == tables_.end() ? nullptr : &it->second;
  }

  bool contains(std::string_view name) const { return find(name) != nullptr; }
  std::size_t size() const { return tables_.size(); }
  bool empty() const { return tables_.empty(); }

  auto begin() const { return tables_.begin(); }
  auto end() const { return tables_.end(); }

 private:
  std::map<std::string, TruthTable> tables_;
};

/// Reads the line-oriented signature format:
///   conn <NAME> <ARITY> <BITS>
/// with `#` comment lines and blank lines ignored. Errors carry the byte
/// offset of the offending line.
inline Signature parse_signature(std::string_view text) {
  Signature sig;
  std::size_t offset = 0;
  std::size_t line_no = 0;
  while (offset <= text.size()) {
    std::size_t end = text.find('\n', offset);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(offset, end - offset));
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::istringstream in(line);
    std::string keyword;
    if ((in >> keyword) && keyword[0] != '#') {
      auto fail = [&](const std::string& msg) {
        throw ParseError("signature line " + std::to_string(line_no) + ": " + msg, offset);
      };
      if (keyword != "conn") fail("expected 'conn', got '" + keyword + "'");
      std::string name, arity_text, bits, extra;
      if (!(in >> name >> arity_text >> bits)) fail("expected 'conn <NAME> <ARITY> <BITS>'");
      if (in >> extra) fail("trailing input '" + extra + "'");
      std::size_t arity = 0;
      try {
        std::size_t used = 0;
        arity = std::stoul(arity_text, &used);
        if (used != arity_text.size()) fail("bad arity '" + arity_text + "'");
      } catch (const std::logic_error&) {
        fail("bad arity '" + arity_text + "'");
      }
      try {
        sig.add(TruthTable(name, arity, bits));
      } catch (const UsageError& e) {
        fail(e.what());
      }
    }
    if (end == text.size()) break;
    offset = end + 1;
  }
  return sig;
}

inline std::string print_signature(const Signature& sig) {
  std::string out;
  for (const auto& [name, t] : sig) {
    out += "conn " + name + " " + std::to_string(t.arity()) + " " + t.outputs().to_string() + "\n";
  }
  return out;
}

/// Frequently used tables under their conventional names.
namespace standard {
inline TruthTable conj() { return {"and", 2, "0001"}; }
inline TruthTable disj() { return {"or", 2, "0111"}; }
inline TruthTable implies() { return {"implies", 2, "1101"}; }
inline TruthTable nand() { return {"nand", 2, "1110"}; }
inline TruthTable xor_() { return {"xor", 2, "0110"}; }
inline TruthTable neg() { return {"not", 1, "10"}; }
inline TruthTable bot() { return {"bot", 0, "0"}; }
inline TruthTable top() { return {"top", 0, "1"}; }
}  // namespace standard

}  // namespace ksep
