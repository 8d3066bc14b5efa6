#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace pml {

/// A term appearing in an equality constraint or a condition literal.
///
/// Attributes name promise types (`width`), parameters are bundle-scoped
/// placeholders (`$w`), and the three constant kinds are rigid values.
/// Named constants are symbolic (`owner`, `type1`): distinct names denote
/// distinct values.
struct Term {
  enum class Kind { NumConst, StrConst, NamedConst, Attribute, Parameter };

  Kind kind = Kind::Attribute;
  std::string text;

  static Term attr(std::string name) { return {Kind::Attribute, std::move(name)}; }
  static Term param(std::string name) { return {Kind::Parameter, std::move(name)}; }
  static Term num(std::string value) { return {Kind::NumConst, std::move(value)}; }
  static Term str(std::string value) { return {Kind::StrConst, std::move(value)}; }
  static Term named(std::string name) { return {Kind::NamedConst, std::move(name)}; }

  bool is_constant() const {
    return kind == Kind::NumConst || kind == Kind::StrConst || kind == Kind::NamedConst;
  }
  bool is_parameter() const { return kind == Kind::Parameter; }
  bool is_attribute() const { return kind == Kind::Attribute; }

  friend auto operator<=>(const Term&, const Term&) = default;
  friend bool operator==(const Term&, const Term&) = default;
};

inline std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  out += '"';
  return out;
}

inline std::string to_string(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Parameter: return "$" + t.text;
    case Term::Kind::StrConst: return quote_string(t.text);
    default: return t.text;
  }
}

struct EqConstraint {
  Term lhs;
  Term rhs;

  friend auto operator<=>(const EqConstraint&, const EqConstraint&) = default;
  friend bool operator==(const EqConstraint&, const EqConstraint&) = default;
};

using Constraints = std::vector<EqConstraint>;
using Disequality = std::pair<Term, Term>;

inline std::string to_string(const EqConstraint& c) {
  return to_string(c.lhs) + "=" + to_string(c.rhs);
}

enum class CompareOp { Eq, Neq };

struct CompareLiteral {
  Term lhs;
  CompareOp op = CompareOp::Eq;
  Term rhs;

  friend auto operator<=>(const CompareLiteral&, const CompareLiteral&) = default;
  friend bool operator==(const CompareLiteral&, const CompareLiteral&) = default;
};

/// `employee` or `not employee`; flags are independent boolean atoms.
struct FlagLiteral {
  std::string flag;
  bool negated = false;

  friend auto operator<=>(const FlagLiteral&, const FlagLiteral&) = default;
  friend bool operator==(const FlagLiteral&, const FlagLiteral&) = default;
};

using Literal = std::variant<CompareLiteral, FlagLiteral>;

inline std::string to_string(const Literal& lit) {
  if (const auto* cmp = std::get_if<CompareLiteral>(&lit))
    return to_string(cmp->lhs) + (cmp->op == CompareOp::Eq ? " == " : " != ") +
           to_string(cmp->rhs);
  const auto& flag = std::get<FlagLiteral>(lit);
  return (flag.negated ? "not " : "") + flag.flag;
}

/// A conjunction of literals. Empty means unconditional.
struct Condition {
  std::vector<Literal> literals;

  bool empty() const { return literals.empty(); }

  friend auto operator<=>(const Condition&, const Condition&) = default;
  friend bool operator==(const Condition&, const Condition&) = default;
};

inline std::string to_string(const Condition& c) {
  std::string out;
  for (std::size_t i = 0; i < c.literals.size(); ++i) {
    if (i) out += " and ";
    out += to_string(c.literals[i]);
  }
  return out;
}

/// Literal order is irrelevant to a conjunction; sort and drop repeats.
inline Condition normalized(Condition c) {
  std::sort(c.literals.begin(), c.literals.end(),
            [](const Literal& a, const Literal& b) {
              const auto sa = to_string(a), sb = to_string(b);
              return sa != sb ? sa < sb : a < b;
            });
  c.literals.erase(std::unique(c.literals.begin(), c.literals.end()), c.literals.end());
  return c;
}

inline Condition conjoin(const Condition& a, const Condition& b) {
  Condition out = a;
  out.literals.insert(out.literals.end(), b.literals.begin(), b.literals.end());
  return out;
}

}  // namespace pml
