#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pml/term.hpp"

namespace pml {

/// Equivalence classes over terms, as produced by congruence closure.
///
/// Each class is sorted; its first element is the representative. The
/// ordering on Term::Kind makes constants win over attributes, and
/// attributes over parameters. Classes are ordered by representative.
class TermPartition {
 public:
  TermPartition() = default;

  explicit TermPartition(std::vector<std::vector<Term>> classes) : classes_(std::move(classes)) {
    for (auto& cls : classes_) std::sort(cls.begin(), cls.end());
    std::sort(classes_.begin(), classes_.end());
    for (std::size_t i = 0; i < classes_.size(); ++i)
      for (const auto& t : classes_[i]) index_.emplace(t, i);
  }

  const std::vector<std::vector<Term>>& classes() const { return classes_; }
  std::size_t size() const { return classes_.size(); }

  std::optional<std::size_t> class_of(const Term& t) const {
    auto it = index_.find(t);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Terms outside the partition are singletons.
  bool same_class(const Term& a, const Term& b) const {
    if (a == b) return true;
    auto ca = class_of(a), cb = class_of(b);
    return ca && cb && *ca == *cb;
  }

  Term representative(const Term& t) const {
    auto c = class_of(t);
    return c ? classes_[*c].front() : t;
  }

  const std::vector<Term>& members(std::size_t cls) const { return classes_[cls]; }

  /// First pair of distinct constants forced into one class, if any.
  std::optional<std::pair<Term, Term>> clash() const {
    for (const auto& cls : classes_)
      if (cls.size() >= 2 && cls[0].is_constant() && cls[1].is_constant())
        return std::make_pair(cls[0], cls[1]);
    return std::nullopt;
  }

  /// The partition induced on the terms satisfying `keep`.
  TermPartition restricted(const std::function<bool(const Term&)>& keep) const {
    std::vector<std::vector<Term>> out;
    for (const auto& cls : classes_) {
      std::vector<Term> kept;
      for (const auto& t : cls)
        if (keep(t)) kept.push_back(t);
      if (!kept.empty()) out.push_back(std::move(kept));
    }
    return TermPartition(std::move(out));
  }

  /// Pairs of terms that share a class here but not in `other`.
  std::vector<std::pair<Term, Term>> merges_beyond(const TermPartition& other) const {
    std::vector<std::pair<Term, Term>> out;
    for (const auto& cls : classes_)
      for (std::size_t i = 0; i < cls.size(); ++i)
        for (std::size_t j = i + 1; j < cls.size(); ++j)
          if (!other.same_class(cls[i], cls[j])) out.emplace_back(cls[i], cls[j]);
    return out;
  }

  friend bool operator==(const TermPartition& a, const TermPartition& b) {
    return a.classes_ == b.classes_;
  }

 private:
  std::vector<std::vector<Term>> classes_;
  std::map<Term, std::size_t> index_;
};

namespace detail {

class UnionFind {
 public:
  std::size_t add(const Term& t) {
    auto [it, inserted] = ids_.emplace(t, terms_.size());
    if (inserted) {
      terms_.push_back(t);
      parent_.push_back(parent_.size());
    }
    return it->second;
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

  TermPartition partition() {
    std::map<std::size_t, std::vector<Term>> groups;
    for (std::size_t i = 0; i < terms_.size(); ++i) groups[find(i)].push_back(terms_[i]);
    std::vector<std::vector<Term>> classes;
    classes.reserve(groups.size());
    for (auto& [root, members] : groups) classes.push_back(std::move(members));
    return TermPartition(std::move(classes));
  }

 private:
  std::map<Term, std::size_t> ids_;
  std::vector<Term> terms_;
  std::vector<std::size_t> parent_;
};

}  // namespace detail

/// Least equivalence relation containing the given equalities. Every term in
/// `universe` appears in the result, as a singleton if unconstrained.
inline TermPartition closure(const Constraints& constraints, const std::vector<Term>& universe = {}) {
  detail::UnionFind uf;
  for (const auto& t : universe) uf.add(t);
  for (const auto& c : constraints) uf.unite(uf.add(c.lhs), uf.add(c.rhs));
  return uf.partition();
}

inline bool satisfiable(const Constraints& constraints,
                        const std::vector<Disequality>& disequalities = {}) {
  std::vector<Term> universe;
  for (const auto& [a, b] : disequalities) {
    universe.push_back(a);
    universe.push_back(b);
  }
  const auto p = closure(constraints, universe);
  if (p.clash()) return false;
  return std::none_of(disequalities.begin(), disequalities.end(),
                      [&](const Disequality& d) { return p.same_class(d.first, d.second); });
}

/// Canonical constraint set binding every non-parameter term to its class
/// target: the class constant if there is one, else the least parameter,
/// else the representative. Parameters not needed as targets are dropped.
inline Constraints reduce(const Constraints& constraints) {
  if (!satisfiable(constraints))
    throw std::invalid_argument("cannot reduce an unsatisfiable constraint set");
  const auto p = closure(constraints);
  Constraints out;
  for (const auto& cls : p.classes()) {
    if (cls.size() < 2) continue;
    Term target = cls.front();
    if (!target.is_constant()) {
      auto param = std::find_if(cls.begin(), cls.end(), [](const Term& t) { return t.is_parameter(); });
      if (param != cls.end()) target = *param;
    }
    for (const auto& t : cls)
      if (!t.is_parameter() && t != target) out.push_back({t, target});
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// True iff every candidate equality already holds in closure(base).
inline bool entails(const Constraints& base, const Constraints& candidate) {
  const auto p = closure(base);
  if (p.clash()) return true;
  return std::all_of(candidate.begin(), candidate.end(),
                     [&](const EqConstraint& c) { return p.same_class(c.lhs, c.rhs); });
}

struct ExclusivityVerdict {
  bool exclusive = false;
  /// Present iff not exclusive: flag assignments, merged classes, and
  /// disequalities of one satisfying model.
  std::optional<std::vector<std::string>> witness;
};

namespace detail {

struct SplitCondition {
  std::map<std::string, bool> flags;
  bool flag_conflict = false;
  Constraints equalities;
  std::vector<Disequality> disequalities;
};

inline SplitCondition split(const Condition& c) {
  SplitCondition out;
  for (const auto& lit : c.literals) {
    if (const auto* f = std::get_if<FlagLiteral>(&lit)) {
      auto [it, inserted] = out.flags.emplace(f->flag, !f->negated);
      if (!inserted && it->second != !f->negated) out.flag_conflict = true;
    } else {
      const auto& cmp = std::get<CompareLiteral>(lit);
      if (cmp.op == CompareOp::Eq)
        out.equalities.push_back({cmp.lhs, cmp.rhs});
      else
        out.disequalities.emplace_back(cmp.lhs, cmp.rhs);
    }
  }
  return out;
}

}  // namespace detail

inline bool satisfiable(const Condition& c) {
  const auto s = detail::split(c);
  return !s.flag_conflict && satisfiable(s.equalities, s.disequalities);
}

inline ExclusivityVerdict mutually_exclusive(const Condition& c1, const Condition& c2) {
  const auto joint = detail::split(conjoin(c1, c2));
  if (joint.flag_conflict || !satisfiable(joint.equalities, joint.disequalities)) return {true, std::nullopt};

  std::vector<std::string> witness;
  for (const auto& [flag, value] : joint.flags) witness.push_back(flag + (value ? "=true" : "=false"));
  const auto merged = closure(joint.equalities);
  for (const auto& cls : merged.classes()) {
    if (cls.size() < 2) continue;
    std::string line;
    for (std::size_t i = 0; i < cls.size(); ++i) line += (i ? " = " : "") + to_string(cls[i]);
    witness.push_back(std::move(line));
  }
  for (const auto& [a, b] : joint.disequalities) witness.push_back(to_string(a) + " != " + to_string(b));
  return {false, std::move(witness)};
}

struct ExclusivityReport {
  struct Overlap {
    std::size_t first;
    std::size_t second;
    std::vector<std::string> witness;
  };
  bool ok = true;
  std::vector<Overlap> overlaps;
};

inline ExclusivityReport pairwise_exclusive(const std::vector<Condition>& conditions) {
  if (conditions.size() < 2) throw std::invalid_argument("pairwise exclusivity needs at least two conditions");
  ExclusivityReport report;
  for (std::size_t i = 0; i < conditions.size(); ++i)
    for (std::size_t j = i + 1; j < conditions.size(); ++j) {
      auto v = mutually_exclusive(conditions[i], conditions[j]);
      if (!v.exclusive) {
        report.ok = false;
        report.overlaps.push_back({i, j, std::move(*v.witness)});
      }
    }
  return report;
}

}  // namespace pml
