#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pml/analysis/finding.hpp"
#include "pml/analysis/signature.hpp"
#include "pml/constraints.hpp"
#include "pml/core.hpp"

namespace pml::analysis {

/// `c` extends `parent` iff every parent body occurs in `c`, compared in
/// canonical (parameter-renamed) form.
inline bool check_extension(const Bundle& c, const Bundle& parent) {
  std::set<std::string> have;
  for (const auto& b : c.bodies) have.insert(body_key(b));
  return std::all_of(parent.bodies.begin(), parent.bodies.end(),
                     [&](const PromiseBody& b) { return have.count(body_key(b)) != 0; });
}

namespace detail {

inline std::multiset<std::string> type_multiset(const std::vector<PromiseBody>& bodies) {
  std::multiset<std::string> out;
  for (const auto& b : bodies) out.insert(b.type);
  return out;
}

inline std::string join_types(const std::multiset<std::string>& types) {
  std::string out = "{";
  for (const auto& t : types) out += (out.size() > 1 ? ", " : "") + (t.empty() ? std::string("(link)") : t);
  return out + "}";
}

inline std::vector<std::string> cite_all(const Bundle& b) {
  std::vector<std::string> out;
  for (const auto& body : b.bodies) out.push_back(cite(b, body));
  if (out.empty()) out.push_back(b.name + ": (empty bundle)");
  return out;
}

/// Exclusivity findings over [parent condition, child conditions...].
inline void check_exclusive(const Bundle& parent, const Condition& parent_condition,
                            const std::vector<std::pair<Bundle, Condition>>& children, CheckReport& report) {
  std::vector<Condition> conds{parent_condition};
  std::vector<const Bundle*> owners{&parent};
  for (const auto& [b, c] : children) {
    conds.push_back(c);
    owners.push_back(&b);
  }
  auto label = [](const Condition& c) { return c.empty() ? std::string("(unconditional)") : to_string(c); };
  for (const auto& o : pairwise_exclusive(conds).overlaps) {
    std::string witness;
    for (const auto& w : o.witness) witness += (witness.empty() ? "" : ", ") + w;
    Finding f{FindingSeverity::PatternError, "S-NON-EXCLUSIVE",
              "'" + owners[o.first]->name + "' under " + label(conds[o.first]) + " and '" + owners[o.second]->name +
                  "' under " + label(conds[o.second]) + " can hold together" +
                  (witness.empty() ? "" : " (e.g. " + witness + ")"),
              {}};
    for (auto* b : {owners[o.first], owners[o.second]})
      for (auto& c : cite_all(*b)) f.promises.push_back(std::move(c));
    report.findings.push_back(std::move(f));
  }
}

}  // namespace detail

/// Children override a subset of `parent` under conditions exclusive with
/// `parent_condition` and with each other; each child's type multiset must
/// equal that of the parent bodies it overrides.
inline CheckReport check_specialization(const Bundle& parent, const Condition& parent_condition,
                                        const std::vector<std::pair<Bundle, Condition>>& children) {
  if (children.empty()) throw std::invalid_argument("specialization needs at least one child");
  CheckReport report;
  for (const auto& [child, cond] : children) {
    const auto child_types = detail::type_multiset(child.bodies);
    std::vector<PromiseBody> overridden;
    for (const auto& b : parent.bodies)
      if (child_types.count(b.type)) overridden.push_back(b);
    const auto parent_types = detail::type_multiset(overridden);
    if (child_types != parent_types)
      report.findings.push_back({FindingSeverity::PatternError, "S-TYPE-MISMATCH",
                                 "'" + child.name + "' promises types " + detail::join_types(child_types) +
                                     " but overrides parent types " + detail::join_types(parent_types),
                                 detail::cite_all(child)});
  }
  detail::check_exclusive(parent, parent_condition, children, report);
  report.ok = report.findings.empty();
  return report;
}

/// Each child replaces `parent` completely: equal type multisets, and all
/// conditions (parent's included) pairwise exclusive.
inline CheckReport check_substitution(const Bundle& parent, const Condition& parent_condition,
                                      const std::vector<std::pair<Bundle, Condition>>& children) {
  if (children.empty()) throw std::invalid_argument("substitution needs at least one child");
  CheckReport report;
  const auto parent_types = detail::type_multiset(parent.bodies);
  for (const auto& [child, cond] : children) {
    const auto child_types = detail::type_multiset(child.bodies);
    if (child_types == parent_types) continue;
    const bool subset = std::includes(parent_types.begin(), parent_types.end(), child_types.begin(), child_types.end());
    report.findings.push_back(
        {FindingSeverity::PatternError, subset ? "S-INCOMPLETE" : "S-TYPE-MISMATCH",
         "'" + child.name + "' promises types " + detail::join_types(child_types) +
             (subset ? ", only part of " : " instead of ") + "'" + parent.name + "' types " +
             detail::join_types(parent_types),
         detail::cite_all(child)});
  }
  detail::check_exclusive(parent, parent_condition, children, report);
  report.ok = report.findings.empty();
  return report;
}

struct IsAVerdict {
  enum class Outcome { IsA, Restricted, Inconsistent };
  Outcome outcome = Outcome::IsA;
  /// Parent-vocabulary pairs the joint promise forces together.
  std::vector<std::pair<Term, Term>> merged;
  std::optional<std::pair<Term, Term>> clash;
  std::vector<std::string> involved;

  std::string detail() const {
    if (clash) return to_string(clash->first) + " vs " + to_string(clash->second);
    std::string out;
    for (const auto& [a, b] : merged) out += (out.empty() ? "" : ", ") + to_string(a) + " ~ " + to_string(b);
    return out;
  }
};

inline const char* to_string(IsAVerdict::Outcome o) {
  switch (o) {
    case IsAVerdict::Outcome::IsA: return "IsA";
    case IsAVerdict::Outcome::Restricted: return "Restricted";
    case IsAVerdict::Outcome::Inconsistent: return "Inconsistent";
  }
  return "?";
}

namespace detail {

/// Constraints of the unconditional give bodies, parameters prefixed so two
/// bundles can be combined without sharing parameter names.
inline Constraints give_constraints(const Bundle& b, const std::string& prefix) {
  Constraints out;
  auto q = [&](Term t) {
    if (t.is_parameter()) t.text = prefix + t.text;
    return t;
  };
  for (const auto& body : b.bodies)
    if (body.polarity == Polarity::Give && !body.conditional())
      for (const auto& c : body.constraints) out.push_back({q(c.lhs), q(c.rhs)});
  return out;
}

inline std::vector<Term> vocabulary(const Constraints& cs) {
  std::set<Term> out;
  for (const auto& c : cs)
    for (const auto* t : {&c.lhs, &c.rhs})
      if (!t->is_parameter()) out.insert(*t);
  return {out.begin(), out.end()};
}

inline bool mentions(const PromiseBody& b, const Term& t) {
  if (t.is_attribute() && b.type == t.text) return true;
  return std::any_of(b.constraints.begin(), b.constraints.end(),
                     [&](const EqConstraint& c) { return c.lhs == t || c.rhs == t; });
}

}  // namespace detail

/// `child` is-a `parent` iff both can be promised at once without breaking
/// either: no constant clash, and no equality among the parent's own
/// attributes and constants that the parent alone leaves open.
inline IsAVerdict check_is_a(const Bundle& child, const Bundle& parent) {
  const auto cc = detail::give_constraints(child, "child:");
  const auto pc = detail::give_constraints(parent, "parent:");
  if (!satisfiable(cc)) throw std::invalid_argument("bundle '" + child.name + "' is unsatisfiable on its own");
  if (!satisfiable(pc)) throw std::invalid_argument("bundle '" + parent.name + "' is unsatisfiable on its own");

  Constraints joint = pc;
  joint.insert(joint.end(), cc.begin(), cc.end());
  const auto vocab = detail::vocabulary(pc);
  const auto joint_closure = closure(joint, vocab);

  IsAVerdict v;
  auto involve = [&](const Term& t) {
    for (const auto* b : {&child, &parent})
      for (const auto& body : b->bodies)
        if (detail::mentions(body, t)) {
          auto c = cite(*b, body);
          if (std::find(v.involved.begin(), v.involved.end(), c) == v.involved.end()) v.involved.push_back(c);
        }
  };

  if (auto clash = joint_closure.clash()) {
    v.outcome = IsAVerdict::Outcome::Inconsistent;
    v.clash = clash;
    const auto cls = *joint_closure.class_of(clash->first);
    for (const auto& t : joint_closure.members(cls)) involve(t);
    return v;
  }

  std::set<Term> in_vocab(vocab.begin(), vocab.end());
  auto keep = [&](const Term& t) { return in_vocab.count(t) != 0; };
  const auto parent_view = closure(pc, vocab).restricted(keep);
  v.merged = joint_closure.restricted(keep).merges_beyond(parent_view);
  if (v.merged.empty()) return v;

  // order each pair, and the pairs, by where the parent first mentions them
  auto first_use = [&](const Term& t) {
    for (std::size_t i = 0; i < pc.size(); ++i)
      if (pc[i].lhs == t || pc[i].rhs == t) return i;
    return pc.size();
  };
  for (auto& [a, b] : v.merged)
    if (first_use(b) < first_use(a)) std::swap(a, b);
  std::stable_sort(v.merged.begin(), v.merged.end(),
                   [&](const auto& x, const auto& y) { return first_use(x.first) < first_use(y.first); });
  v.outcome = IsAVerdict::Outcome::Restricted;
  for (const auto& [a, b] : v.merged) {
    involve(a);
    involve(b);
  }
  for (const auto& body : child.bodies)
    if (body.is_link()) {
      auto c = cite(child, body);
      if (std::find(v.involved.begin(), v.involved.end(), c) == v.involved.end()) v.involved.push_back(c);
    }
  return v;
}

/// Treats every unconditional give body of `base` as non-overridable and
/// reports each one that `child`'s constraints narrow or contradict. Both
/// bundles share one parameter scope, as an extension shares its parent's.
inline std::vector<Finding> check_override_policy(const Bundle& base, const Bundle& child) {
  const auto bc = detail::give_constraints(base, "");
  auto joint = bc;
  const auto cc = detail::give_constraints(child, "");
  joint.insert(joint.end(), cc.begin(), cc.end());

  const auto vocab = detail::vocabulary(bc);
  std::set<Term> in_vocab(vocab.begin(), vocab.end());
  auto keep = [&](const Term& t) { return in_vocab.count(t) != 0; };
  const auto base_closure = closure(bc, vocab);
  const auto joint_closure = closure(joint, vocab);
  const auto base_view = base_closure.restricted(keep);
  const auto joint_view = joint_closure.restricted(keep);

  auto has_constant = [](const TermPartition& p, const Term& t) {
    auto cls = p.class_of(t);
    if (!cls) return t.is_constant();
    const auto& m = p.members(*cls);
    return std::any_of(m.begin(), m.end(), [](const Term& x) { return x.is_constant(); });
  };
  auto clashing = [&](const Term& t) {
    auto cls = joint_closure.class_of(t);
    if (!cls) return false;
    const auto& m = joint_closure.members(*cls);
    return std::count_if(m.begin(), m.end(), [](const Term& x) { return x.is_constant(); }) >= 2;
  };

  std::vector<Finding> out;
  for (const auto& body : base.bodies) {
    if (body.polarity != Polarity::Give || body.conditional()) continue;
    const auto terms = detail::vocabulary(body.constraints);
    std::string problem;
    for (const auto& t : terms) {
      if (clashing(t)) {
        problem = "contradicted: " + to_string(t) + " is bound to conflicting constants";
        break;
      }
      for (const auto& [a, b] : joint_view.merges_beyond(base_view))
        if (a == t || b == t) {
          problem = "narrowed: " + to_string(a) + " ~ " + to_string(b);
          break;
        }
      if (problem.empty() && !has_constant(base_closure, t) && has_constant(joint_closure, t))
        problem = "narrowed: " + to_string(t) + " fixed to " + to_string(joint_closure.representative(t));
      if (!problem.empty()) break;
    }
    if (problem.empty()) continue;
    std::vector<std::string> cited{cite(base, body)};
    for (const auto& cb : child.bodies)
      if (cb.polarity == Polarity::Give && !cb.conditional() && !cb.constraints.empty() &&
          std::find(base.bodies.begin(), base.bodies.end(), cb) == base.bodies.end())
        cited.push_back(cite(child, cb));
    out.push_back({FindingSeverity::PolicyViolation, problem.rfind("contradicted", 0) == 0 ? "O-CONTRADICTED" : "O-NARROWED",
                   "'" + child.name + "' breaks non-overridable '" + base.name + "' promise " + describe(body) + ": " +
                       problem,
                   std::move(cited)});
  }
  return out;
}

}  // namespace pml::analysis
