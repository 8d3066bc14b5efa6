#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pml/analysis/finding.hpp"
#include "pml/analysis/signature.hpp"
#include "pml/constraints.hpp"
#include "pml/core.hpp"

namespace pml::analysis {

namespace detail {

struct ScopedPromise {
  const Promise* promise;
  PromiseBody body;  // parameters qualified by scope
};

inline std::vector<Term> non_parameter_terms(const std::vector<const ScopedPromise*>& ps) {
  std::set<Term> out;
  for (const auto* p : ps)
    for (const auto& c : p->body.constraints)
      for (const auto* t : {&c.lhs, &c.rhs})
        if (!t->is_parameter()) out.insert(*t);
  return {out.begin(), out.end()};
}

inline Constraints constraints_of(const std::vector<const ScopedPromise*>& ps) {
  Constraints out;
  for (const auto* p : ps) out.insert(out.end(), p->body.constraints.begin(), p->body.constraints.end());
  return out;
}

inline bool touches(const ScopedPromise& p, const TermPartition& part, const std::vector<Term>& cls_members) {
  for (const auto& c : p.body.constraints)
    for (const auto& m : cls_members)
      if (part.same_class(c.lhs, m) || part.same_class(c.rhs, m)) return true;
  return false;
}

/// Checks one set of jointly promised give bodies on a channel.
inline void check_context(const std::vector<const ScopedPromise*>& context, const std::string& label,
                          std::vector<Finding>& out) {
  const auto all = constraints_of(context);
  const auto joint = closure(all);

  if (auto clash = joint.clash()) {
    Finding f{FindingSeverity::Inconsistent, "C-INCONSISTENT",
              label + ": " + to_string(clash->first) + " and " + to_string(clash->second) +
                  " are promised to be equal",
              {}};
    const auto& members = joint.members(*joint.class_of(clash->first));
    for (const auto* p : context)
      if (touches(*p, joint, {members.front()})) f.promises.push_back(describe(*p->promise));
    out.push_back(std::move(f));
    return;
  }

  // parameter scopes: promises with parameters grouped by scope; parameter-free
  // promises hold in every scope
  std::vector<const ScopedPromise*> shared;
  std::map<std::string, std::vector<const ScopedPromise*>> scopes;
  for (const auto* p : context) {
    if (has_parameters(p->promise->body))
      scopes[p->promise->scope].push_back(p);
    else
      shared.push_back(p);
  }
  for (const auto& [scope, members] : scopes) {
    auto own = members;
    own.insert(own.end(), shared.begin(), shared.end());
    const auto vocab = non_parameter_terms(own);
    const std::set<Term> in_vocab(vocab.begin(), vocab.end());
    auto keep = [&](const Term& t) { return in_vocab.count(t) != 0; };
    const auto merged = joint.restricted(keep).merges_beyond(closure(constraints_of(own), vocab).restricted(keep));
    if (merged.empty()) continue;

    std::string pairs;
    for (const auto& [a, b] : merged) pairs += (pairs.empty() ? "" : ", ") + to_string(a) + " ~ " + to_string(b);
    Finding f{FindingSeverity::Restricted, "C-RESTRICTED",
              label + ": promises from independent scopes force " + pairs + ", which '" + scope + "' leaves free",
              {}};
    std::vector<Term> heads;
    for (const auto& [a, b] : merged) heads.push_back(a);
    for (const auto* p : context)
      if (touches(*p, joint, heads)) {
        auto d = describe(*p->promise);
        if (std::find(f.promises.begin(), f.promises.end(), d) == f.promises.end()) f.promises.push_back(d);
      }
    out.push_back(std::move(f));
  }
}

}  // namespace detail

/// Broken promises on each promiser->promisee channel:
///
///  - Inconsistent: the unconditional give bodies, alone or with one
///    condition group, bind one class to distinct constants.
///  - Restricted: bodies from different parameter scopes force equalities
///    a scope's own promises leave open.
///  - PolicyViolation (C-GUARD-BYPASS): a body promised under a condition is
///    also promised unconditionally, so the guard no longer restricts it.
inline std::vector<Finding> detect_conflicts(const PromiseGraph& g) {
  std::map<std::pair<std::string, std::string>, std::vector<detail::ScopedPromise>> channels;
  for (const auto& p : g.promises()) channels[{p.promiser, p.promisee}].push_back({&p, scoped_body(p)});

  std::vector<Finding> out;
  for (const auto& [ch, promises] : channels) {
    const std::string label = ch.first + " -> " + ch.second;

    std::vector<const detail::ScopedPromise*> unconditional;
    std::map<std::string, std::vector<const detail::ScopedPromise*>> groups;
    for (const auto& sp : promises) {
      if (sp.promise->body.polarity != Polarity::Give) continue;
      if (sp.promise->body.conditional())
        groups[to_string(normalized(sp.promise->body.condition))].push_back(&sp);
      else
        unconditional.push_back(&sp);
    }
    detail::check_context(unconditional, label, out);
    for (const auto& [cond, members] : groups) {
      if (!satisfiable(members.front()->promise->body.condition)) continue;
      auto context = unconditional;
      context.insert(context.end(), members.begin(), members.end());
      detail::check_context(context, label + " if " + cond, out);
    }

    std::map<std::pair<Polarity, std::string>, std::vector<const Promise*>> by_type;
    for (const auto& sp : promises)
      if (!sp.promise->body.is_link()) by_type[{sp.promise->body.polarity, sp.promise->body.type}].push_back(sp.promise);
    for (const auto& [key, ps] : by_type) {
      auto guarded = std::find_if(ps.begin(), ps.end(), [](const Promise* p) { return p->body.conditional(); });
      auto open = std::find_if(ps.begin(), ps.end(), [](const Promise* p) { return !p->body.conditional(); });
      if (guarded == ps.end() || open == ps.end()) continue;
      out.push_back({FindingSeverity::PolicyViolation, "C-GUARD-BYPASS",
                     label + ": '" + describe((*open)->body) + "' is promised unconditionally, bypassing the guard '" +
                         to_string((*guarded)->body.condition) + "'",
                     {describe(**open), describe(**guarded)}});
    }
  }

  // the same breakage can surface in several condition groups
  std::vector<Finding> unique;
  for (auto& f : out)
    if (std::none_of(unique.begin(), unique.end(), [&](const Finding& u) {
          return u.code == f.code && u.promises == f.promises;
        }))
      unique.push_back(std::move(f));
  return unique;
}

}  // namespace pml::analysis
