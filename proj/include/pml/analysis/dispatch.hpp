#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pml/analysis/finding.hpp"
#include "pml/constraints.hpp"
#include "pml/core.hpp"

namespace pml::analysis {

namespace detail {

inline bool condition_mentions(const Condition& c, const std::string& type) {
  for (const auto& lit : c.literals) {
    if (const auto* f = std::get_if<FlagLiteral>(&lit)) {
      if (f->flag == type) return true;
    } else {
      const auto& cmp = std::get<CompareLiteral>(lit);
      if (cmp.lhs == Term::attr(type) || cmp.rhs == Term::attr(type)) return true;
    }
  }
  return false;
}

}  // namespace detail

/// Validates the switch construction that selects between bundles:
///
///   receiver gives the discriminator to sender,
///   sender uses it,
///   and sender's promises conditioned on it are pairwise exclusive.
inline CheckReport check_dispatch_pattern(const PromiseGraph& g, const std::string& sender,
                                          const std::string& receiver, const std::string& discriminator) {
  if (!g.find_agent(sender)) throw std::invalid_argument("unknown agent '" + sender + "'");
  if (!g.find_agent(receiver)) throw std::invalid_argument("unknown agent '" + receiver + "'");

  const auto forward = g.promises_between(sender, receiver);
  const auto backward = g.promises_between(receiver, sender);
  auto promised = [&](const std::vector<Promise>& ps, Polarity pol) {
    return std::any_of(ps.begin(), ps.end(), [&](const Promise& p) {
      return p.body.polarity == pol && p.body.type == discriminator;
    });
  };

  // one branch per (bundle attachment or standalone promise, condition)
  struct Branch {
    std::string origin;
    Condition condition;
    std::vector<std::string> promises;
  };
  std::map<std::pair<std::string, std::string>, Branch> branches;
  for (const auto& p : forward)
    if (p.body.conditional() && detail::condition_mentions(p.body.condition, discriminator)) {
      auto c = normalized(p.body.condition);
      const auto origin = p.bundle ? "bundle " + *p.bundle + "@" + p.scope : describe(p);
      auto& b = branches[{origin, to_string(c)}];
      b.origin = origin;
      b.condition = c;
      b.promises.push_back(describe(p));
    }
  std::vector<std::string> all_branches;
  for (const auto& [key, b] : branches) all_branches.insert(all_branches.end(), b.promises.begin(), b.promises.end());
  const std::vector<std::string> channel{sender + " -> " + receiver + " (no promises on '" + discriminator + "')"};
  const auto& cited = all_branches.empty() ? channel : all_branches;

  CheckReport report;
  if (!promised(backward, Polarity::Give))
    report.findings.push_back({FindingSeverity::PatternError, "P-DISPATCH-MISSING-GIVE",
                               receiver + " never gives '" + discriminator + "' to " + sender, cited});
  if (!promised(forward, Polarity::Use))
    report.findings.push_back({FindingSeverity::PatternError, "P-DISPATCH-MISSING-USAGE",
                               sender + " never promises to use '" + discriminator + "' from " + receiver, cited});
  if (branches.empty())
    report.findings.push_back({FindingSeverity::PatternError, "P-DISPATCH-NO-BRANCHES",
                               sender + " makes no promise to " + receiver + " conditional on '" + discriminator + "'",
                               cited});

  std::vector<const Branch*> list;
  for (const auto& [key, b] : branches) list.push_back(&b);
  for (std::size_t i = 0; i < list.size(); ++i)
    for (std::size_t j = i + 1; j < list.size(); ++j) {
      if (list[i]->origin == list[j]->origin) continue;
      auto v = mutually_exclusive(list[i]->condition, list[j]->condition);
      if (v.exclusive) continue;
      std::string witness;
      for (const auto& w : *v.witness) witness += (witness.empty() ? "" : ", ") + w;
      Finding f{FindingSeverity::PatternError, "P-DISPATCH-NON-EXCLUSIVE",
                "branches '" + to_string(list[i]->condition) + "' and '" + to_string(list[j]->condition) +
                    "' can both apply (e.g. " + witness + ")",
                list[i]->promises};
      f.promises.insert(f.promises.end(), list[j]->promises.begin(), list[j]->promises.end());
      report.findings.push_back(std::move(f));
    }
  report.ok = report.findings.empty();
  return report;
}

}  // namespace pml::analysis
