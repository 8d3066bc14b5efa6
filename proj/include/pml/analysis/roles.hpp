#pragma once

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "pml/core.hpp"

namespace pml::analysis {

enum class Direction { Out, In };

/// The promise types an agent takes part in, by direction and polarity.
/// Constraints are deliberately ignored: equal types with different
/// constraints play the same role.
struct RoleSignature {
  std::set<std::tuple<Direction, Polarity, std::string>> entries;

  friend auto operator<=>(const RoleSignature&, const RoleSignature&) = default;
  friend bool operator==(const RoleSignature&, const RoleSignature&) = default;
};

inline std::string to_string(const RoleSignature& s) {
  std::string out;
  for (const auto& [dir, pol, type] : s.entries) {
    if (!out.empty()) out += ", ";
    out += dir == Direction::Out ? "out " : "in ";
    out += pol == Polarity::Give ? "+" : "-";
    out += type.empty() ? "(link)" : type;
  }
  return out;
}

struct Role {
  RoleSignature signature;
  std::vector<std::string> members;
  std::string label;
};

inline RoleSignature role_signature(const PromiseGraph& g, const std::string& agent) {
  RoleSignature s;
  for (const auto& p : g.promises()) {
    if (p.promiser == agent) s.entries.emplace(Direction::Out, p.body.polarity, p.body.type);
    if (p.promisee == agent) s.entries.emplace(Direction::In, p.body.polarity, p.body.type);
  }
  return s;
}

namespace detail {

inline std::string role_label(const RoleSignature& s) {
  auto pick = [&](Direction d, Polarity pol) {
    std::vector<std::string> types;
    for (const auto& [dir, p, t] : s.entries)
      if (dir == d && p == pol && !t.empty()) types.push_back(t);
    return types;
  };
  std::string prefix = "gives:";
  auto types = pick(Direction::Out, Polarity::Give);
  if (types.empty()) {
    prefix = "uses:";
    types = pick(Direction::Out, Polarity::Use);
  }
  if (types.empty()) {
    prefix = "receives:";
    types = pick(Direction::In, Polarity::Give);
  }
  if (types.empty()) return "role";
  std::string out = prefix;
  for (std::size_t i = 0; i < types.size() && i < 3; ++i) out += (i ? "+" : "") + types[i];
  if (types.size() > 3) out += "+...";
  return out;
}

}  // namespace detail

/// Partitions every agent incident to at least one promise by role
/// signature. Roles are ordered by signature; labels are unique.
inline std::vector<Role> discover_roles(const PromiseGraph& g) {
  std::map<RoleSignature, std::vector<std::string>> groups;
  for (const auto& a : g.agents()) {
    auto s = role_signature(g, a.name);
    if (!s.entries.empty()) groups[s].push_back(a.name);
  }
  std::vector<Role> roles;
  std::map<std::string, int> seen;
  for (auto& [sig, members] : groups) {
    auto label = detail::role_label(sig);
    if (int n = ++seen[label]; n > 1) label += "#" + std::to_string(n);
    roles.push_back({sig, std::move(members), std::move(label)});
  }
  return roles;
}

}  // namespace pml::analysis
