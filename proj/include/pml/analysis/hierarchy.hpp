#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "pml/analysis/roles.hpp"
#include "pml/constraints.hpp"
#include "pml/core.hpp"

namespace pml::analysis {

struct SubtypeNode {
  Condition condition;
  std::string key;
  std::vector<PromiseBody> bodies;  // condition stripped
};

struct RoleClass {
  Role role;
  std::vector<PromiseBody> base;
  std::vector<SubtypeNode> subtypes;
  std::vector<std::string> warnings;
};

struct ClassHierarchy {
  std::vector<RoleClass> classes;
};

/// Per role: unconditional outgoing bodies form the base class; bodies
/// grouped by (literal-order-normalized) condition become subtypes when that
/// condition excludes every other group's. Overlapping groups stay in the base.
inline ClassHierarchy derive_class_hierarchy(const PromiseGraph& g) {
  ClassHierarchy h;
  for (auto& role : discover_roles(g)) {
    RoleClass rc;
    rc.role = role;
    std::map<std::string, SubtypeNode> groups;
    for (const auto& p : g.promises()) {
      if (std::find(role.members.begin(), role.members.end(), p.promiser) == role.members.end()) continue;
      if (!p.body.conditional()) {
        if (std::find(rc.base.begin(), rc.base.end(), p.body) == rc.base.end()) rc.base.push_back(p.body);
        continue;
      }
      auto cond = normalized(p.body.condition);
      auto key = to_string(cond);
      auto& node = groups[key];
      node.condition = cond;
      node.key = key;
      auto stripped = p.body;
      stripped.condition = {};
      if (std::find(node.bodies.begin(), node.bodies.end(), stripped) == node.bodies.end())
        node.bodies.push_back(std::move(stripped));
    }

    std::vector<SubtypeNode*> nodes;
    for (auto& [key, node] : groups) nodes.push_back(&node);
    std::vector<bool> overlapping(nodes.size(), false);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!satisfiable(nodes[i]->condition)) {
        rc.warnings.push_back("condition '" + nodes[i]->key + "' can never hold");
        overlapping[i] = true;
      }
      for (std::size_t j = i + 1; j < nodes.size(); ++j)
        if (!mutually_exclusive(nodes[i]->condition, nodes[j]->condition).exclusive) {
          overlapping[i] = overlapping[j] = true;
          rc.warnings.push_back("conditions '" + nodes[i]->key + "' and '" + nodes[j]->key +
                                "' overlap; their bodies stay in the base class");
        }
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!overlapping[i]) {
        rc.subtypes.push_back(std::move(*nodes[i]));
        continue;
      }
      for (auto b : nodes[i]->bodies) {
        b.condition = nodes[i]->condition;
        rc.base.push_back(std::move(b));
      }
    }
    std::sort(rc.base.begin(), rc.base.end());
    for (auto& s : rc.subtypes) std::sort(s.bodies.begin(), s.bodies.end());
    h.classes.push_back(std::move(rc));
  }
  return h;
}

}  // namespace pml::analysis
