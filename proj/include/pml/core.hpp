#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pml/term.hpp"

namespace pml {

/// Raised when declarations cannot form a valid promise graph.
class ModelError : public std::runtime_error {
 public:
  ModelError(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

enum class TypeKind { Numeric, String, Flag, Service };

inline const char* to_string(TypeKind k) {
  switch (k) {
    case TypeKind::Numeric: return "num";
    case TypeKind::String: return "str";
    case TypeKind::Flag: return "flag";
    case TypeKind::Service: return "service";
  }
  return "?";
}

struct PromiseTypeDecl {
  std::string name;
  std::vector<std::string> path;
  TypeKind kind = TypeKind::Service;

  friend bool operator==(const PromiseTypeDecl&, const PromiseTypeDecl&) = default;
};

/// Structured member names map onto one flat promise-type name.
inline std::string flatten_type(std::span<const std::string> path) {
  if (path.empty()) throw std::invalid_argument("type path must not be empty");
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += '.';
    out += path[i];
  }
  return out;
}

class TypeRegistry {
 public:
  /// Registers `path` and returns its flat name. Distinct paths that flatten
  /// to the same name collide.
  const std::string& add(std::vector<std::string> path, TypeKind kind) {
    auto name = flatten_type(path);
    if (auto it = decls_.find(name); it != decls_.end()) {
      if (it->second.path == path)
        throw ModelError("duplicate-type", "type '" + name + "' declared twice");
      throw ModelError("type-collision", "type path '" + name + "' collides with an existing type");
    }
    auto [it, _] = decls_.emplace(name, PromiseTypeDecl{name, std::move(path), kind});
    return it->first;
  }

  const std::string& add(const std::string& flat, TypeKind kind) {
    return add(std::vector<std::string>{flat}, kind);
  }

  const PromiseTypeDecl* find(const std::string& name) const {
    auto it = decls_.find(name);
    return it == decls_.end() ? nullptr : &it->second;
  }

  bool contains(const std::string& name) const { return decls_.count(name) != 0; }
  const std::map<std::string, PromiseTypeDecl>& decls() const { return decls_; }

  friend bool operator==(const TypeRegistry&, const TypeRegistry&) = default;

 private:
  std::map<std::string, PromiseTypeDecl> decls_;
};

enum class Polarity { Give, Use };

/// One promise body: a type plus constraints selecting a subset of its
/// behaviours, optionally conditional. An empty type marks a pure link body
/// such as `$w = $h`.
struct PromiseBody {
  Polarity polarity = Polarity::Give;
  std::string type;
  Constraints constraints;
  Condition condition;

  bool is_link() const { return type.empty(); }
  bool conditional() const { return !condition.empty(); }

  friend auto operator<=>(const PromiseBody&, const PromiseBody&) = default;
  friend bool operator==(const PromiseBody&, const PromiseBody&) = default;
};

inline bool has_parameters(const PromiseBody& b) {
  auto param = [](const Term& t) { return t.is_parameter(); };
  for (const auto& c : b.constraints)
    if (param(c.lhs) || param(c.rhs)) return true;
  for (const auto& lit : b.condition.literals)
    if (const auto* cmp = std::get_if<CompareLiteral>(&lit))
      if (param(cmp->lhs) || param(cmp->rhs)) return true;
  return false;
}

inline std::string describe(const PromiseBody& b) {
  std::string out = b.polarity == Polarity::Give ? "give " : "use ";
  const bool simple_value = b.constraints.size() == 1 && b.constraints[0].lhs == Term::attr(b.type);
  if (b.is_link() && b.constraints.size() == 1) {
    out += to_string(b.constraints[0].lhs) + " = " + to_string(b.constraints[0].rhs);
  } else if (simple_value) {
    out += b.type + " = " + to_string(b.constraints[0].rhs);
  } else {
    out += b.is_link() ? "(link)" : b.type;
    if (!b.constraints.empty()) {
      out += " {";
      for (std::size_t i = 0; i < b.constraints.size(); ++i)
        out += (i ? ", " : "") + to_string(b.constraints[i].lhs) + " = " + to_string(b.constraints[i].rhs);
      out += "}";
    }
  }
  if (b.conditional()) out += " if " + to_string(b.condition);
  return out;
}

struct Agent {
  std::string name;
  /// Knowledge only this agent's own condition evaluation may consult.
  std::map<std::string, Term> private_attrs;

  friend bool operator==(const Agent&, const Agent&) = default;
};

/// promiser --body--> promisee. `scope` names the parameter scope the body's
/// parameters live in; `bundle` records which bundle attachment produced it.
struct Promise {
  std::string promiser;
  std::string promisee;
  PromiseBody body;
  std::string scope;
  std::optional<std::string> bundle;

  friend auto operator<=>(const Promise&, const Promise&) = default;
  friend bool operator==(const Promise&, const Promise&) = default;
};

inline std::string describe(const Promise& p) {
  return p.promiser + " -> " + p.promisee + " : " + describe(p.body);
}

struct Bundle {
  std::string name;
  std::vector<PromiseBody> bodies;
  std::optional<std::string> parent;

  friend bool operator==(const Bundle&, const Bundle&) = default;
};

/// An agent's subjective worth of a promise. Stored, not analysed.
struct Valuation {
  std::string valuer;
  Promise promise;
  double worth = 0.0;

  friend auto operator<=>(const Valuation&, const Valuation&) = default;
  friend bool operator==(const Valuation&, const Valuation&) = default;
};

class PromiseGraph;

PromiseGraph build_graph(std::vector<Agent> agents, TypeRegistry types, std::vector<Bundle> bundles,
                         std::vector<Promise> promises, std::vector<Valuation> valuations = {});

/// Validated, immutable promise graph. Agents, bundles and promises are kept
/// in sorted order so equal declaration sets compare equal.
class PromiseGraph {
 public:
  PromiseGraph() = default;

  const std::vector<Agent>& agents() const { return agents_; }
  const TypeRegistry& types() const { return types_; }
  const std::map<std::string, Bundle>& bundles() const { return bundles_; }
  const std::vector<Promise>& promises() const { return promises_; }
  const std::vector<Valuation>& valuations() const { return valuations_; }

  const Agent* find_agent(const std::string& name) const {
    auto it = std::lower_bound(agents_.begin(), agents_.end(), name,
                               [](const Agent& a, const std::string& n) { return a.name < n; });
    return it != agents_.end() && it->name == name ? &*it : nullptr;
  }

  /// Flattened bundle by name.
  const Bundle* find_bundle(const std::string& name) const {
    auto it = bundles_.find(name);
    return it == bundles_.end() ? nullptr : &it->second;
  }

  std::vector<Promise> promises_between(const std::string& promiser, const std::string& promisee) const {
    std::vector<Promise> out;
    for (const auto& p : promises_)
      if (p.promiser == promiser && p.promisee == promisee) out.push_back(p);
    return out;
  }

  friend bool operator==(const PromiseGraph&, const PromiseGraph&) = default;

 private:
  friend PromiseGraph build_graph(std::vector<Agent>, TypeRegistry, std::vector<Bundle>, std::vector<Promise>,
                                  std::vector<Valuation>);

  std::vector<Agent> agents_;
  TypeRegistry types_;
  std::map<std::string, Bundle> bundles_;
  std::vector<Promise> promises_;
  std::vector<Valuation> valuations_;
};

namespace detail {

inline void check_terms(const TypeRegistry& types, const PromiseBody& body, const std::string& where) {
  auto check = [&](const Term& t) {
    if (t.is_attribute() && !types.contains(t.text))
      throw ModelError("dangling-reference", where + ": unknown promise type '" + t.text + "'");
  };
  if (!body.is_link() && !types.contains(body.type))
    throw ModelError("dangling-reference", where + ": unknown promise type '" + body.type + "'");
  if (body.polarity == Polarity::Use && !body.constraints.empty())
    throw ModelError("use-constraint", where + ": a use body carries no constraints of its own");
  for (const auto& c : body.constraints) {
    check(c.lhs);
    check(c.rhs);
  }
  for (const auto& lit : body.condition.literals) {
    if (const auto* cmp = std::get_if<CompareLiteral>(&lit)) {
      check(cmp->lhs);
      check(cmp->rhs);
    } else {
      const auto& flag = std::get<FlagLiteral>(lit).flag;
      const auto* decl = types.find(flag);
      if (!decl || decl->kind != TypeKind::Flag)
        throw ModelError("dangling-reference", where + ": unknown flag '" + flag + "'");
    }
  }
}

inline const std::vector<PromiseBody>& flatten_bundle(const std::string& name,
                                                      const std::map<std::string, Bundle>& declared,
                                                      std::map<std::string, std::vector<PromiseBody>>& done,
                                                      std::vector<std::string>& stack) {
  if (auto it = done.find(name); it != done.end()) return it->second;
  if (std::find(stack.begin(), stack.end(), name) != stack.end()) {
    std::string cycle;
    for (const auto& s : stack) cycle += s + " -> ";
    throw ModelError("bundle-cycle", "cyclic bundle parentage: " + cycle + name);
  }
  const auto& bundle = declared.at(name);
  std::vector<PromiseBody> bodies;
  if (bundle.parent) {
    if (!declared.count(*bundle.parent))
      throw ModelError("dangling-reference", "bundle '" + name + "' extends unknown bundle '" + *bundle.parent + "'");
    stack.push_back(name);
    bodies = flatten_bundle(*bundle.parent, declared, done, stack);
    stack.pop_back();
  }
  for (const auto& b : bundle.bodies)
    if (std::find(bodies.begin(), bodies.end(), b) == bodies.end()) bodies.push_back(b);
  return done.emplace(name, std::move(bodies)).first->second;
}

}  // namespace detail

inline PromiseGraph build_graph(std::vector<Agent> agents, TypeRegistry types, std::vector<Bundle> bundles,
                                std::vector<Promise> promises, std::vector<Valuation> valuations) {
  PromiseGraph g;

  std::sort(agents.begin(), agents.end(), [](const Agent& a, const Agent& b) { return a.name < b.name; });
  for (std::size_t i = 1; i < agents.size(); ++i)
    if (agents[i].name == agents[i - 1].name)
      throw ModelError("duplicate-agent", "agent '" + agents[i].name + "' declared twice");
  for (const auto& a : agents)
    for (const auto& [attr, value] : a.private_attrs)
      if (!value.is_constant())
        throw ModelError("invalid-attribute", "private attribute '" + attr + "' of '" + a.name + "' is not a constant");

  std::map<std::string, Bundle> declared;
  for (auto& b : bundles) {
    for (std::size_t i = 0; i < b.bodies.size(); ++i)
      detail::check_terms(types, b.bodies[i], "bundle '" + b.name + "'");
    auto name = b.name;
    if (!declared.emplace(name, std::move(b)).second)
      throw ModelError("duplicate-bundle", "bundle '" + name + "' declared twice");
  }
  std::map<std::string, std::vector<PromiseBody>> flat;
  for (const auto& [name, b] : declared) {
    std::vector<std::string> stack;
    detail::flatten_bundle(name, declared, flat, stack);
  }
  for (auto& [name, b] : declared) {
    b.bodies = flat.at(name);
    g.bundles_.emplace(name, b);
  }

  g.agents_ = std::move(agents);
  auto known_agent = [&](const std::string& n) { return g.find_agent(n) != nullptr; };

  for (auto& p : promises) {
    if (!known_agent(p.promiser))
      throw ModelError("dangling-reference", "promise names unknown agent '" + p.promiser + "'");
    if (!known_agent(p.promisee))
      throw ModelError("dangling-reference", "promise names unknown agent '" + p.promisee + "'");
    if (p.bundle && !declared.count(*p.bundle))
      throw ModelError("dangling-reference", "promise names unknown bundle '" + *p.bundle + "'");
    detail::check_terms(types, p.body, describe(p));
  }
  std::sort(promises.begin(), promises.end());
  // parameter-free bodies mean the same thing in every scope
  auto same = [](const Promise& a, const Promise& b) {
    return a.promiser == b.promiser && a.promisee == b.promisee && a.body == b.body &&
           (a.scope == b.scope || !has_parameters(a.body));
  };
  promises.erase(std::unique(promises.begin(), promises.end(), same), promises.end());
  g.promises_ = std::move(promises);

  for (const auto& v : valuations) {
    if (v.valuer != v.promise.promiser && v.valuer != v.promise.promisee)
      throw ModelError("invalid-valuation", "valuer '" + v.valuer + "' is not party to " + describe(v.promise));
    auto it = std::find_if(g.promises_.begin(), g.promises_.end(), [&](const Promise& p) { return same(p, v.promise); });
    if (it == g.promises_.end())
      throw ModelError("dangling-reference", "valuation refers to unknown promise " + describe(v.promise));
  }
  std::sort(valuations.begin(), valuations.end());
  g.valuations_ = std::move(valuations);

  g.types_ = std::move(types);
  return g;
}

struct AutonomyFinding {
  Promise promise;
  std::string literal;
  std::vector<std::string> unpromised;
  std::string message;
};

/// A promiser may only condition on what its promisee promises to give it,
/// or on its own private knowledge.
inline std::vector<AutonomyFinding> validate_autonomy(const PromiseGraph& g) {
  std::vector<AutonomyFinding> out;
  for (const auto& p : g.promises()) {
    if (!p.body.conditional()) continue;
    std::set<std::string> offered;
    for (const auto& q : g.promises_between(p.promisee, p.promiser))
      if (q.body.polarity == Polarity::Give && !q.body.is_link()) offered.insert(q.body.type);
    const auto* self = g.find_agent(p.promiser);

    for (const auto& lit : p.body.condition.literals) {
      std::vector<std::string> missing;
      auto note = [&](const std::string& type) {
        if (!offered.count(type) && !self->private_attrs.count(type) &&
            std::find(missing.begin(), missing.end(), type) == missing.end())
          missing.push_back(type);
      };
      if (const auto* cmp = std::get_if<CompareLiteral>(&lit)) {
        if (cmp->lhs.is_attribute()) note(cmp->lhs.text);
        if (cmp->rhs.is_attribute()) note(cmp->rhs.text);
      } else {
        note(std::get<FlagLiteral>(lit).flag);
      }
      if (missing.empty()) continue;
      std::string names;
      for (const auto& m : missing) names += (names.empty() ? "'" : ", '") + m + "'";
      out.push_back({p, to_string(lit), missing,
                     p.promiser + " conditions on " + names + " which " + p.promisee + " never promises to it"});
    }
  }
  return out;
}

}  // namespace pml
