#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "pml/core.hpp"

namespace pml::analysis {

/// Canonical, parameter-renaming-invariant form of a collection of bodies:
/// the sorted rendering of every body with parameters replaced by indices.
struct BundleSignature {
  std::vector<std::string> bodies;

  bool empty() const { return bodies.empty(); }

  friend auto operator<=>(const BundleSignature&, const BundleSignature&) = default;
  friend bool operator==(const BundleSignature&, const BundleSignature&) = default;
};

namespace detail {

using ParamNames = std::map<std::string, std::string>;

inline std::string render(const Term& t, const ParamNames& names) {
  switch (t.kind) {
    case Term::Kind::Parameter: return "#" + names.at(t.text);
    case Term::Kind::Attribute: return "a:" + t.text;
    case Term::Kind::NamedConst: return "n:" + t.text;
    case Term::Kind::NumConst: return "i:" + t.text;
    case Term::Kind::StrConst: return "s:" + quote_string(t.text);
  }
  return "?";
}

inline std::string render_pair(const Term& a, const Term& b, const char* op, const ParamNames& names) {
  auto l = render(a, names), r = render(b, names);
  if (r < l) std::swap(l, r);
  return l + op + r;
}

inline std::string render(const PromiseBody& b, const ParamNames& names) {
  std::vector<std::string> cs, lits;
  for (const auto& c : b.constraints) cs.push_back(render_pair(c.lhs, c.rhs, "=", names));
  for (const auto& lit : b.condition.literals) {
    if (const auto* cmp = std::get_if<CompareLiteral>(&lit))
      lits.push_back(render_pair(cmp->lhs, cmp->rhs, cmp->op == CompareOp::Eq ? "==" : "!=", names));
    else
      lits.push_back((std::get<FlagLiteral>(lit).negated ? "!" : "") + std::get<FlagLiteral>(lit).flag);
  }
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  std::string out = (b.polarity == Polarity::Give ? "+" : "-") + b.type + "{";
  for (std::size_t i = 0; i < cs.size(); ++i) out += (i ? "," : "") + cs[i];
  out += "}";
  if (!lits.empty()) {
    out += "/";
    for (std::size_t i = 0; i < lits.size(); ++i) out += (i ? "&" : "") + lits[i];
  }
  return out;
}

inline std::vector<std::string> parameters(const std::vector<PromiseBody>& bodies) {
  std::set<std::string> out;
  auto note = [&](const Term& t) {
    if (t.is_parameter()) out.insert(t.text);
  };
  for (const auto& b : bodies) {
    for (const auto& c : b.constraints) {
      note(c.lhs);
      note(c.rhs);
    }
    for (const auto& lit : b.condition.literals)
      if (const auto* cmp = std::get_if<CompareLiteral>(&lit)) {
        note(cmp->lhs);
        note(cmp->rhs);
      }
  }
  return {out.begin(), out.end()};
}

inline std::vector<std::string> render_all(const std::vector<PromiseBody>& bodies, const ParamNames& names) {
  std::vector<std::string> out;
  out.reserve(bodies.size());
  for (const auto& b : bodies) out.push_back(render(b, names));
  std::sort(out.begin(), out.end());
  return out;
}

constexpr std::size_t kExhaustiveParamLimit = 7;

}  // namespace detail

/// Minimum rendering over every bijection from parameters to indices, so
/// bundles equal up to parameter renaming get equal signatures. Beyond
/// kExhaustiveParamLimit parameters, indices follow first use after sorting
/// bodies by their individual canonical form.
inline BundleSignature signature_of(const std::vector<PromiseBody>& bodies) {
  const auto params = detail::parameters(bodies);
  detail::ParamNames names;
  if (params.size() <= detail::kExhaustiveParamLimit) {
    std::vector<std::size_t> perm(params.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::string> best;
    bool first = true;
    do {
      for (std::size_t i = 0; i < params.size(); ++i) names[params[i]] = std::to_string(perm[i]);
      auto r = detail::render_all(bodies, names);
      if (first || r < best) best = std::move(r);
      first = false;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {best};
  }

  std::vector<std::pair<std::string, const PromiseBody*>> keyed;
  for (const auto& b : bodies) keyed.emplace_back(signature_of({b}).bodies.front(), &b);
  std::sort(keyed.begin(), keyed.end());
  auto assign = [&](const Term& t) {
    if (t.is_parameter() && !names.count(t.text)) names[t.text] = std::to_string(names.size());
  };
  for (const auto& [key, b] : keyed)
    for (const auto& c : b->constraints) {
      assign(c.lhs);
      assign(c.rhs);
    }
  for (const auto& p : params) assign(Term::param(p));
  return {detail::render_all(bodies, names)};
}

inline BundleSignature bundle_signature(const Bundle& b) { return signature_of(b.bodies); }

/// Canonical form of a single body; used for body-level set comparisons.
inline std::string body_key(const PromiseBody& b) { return signature_of({b}).bodies.front(); }

/// Renames every parameter of `p` into its scope so bodies from different
/// scopes never share parameters.
inline PromiseBody scoped_body(const Promise& p) {
  auto q = [&](Term t) {
    if (t.is_parameter()) t.text = p.scope + "|" + t.text;
    return t;
  };
  PromiseBody b = p.body;
  for (auto& c : b.constraints) {
    c.lhs = q(c.lhs);
    c.rhs = q(c.rhs);
  }
  for (auto& lit : b.condition.literals)
    if (auto* cmp = std::get_if<CompareLiteral>(&lit)) {
      cmp->lhs = q(cmp->lhs);
      cmp->rhs = q(cmp->rhs);
    }
  return b;
}

/// A distinct body pattern occurring in the graph.
struct ClassLikeBundle {
  std::string name;
  BundleSignature signature;
  std::vector<PromiseBody> bodies;
  std::vector<std::string> occurrences;
};

/// One representative per distinct signature among declared bundles and the
/// body collections on each promiser->promisee channel.
inline std::vector<ClassLikeBundle> extract_spanning_set(const PromiseGraph& g) {
  std::map<BundleSignature, ClassLikeBundle> found;
  // declared bundles go first so they name the classes they share with channels
  auto add = [&](const std::string& name, std::vector<PromiseBody> bodies) {
    if (bodies.empty()) return;
    auto sig = signature_of(bodies);
    auto it = found.try_emplace(sig, ClassLikeBundle{name, sig, std::move(bodies), {}}).first;
    it->second.occurrences.push_back(name);
  };
  for (const auto& [name, b] : g.bundles()) add(name, b.bodies);

  std::map<std::pair<std::string, std::string>, std::vector<PromiseBody>> channels;
  for (const auto& p : g.promises()) channels[{p.promiser, p.promisee}].push_back(scoped_body(p));
  for (auto& [ch, bodies] : channels) add(ch.first + "->" + ch.second, std::move(bodies));

  std::vector<ClassLikeBundle> out;
  for (auto& [sig, c] : found) {
    std::sort(c.occurrences.begin(), c.occurrences.end());
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace pml::analysis
