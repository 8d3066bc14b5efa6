#pragma once

#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "pml/core.hpp"
#include "pml/dsl/ast.hpp"
#include "pml/dsl/parser.hpp"

namespace pml::dsl {

struct ResolveResult {
  std::optional<PromiseGraph> graph;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return graph.has_value() && !has_errors(diagnostics); }
};

/// Canonical spelling of a numeric literal ("90.0" and "90" are one value).
inline std::string normalize_number(const std::string& lexeme) {
  double v = 0;
  auto [p, ec] = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), v);
  if (ec != std::errc{} || p != lexeme.data() + lexeme.size()) return lexeme;
  if (v == 0) v = 0;  // fold -0
  char buf[64];
  auto [end, ec2] = std::to_chars(buf, buf + sizeof buf, v);
  return ec2 == std::errc{} ? std::string(buf, end) : lexeme;
}

namespace detail {

class Resolver {
 public:
  explicit Resolver(const ModelAst& ast) : ast_(ast) {}

  ResolveResult run() {
    collect_declarations();
    check_bundles();

    std::vector<Bundle> bundles;
    for (const auto* decl : bundle_order_) {
      Bundle b{decl->name, {}, decl->parent};
      const std::string scope = "bundle " + decl->name;
      for (const auto& body : decl->bodies)
        if (auto rb = resolve_body(body, scope, nullptr)) b.bodies.push_back(std::move(*rb));
      bundles.push_back(std::move(b));
    }

    std::map<std::string, std::vector<PromiseBody>> flat;
    if (!has_errors(diags_)) {
      std::map<std::string, Bundle> declared;
      for (const auto& b : bundles) declared.emplace(b.name, b);
      for (const auto& [name, b] : declared) {
        std::vector<std::string> stack;
        pml::detail::flatten_bundle(name, declared, flat, stack);
      }
    }

    std::vector<Promise> promises;
    for (const auto& d : ast_.decls)
      if (const auto* p = std::get_if<PromiseDecl>(&d.node)) resolve_promise(*p, d.span, flat, promises);

    ResolveResult out;
    if (!has_errors(diags_)) {
      try {
        std::vector<Agent> agents;
        for (auto& [name, agent] : agents_) agents.push_back(agent);
        out.graph = build_graph(std::move(agents), types_, std::move(bundles), std::move(promises));
        for (const auto& f : validate_autonomy(*out.graph))
          warn("W-AUTONOMY-001", f.message + " (in condition '" + f.literal + "')", span_of(f.promise));
      } catch (const ModelError& e) {
        error("E-RESOLVE-099", e.what(), ast_.decls.empty() ? SourceSpan{} : ast_.decls.front().span);
        out.graph.reset();
      }
    }
    out.diagnostics = std::move(diags_);
    std::stable_sort(out.diagnostics.begin(), out.diagnostics.end(),
                     [](const Diagnostic& a, const Diagnostic& b) { return a.span < b.span; });
    return out;
  }

 private:
  void error(const std::string& code, const std::string& msg, const SourceSpan& span) {
    diags_.push_back({Severity::Error, code, msg, span});
  }
  void warn(const std::string& code, const std::string& msg, const SourceSpan& span) {
    diags_.push_back({Severity::Warning, code, msg, span});
  }

  void collect_declarations() {
    for (const auto& d : ast_.decls) {
      if (const auto* a = std::get_if<AgentDecl>(&d.node)) {
        for (std::size_t i = 0; i < a->names.size(); ++i)
          if (!agents_.emplace(a->names[i], Agent{a->names[i], {}}).second)
            error("E-RESOLVE-004", "agent '" + a->names[i] + "' declared twice", a->name_spans[i]);
      } else if (const auto* t = std::get_if<TypeDecl>(&d.node)) {
        add_type(t->path, t->kind, d.span);
      } else if (const auto* f = std::get_if<FlagDecl>(&d.node)) {
        add_type({f->name}, TypeKind::Flag, d.span);
      } else if (const auto* b = std::get_if<BundleDecl>(&d.node)) {
        if (bundles_.emplace(b->name, b).second)
          bundle_order_.push_back(b);
        else
          error("E-RESOLVE-006", "bundle '" + b->name + "' declared twice", b->name_span);
      }
    }
  }

  void add_type(const std::vector<std::string>& path, TypeKind kind, const SourceSpan& span) {
    try {
      types_.add(path, kind);
    } catch (const ModelError& e) {
      error(e.code() == "type-collision" ? "E-RESOLVE-010" : "E-RESOLVE-005", e.what(), span);
    }
  }

  void check_bundles() {
    for (const auto* b : bundle_order_) {
      if (b->parent && !bundles_.count(*b->parent))
        error("E-RESOLVE-003", "bundle '" + b->name + "' extends unknown bundle '" + *b->parent + "'", b->parent_span);
    }
    std::set<std::string> reported;
    for (const auto* b : bundle_order_) {
      std::vector<std::string> chain{b->name};
      const BundleDecl* cur = b;
      while (cur->parent && bundles_.count(*cur->parent)) {
        const auto& next = *cur->parent;
        auto hit = std::find(chain.begin(), chain.end(), next);
        if (hit != chain.end()) {
          if (hit == chain.begin() && !reported.count(b->name)) {
            std::string names;
            for (const auto& c : chain) {
              names += (names.empty() ? "" : " -> ") + c;
              reported.insert(c);
            }
            error("E-RESOLVE-007", "cyclic bundle extension: " + names + " -> " + next, b->name_span);
          }
          break;
        }
        chain.push_back(next);
        cur = bundles_.at(next);
      }
    }
  }

  std::optional<Term> resolve_term(const AstTerm& t) {
    switch (t.kind) {
      case AstTerm::Kind::Param: return Term::param(t.text);
      case AstTerm::Kind::Number: return Term::num(normalize_number(t.text));
      case AstTerm::Kind::String: return Term::str(t.text);
      case AstTerm::Kind::Ident: {
        const auto* decl = types_.find(t.text);
        if (!decl) return Term::named(t.text);
        if (decl->kind == TypeKind::Flag) {
          error("E-RESOLVE-009", "flag '" + t.text + "' used as a value; write '" + t.text + "' or 'not " + t.text +
                                     "'", t.span);
          return std::nullopt;
        }
        return Term::attr(t.text);
      }
    }
    return std::nullopt;
  }

  std::optional<TypeKind> value_kind(const Term& t) const {
    if (t.kind == Term::Kind::NumConst) return TypeKind::Numeric;
    if (t.kind == Term::Kind::StrConst) return TypeKind::String;
    if (t.is_attribute()) return types_.find(t.text)->kind;
    return std::nullopt;
  }

  /// Records the value kind a parameter is equated with; a second, different
  /// kind within the same scope is an error.
  void note_param(const std::string& scope, const Term& a, const Term& b, const SourceSpan& span) {
    if (!a.is_parameter()) return;
    auto kind = value_kind(b);
    if (!kind) return;
    auto [it, inserted] = param_kinds_.emplace(std::make_pair(scope, a.text), *kind);
    if (!inserted && it->second != *kind)
      error("E-RESOLVE-008",
            "parameter '$" + a.text + "' used as both " + to_string(it->second) + " and " + to_string(*kind), span);
  }

  std::optional<Condition> resolve_condition(const AstCondition& c, const std::string& scope) {
    Condition out;
    bool ok = true;
    for (const auto& lit : c.literals) {
      if (const auto* f = std::get_if<AstFlag>(&lit)) {
        const auto* decl = types_.find(f->name);
        if (!decl) {
          error("E-RESOLVE-002", "unknown flag '" + f->name + "'", f->span);
          ok = false;
        } else if (decl->kind != TypeKind::Flag) {
          error("E-RESOLVE-009", "'" + f->name + "' is a " + to_string(decl->kind) + " type, not a flag", f->span);
          ok = false;
        } else {
          out.literals.push_back(FlagLiteral{f->name, f->negated});
        }
        continue;
      }
      const auto& cmp = std::get<AstCompare>(lit);
      auto lhs = resolve_term(cmp.lhs);
      auto rhs = resolve_term(cmp.rhs);
      if (!lhs || !rhs) {
        ok = false;
        continue;
      }
      note_param(scope, *lhs, *rhs, cmp.lhs.span);
      note_param(scope, *rhs, *lhs, cmp.rhs.span);
      out.literals.push_back(CompareLiteral{*lhs, cmp.op, *rhs});
    }
    if (!ok) return std::nullopt;
    return out;
  }

  std::optional<PromiseBody> resolve_body(const AstBody& b, const std::string& scope, Condition* attach) {
    PromiseBody out;
    out.polarity = b.polarity;
    bool ok = true;

    if (b.subject.kind == AstTerm::Kind::Param) {
      if (b.polarity == Polarity::Use) {
        error("E-RESOLVE-012", "a use promise needs a promise type, not a parameter link", b.subject.span);
        return std::nullopt;
      }
      auto rhs = b.value ? resolve_term(*b.value) : std::nullopt;
      if (!rhs) return std::nullopt;
      const auto lhs = Term::param(b.subject.text);
      note_param(scope, lhs, *rhs, b.value->span);
      note_param(scope, *rhs, lhs, b.value->span);
      out.constraints.push_back({lhs, *rhs});
    } else {
      const auto* decl = types_.find(b.subject.text);
      if (!decl) {
        error("E-RESOLVE-002", "unknown promise type '" + b.subject.text + "'", b.subject.span);
        ok = false;
      } else {
        out.type = decl->name;
        if (b.value && b.polarity == Polarity::Use) {
          warn("W-RESOLVE-001", "use promise of '" + decl->name + "' accepts the giver's constraint; value ignored",
               b.value->span);
        } else if (b.value && (decl->kind == TypeKind::Flag || decl->kind == TypeKind::Service)) {
          error("E-RESOLVE-011", std::string(to_string(decl->kind)) + " type '" + decl->name + "' takes no value",
                b.value->span);
          ok = false;
        } else if (b.value) {
          if (auto rhs = resolve_term(*b.value)) {
            const auto lhs = Term::attr(decl->name);
            note_param(scope, *rhs, lhs, b.value->span);
            out.constraints.push_back({lhs, *rhs});
          } else {
            ok = false;
          }
        }
      }
    }
    if (b.condition) {
      if (auto c = resolve_condition(*b.condition, scope))
        out.condition = std::move(*c);
      else
        ok = false;
    }
    if (attach) out.condition = conjoin(out.condition, *attach);
    if (!ok) return std::nullopt;
    return out;
  }

  bool known_agent(const std::string& name, const SourceSpan& span) {
    if (agents_.count(name)) return true;
    error("E-RESOLVE-001", "unknown agent '" + name + "'", span);
    return false;
  }

  void note_private(const std::string& agent, const Condition& c) {
    auto note = [&](const Term& t) {
      if (t.kind == Term::Kind::NamedConst) agents_.at(agent).private_attrs.emplace(t.text, t);
    };
    for (const auto& lit : c.literals)
      if (const auto* cmp = std::get_if<CompareLiteral>(&lit)) {
        note(cmp->lhs);
        note(cmp->rhs);
      }
  }

  void resolve_promise(const PromiseDecl& p, const SourceSpan& span,
                       const std::map<std::string, std::vector<PromiseBody>>& flat, std::vector<Promise>& out) {
    bool ok = known_agent(p.promiser, p.promiser_span);
    ok = known_agent(p.promisee, p.promisee_span) && ok;
    const std::string channel = p.promiser + "->" + p.promisee;

    if (const auto* body = std::get_if<AstBody>(&p.payload)) {
      auto rb = resolve_body(*body, channel, nullptr);
      if (!ok || !rb) return;
      note_private(p.promiser, rb->condition);
      Promise promise{p.promiser, p.promisee, std::move(*rb), channel, std::nullopt};
      spans_.emplace_back(promise, span);
      out.push_back(std::move(promise));
      return;
    }

    const auto& ref = std::get<AstBundleRef>(p.payload);
    Condition attach;
    if (ref.condition) {
      auto c = resolve_condition(*ref.condition, channel);
      if (!c) return;
      attach = std::move(*c);
    }
    if (!bundles_.count(ref.name)) {
      error("E-RESOLVE-003", "unknown bundle '" + ref.name + "'", ref.name_span);
      return;
    }
    if (!ok) return;
    auto it = flat.find(ref.name);
    if (it == flat.end()) return;
    std::string scope = ref.name + "@" + channel;
    if (!attach.empty()) scope += " if " + to_string(normalized(attach));
    for (const auto& b : it->second) {
      Promise promise{p.promiser, p.promisee, b, scope, ref.name};
      promise.body.condition = conjoin(b.condition, attach);
      note_private(p.promiser, promise.body.condition);
      spans_.emplace_back(promise, span);
      out.push_back(std::move(promise));
    }
  }

  SourceSpan span_of(const Promise& p) const {
    for (const auto& [q, span] : spans_)
      if (q.promiser == p.promiser && q.promisee == p.promisee && q.body == p.body) return span;
    return ast_.decls.empty() ? SourceSpan{} : ast_.decls.front().span;
  }

  const ModelAst& ast_;
  std::vector<Diagnostic> diags_;
  std::map<std::string, Agent> agents_;
  TypeRegistry types_;
  std::map<std::string, const BundleDecl*> bundles_;
  std::vector<const BundleDecl*> bundle_order_;
  std::map<std::pair<std::string, std::string>, TypeKind> param_kinds_;
  std::vector<std::pair<Promise, SourceSpan>> spans_;
};

}  // namespace detail

inline ResolveResult resolve(const ModelAst& ast) { return detail::Resolver(ast).run(); }

/// Parse and resolve in one step; resolution only runs on a clean parse.
inline ResolveResult load(std::string_view text, const std::string& file = "<input>") {
  auto parsed = parse(text, file);
  if (!parsed.ok()) return {std::nullopt, std::move(parsed.diagnostics)};
  auto resolved = resolve(parsed.ast);
  for (auto& d : parsed.diagnostics) resolved.diagnostics.push_back(std::move(d));
  return resolved;
}

}  // namespace pml::dsl
