#pragma once

#include <optional>
#include <type_traits>
#include <string>
#include <variant>
#include <vector>

#include "pml/core.hpp"
#include "pml/dsl/diagnostic.hpp"

namespace pml::dsl {

struct AstTerm {
  enum class Kind { Ident, Param, Number, String };
  Kind kind = Kind::Ident;
  /// Identifier (dotted path joined with '.'), parameter name, number
  /// lexeme, or unescaped string value.
  std::string text;
  SourceSpan span;

  friend bool operator==(const AstTerm&, const AstTerm&) = default;
};

struct AstCompare {
  AstTerm lhs;
  CompareOp op = CompareOp::Eq;
  AstTerm rhs;

  friend bool operator==(const AstCompare&, const AstCompare&) = default;
};

struct AstFlag {
  std::string name;
  bool negated = false;
  SourceSpan span;

  friend bool operator==(const AstFlag&, const AstFlag&) = default;
};

using AstLiteral = std::variant<AstCompare, AstFlag>;

struct AstCondition {
  std::vector<AstLiteral> literals;

  friend bool operator==(const AstCondition&, const AstCondition&) = default;
};

/// `give width = $w if c;`. The subject is a type path or, for link bodies, a
/// parameter.
struct AstBody {
  Polarity polarity = Polarity::Give;
  AstTerm subject;
  std::optional<AstTerm> value;
  std::optional<AstCondition> condition;
  SourceSpan span;

  friend bool operator==(const AstBody&, const AstBody&) = default;
};

struct AgentDecl {
  std::vector<std::string> names;
  std::vector<SourceSpan> name_spans;

  friend bool operator==(const AgentDecl&, const AgentDecl&) = default;
};

struct TypeDecl {
  std::vector<std::string> path;
  TypeKind kind = TypeKind::Service;

  friend bool operator==(const TypeDecl&, const TypeDecl&) = default;
};

struct FlagDecl {
  std::string name;

  friend bool operator==(const FlagDecl&, const FlagDecl&) = default;
};

struct BundleDecl {
  std::string name;
  std::optional<std::string> parent;
  std::vector<AstBody> bodies;
  SourceSpan name_span;
  SourceSpan parent_span;

  friend bool operator==(const BundleDecl&, const BundleDecl&) = default;
};

struct AstBundleRef {
  std::string name;
  std::optional<AstCondition> condition;
  SourceSpan name_span;

  friend bool operator==(const AstBundleRef&, const AstBundleRef&) = default;
};

struct PromiseDecl {
  std::string promiser;
  std::string promisee;
  std::variant<AstBody, AstBundleRef> payload;
  SourceSpan promiser_span;
  SourceSpan promisee_span;

  friend bool operator==(const PromiseDecl&, const PromiseDecl&) = default;
};

struct Decl {
  std::variant<AgentDecl, TypeDecl, FlagDecl, BundleDecl, PromiseDecl> node;
  SourceSpan span;

  friend bool operator==(const Decl&, const Decl&) = default;
};

struct ModelAst {
  std::vector<Decl> decls;

  friend bool operator==(const ModelAst&, const ModelAst&) = default;
};

namespace detail {

inline void strip(AstTerm& t) { t.span = {}; }

inline void strip(AstCondition& c) {
  for (auto& lit : c.literals) {
    if (auto* cmp = std::get_if<AstCompare>(&lit)) {
      strip(cmp->lhs);
      strip(cmp->rhs);
    } else {
      std::get<AstFlag>(lit).span = {};
    }
  }
}

inline void strip(AstBody& b) {
  b.span = {};
  strip(b.subject);
  if (b.value) strip(*b.value);
  if (b.condition) strip(*b.condition);
}

}  // namespace detail

/// Copy with every span cleared; two ASTs are structurally equal when their
/// stripped forms compare equal.
inline ModelAst strip_spans(ModelAst ast) {
  for (auto& d : ast.decls) {
    d.span = {};
    std::visit(
        [](auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, AgentDecl>) {
            for (auto& s : n.name_spans) s = {};
          } else if constexpr (std::is_same_v<N, BundleDecl>) {
            n.name_span = {};
            n.parent_span = {};
            for (auto& b : n.bodies) detail::strip(b);
          } else if constexpr (std::is_same_v<N, PromiseDecl>) {
            n.promiser_span = {};
            n.promisee_span = {};
            if (auto* body = std::get_if<AstBody>(&n.payload)) {
              detail::strip(*body);
            } else {
              auto& ref = std::get<AstBundleRef>(n.payload);
              ref.name_span = {};
              if (ref.condition) detail::strip(*ref.condition);
            }
          }
        },
        d.node);
  }
  return ast;
}

inline bool structurally_equal(const ModelAst& a, const ModelAst& b) { return strip_spans(a) == strip_spans(b); }

}  // namespace pml::dsl
