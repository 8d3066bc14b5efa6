#pragma once

#include <string>
#include <variant>

#include "pml/dsl/ast.hpp"

namespace pml::dsl {

namespace detail {

inline std::string print_term(const AstTerm& t) {
  switch (t.kind) {
    case AstTerm::Kind::Param: return "$" + t.text;
    case AstTerm::Kind::String: return quote_string(t.text);
    default: return t.text;
  }
}

inline std::string print_condition(const AstCondition& c) {
  std::string out;
  for (std::size_t i = 0; i < c.literals.size(); ++i) {
    if (i) out += " and ";
    if (const auto* cmp = std::get_if<AstCompare>(&c.literals[i])) {
      out += print_term(cmp->lhs) + (cmp->op == CompareOp::Eq ? " == " : " != ") + print_term(cmp->rhs);
    } else {
      const auto& f = std::get<AstFlag>(c.literals[i]);
      out += (f.negated ? "not " : "") + f.name;
    }
  }
  return out;
}

inline std::string print_body(const AstBody& b) {
  std::string out = b.polarity == Polarity::Give ? "give " : "use ";
  out += print_term(b.subject);
  if (b.value) out += " = " + print_term(*b.value);
  if (b.condition) out += " if " + print_condition(*b.condition);
  return out + ";";
}

}  // namespace detail

/// Canonical text: one declaration per line, bundle bodies indented by two
/// spaces, single spaces around operators.
inline std::string print(const ModelAst& ast) {
  std::string out;
  for (const auto& d : ast.decls) {
    std::visit(
        [&](const auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, AgentDecl>) {
            out += "agent ";
            for (std::size_t i = 0; i < n.names.size(); ++i) out += (i ? ", " : "") + n.names[i];
            out += ";\n";
          } else if constexpr (std::is_same_v<N, TypeDecl>) {
            out += "type " + flatten_type(n.path) + " : " + to_string(n.kind) + ";\n";
          } else if constexpr (std::is_same_v<N, FlagDecl>) {
            out += "flag " + n.name + ";\n";
          } else if constexpr (std::is_same_v<N, BundleDecl>) {
            out += "bundle " + n.name;
            if (n.parent) out += " extends " + *n.parent;
            if (n.bodies.empty()) {
              out += " {}\n";
              return;
            }
            out += " {\n";
            for (const auto& b : n.bodies) out += "  " + detail::print_body(b) + "\n";
            out += "}\n";
          } else {
            out += n.promiser + " -> " + n.promisee + " : ";
            if (const auto* body = std::get_if<AstBody>(&n.payload)) {
              out += detail::print_body(*body);
            } else {
              const auto& ref = std::get<AstBundleRef>(n.payload);
              out += "bundle " + ref.name;
              if (ref.condition) out += " if " + detail::print_condition(*ref.condition);
              out += ";";
            }
            out += "\n";
          }
        },
        d.node);
  }
  return out;
}

}  // namespace pml::dsl
