#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pml/dsl/ast.hpp"
#include "pml/dsl/lexer.hpp"

namespace pml::dsl {

struct ParseResult {
  ModelAst ast;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return !has_errors(diagnostics); }
};

namespace detail {

/// Recursive-descent parser. Errors unwind to the innermost declaration or
/// bundle body, which resynchronizes on ';' or '}'.
class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string file) : toks_(std::move(tokens)), file_(std::move(file)) {}

  ModelAst parse_model() {
    ModelAst ast;
    while (!at(TokenKind::End)) {
      const std::size_t before = pos_;
      try {
        ast.decls.push_back(parse_decl());
      } catch (const Failure&) {
        sync_top();
        if (pos_ == before) ++pos_;
      }
    }
    return ast;
  }

  std::vector<Diagnostic> take_diagnostics() { return std::move(diags_); }

 private:
  struct Failure {};

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at(TokenKind k) const { return peek().kind == k; }
  const Token& take() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  const Token& previous() const { return toks_[pos_ == 0 ? 0 : pos_ - 1]; }

  [[noreturn]] void fail(const std::string& code, const std::string& message) {
    diags_.push_back({Severity::Error, code, message, peek().span});
    throw Failure{};
  }

  std::string found() const {
    const auto& t = peek();
    return t.kind == TokenKind::End ? "end of file" : "'" + t.text + "'";
  }

  const Token& expect(TokenKind k, const char* what = nullptr) {
    if (!at(k)) fail("E-PARSE-001", std::string("expected ") + (what ? what : to_string(k)) + ", found " + found());
    return take();
  }

  SourceSpan span_from(const SourceSpan& start) const {
    const auto& end = previous().span;
    return {file_, start.start_line, start.start_col, end.end_line, end.end_col};
  }

  void sync_top() {
    while (!at(TokenKind::End)) {
      auto k = take().kind;
      if (k == TokenKind::Semi || k == TokenKind::RBrace) return;
    }
  }

  void sync_body() {
    while (!at(TokenKind::End) && !at(TokenKind::RBrace)) {
      if (take().kind == TokenKind::Semi) return;
    }
  }

  Decl parse_decl() {
    const auto start = peek().span;
    switch (peek().kind) {
      case TokenKind::KwAgent: return {parse_agent(), span_from(start)};
      case TokenKind::KwType: return {parse_type(), span_from(start)};
      case TokenKind::KwFlag: {
        take();
        FlagDecl f{expect(TokenKind::Ident, "flag name").value};
        expect(TokenKind::Semi);
        return {f, span_from(start)};
      }
      case TokenKind::KwBundle: return {parse_bundle(), span_from(start)};
      case TokenKind::Ident: return {parse_promise(), span_from(start)};
      default: fail("E-PARSE-002", "expected a declaration, found " + found());
    }
  }

  AgentDecl parse_agent() {
    take();
    AgentDecl a;
    do {
      const auto& name = expect(TokenKind::Ident, "agent name");
      a.names.push_back(name.value);
      a.name_spans.push_back(name.span);
    } while (at(TokenKind::Comma) && (take(), true));
    expect(TokenKind::Semi, "',' or ';'");
    return a;
  }

  std::vector<std::string> parse_path(const char* what) {
    std::vector<std::string> path{expect(TokenKind::Ident, what).value};
    while (at(TokenKind::Dot)) {
      take();
      path.push_back(expect(TokenKind::Ident, "identifier after '.'").value);
    }
    return path;
  }

  TypeDecl parse_type() {
    take();
    TypeDecl t;
    t.path = parse_path("type name");
    expect(TokenKind::Colon);
    switch (peek().kind) {
      case TokenKind::KwNum: t.kind = TypeKind::Numeric; break;
      case TokenKind::KwStr: t.kind = TypeKind::String; break;
      case TokenKind::KwService: t.kind = TypeKind::Service; break;
      default: fail("E-PARSE-003", "expected 'num', 'str' or 'service', found " + found());
    }
    take();
    expect(TokenKind::Semi);
    return t;
  }

  BundleDecl parse_bundle() {
    take();
    BundleDecl b;
    const auto& name = expect(TokenKind::Ident, "bundle name");
    b.name = name.value;
    b.name_span = name.span;
    if (at(TokenKind::KwExtends)) {
      take();
      const auto& parent = expect(TokenKind::Ident, "parent bundle name");
      b.parent = parent.value;
      b.parent_span = parent.span;
    }
    expect(TokenKind::LBrace, "'extends' or '{'");
    while (!at(TokenKind::RBrace) && !at(TokenKind::End)) {
      const std::size_t before = pos_;
      try {
        b.bodies.push_back(parse_body());
      } catch (const Failure&) {
        sync_body();
        if (pos_ == before && !at(TokenKind::RBrace) && !at(TokenKind::End)) take();
      }
    }
    expect(TokenKind::RBrace, "'give', 'use' or '}'");
    return b;
  }

  AstTerm parse_term() {
    const auto start = peek().span;
    switch (peek().kind) {
      case TokenKind::Ident: {
        auto path = parse_path("identifier");
        return {AstTerm::Kind::Ident, flatten_type(path), span_from(start)};
      }
      case TokenKind::Param: return {AstTerm::Kind::Param, take().value, start};
      case TokenKind::Number: return {AstTerm::Kind::Number, take().value, start};
      case TokenKind::String: return {AstTerm::Kind::String, take().value, start};
      default: fail("E-PARSE-004", "expected a term, found " + found());
    }
  }

  AstLiteral parse_literal() {
    const auto start = peek().span;
    if (at(TokenKind::KwNot)) {
      take();
      AstFlag f{expect(TokenKind::Ident, "flag name").value, true, {}};
      f.span = span_from(start);
      return f;
    }
    // a bare identifier not followed by a comparison is a flag
    if (at(TokenKind::Ident) && peek(1).kind != TokenKind::EqEq && peek(1).kind != TokenKind::NotEq &&
        peek(1).kind != TokenKind::Dot) {
      const auto& t = take();
      return AstFlag{t.value, false, t.span};
    }
    AstCompare c;
    c.lhs = parse_term();
    if (at(TokenKind::EqEq))
      c.op = CompareOp::Eq;
    else if (at(TokenKind::NotEq))
      c.op = CompareOp::Neq;
    else
      fail("E-PARSE-005", "expected '==' or '!=', found " + found());
    take();
    c.rhs = parse_term();
    return c;
  }

  AstCondition parse_condition() {
    AstCondition c;
    c.literals.push_back(parse_literal());
    while (at(TokenKind::KwAnd)) {
      take();
      c.literals.push_back(parse_literal());
    }
    return c;
  }

  AstBody parse_body() {
    const auto start = peek().span;
    AstBody b;
    if (at(TokenKind::KwGive))
      b.polarity = Polarity::Give;
    else if (at(TokenKind::KwUse))
      b.polarity = Polarity::Use;
    else
      fail("E-PARSE-006", "expected 'give' or 'use', found " + found());
    take();

    if (at(TokenKind::Param)) {
      const auto& p = take();
      b.subject = {AstTerm::Kind::Param, p.value, p.span};
      expect(TokenKind::Assign, "'=' after parameter");
      b.value = parse_term();
    } else {
      const auto sstart = peek().span;
      auto path = parse_path("promise type");
      b.subject = {AstTerm::Kind::Ident, flatten_type(path), span_from(sstart)};
      if (at(TokenKind::Assign)) {
        take();
        b.value = parse_term();
      }
    }
    if (at(TokenKind::KwIf)) {
      take();
      b.condition = parse_condition();
    }
    expect(TokenKind::Semi, b.condition ? "'and' or ';'" : "'=', 'if' or ';'");
    b.span = span_from(start);
    return b;
  }

  PromiseDecl parse_promise() {
    PromiseDecl p;
    const auto& from = take();
    p.promiser = from.value;
    p.promiser_span = from.span;
    expect(TokenKind::Arrow);
    const auto& to = expect(TokenKind::Ident, "promisee name");
    p.promisee = to.value;
    p.promisee_span = to.span;
    expect(TokenKind::Colon);
    if (at(TokenKind::KwBundle)) {
      take();
      AstBundleRef ref;
      const auto& name = expect(TokenKind::Ident, "bundle name");
      ref.name = name.value;
      ref.name_span = name.span;
      if (at(TokenKind::KwIf)) {
        take();
        ref.condition = parse_condition();
      }
      if (at(TokenKind::Semi)) take();
      p.payload = std::move(ref);
    } else {
      p.payload = parse_body();
    }
    return p;
  }

  std::vector<Token> toks_;
  std::string file_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic> diags_;
};

}  // namespace detail

/// Parses a whole model. Lexical errors are reported alongside parse errors;
/// the parser keeps going after each so one pass reports them all.
inline ParseResult parse(std::string_view text, const std::string& file = "<input>") {
  auto lexed = tokenize(text, file);
  detail::Parser parser(std::move(lexed.tokens), file);
  ParseResult out;
  out.ast = parser.parse_model();
  out.diagnostics = std::move(lexed.diagnostics);
  for (auto& d : parser.take_diagnostics()) out.diagnostics.push_back(std::move(d));
  std::stable_sort(out.diagnostics.begin(), out.diagnostics.end(),
                   [](const Diagnostic& a, const Diagnostic& b) { return a.span < b.span; });
  return out;
}

}  // namespace pml::dsl
