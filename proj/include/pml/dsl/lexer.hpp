#pragma once

#include <cctype>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pml/dsl/diagnostic.hpp"

namespace pml::dsl {

enum class TokenKind {
  KwAgent,
  KwType,
  KwFlag,
  KwBundle,
  KwExtends,
  KwGive,
  KwUse,
  KwIf,
  KwAnd,
  KwNot,
  KwNum,
  KwStr,
  KwService,
  Ident,
  Param,
  Number,
  String,
  Arrow,
  Colon,
  Semi,
  Comma,
  Dot,
  LBrace,
  RBrace,
  Assign,
  EqEq,
  NotEq,
  End,
};

inline const char* to_string(TokenKind k) {
  switch (k) {
    case TokenKind::KwAgent: return "'agent'";
    case TokenKind::KwType: return "'type'";
    case TokenKind::KwFlag: return "'flag'";
    case TokenKind::KwBundle: return "'bundle'";
    case TokenKind::KwExtends: return "'extends'";
    case TokenKind::KwGive: return "'give'";
    case TokenKind::KwUse: return "'use'";
    case TokenKind::KwIf: return "'if'";
    case TokenKind::KwAnd: return "'and'";
    case TokenKind::KwNot: return "'not'";
    case TokenKind::KwNum: return "'num'";
    case TokenKind::KwStr: return "'str'";
    case TokenKind::KwService: return "'service'";
    case TokenKind::Ident: return "identifier";
    case TokenKind::Param: return "parameter";
    case TokenKind::Number: return "number";
    case TokenKind::String: return "string";
    case TokenKind::Arrow: return "'->'";
    case TokenKind::Colon: return "':'";
    case TokenKind::Semi: return "';'";
    case TokenKind::Comma: return "','";
    case TokenKind::Dot: return "'.'";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::Assign: return "'='";
    case TokenKind::EqEq: return "'=='";
    case TokenKind::NotEq: return "'!='";
    case TokenKind::End: return "end of file";
  }
  return "?";
}

inline const std::map<std::string_view, TokenKind>& keywords() {
  static const std::map<std::string_view, TokenKind> kw = {
      {"agent", TokenKind::KwAgent},   {"type", TokenKind::KwType}, {"flag", TokenKind::KwFlag},
      {"bundle", TokenKind::KwBundle}, {"extends", TokenKind::KwExtends}, {"give", TokenKind::KwGive},
      {"use", TokenKind::KwUse},       {"if", TokenKind::KwIf},     {"and", TokenKind::KwAnd},
      {"not", TokenKind::KwNot},       {"num", TokenKind::KwNum},   {"str", TokenKind::KwStr},
      {"service", TokenKind::KwService},
  };
  return kw;
}

struct Token {
  TokenKind kind = TokenKind::End;
  /// Exact source lexeme.
  std::string text;
  /// Identifier name, parameter name without '$', or unescaped string value.
  std::string value;
  SourceSpan span;
};

struct LexResult {
  std::vector<Token> tokens;  // always ends with an End token
  std::vector<Diagnostic> diagnostics;
};

inline LexResult tokenize(std::string_view text, const std::string& file = "<input>") {
  LexResult out;
  std::size_t i = 0, line = 1, col = 1;

  auto advance = [&] {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  };
  auto is_ident_start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
  auto is_ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };

  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance();
      continue;
    }

    const std::size_t start = i, sline = line, scol = col;
    Token tok;
    auto finish = [&](TokenKind kind) {
      tok.kind = kind;
      tok.text = std::string(text.substr(start, i - start));
      tok.span = {file, sline, scol, line, col - 1};
      out.tokens.push_back(std::move(tok));
    };

    if (is_ident_start(c)) {
      while (i < text.size() && is_ident_char(text[i])) advance();
      auto word = text.substr(start, i - start);
      tok.value = std::string(word);
      auto kw = keywords().find(word);
      finish(kw == keywords().end() ? TokenKind::Ident : kw->second);
    } else if (c == '$' && i + 1 < text.size() && is_ident_start(text[i + 1])) {
      advance();
      while (i < text.size() && is_ident_char(text[i])) advance();
      tok.value = std::string(text.substr(start + 1, i - start - 1));
      finish(TokenKind::Param);
    } else if (is_digit(c) || (c == '-' && i + 1 < text.size() && is_digit(text[i + 1]))) {
      advance();
      while (i < text.size() && is_digit(text[i])) advance();
      if (i + 1 < text.size() && text[i] == '.' && is_digit(text[i + 1])) {
        advance();
        while (i < text.size() && is_digit(text[i])) advance();
      }
      tok.value = std::string(text.substr(start, i - start));
      finish(TokenKind::Number);
    } else if (c == '"') {
      advance();
      bool closed = false;
      while (i < text.size() && text[i] != '\n') {
        if (text[i] == '"') {
          advance();
          closed = true;
          break;
        }
        if (text[i] == '\\' && i + 1 < text.size() && text[i + 1] != '\n') {
          advance();
          tok.value += text[i] == 'n' ? '\n' : text[i];
          advance();
          continue;
        }
        tok.value += text[i];
        advance();
      }
      if (!closed) {
        out.diagnostics.push_back({Severity::Error, "E-LEX-002", "unterminated string literal",
                                   {file, sline, scol, line, col > 1 ? col - 1 : 1}});
        continue;
      }
      finish(TokenKind::String);
    } else {
      auto two = text.substr(i, 2);
      if (two == "->" || two == "==" || two == "!=") {
        advance();
        advance();
        finish(two == "->" ? TokenKind::Arrow : two == "==" ? TokenKind::EqEq : TokenKind::NotEq);
        continue;
      }
      TokenKind kind;
      switch (c) {
        case ':': kind = TokenKind::Colon; break;
        case ';': kind = TokenKind::Semi; break;
        case ',': kind = TokenKind::Comma; break;
        case '.': kind = TokenKind::Dot; break;
        case '{': kind = TokenKind::LBrace; break;
        case '}': kind = TokenKind::RBrace; break;
        case '=': kind = TokenKind::Assign; break;
        default: {
          // swallow one whole UTF-8 sequence
          advance();
          while (i < text.size() && (static_cast<unsigned char>(text[i]) & 0xC0) == 0x80) ++i;
          out.diagnostics.push_back({Severity::Error, "E-LEX-001",
                                     "illegal character '" + std::string(text.substr(start, i - start)) + "'",
                                     {file, sline, scol, sline, scol}});
          continue;
        }
      }
      advance();
      finish(kind);
    }
  }
  Token end;
  end.kind = TokenKind::End;
  end.span = {file, line, col, line, col};
  out.tokens.push_back(std::move(end));
  return out;
}

}  // namespace pml::dsl
