#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "common.hpp"
#include "mutation.hpp"
#include "pml/dsl/lexer.hpp"
#include "pml/dsl/parser.hpp"
#include "pml/dsl/printer.hpp"
#include "pml/dsl/resolver.hpp"

using namespace pml;
using namespace pml::dsl;

namespace {

const std::vector<std::string> kCorpus{"bank.pml",     "bank_central.pml", "dispatch.pml", "empty.pml",
                                       "geometry.pml", "geometry_merged.pml", "switch.pml", "web.pml"};

std::vector<TokenKind> kinds(std::string_view text) {
  std::vector<TokenKind> out;
  for (const auto& t : tokenize(text).tokens) out.push_back(t.kind);
  return out;
}

std::vector<std::string> codes(const std::vector<Diagnostic>& ds) {
  std::vector<std::string> out;
  for (const auto& d : ds) out.push_back(d.code);
  return out;
}

std::vector<std::string> resolve_codes(const std::string& text) { return codes(load(text).diagnostics); }

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::string strip_comments_and_space(const std::string& text) {
  std::string out;
  bool comment = false;
  for (char c : text) {
    if (c == '#') comment = true;
    if (c == '\n') comment = false;
    if (!comment && !std::isspace(static_cast<unsigned char>(c))) out += c;
  }
  return out;
}

}  // namespace

TEST(Lexer, AgentDeclaration) {
  EXPECT_EQ(kinds("agent Person;"),
            (std::vector<TokenKind>{TokenKind::KwAgent, TokenKind::Ident, TokenKind::Semi, TokenKind::End}));
}

TEST(Lexer, GiveBody) {
  auto toks = tokenize("give width = $w;").tokens;
  ASSERT_EQ(toks.size(), 6u);
  EXPECT_EQ(toks[0].kind, TokenKind::KwGive);
  EXPECT_EQ(toks[1].kind, TokenKind::Ident);
  EXPECT_EQ(toks[2].kind, TokenKind::Assign);
  EXPECT_EQ(toks[3].kind, TokenKind::Param);
  EXPECT_EQ(toks[3].value, "w");
  EXPECT_EQ(toks[4].kind, TokenKind::Semi);
}

TEST(Lexer, LiteralsAndOperators) {
  auto toks = tokenize("x == -2.5 != \"a\\\"b\" -> # gone\n").tokens;
  ASSERT_EQ(toks.size(), 7u);
  EXPECT_EQ(toks[2].kind, TokenKind::Number);
  EXPECT_EQ(toks[2].text, "-2.5");
  EXPECT_EQ(toks[4].kind, TokenKind::String);
  EXPECT_EQ(toks[4].value, "a\"b");
  EXPECT_EQ(toks[5].kind, TokenKind::Arrow);
}

TEST(Lexer, IllegalCharacterAndUnterminatedString) {
  auto r = tokenize("agent @A;\n\"open");
  ASSERT_EQ(r.diagnostics.size(), 2u);
  EXPECT_EQ(r.diagnostics[0].code, "E-LEX-001");
  EXPECT_EQ(r.diagnostics[0].span.start_col, 7u);
  EXPECT_EQ(r.diagnostics[1].code, "E-LEX-002");
  EXPECT_EQ(r.diagnostics[1].span.start_line, 2u);
}

TEST(Lexer, BankTokensReconcatenateToSource) {
  const auto text = testutil::read_corpus("bank.pml");
  auto r = tokenize(text);
  EXPECT_TRUE(r.diagnostics.empty());
  std::string joined;
  for (const auto& t : r.tokens) joined += t.text;
  EXPECT_EQ(joined, strip_comments_and_space(text));
}

TEST(Parser, EmptyFile) {
  auto r = parse("");
  EXPECT_TRUE(r.ok());
  EXPECT_TRUE(r.ast.decls.empty());
}

TEST(Parser, GeometryHasTwoBundlesOneExtends) {
  auto r = parse(testutil::read_corpus("geometry.pml"));
  ASSERT_TRUE(r.ok());
  int bundles = 0, extends = 0;
  for (const auto& d : r.ast.decls)
    if (const auto* b = std::get_if<BundleDecl>(&d.node)) {
      ++bundles;
      extends += b->parent.has_value();
    }
  EXPECT_EQ(bundles, 2);
  EXPECT_EQ(extends, 1);
}

TEST(Parser, DeletedSemicolonGivesOneErrorAtFollowingToken) {
  const auto text = testutil::read_corpus("bank.pml");
  const std::string target = "give name = $identity;";
  const auto at = text.find(target) + target.size() - 1;
  auto mutated = text.substr(0, at) + text.substr(at + 1);
  auto r = parse(mutated, "bank.pml");
  ASSERT_EQ(r.diagnostics.size(), 1u);
  // the next token is the promiser of the following promise
  auto toks = tokenize(mutated, "bank.pml").tokens;
  auto next = std::find_if(toks.begin(), toks.end(), [](const Token& t) { return t.text == "$identity"; }) + 1;
  EXPECT_EQ(next->text, "Person");
  EXPECT_TRUE(overlaps(r.diagnostics[0].span, next->span));
}

TEST(Parser, RecoversAtSemicolonAndBrace) {
  auto r = parse("agent A B;\nbundle X { give ; give y; }\nagent C;\nflag ;\n");
  EXPECT_EQ(r.diagnostics.size(), 3u);
  std::size_t agents = 0;
  for (const auto& d : r.ast.decls) agents += std::holds_alternative<AgentDecl>(d.node);
  EXPECT_EQ(agents, 1u);  // `agent C` survives
  EXPECT_EQ(r.diagnostics[0].span.start_line, 1u);
  EXPECT_EQ(r.diagnostics[1].span.start_line, 2u);
  EXPECT_EQ(r.diagnostics[2].span.start_line, 4u);
}

TEST(Parser, ErrorCodes) {
  EXPECT_EQ(codes(parse("agent ;").diagnostics), std::vector<std::string>{"E-PARSE-001"});
  EXPECT_EQ(codes(parse("give x;").diagnostics), std::vector<std::string>{"E-PARSE-002"});
  EXPECT_EQ(codes(parse("type x : bool;").diagnostics), std::vector<std::string>{"E-PARSE-003"});
  EXPECT_EQ(codes(parse("agent A; A -> A : give x = ;").diagnostics), std::vector<std::string>{"E-PARSE-004"});
  EXPECT_EQ(codes(parse("agent A; A -> A : give x if 1;").diagnostics), std::vector<std::string>{"E-PARSE-005"});
  EXPECT_EQ(codes(parse("bundle X { keep x; }").diagnostics), std::vector<std::string>{"E-PARSE-006"});
}

TEST(Printer, EmptyAstPrintsNothing) { EXPECT_EQ(print(ModelAst{}), ""); }

TEST(Printer, NormalizesWhitespace) {
  auto a = parse("agent A,B;type w:num;A->B:give w=$x if w!=3 and not f;flag f;");
  auto b = parse("agent   A ,\n B ;\n\ntype w : num ;  A -> B : give w = $x\n  if w != 3\n and not f ;\nflag f;");
  ASSERT_TRUE(a.ok());
  ASSERT_TRUE(b.ok());
  EXPECT_EQ(print(a.ast), print(b.ast));
}

TEST(Printer, CorpusRoundTrip) {
  for (const auto& name : kCorpus) {
    auto first = parse(testutil::read_corpus(name), name);
    ASSERT_TRUE(first.ok()) << name;
    const auto printed = print(first.ast);
    auto second = parse(printed, name);
    ASSERT_TRUE(second.ok()) << name;
    EXPECT_TRUE(structurally_equal(first.ast, second.ast)) << name;
    EXPECT_EQ(print(second.ast), printed) << name;
  }
}

TEST(Resolver, BankPromisesMatchTheModel) {
  auto g = testutil::load_corpus("bank.pml");
  std::vector<std::string> got;
  for (const auto& p : g.promises()) got.push_back(describe(p));
  std::vector<std::string> expected{
      "Account -> Person : give account_functions",
      "Account -> Person : give keep_money_safe",
      "Account -> Person : use cash_payment",
      "Account -> Person : use customer",
      "Account -> Person : use employee",
      "Account -> Person : use name",
      "Account -> Person : use priv_update if name != owner and employee",
      "Account -> Person : use use_account if name == owner and not employee",
      "Person -> Account : give cash_payment",
      "Person -> Account : give customer",
      "Person -> Account : give employee",
      "Person -> Account : give name = $identity",
      "Person -> Account : give priv_update",
      "Person -> Account : give use_account",
  };
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, expected);
}

TEST(Resolver, UnknownAgentAtItsSpan) {
  auto r = load("agent A;\ntype x : num;\nA -> Nobody : give x = 1;\n");
  ASSERT_EQ(codes(r.diagnostics), std::vector<std::string>{"E-RESOLVE-001"});
  EXPECT_EQ(r.diagnostics[0].span.start_line, 3u);
  EXPECT_EQ(r.diagnostics[0].span.start_col, 6u);
  EXPECT_FALSE(r.ok());
}

TEST(Resolver, ExtendsCycleNamesBoth) {
  auto r = load("bundle A extends B { }\nbundle B extends A { }\n");
  ASSERT_EQ(codes(r.diagnostics), std::vector<std::string>{"E-RESOLVE-007"});
  EXPECT_NE(r.diagnostics[0].message.find("A"), std::string::npos);
  EXPECT_NE(r.diagnostics[0].message.find("B"), std::string::npos);
}

TEST(Resolver, ErrorCodes) {
  EXPECT_TRUE(contains(resolve_codes("agent A; A -> A : give nope;"), "E-RESOLVE-002"));
  EXPECT_TRUE(contains(resolve_codes("agent A; A -> A : bundle nope;"), "E-RESOLVE-003"));
  EXPECT_TRUE(contains(resolve_codes("agent A, A;"), "E-RESOLVE-004"));
  EXPECT_TRUE(contains(resolve_codes("type x : num; type x : str;"), "E-RESOLVE-005"));
  EXPECT_TRUE(contains(resolve_codes("bundle X {} bundle X {}"), "E-RESOLVE-006"));
  EXPECT_TRUE(contains(resolve_codes("type x : num; type y : str; bundle X { give x = $p; give y = $p; }"),
                       "E-RESOLVE-008"));
  EXPECT_TRUE(contains(resolve_codes("agent A; flag f; type x : num; A -> A : give x = f;"), "E-RESOLVE-009"));
  EXPECT_TRUE(contains(resolve_codes("agent A; type x : num; A -> A : give x if x;"), "E-RESOLVE-009"));
  EXPECT_TRUE(contains(resolve_codes("type a.b : num; type a . b : str;"), "E-RESOLVE-005"));
  EXPECT_TRUE(contains(resolve_codes("agent A; flag f; A -> A : give f = 1;"), "E-RESOLVE-011"));
  EXPECT_TRUE(contains(resolve_codes("agent A; A -> A : use $a = $b;"), "E-RESOLVE-012"));
}

TEST(Resolver, UseValueIsDroppedWithWarning) {
  auto r = load("agent A, B; type x : num; A -> B : use x = 3;");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(codes(r.diagnostics), std::vector<std::string>{"W-RESOLVE-001"});
  EXPECT_TRUE(r.graph->promises().front().body.constraints.empty());
}

TEST(Resolver, AutonomyWarning) {
  auto r = load("agent A, B; type x : num; type y : num; A -> B : give x = 1 if y == 2;");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(codes(r.diagnostics), std::vector<std::string>{"W-AUTONOMY-001"});
}

TEST(Resolver, IsDeterministic) {
  for (const auto& name : kCorpus) {
    auto ast = parse(testutil::read_corpus(name), name).ast;
    auto a = resolve(ast), b = resolve(ast);
    ASSERT_TRUE(a.ok()) << name;
    EXPECT_EQ(*a.graph, *b.graph) << name;
  }
}

TEST(Resolver, NumbersAreNormalized) {
  auto a = testutil::load_text("agent A, B; type angle : num; A -> B : give angle = 90.0;");
  auto b = testutil::load_text("agent A, B; type angle : num; A -> B : give angle = 90;");
  EXPECT_EQ(a, b);
}

TEST(Diagnostics, SpansStayInsideTheFile) {
  std::mt19937 rng(7);
  for (const auto& name : kCorpus) {
    const auto text = testutil::read_corpus(name);
    if (text.empty()) continue;
    std::vector<std::string> lines;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i)
      if (i == text.size() || text[i] == '\n') {
        lines.push_back(text.substr(start, i - start));
        start = i + 1;
      }
    for (const auto& m : mutation::single_token_mutants(text, name, 10, rng)) {
      for (const auto& d : load(m.text, name).diagnostics) {
        ASSERT_GE(d.span.start_line, 1u);
        ASSERT_LE(d.span.end_line, lines.size() + 1);
        ASSERT_LE(d.span.start_line, d.span.end_line);
      }
    }
  }
}

TEST(Mutation, EverySingleTokenMutantIsDiagnosedAtItsSpan) {
  std::mt19937 rng(2024);
  for (const auto& name : kCorpus) {
    const auto text = testutil::read_corpus(name);
    for (const auto& m : mutation::single_token_mutants(text, name, 25, rng)) {
      auto ds = load(m.text, name).diagnostics;
      const bool hit = std::any_of(ds.begin(), ds.end(), [&](const Diagnostic& d) {
        return d.severity == Severity::Error && overlaps(d.span, m.span);
      });
      EXPECT_TRUE(hit) << name << ": '" << m.original << "' -> '" << m.replacement << "' at "
                       << to_string(m.span);
    }
  }
}
