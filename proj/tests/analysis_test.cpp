#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "common.hpp"
#include "pml/analysis/conflicts.hpp"
#include "pml/analysis/dispatch.hpp"
#include "pml/analysis/hierarchy.hpp"
#include "pml/analysis/inheritance.hpp"
#include "pml/analysis/roles.hpp"
#include "pml/analysis/signature.hpp"

using namespace pml;
using namespace pml::analysis;

namespace {

const std::string kShapes = R"(
type width : num;
type height : num;
type angle : num;
type sides : num;
type colour : str;
flag subtype;
bundle rectangle {
  give width = $w;
  give height = $h;
  give angle = 90;
  give sides = 4;
}
)";

Bundle bundle_of(const std::string& decls, const std::string& name) {
  auto g = testutil::load_text(kShapes + decls);
  return *g.find_bundle(name);
}

Bundle rectangle() { return bundle_of("", "rectangle"); }

Condition flag(const std::string& f, bool negated = false) { return {{FlagLiteral{f, negated}}}; }

std::vector<std::string> codes(const std::vector<Finding>& fs) {
  std::vector<std::string> out;
  for (const auto& f : fs) out.push_back(f.code);
  return out;
}

std::size_t count(const std::vector<Finding>& fs, const std::string& code) {
  return std::count_if(fs.begin(), fs.end(), [&](const Finding& f) { return f.code == code; });
}

std::size_t count_severity(const std::vector<Finding>& fs, FindingSeverity s) {
  return std::count_if(fs.begin(), fs.end(), [&](const Finding& f) { return f.severity == s; });
}

}  // namespace

// signatures and the spanning set

TEST(BundleSignature, InvariantUnderParameterRenaming) {
  auto renamed = bundle_of("bundle r2 { give width = $a; give height = $b; give angle = 90; give sides = 4; }", "r2");
  EXPECT_EQ(bundle_signature(rectangle()), bundle_signature(renamed));
}

TEST(BundleSignature, EmptyAndSquareDiffer) {
  EXPECT_TRUE(bundle_signature(Bundle{"e", {}, {}}).bodies.empty());
  auto square = bundle_of("bundle square extends rectangle { give $w = $h; }", "square");
  EXPECT_NE(bundle_signature(rectangle()), bundle_signature(square));
}

TEST(BundleSignature, SharedParametersMatter) {
  auto tied = bundle_of("bundle t { give width = $a; give height = $a; }", "t");
  auto free = bundle_of("bundle f { give width = $a; give height = $b; }", "f");
  EXPECT_NE(bundle_signature(tied), bundle_signature(free));
}

TEST(SpanningSet, OneClassForThreeAttachments) {
  auto g = testutil::load_text(kShapes + "agent A, B, C, D;\nA -> D : bundle rectangle;\nB -> D : bundle rectangle;\n"
                                         "C -> D : bundle rectangle;\n");
  auto set = extract_spanning_set(g);
  ASSERT_EQ(set.size(), 1u);
  EXPECT_EQ(set[0].name, "rectangle");
  EXPECT_EQ(set[0].occurrences.size(), 4u);
}

TEST(SpanningSet, EmptyGraph) { EXPECT_TRUE(extract_spanning_set(testutil::load_text("")).empty()); }

TEST(SpanningSet, BankSeparatesBothSides) {
  auto set = extract_spanning_set(testutil::load_corpus("bank.pml"));
  ASSERT_EQ(set.size(), 2u);
  std::vector<std::string> names{set[0].name, set[1].name};
  std::sort(names.begin(), names.end());
  EXPECT_EQ(names, (std::vector<std::string>{"Account->Person", "Person->Account"}));
}

// roles

TEST(Roles, WebServersShareARole) {
  auto roles = discover_roles(testutil::load_corpus("web.pml"));
  ASSERT_EQ(roles.size(), 2u);
  auto servers = std::find_if(roles.begin(), roles.end(), [](const Role& r) { return r.members.size() == 2; });
  ASSERT_NE(servers, roles.end());
  EXPECT_EQ(servers->members, (std::vector<std::string>{"web1", "web2"}));
}

TEST(Roles, EmptyGraphHasNone) { EXPECT_TRUE(discover_roles(testutil::load_text("")).empty()); }

TEST(Roles, BankPersonAndAccount) {
  auto roles = discover_roles(testutil::load_corpus("bank.pml"));
  ASSERT_EQ(roles.size(), 2u);
  std::vector<std::vector<std::string>> members{roles[0].members, roles[1].members};
  std::sort(members.begin(), members.end());
  EXPECT_EQ(members, (std::vector<std::vector<std::string>>{{"Account"}, {"Person"}}));
  EXPECT_NE(roles[0].label, roles[1].label);
}

TEST(Roles, ConstraintsDoNotSplitRoles) {
  auto g = testutil::load_text(kShapes + "agent A, B, C;\nA -> C : give width = 1;\nB -> C : give width = 2;\n");
  auto roles = discover_roles(g);
  ASSERT_EQ(roles.size(), 2u);
  EXPECT_EQ(role_signature(g, "A"), role_signature(g, "B"));
}

// extension, specialization, substitution

TEST(Extension, SquareExtendsRectangle) {
  auto square = bundle_of("bundle square extends rectangle { give $w = $h; }", "square");
  EXPECT_TRUE(check_extension(square, rectangle()));
  EXPECT_FALSE(check_extension(rectangle(), square));
  EXPECT_TRUE(check_extension(rectangle(), rectangle()));
}

TEST(Specialization, SwitchedChildIsOk) {
  auto parent = bundle_of("bundle ext_parent { give colour = \"grey\"; }", "ext_parent");
  auto child = bundle_of("bundle child { give colour = \"red\"; }", "child");
  auto r = check_specialization(parent, flag("subtype", true), {{child, flag("subtype")}});
  EXPECT_TRUE(r.ok) << (r.findings.empty() ? "" : r.findings[0].message);
}

TEST(Specialization, ExtraTypeIsMismatch) {
  auto child = bundle_of("bundle child { give colour = \"red\"; give width = 3; give width = $x; }", "child");
  auto r = check_specialization(rectangle(), flag("subtype", true), {{child, flag("subtype")}});
  EXPECT_FALSE(r.ok);
  EXPECT_TRUE(r.has("S-TYPE-MISMATCH"));
}

TEST(Specialization, TwoChildrenOnSameFlagOverlap) {
  auto a = bundle_of("bundle a { give width = 1; }", "a");
  auto b = bundle_of("bundle b { give width = 2; }", "b");
  auto r = check_specialization(rectangle(), flag("subtype", true), {{a, flag("subtype")}, {b, flag("subtype")}});
  EXPECT_FALSE(r.ok);
  ASSERT_EQ(count(r.findings, "S-NON-EXCLUSIVE"), 1u);
  EXPECT_NE(r.findings[0].message.find("subtype=true"), std::string::npos);
}

TEST(Substitution, CompleteReplacementIsOk) {
  auto child = bundle_of("bundle c { give width = $x; give height = $x; give angle = 90; give sides = 4; }", "c");
  EXPECT_TRUE(check_substitution(rectangle(), flag("subtype", true), {{child, flag("subtype")}}).ok);
}

TEST(Substitution, PartialReplacementIsIncomplete) {
  auto child = bundle_of("bundle c { give width = $x; give height = $x; give angle = 90; }", "c");
  auto r = check_substitution(rectangle(), flag("subtype", true), {{child, flag("subtype")}});
  EXPECT_EQ(codes(r.findings), std::vector<std::string>{"S-INCOMPLETE"});
}

TEST(Substitution, UnconditionedParentAndChildOverlap) {
  auto r = check_substitution(rectangle(), {}, {{rectangle(), {}}});
  EXPECT_EQ(codes(r.findings), std::vector<std::string>{"S-NON-EXCLUSIVE"});
}

// is-a

TEST(IsA, SquareIsNotARectangle) {
  auto square = bundle_of("bundle square extends rectangle { give $w = $h; }", "square");
  auto v = check_is_a(square, rectangle());
  EXPECT_EQ(v.outcome, IsAVerdict::Outcome::Restricted);
  EXPECT_EQ(v.detail(), "width ~ height");
  ASSERT_EQ(v.merged.size(), 1u);
  EXPECT_FALSE(v.involved.empty());
}

TEST(IsA, SelfIsA) { EXPECT_EQ(check_is_a(rectangle(), rectangle()).outcome, IsAVerdict::Outcome::IsA); }

TEST(IsA, FreshAttributeCannotRestrict) {
  auto coloured = bundle_of("bundle c extends rectangle { give colour = $c; }", "c");
  EXPECT_EQ(check_is_a(coloured, rectangle()).outcome, IsAVerdict::Outcome::IsA);
}

// Only equalities among the parent's own attributes and constants count, so
// pinning a free parent attribute to a new constant is not a restriction.
TEST(IsA, BindingAFreeAttributeIsNotARestriction) {
  auto fixed = bundle_of("bundle f extends rectangle { give width = 5; }", "f");
  EXPECT_EQ(check_is_a(fixed, rectangle()).outcome, IsAVerdict::Outcome::IsA);
  auto right = bundle_of("bundle r extends rectangle { give width = 90; }", "r");
  EXPECT_EQ(check_is_a(right, rectangle()).outcome, IsAVerdict::Outcome::Restricted);
  EXPECT_EQ(check_is_a(right, rectangle()).detail(), "width ~ 90, width ~ angle");
}

TEST(IsA, ConstantClashIsInconsistent) {
  auto tri = bundle_of("bundle tri { give sides = 3; }", "tri");
  auto v = check_is_a(tri, rectangle());
  EXPECT_EQ(v.outcome, IsAVerdict::Outcome::Inconsistent);
  EXPECT_EQ(v.detail(), "3 vs 4");
}

TEST(IsA, UnsatisfiableInputRejected) {
  auto bad = bundle_of("bundle bad { give sides = 3; give sides = 4; }", "bad");
  EXPECT_THROW(check_is_a(bad, rectangle()), std::invalid_argument);
}

// override policy

TEST(OverridePolicy, IdenticalConstraintIsFine) {
  auto base = bundle_of("bundle b { give angle = 90; }", "b");
  EXPECT_TRUE(check_override_policy(base, base).empty());
}

TEST(OverridePolicy, SquareNarrowsWidthAndHeight) {
  auto child = bundle_of("bundle s { give $w = $h; }", "s");
  auto fs = check_override_policy(rectangle(), child);
  EXPECT_EQ(codes(fs), (std::vector<std::string>{"O-NARROWED", "O-NARROWED"}));
  for (const auto& f : fs) EXPECT_EQ(f.severity, FindingSeverity::PolicyViolation);
}

TEST(OverridePolicy, ClashIsContradiction) {
  auto base = bundle_of("bundle b { give angle = 90; }", "b");
  auto child = bundle_of("bundle c { give angle = 60; }", "c");
  EXPECT_EQ(codes(check_override_policy(base, child)), std::vector<std::string>{"O-CONTRADICTED"});
}

// dispatch

TEST(Dispatch, SpecializationFixtureValidates) {
  auto g = testutil::load_corpus("dispatch.pml");
  auto r = check_dispatch_pattern(g, "S", "R", "subtype");
  EXPECT_TRUE(r.ok) << (r.findings.empty() ? "" : r.findings[0].message);
  EXPECT_TRUE(check_dispatch_pattern(testutil::load_corpus("switch.pml"), "S", "R", "kind").ok);
}

TEST(Dispatch, EachMutationHasItsCode) {
  const auto text = testutil::read_corpus("dispatch.pml");
  auto without = [&](const std::string& line) {
    auto t = text;
    t.erase(t.find(line), line.size());
    return testutil::load_text(t);
  };
  EXPECT_EQ(codes(check_dispatch_pattern(without("R -> S : give subtype;"), "S", "R", "subtype").findings),
            std::vector<std::string>{"P-DISPATCH-MISSING-GIVE"});
  EXPECT_EQ(codes(check_dispatch_pattern(without("S -> R : use subtype;"), "S", "R", "subtype").findings),
            std::vector<std::string>{"P-DISPATCH-MISSING-USAGE"});
  auto overlapping = testutil::load_text(text + "S -> R : bundle ext_parent if subtype;\n");
  auto r = check_dispatch_pattern(overlapping, "S", "R", "subtype");
  ASSERT_EQ(codes(r.findings), std::vector<std::string>{"P-DISPATCH-NON-EXCLUSIVE"});
  EXPECT_NE(r.findings[0].message.find("subtype=true"), std::string::npos);
}

TEST(Dispatch, OverlappingKindsAndMissingBranches) {
  auto text = testutil::read_corpus("switch.pml");
  text.replace(text.find("\"type2\""), 7, "\"type1\"");
  auto r = check_dispatch_pattern(testutil::load_text(text), "S", "R", "kind");
  EXPECT_EQ(codes(r.findings), std::vector<std::string>{"P-DISPATCH-NON-EXCLUSIVE"});

  auto g = testutil::load_corpus("web.pml");
  EXPECT_TRUE(check_dispatch_pattern(g, "web1", "client", "http").has("P-DISPATCH-NO-BRANCHES"));
  EXPECT_THROW(check_dispatch_pattern(g, "nobody", "client", "http"), std::invalid_argument);
}

// conflicts

TEST(Conflicts, MergedSquareRectangleAgentIsRestricted) {
  auto fs = detect_conflicts(testutil::load_corpus("geometry_merged.pml"));
  ASSERT_EQ(codes(fs), std::vector<std::string>{"C-RESTRICTED"});
  EXPECT_EQ(fs[0].severity, FindingSeverity::Restricted);
  EXPECT_NE(fs[0].message.find("height ~ width"), std::string::npos);
}

TEST(Conflicts, BankHasNoInconsistency) {
  auto fs = detect_conflicts(testutil::load_corpus("bank.pml"));
  EXPECT_EQ(count_severity(fs, FindingSeverity::Inconsistent), 0u);
  EXPECT_TRUE(fs.empty());
}

TEST(Conflicts, SidesFourAndFiveClash) {
  auto g = testutil::load_text(kShapes + "agent A, B;\nA -> B : give sides = 4;\nA -> B : give sides = 5;\n");
  auto fs = detect_conflicts(g);
  ASSERT_EQ(codes(fs), std::vector<std::string>{"C-INCONSISTENT"});
  EXPECT_EQ(fs[0].promises.size(), 2u);
}

TEST(Conflicts, ClashOnlyUnderACondition) {
  auto g = testutil::load_text(kShapes + "agent A, B;\nA -> B : give sides = 4;\nA -> B : give sides = 5 if subtype;\n"
                                         "B -> A : give subtype;\n");
  auto fs = detect_conflicts(g);
  EXPECT_EQ(count(fs, "C-INCONSISTENT"), 1u);
  EXPECT_EQ(count(fs, "C-GUARD-BYPASS"), 1u);
}

TEST(Conflicts, UnconditionalPrivilegedUpdateIsFlagged) {
  auto text = testutil::read_corpus("bank.pml") + "Account -> Person : use priv_update;\n";
  auto fs = detect_conflicts(testutil::load_text(text));
  ASSERT_EQ(codes(fs), std::vector<std::string>{"C-GUARD-BYPASS"});
  EXPECT_EQ(fs[0].severity, FindingSeverity::PolicyViolation);
  EXPECT_NE(fs[0].message.find("priv_update"), std::string::npos);
}

TEST(Conflicts, EveryFindingCitesAPromise) {
  for (const char* name : {"geometry_merged.pml", "bank.pml", "dispatch.pml"})
    for (const auto& f : detect_conflicts(testutil::load_corpus(name))) EXPECT_FALSE(f.promises.empty());
}

// class hierarchy

TEST(Hierarchy, BankSplitsAccountIntoTwo) {
  auto h = derive_class_hierarchy(testutil::load_corpus("bank.pml"));
  ASSERT_EQ(h.classes.size(), 2u);
  const RoleClass* account = nullptr;
  const RoleClass* person = nullptr;
  for (const auto& rc : h.classes) (rc.role.members == std::vector<std::string>{"Account"} ? account : person) = &rc;
  ASSERT_TRUE(account && person);

  std::vector<std::string> base;
  for (const auto& b : account->base) base.push_back(describe(b));
  EXPECT_EQ(base, (std::vector<std::string>{"give account_functions", "give keep_money_safe", "use cash_payment",
                                            "use customer", "use employee", "use name"}));
  ASSERT_EQ(account->subtypes.size(), 2u);
  EXPECT_TRUE(mutually_exclusive(account->subtypes[0].condition, account->subtypes[1].condition).exclusive);
  EXPECT_TRUE(account->warnings.empty());
  EXPECT_TRUE(person->subtypes.empty());
}

TEST(Hierarchy, UnconditionalGraphHasNoSubtypes) {
  for (const auto& rc : derive_class_hierarchy(testutil::load_corpus("web.pml")).classes)
    EXPECT_TRUE(rc.subtypes.empty());
}

TEST(Hierarchy, ThreeWayExclusiveSplit) {
  auto g = testutil::load_text(kShapes + R"(
agent A, B;
type kind : str;
A -> B : give width = 1 if kind == "a";
A -> B : give width = 2 if kind == "b";
A -> B : give width = 3 if kind == "c";
B -> A : give kind;
)");
  auto h = derive_class_hierarchy(g);
  const auto& rc = *std::find_if(h.classes.begin(), h.classes.end(),
                                 [](const RoleClass& c) { return c.role.members[0] == "A"; });
  EXPECT_EQ(rc.subtypes.size(), 3u);
}

TEST(Hierarchy, OverlappingConditionsStayInBase) {
  auto g = testutil::load_text(kShapes + R"(
agent A, B;
flag f;
flag e;
A -> B : give width = 1 if f;
A -> B : give height = 2 if e;
B -> A : give f;
B -> A : give e;
)");
  auto h = derive_class_hierarchy(g);
  const auto& rc = *std::find_if(h.classes.begin(), h.classes.end(),
                                 [](const RoleClass& c) { return c.role.members[0] == "A"; });
  EXPECT_TRUE(rc.subtypes.empty());
  EXPECT_EQ(rc.base.size(), 2u);
  EXPECT_EQ(rc.warnings.size(), 1u);
}
