#include <gtest/gtest.h>

#include "ca/lint.hpp"
#include "test_support.hpp"

using namespace ca;
using namespace ca::lint;
using test_support::add_structures;
using test_support::count_code;
using test_support::load_model;

namespace {

const char* kItem = "ITEM = < Code:i:text + Amount:i:number >";

ced::ModelRepository model(const std::string& ced, const std::string& msl = kItem) {
  auto repo = ced::parse_model(ced);
  add_structures(repo, msl);
  return repo;
}

std::vector<Diagnostic> only(const LintReport& r, const std::string& code) {
  std::vector<Diagnostic> out;
  for (const auto& d : r.diagnostics)
    if (d.code == code) out.push_back(d);
  return out;
}

// A well-formed event body used by most snippets.
std::string event(int n, const std::string& name = "The clerk records an item") {
  return "event " + std::to_string(n) + " \"" + name + "\" {\n primary Clerk\n in \"Item\" message=ITEM\n out \"Receipt\" to Manager\n}\n";
}

}  // namespace

TEST(Lint, CleanSalesFixtureHasNoErrors) {
  auto report = run_lints(load_model("superstationery"));
  for (const auto& d : report.diagnostics) EXPECT_NE(d.severity, Severity::error) << format_text(d);
  EXPECT_EQ(report.count(Severity::warning), 0u) << format_text(report);
}

TEST(Lint, CleanSnippetHasNoFindings) {
  auto report = run_lints(model("process T {\n" + event(1) + event(2) + "1 -> 2\n}"));
  EXPECT_TRUE(report.diagnostics.empty()) << format_text(report);
}

TEST(Metamodel, EdgeIntoStart) {
  auto r = run_lints(model("process T {\n" + event(1) + "start -> 1 -> start\n}"));
  auto c01 = only(r, "CA-C01");
  ASSERT_EQ(c01.size(), 1u);
  EXPECT_EQ(c01[0].severity, Severity::error);
  EXPECT_EQ(c01[0].element, "T 1 -> start");
}

TEST(Metamodel, EdgeOutOfEnd) {
  auto r = run_lints(model("process T {\n" + event(1) + "end -> 1\n}"));
  EXPECT_EQ(count_code(r.diagnostics, "CA-C02"), 1);
}

TEST(Metamodel, AndJoinWithOneIncoming) {
  auto r = run_lints(model("process T {\n" + event(1) + event(2) + "node and-join J\n1 -> J -> 2\n}"));
  auto c03 = only(r, "CA-C03");
  ASSERT_EQ(c03.size(), 1u);
  EXPECT_EQ(c03[0].element, "J");
}

TEST(Metamodel, AndNodeInferredShape) {
  auto fork = run_lints(model("process T {\n" + event(1) + event(2) + event(3) + "node and A\n1 -> A -> 2\nA -> 3\n}"));
  EXPECT_EQ(count_code(fork.diagnostics, "CA-C03"), 0);
  auto bad = run_lints(model("process T {\n" + event(1) + event(2) + "node and A\n1 -> A -> 2\n}"));
  EXPECT_EQ(count_code(bad.diagnostics, "CA-C03"), 1);
}

TEST(Metamodel, OrMergeArity) {
  std::string merge = "process T {\n" + event(1) + event(2) + event(3) + "node or O\n1 -> O -> 3\n2 -> O\n}";
  std::string split = "process T {\n" + event(1) + event(2) + event(3) + "node or O\n1 -> O -> 2\nO -> 3\n}";
  EXPECT_EQ(count_code(run_lints(model(merge)).diagnostics, "CA-C04"), 0);
  EXPECT_EQ(count_code(run_lints(model(split)).diagnostics, "CA-C04"), 1);
  LintConfig strict;
  strict.strict_table9_c4 = true;
  EXPECT_EQ(count_code(run_lints(model(merge), strict).diagnostics, "CA-C04"), 1);
  EXPECT_EQ(count_code(run_lints(model(split), strict).diagnostics, "CA-C04"), 0);
}

TEST(Metamodel, DuplicateEventNumber) {
  auto r = run_lints(model("process T {\n" + event(1) + event(1, "The clerk files an item") + "}"));
  auto c05 = only(r, "CA-C05");
  ASSERT_EQ(c05.size(), 1u);
  EXPECT_EQ(c05[0].element, "T 1");
  EXPECT_EQ(c05[0].location.line, 7);
}

TEST(Metamodel, DuplicateVariantNumber) {
  auto r = run_lints(model(
      "process T {\nvariant-event 1 \"The clerk records an item\" {\n primary Clerk\n in \"Item\" message=ITEM\n"
      " variant 1 \"x\" { out \"A\" to M }\n variant 1 \"y\" { out \"B\" to N }\n}\n" + event(2) + event(3) +
      "1.1 -> 2\n}"));
  EXPECT_EQ(count_code(r.diagnostics, "CA-C06"), 1);
}

TEST(Metamodel, FormulaRoleAndStructureDelegation) {
  auto r = run_lints(model("process T {\n" + event(1) + "}",
                           "ITEM = < Code:i:text + Amount:i:number (:Code) >"));
  EXPECT_EQ(count_code(r.diagnostics, "CA-C07"), 1);
  auto c08 = run_lints(model("process T {\n" + event(1) + "}", "ITEM = [ A = < x:i:text > | B = < y:i:text > ]"));
  EXPECT_EQ(count_code(c08.diagnostics, "CA-C08"), 1);
}

TEST(Structures, ConditionReferencesMessageFields) {
  std::string ced =
      "process T {\nvariant-event 1 \"The clerk records an item\" {\n primary Clerk\n in \"Item\" message=ITEM\n"
      " variant 1 \"x\" condition=\":Colour = red\" { out \"A\" to M }\n variant 2 \"y\" condition=\":Code = b\" { }\n}\n" +
      event(2) + "1.1 -> 2\n}";
  auto s02 = only(run_lints(model(ced)), "CA-S02");
  ASSERT_EQ(s02.size(), 1u);
  EXPECT_EQ(s02[0].element, "T 1.1");
}

TEST(Unity, InterfaceOnlyEventLacksPrimary) {
  auto r = run_lints(model("process T {\nevent 1 \"The clerk records an item\" {\n interface Clerk\n"
                           " in \"Item\" message=ITEM\n out \"R\" to M\n}\n}"));
  auto u01 = only(r, "CA-U01");
  ASSERT_EQ(u01.size(), 1u);
  EXPECT_EQ(u01[0].severity, Severity::error);
}

TEST(Unity, MessageWithoutInputFields) {
  auto r = run_lints(model("process T {\n" + event(1) + "}", "ITEM = < Code:g:number + Total:d:number (:Code) >"));
  auto u02 = only(r, "CA-U02");
  ASSERT_EQ(u02.size(), 1u);
  EXPECT_EQ(u02[0].severity, Severity::warning);
}

TEST(Unity, MissingMessage) {
  auto r = run_lints(model("process T {\nevent 1 \"The clerk records an item\" {\n primary Clerk\n out \"R\" to M\n}\n}"));
  EXPECT_EQ(count_code(r.diagnostics, "CA-U02"), 1);
}

TEST(Unity, ReactionAdvisory) {
  auto repo = model("process T {\nevent 1 \"The clerk records an item\" {\n primary Clerk\n in \"Item\" message=ITEM\n}\n}");
  EXPECT_EQ(count_code(check_unity(repo), "CA-U03"), 1);
  EXPECT_EQ(count_code(check_unity(repo, {{"T 1", false}}), "CA-U03"), 1);
  EXPECT_EQ(count_code(check_unity(repo, {{"T 1", true}}), "CA-U03"), 0);
}

TEST(Unity, FullySpecifiedSale1HasNoUnityFindings) {
  auto repo = load_model("superstationery");
  auto diags = check_unity(repo);
  for (const auto& d : diags) EXPECT_NE(d.element, "SALE 1") << format_text(d);
}

TEST(Guidelines, NamingPattern) {
  EXPECT_TRUE(follows_naming_pattern("A client places an order"));
  EXPECT_TRUE(follows_naming_pattern("The logistics manager books a truck"));
  EXPECT_TRUE(follows_naming_pattern("Client registers product"));
  EXPECT_FALSE(follows_naming_pattern("Order placement"));
  EXPECT_FALSE(follows_naming_pattern("The client places"));
  EXPECT_FALSE(follows_naming_pattern("Process address"));
  auto r = run_lints(model("process T {\n" + event(1, "Order registration") + "}"));
  auto g01 = only(r, "CA-G01");
  ASSERT_EQ(g01.size(), 1u);
  EXPECT_EQ(g01[0].severity, Severity::info);
}

TEST(Guidelines, VariantsSharingTheirPath) {
  std::string ced =
      "process T {\nvariant-event 1 \"The clerk records an item\" {\n primary Clerk\n in \"Item\" message=ITEM\n"
      " variant 1 \"x\" { out \"A\" to M }\n variant 2 \"y\" { out \"B\" to N }\n}\n" + event(5) + "1.1 -> 5\n1.2 -> 5\n}";
  auto g02 = only(run_lints(model(ced)), "CA-G02");
  ASSERT_EQ(g02.size(), 1u);
  EXPECT_EQ(g02[0].element, "T 1");
  EXPECT_EQ(g02[0].severity, Severity::warning);
}

TEST(Guidelines, SalesVariantsLeadToDifferentPaths) {
  EXPECT_EQ(count_code(run_lints(load_model("superstationery")).diagnostics, "CA-G02"), 0);
}

TEST(Guidelines, DiagramSizeLimit) {
  // 20 events, 20 edges, 60 interactions (3 per event) -> 100 elements.
  std::string ced = "process T {\n";
  for (int i = 1; i <= 20; ++i) ced += event(i);
  for (int i = 1; i < 20; ++i) ced += std::to_string(i) + " -> " + std::to_string(i + 1) + "\n";
  ced += "}";
  auto repo = model(ced);
  EXPECT_EQ(diagram_element_count(repo.diagrams[0], repo), 20u + 19u + 40u);
  auto r = run_lints(repo);
  EXPECT_EQ(count_code(r.diagnostics, "CA-G03"), 1);

  LintConfig disabled;
  disabled.disabled.insert("CA-G03");
  auto without = run_lints(repo, disabled);
  EXPECT_EQ(count_code(without.diagnostics, "CA-G03"), 0);
  EXPECT_EQ(without.diagnostics.size() + 1, r.diagnostics.size());

  LintConfig roomy;
  roomy.max_diagram_elements = 100;
  EXPECT_EQ(count_code(run_lints(repo, roomy).diagnostics, "CA-G03"), 0);
}

TEST(Guidelines, LabelMatchesMessage) {
  auto ok = run_lints(model("process T {\nevent 1 \"The clerk records an item\" {\n primary Clerk\n"
                            " in \"item\" message=ITEM\n out \"R\" to M\n}\n}"));
  EXPECT_EQ(count_code(ok.diagnostics, "CA-G04"), 0);
  auto bad = run_lints(model("process T {\nevent 1 \"The clerk records an item\" {\n primary Clerk\n"
                             " in \"Goods\" message=ITEM\n out \"R\" to M\n}\n}"));
  EXPECT_EQ(count_code(bad.diagnostics, "CA-G04"), 1);
}

TEST(Guidelines, DeepSpecialisation) {
  std::string ced =
      "process T {\nvariant-event 1 \"The clerk records an item\" {\n primary Clerk\n in \"Item\" message=ITEM\n"
      " variant 1 \"x\" { out \"A\" to M\n  variant 1 \"xa\" { variant 1 \"xaa\" { } variant 2 \"xab\" { } } }\n"
      " variant 2 \"y\" { out \"B\" to N }\n}\n}";
  auto g05 = only(run_lints(model(ced)), "CA-G05");
  ASSERT_EQ(g05.size(), 2u);
  EXPECT_EQ(g05[0].element, "T 1.1.1.1");
}

TEST(Guidelines, UnreachableLogicalNode) {
  auto r = run_lints(model("process T {\n" + event(1) + "node or O\n}"));
  EXPECT_EQ(count_code(r.diagnostics, "CA-G06"), 1);
}

TEST(Config, ParsesKeys) {
  auto cfg = parse_config(
      "# project settings\nstage = design-memory\nmax_diagram_elements = 70\n"
      "disable = CA-G01, G03\nseverity.CA-G04 = error\nstrict_table9_c4 = yes\n");
  EXPECT_EQ(cfg.stage, msl::Stage::design_memory);
  EXPECT_EQ(cfg.max_diagram_elements, 70);
  EXPECT_EQ(cfg.disabled, (std::set<std::string>{"CA-G01", "CA-G03"}));
  EXPECT_EQ(cfg.severity_overrides.at("CA-G04"), Severity::error);
  EXPECT_TRUE(cfg.strict_table9_c4);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("severity.CA-C01 = info"), ConfigError);
  EXPECT_NO_THROW(parse_config("severity.CA-C01 = warning"));
  EXPECT_THROW(parse_config("colour = red"), ConfigError);
  EXPECT_THROW(parse_config("disable = CA-Z99"), ConfigError);
  EXPECT_THROW(parse_config("stage = deployment"), ConfigError);
  EXPECT_THROW(parse_config("max_diagram_elements = -3"), ConfigError);
  try {
    parse_config("\n\nbogus line");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.location().line, 3);
  }
}

TEST(Report, OverridesApply) {
  LintConfig cfg;
  cfg.severity_overrides["CA-G01"] = Severity::error;
  auto r = run_lints(model("process T {\n" + event(1, "Order registration") + "}"), cfg);
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].severity, Severity::error);
  EXPECT_TRUE(r.has_errors());
}

TEST(Report, DisablingIsMonotone) {
  auto repo = load_model("superstationery");
  auto full = run_lints(repo);
  for (const auto& info : kCodeTable) {
    LintConfig cfg;
    cfg.disabled.insert(std::string(info.code));
    auto reduced = run_lints(repo, cfg);
    std::vector<Diagnostic> expected;
    for (const auto& d : full.diagnostics)
      if (d.code != info.code) expected.push_back(d);
    EXPECT_EQ(format_text(LintReport{expected}), format_text(reduced)) << info.code;
  }
}

TEST(Report, DeterministicAndOrdered) {
  auto repo = load_model("superstationery");
  auto a = run_lints(repo), b = run_lints(repo);
  EXPECT_EQ(format_text(a), format_text(b));
  EXPECT_EQ(format_json(a), format_json(b));
  EXPECT_TRUE(std::is_sorted(a.diagnostics.begin(), a.diagnostics.end(), report_order));
}

TEST(Report, TextAndJsonShapes) {
  auto d = make_diagnostic("CA-C01", "start node has an incoming precedence", {"a.ced", 3, 5}, "T 1 -> start");
  EXPECT_EQ(format_text(d), "a.ced:3:5: error: start node has an incoming precedence [CA-C01] (T 1 -> start)");
  auto j = nlohmann::json::parse(format_json(LintReport{{d, make_diagnostic("CA-G03", "big", {"b.ced", 1, 1})}}));
  ASSERT_TRUE(j.is_array());
  EXPECT_EQ(j[0]["code"], "CA-C01");
  EXPECT_EQ(j[0]["line"], 3);
  EXPECT_TRUE(j[1]["element"].is_null());
  std::vector<std::string> keys;
  for (auto it = j[0].begin(); it != j[0].end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys.size(), 7u);
}
