#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "ca/msl.hpp"

using namespace ca;
using namespace ca::msl;

namespace {

std::string read_fixture(const std::string& rel) {
  std::ifstream in(std::string(CA_FIXTURE_DIR) + "/" + rel);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool has_code(const std::vector<Diagnostic>& diags, const std::string& code) {
  for (const auto& d : diags)
    if (d.code == code) return true;
  return false;
}

}  // namespace

TEST(MslParse, OrderHasFiveComplexSubstructuresAndNineFields) {
  auto ms = parse_message_structure(read_fixture("msl/order.msl"), "order.msl");
  EXPECT_EQ(ms.name, "ORDER");
  EXPECT_EQ(ms.root.kind, Kind::aggregation);
  EXPECT_EQ(count_complex(ms.root), 5u);
  auto fields = collect_fields(ms);
  ASSERT_EQ(fields.size(), 9u);
  EXPECT_EQ(fields[0].props.op, AcquisitionOp::generation);
  EXPECT_EQ(fields[0].props.example, "10352");
  EXPECT_EQ(fields[4].props.domain.text(), "Client address");
}

TEST(MslParse, MinimalAggregation) {
  auto ms = parse_message_structure("A = < a >");
  EXPECT_EQ(ms.root.kind, Kind::aggregation);
  EXPECT_EQ(ms.root.name, "A");
  ASSERT_EQ(ms.root.children.size(), 1u);
  EXPECT_EQ(ms.root.children[0].kind, Kind::field);
  EXPECT_EQ(ms.root.children[0].name, "a");
}

TEST(MslParse, SpecialisationAsInitialSubstructureIsRejected) {
  EXPECT_THROW(parse_message_structure("A = [ a | b ]"), StructureError);
}

TEST(MslParse, LenientModeKeepsSpecialisationRootForLint) {
  auto ms = parse_message_structure("A = [ a | b ]", "", ParseOptions{false});
  EXPECT_EQ(ms.root.kind, Kind::specialisation);
  EXPECT_TRUE(has_code(validate_structure(desugar(ms), Stage::analysis), "CA-C08"));
}

TEST(MslParse, SyntaxErrorsCarryPositions) {
  try {
    parse_message_structure("A = < a +\n  b ");
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.location().line, 2);
    EXPECT_GT(e.location().column, 0);
  }
  EXPECT_THROW(parse_message_structure("A < a >"), SyntaxError);
  EXPECT_THROW(parse_message_structure("A = < >"), SyntaxError);
  EXPECT_THROW(parse_message_structure("A = < a }"), SyntaxError);
  EXPECT_THROW(parse_message_structure("A = < a : x >"), SyntaxError);
  EXPECT_THROW(parse_message_structure("A = < a : i : [one] >"), SyntaxError);
}

TEST(MslParse, EnumerationDomain) {
  auto ms = parse_message_structure("A = < t : i : [theo|prac] >");
  const auto& d = ms.root.children[0].props.domain;
  EXPECT_EQ(d.kind, DomainRef::Kind::enumeration);
  EXPECT_EQ(d.tokens, (std::vector<std::string>{"theo", "prac"}));
}

TEST(MslParse, FieldPropertiesBlock) {
  auto ms = parse_message_structure(
      "L = < Price : i : money + Quantity : i : number + Amount : d : money (:Price * :Quantity) >\n"
      "field Price { description=\"Unit price\" label=\"Price\" mandatory=true visible=false }\n");
  auto fields = collect_fields(ms);
  EXPECT_EQ(fields[0].props.description, "Unit price");
  EXPECT_EQ(fields[0].props.label, "Price");
  EXPECT_EQ(fields[0].props.mandatory, true);
  EXPECT_EQ(fields[0].props.visible, false);
  ASSERT_TRUE(fields[2].props.derivation_formula);
  EXPECT_EQ(fields[2].props.derivation_formula->field_refs, (std::vector<std::string>{"Price", "Quantity"}));
  EXPECT_THROW(parse_message_structure("A = < a >\nfield b { label=\"x\" }"), SyntaxError);
  EXPECT_THROW(parse_message_structure("A = < X = < a > + Y = < a > >\nfield a { label=\"x\" }"), SyntaxError);
  EXPECT_NO_THROW(parse_message_structure("A = < X = < a > + Y = < a > >\nfield Y/a { label=\"x\" }"));
}

TEST(MslDesugar, IterationBodyIsWrapped) {
  auto ms = desugar(parse_message_structure("X = { a + b }"));
  ASSERT_EQ(ms.root.children.size(), 1u);
  const auto& body = ms.root.children[0];
  EXPECT_EQ(body.kind, Kind::aggregation);
  EXPECT_EQ(body.name, "X_1");
  ASSERT_EQ(body.children.size(), 2u);
  EXPECT_EQ(body.children[0].name, "a");
}

TEST(MslDesugar, ExplicitOrderIsFixedPoint) {
  auto ms = parse_message_structure(read_fixture("msl/order.msl"));
  EXPECT_EQ(desugar(ms), ms);
}

TEST(MslDesugar, VariantsAreWrappedInAggregations) {
  auto ms = desugar(parse_message_structure(read_fixture("msl/assignment_sugared.msl")));
  const auto& type = ms.root.children[2];
  ASSERT_EQ(type.kind, Kind::specialisation);
  ASSERT_EQ(type.children.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(type.children[i].kind, Kind::aggregation);
    EXPECT_EQ(type.children[i].name, "TYPE_" + std::to_string(i + 1));
    EXPECT_EQ(type.children[i].children.size(), 2u);
  }
  auto single = desugar(parse_message_structure("A = < S = [ a | b ] >"));
  EXPECT_EQ(single.root.children[0].children[1].kind, Kind::aggregation);
  EXPECT_EQ(single.root.children[0].children[1].name, "S_2");
}

TEST(MslDesugar, AnonymousNamesUseParentAndPosition) {
  auto ms = desugar(parse_message_structure("A = < a + < b + c > + { d } >"));
  EXPECT_EQ(ms.root.children[1].name, "A_2");
  EXPECT_EQ(ms.root.children[2].name, "A_3");
  EXPECT_EQ(ms.root.children[2].children[0].name, "A_3_1");
}

TEST(MslDesugar, Idempotent) {
  for (const char* src : {"X = { a + b }", "A = < a + < b + c > + { d } + S = [ e | f + g ] >"}) {
    auto once = desugar(parse_message_structure(src));
    EXPECT_EQ(desugar(once), once) << src;
  }
}

TEST(MslSerialize, SingleFieldOneLiner) {
  EXPECT_EQ(serialize(parse_message_structure("A = < a >")), "A = < a:i:text >\n");
}

TEST(MslSerialize, SpecialisationUsesBar) {
  auto text = serialize(desugar(parse_message_structure("A = < S = [ a | b | c ] >")));
  EXPECT_NE(text.find("S = ["), std::string::npos);
  EXPECT_NE(text.find(" |\n"), std::string::npos);
  EXPECT_NE(text.find("]"), std::string::npos);
}

TEST(MslSerialize, RoundTripOnFixtures) {
  for (const char* f : {"msl/order.msl", "msl/assignment.msl", "msl/assignment_sugared.msl"}) {
    auto d = desugar(parse_message_structure(read_fixture(f)));
    auto text = serialize(d);
    EXPECT_EQ(desugar(parse_message_structure(text)), d) << f << "\n" << text;
  }
}

TEST(MslSerialize, RoundTripKeepsProperties) {
  auto d = desugar(parse_message_structure(
      "L = < X = < a > + Y = < a : d : money (:b) > + b : i : text \"q\\\"uote\" >\n"
      "field X/a { description=\"first\" init=\"today()\" mandatory=false }\n"
      "field Y/a { label=\"second\" visible=true }\n"));
  EXPECT_EQ(desugar(parse_message_structure(serialize(d))), d) << serialize(d);
}

TEST(MslSerialize, CanonicalIndentation) {
  auto text = serialize(desugar(parse_message_structure("A = < a + B = < b + c > >")));
  EXPECT_EQ(text, "A = <\n  a:i:text +\n  B = <\n    b:i:text +\n    c:i:text\n  >\n>\n");
}

TEST(MslValidate, AnalysisOrderIsClean) {
  auto ms = desugar(parse_message_structure(read_fixture("msl/order.msl")));
  EXPECT_TRUE(validate_structure(ms, Stage::analysis).empty());
}

TEST(MslValidate, LabelAtAnalysisWarns) {
  auto ms = desugar(parse_message_structure("A = < a >\nfield a { label=\"A\" }"));
  auto diags = validate_structure(ms, Stage::analysis);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].code, "CA-S01");
  EXPECT_EQ(diags[0].severity, Severity::warning);
  EXPECT_TRUE(validate_structure(ms, Stage::design_interface).empty());
}

TEST(MslValidate, MisspelledFormulaReference) {
  auto ms = desugar(parse_message_structure(
      "L = < Price : i : money + Quantity : i : number + Amount : d : money (:Pricee * :Quantity) >"));
  auto diags = validate_structure(ms, Stage::design_memory);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].code, "CA-S02");
  EXPECT_EQ(diags[0].severity, Severity::error);
  EXPECT_NE(diags[0].message.find("Pricee"), std::string::npos);
}

TEST(MslValidate, UnderscoreReferencesMatchSpacedNames) {
  auto ms = desugar(parse_message_structure(
      "L = < Unit price : i : money + Total : d : money (:Unit_price * 2) >"));
  EXPECT_FALSE(has_code(validate_structure(ms, Stage::design_memory), "CA-S02"));
}

TEST(MslValidate, DuplicateSiblings) {
  auto c9 = validate_structure(desugar(parse_message_structure("A = < a + a >")), Stage::analysis);
  ASSERT_EQ(c9.size(), 1u);
  EXPECT_EQ(c9[0].code, "CA-C09");
  auto c10 = validate_structure(desugar(parse_message_structure("A = < B = < a > + B = { b } >")), Stage::analysis);
  ASSERT_EQ(c10.size(), 1u);
  EXPECT_EQ(c10[0].code, "CA-C10");
  auto c11 = validate_structure(desugar(parse_message_structure("A = < S = [ a | b ] + S = [ c | d ] >")),
                                Stage::analysis);
  ASSERT_EQ(c11.size(), 1u);
  EXPECT_EQ(c11[0].code, "CA-C11");
}

TEST(MslValidate, FormulaRoles) {
  EXPECT_TRUE(check_formula_roles(parse_message_structure("A = < a : d : number (:b) + b : i : number >")).empty());
  auto bad = check_formula_roles(parse_message_structure("A = < a : i : number (:b) + b : i : number >"));
  ASSERT_EQ(bad.size(), 1u);
  EXPECT_EQ(bad[0].code, "CA-C07");
  auto init_on_derived =
      check_formula_roles(parse_message_structure("A = < a : d : number (:b) + b >\nfield a { init=\"0\" }"));
  EXPECT_EQ(init_on_derived.size(), 1u);
}

TEST(MslFields, OrderPaths) {
  auto fields = collect_fields(desugar(parse_message_structure(read_fixture("msl/order.msl"))));
  ASSERT_EQ(fields.size(), 9u);
  EXPECT_EQ(fields.front().path, "ORDER/Order number");
  EXPECT_EQ(fields.back().path, "ORDER/DESTINATIONS/DESTINATION/LINES/LINE/Quantity");
}

TEST(MslFields, SpecialisationPaths) {
  auto fields = collect_fields(desugar(parse_message_structure(read_fixture("msl/assignment.msl"))));
  std::set<std::string> paths;
  for (const auto& f : fields) paths.insert(f.path);
  EXPECT_TRUE(paths.count("ASSIGNMENT/TYPE/THEORY/Subject"));
  EXPECT_TRUE(paths.count("ASSIGNMENT/TYPE/PRACTICE/Functionality"));
}

TEST(MslProperties, FormulaRefsMatchRegex) {
  const std::regex ref(":([A-Za-z_][A-Za-z0-9_]*)");
  std::mt19937 rng(7);
  const std::string alphabet = ":ab_Z9 *()+:x";
  for (int n = 0; n < 500; ++n) {
    std::string text;
    int len = int(rng() % 24);
    for (int i = 0; i < len; ++i) text += alphabet[rng() % alphabet.size()];
    std::set<std::string> expected;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), ref); it != std::sregex_iterator(); ++it)
      expected.insert((*it)[1]);
    auto refs = Formula::from_text(text).field_refs;
    std::set<std::string> got(refs.begin(), refs.end());
    EXPECT_EQ(got, expected) << text;
    EXPECT_EQ(got.size(), refs.size()) << text;
  }
}

TEST(MslProperties, BracketMutationsAreRejected) {
  const std::string brackets = "<>{}[]";
  for (const char* f : {"msl/order.msl", "msl/assignment.msl"}) {
    std::string src = read_fixture(f);
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (brackets.find(src[i]) == std::string::npos) continue;
      // Skip brackets inside comments, strings and enumeration domains.
      auto line_start = src.rfind('\n', i);
      line_start = line_start == std::string::npos ? 0 : line_start + 1;
      auto prefix = src.substr(line_start, i - line_start);
      if (prefix.find('#') != std::string::npos) continue;
      if (std::count(prefix.begin(), prefix.end(), '"') % 2 == 1) continue;
      if (prefix.find(": [") != std::string::npos || prefix.find(":[") != std::string::npos) continue;
      std::string deleted = src;
      deleted.erase(i, 1);
      EXPECT_ANY_THROW(parse_message_structure(deleted)) << f << " delete at " << i;
      for (char r : brackets) {
        if (r == src[i]) continue;
        std::string replaced = src;
        replaced[i] = r;
        EXPECT_ANY_THROW(parse_message_structure(replaced)) << f << " replace at " << i << " with " << r;
      }
    }
  }
}

TEST(MslProperties, AcceptedStructuresNeverHaveSpecialisationRoot) {
  for (const char* src : {"A = < a >", "A = { a }", "A = [ a ]", "A = [ a | b ]"}) {
    try {
      auto ms = parse_message_structure(src);
      EXPECT_NE(ms.root.kind, Kind::specialisation) << src;
    } catch (const Error&) {
    }
  }
}
