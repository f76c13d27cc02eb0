#include <gtest/gtest.h>

#include "ca/templates.hpp"
#include "test_support.hpp"

using namespace ca;
using namespace ca::templates;
using test_support::count_code;
using test_support::load_model;
using test_support::read_fixture;

namespace {

EventSpec sale1() { return parse_template(read_fixture("superstationery/sale1.cet"), "sale1.cet"); }

}  // namespace

TEST(TemplateFormat, ParsesSale1) {
  auto spec = sale1();
  EXPECT_EQ(spec.header.event_id, "SALE 1");
  EXPECT_FALSE(spec.header.alias);
  EXPECT_EQ(spec.header.name, "A client places an order");
  EXPECT_NE(spec.header.goal.find("let the Sales Manager know"), std::string::npos);
  EXPECT_EQ(spec.contact.primary_actor, "Client");
  EXPECT_EQ(spec.contact.interface_actors, (std::vector<std::string>{"Salesman"}));
  EXPECT_TRUE(spec.contact.support_actors.empty());
  EXPECT_EQ(spec.contact.business_forms, (std::vector<std::string>{"forms/order-form.png"}));
  EXPECT_EQ(spec.message.structure_ref, "ORDER");
  ASSERT_EQ(spec.message.field_descriptions.size(), 9u);
  EXPECT_EQ(spec.message.field_descriptions[2].field, "Payment type");
  EXPECT_NE(spec.message.field_descriptions[2].text.find("any other information here."), std::string::npos);
  EXPECT_EQ(spec.message.structural_constraints.size(), 3u);
  EXPECT_EQ(spec.reaction.treatments, (std::vector<std::string>{"The order is recorded."}));
  EXPECT_EQ(spec.location.line, 2);
}

TEST(TemplateFormat, RoundTrip) {
  auto spec = sale1();
  auto again = parse_template(format_template(spec));
  EXPECT_EQ(spec, again);
  EXPECT_EQ(format_template(again), format_template(spec));
}

TEST(TemplateFormat, Alias) {
  auto spec = parse_template("event \"ORD-01\" alias \"SALE 1\"\n[general]\nname: x\n");
  EXPECT_EQ(spec.header.event_id, "ORD-01");
  EXPECT_EQ(spec.header.alias, "SALE 1");
  EXPECT_EQ(parse_template(format_template(spec)), spec);
}

TEST(TemplateFormat, Errors) {
  EXPECT_THROW(parse_template(""), SyntaxError);
  EXPECT_THROW(parse_template("evnt \"X\""), SyntaxError);
  EXPECT_THROW(parse_template("event \"X\"\nname: y"), SyntaxError);
  EXPECT_THROW(parse_template("event \"X\"\n[general]\ncolour: y"), SyntaxError);
  EXPECT_THROW(parse_template("event \"X\"\n[misc]"), SyntaxError);
  EXPECT_THROW(parse_template("event \"X\"\n[general]\n- item"), SyntaxError);
  EXPECT_THROW(parse_template("event \"X\"\n[general]\nname: a\nname: b"), SyntaxError);
  try {
    parse_template("event \"X\"\n\n[contact]\nmedium: fax\nbogus", "t.cet");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.location().line, 5);
    EXPECT_EQ(e.location().file, "t.cet");
  }
}

TEST(TemplateGenerate, Sale1) {
  auto repo = load_model("superstationery");
  auto spec = generate_template(repo, "SALE 1");
  EXPECT_EQ(spec.header.event_id, "SALE 1");
  EXPECT_EQ(spec.header.name, "A client places an order");
  EXPECT_EQ(spec.contact.primary_actor, "Client");
  EXPECT_EQ(spec.contact.interface_actors, (std::vector<std::string>{"Salesman"}));
  EXPECT_EQ(spec.message.structure_ref, "ORDER");
  EXPECT_EQ(spec.message.field_descriptions.size(), 9u);
  for (const auto& f : spec.message.field_descriptions) EXPECT_TRUE(f.text.empty());
  EXPECT_EQ(spec.reaction.linked_communications, (std::vector<std::string>{"Sales Manager: Order placement"}));
  EXPECT_TRUE(spec.header.notes.empty());
}

TEST(TemplateGenerate, EventWithoutMessage) {
  auto repo = ced::parse_model("process T {\nevent 1 \"The clerk closes the day\" {\n primary Clerk\n}\n}");
  auto spec = generate_template(repo, "T 1");
  EXPECT_TRUE(spec.message.structure_ref.empty());
  EXPECT_TRUE(spec.message.field_descriptions.empty());
  ASSERT_EQ(spec.header.notes.size(), 1u);
  EXPECT_EQ(spec.header.notes[0].rfind("CA-U02", 0), 0u);
  EXPECT_NE(render_template(spec).find("CA-U02"), std::string::npos);
}

TEST(TemplateGenerate, UnknownEvent) {
  EXPECT_THROW(generate_template(load_model("superstationery"), "SALE 99"), UnknownEvent);
}

TEST(TemplateGenerate, ClosureHasNoErrors) {
  auto repo = load_model("superstationery");
  for (const auto& e : repo.events) {
    auto diags = check_template(generate_template(repo, e.id), repo);
    EXPECT_FALSE(has_errors(diags)) << e.id;
    for (const auto& d : diags) EXPECT_EQ(d.code, "CA-T03") << e.id << ": " << d.message;
  }
}

TEST(TemplateCheck, Sale1HasNoFindings) {
  auto diags = check_template(sale1(), load_model("superstationery"));
  EXPECT_TRUE(diags.empty()) << diags.size() << (diags.empty() ? "" : diags[0].message);
}

TEST(TemplateCheck, UnresolvedIdentifier) {
  auto repo = load_model("superstationery");
  auto spec = sale1();
  spec.header.event_id = "ORD-01";
  auto diags = check_template(spec, repo);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].code, "CA-T01");
  spec.header.alias = "SALE 1";
  EXPECT_TRUE(check_template(spec, repo).empty());
}

TEST(TemplateCheck, PrimaryActorMismatch) {
  auto spec = sale1();
  spec.contact.primary_actor = "Salesman";
  auto diags = check_template(spec, load_model("superstationery"));
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].code, "CA-T02");
  EXPECT_EQ(diags[0].severity, Severity::warning);
}

TEST(TemplateCheck, ExtraAndMissingDescriptions) {
  auto repo = load_model("superstationery");
  auto spec = sale1();
  spec.message.field_descriptions.push_back({"Colour", "The colour of the box.", {}});
  EXPECT_EQ(count_code(check_template(spec, repo), "CA-T03"), 1);
  spec = sale1();
  spec.message.field_descriptions.erase(spec.message.field_descriptions.begin() + 4);
  auto diags = check_template(spec, repo);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_NE(diags[0].message.find("Address"), std::string::npos);
  spec = sale1();
  spec.message.field_descriptions[0].text.clear();
  EXPECT_EQ(count_code(check_template(spec, repo), "CA-T03"), 1);
}

TEST(TemplateCheck, MissingLinkedCommunication) {
  auto spec = sale1();
  spec.reaction.linked_communications.clear();
  auto diags = check_template(spec, load_model("superstationery"));
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].code, "CA-T04");
  EXPECT_EQ(diags[0].severity, Severity::info);
}

TEST(TemplateCheck, UnknownStructure) {
  auto spec = sale1();
  spec.message.structure_ref = "PURCHASE";
  auto diags = check_template(spec, load_model("superstationery"));
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].code, "CA-T05");
}

TEST(TemplateRender, Sale1Sections) {
  auto repo = load_model("superstationery");
  auto spec = sale1();
  auto doc = render_template(spec, repo.find_structure("ORDER"));
  EXPECT_EQ(doc.rfind("# SALE 1. A CLIENT PLACES AN ORDER\n", 0), 0u);
  auto general = doc.find("## 1 General information");
  auto contact = doc.find("## 2 Contact requirements");
  auto message = doc.find("## 3 Message requirements");
  auto reaction = doc.find("## 4 Reaction requirements");
  ASSERT_NE(general, std::string::npos);
  EXPECT_LT(general, contact);
  EXPECT_LT(contact, message);
  EXPECT_LT(message, reaction);
  ASSERT_NE(reaction, std::string::npos);
  EXPECT_NE(doc.find("DESTINATIONS = {"), std::string::npos);
  EXPECT_NE(doc.find("| Quantity |"), std::string::npos);
  EXPECT_EQ(render_template(spec, repo.find_structure("ORDER")), doc);
}

TEST(TemplateRender, EmptySections) {
  auto doc = render_template(parse_template("event \"T 1\"\n[general]\nname: Nothing\n"));
  std::size_t n = 0, pos = 0;
  while ((pos = doc.find("(none specified)", pos)) != std::string::npos) ++n, ++pos;
  EXPECT_EQ(n, 4u);
}

TEST(TemplateRender, DistinctSpecsRenderDistinctly) {
  auto a = sale1();
  auto b = a;
  b.reaction.treatments.push_back("The stock is reserved.");
  auto c = a;
  c.contact.medium = "By email";
  auto d = a;
  d.message.field_descriptions[0].text += " It is unique.";
  std::set<std::string> docs{render_template(a), render_template(b), render_template(c), render_template(d)};
  EXPECT_EQ(docs.size(), 4u);
}
