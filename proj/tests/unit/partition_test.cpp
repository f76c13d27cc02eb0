#include <gtest/gtest.h>

#include <set>

#include "ca/partition/check.hpp"
#include "test_support.hpp"

using namespace ca;
using namespace ca::ced;
using namespace ca::partition;
using test_support::ced_sources;
using test_support::count_code;

namespace {

std::set<std::tuple<std::string, NodeKind, std::string>> node_set(const MergedGraph& g) {
  std::set<std::tuple<std::string, NodeKind, std::string>> out;
  for (const auto& [id, n] : g.nodes) out.emplace(id, n.kind, n.unit);
  return out;
}

/// Removes an extern and the edges touching it from one diagram.
ModelRepository without_extern(ModelRepository repo, const std::string& diagram, const std::string& id) {
  for (auto& d : repo.diagrams) {
    if (d.name != diagram) continue;
    std::erase_if(d.nodes, [&](const DiagramNode& n) { return n.kind == NodeKind::extern_ref && n.id == id; });
    std::erase_if(d.edges, [&](const Edge& e) { return e.source == id || e.target == id; });
  }
  return repo;
}

std::vector<Diagnostic> with_code(const std::vector<Diagnostic>& diags, const std::string& code) {
  std::vector<Diagnostic> out;
  for (const auto& d : diags)
    if (d.code == code) out.push_back(d);
  return out;
}

}  // namespace

TEST(PartitionMerge, SplitEqualsWhole) {
  auto whole = merge_views(parse_model(ced_sources("partition/whole")));
  auto split = merge_views(parse_model(ced_sources("partition/split")));
  EXPECT_EQ(node_set(whole), node_set(split));
  EXPECT_EQ(whole.edge_pairs(), split.edge_pairs());
  EXPECT_EQ(whole.edges.size(), 14u);
}

TEST(PartitionMerge, EdgeConservation) {
  auto repo = parse_model(ced_sources("partition/split"));
  std::set<std::pair<std::string, std::string>> pairs;
  std::size_t declared = 0;
  for (const auto& d : repo.diagrams)
    for (const auto& e : d.edges) {
      pairs.emplace(e.source, e.target);
      ++declared;
    }
  auto g = merge_views(repo);
  EXPECT_EQ(g.edges.size(), pairs.size());
  EXPECT_GT(declared, pairs.size());
  for (const auto& e : g.edges) {
    if (e.source == "A 3" && e.target == "A 4") {
      EXPECT_EQ(e.diagrams, (std::set<std::string>{"A part 1", "A part 2"}));
    }
  }
}

TEST(PartitionMerge, SingleDiagramIsIdentity) {
  auto repo = parse_model(ced_sources("partition/whole"));
  auto g = merge_views(repo);
  ASSERT_EQ(repo.diagrams.size(), 1u);
  std::set<std::string> ids;
  for (const auto& n : repo.diagrams[0].nodes) ids.insert(n.id);
  std::set<std::string> merged;
  for (const auto& [id, n] : g.nodes) merged.insert(id);
  EXPECT_EQ(ids, merged);
  EXPECT_EQ(g.edges.size(), repo.diagrams[0].edges.size());
  EXPECT_TRUE(g.diagnostics.empty());
}

TEST(PartitionMerge, IdempotentOnMergedView) {
  // Re-expressing the merged graph as a single diagram and merging again
  // gives the same graph.
  auto repo = parse_model(ced_sources("partition/split"));
  auto g = merge_views(repo);
  ModelRepository flat = repo;
  flat.diagrams.clear();
  Diagram d;
  d.name = "merged";
  for (const auto& [id, n] : g.nodes) d.nodes.push_back(DiagramNode{n.kind, id, n.and_kind, n.location});
  for (const auto& e : g.edges) d.edges.push_back(Edge{e.source, e.target, false, e.location});
  flat.diagrams.push_back(d);
  for (auto& e : flat.events) e.diagram = "merged";
  auto again = merge_views(flat);
  EXPECT_EQ(node_set(again), node_set(g));
  EXPECT_EQ(again.edge_pairs(), g.edge_pairs());
}

TEST(PartitionMerge, DanglingExtern) {
  auto repo = parse_model("process T { event 1 \"a\" { primary X } extern \"SALE 7\"\n 1 -> \"SALE 7\" }");
  auto g = merge_views(repo);
  ASSERT_EQ(g.diagnostics.size(), 1u);
  EXPECT_EQ(g.diagnostics[0].code, "CA-P02");
  EXPECT_EQ(g.diagnostics[0].element, "SALE 7");
  EXPECT_EQ(g.find("SALE 7")->kind, NodeKind::extern_ref);
}

TEST(PartitionMerge, ExternOfVariantResolvesToVariant) {
  auto repo = parse_model({{"a.ced", "process S { variant-event 3 \"x\" { primary P\n variant 1 \"y\" { } } }"},
                           {"b.ced", "process T { event 1 \"z\" { primary P } } extern \"S 3.1\"\n\"S 3.1\" -> \"T 1\""}});
  auto g = merge_views(repo);
  EXPECT_EQ(g.find("S 3.1")->kind, NodeKind::variant);
  EXPECT_EQ(g.find("S 3.1")->unit, "S 3");
  EXPECT_TRUE(g.diagnostics.empty());
}

TEST(PartitionCheck, SplitHasNoErrors) {
  auto diags = check_partition(parse_model(ced_sources("partition/split")));
  EXPECT_EQ(count_code(diags, "CA-P01"), 0);
  EXPECT_FALSE(has_errors(diags));
}

TEST(PartitionCheck, DeletingAnyExternPrecedentGivesOneP01) {
  auto repo = parse_model(ced_sources("partition/split"));
  int precedents = 0;
  for (const auto& d : repo.diagrams) {
    for (const auto& n : d.nodes) {
      if (n.kind != NodeKind::extern_ref) continue;
      bool is_precedent = std::any_of(d.edges.begin(), d.edges.end(), [&](const Edge& e) { return e.source == n.id; });
      auto diags = check_partition(without_extern(repo, d.name, n.id));
      if (is_precedent) {
        ++precedents;
        EXPECT_EQ(count_code(diags, "CA-P01"), 1) << d.name << " without " << n.id;
      } else {
        EXPECT_EQ(count_code(diags, "CA-P01"), 0) << d.name << " without " << n.id;
        EXPECT_GE(count_code(diags, "CA-P03"), 1) << d.name << " without " << n.id;
      }
    }
  }
  EXPECT_EQ(precedents, 5);
}

TEST(PartitionCheck, SalesClient1Present) {
  auto diags = check_partition(parse_model(ced_sources("superstationery")));
  EXPECT_EQ(count_code(diags, "CA-P01"), 0);
  EXPECT_FALSE(has_errors(diags));
}

TEST(PartitionCheck, SalesWithoutSupplier2) {
  auto repo = without_extern(parse_model(ced_sources("superstationery")), "Sales management (part 1)", "SUPP 2");
  auto p01 = with_code(check_partition(repo), "CA-P01");
  ASSERT_EQ(p01.size(), 1u);
  EXPECT_EQ(p01[0].element, "SALE 2");
}

TEST(PartitionCheck, SalesWithoutSale7IsInfoOnly) {
  auto repo = without_extern(parse_model(ced_sources("superstationery")), "Sales management (part 1)", "SALE 7");
  auto diags = check_partition(repo);
  EXPECT_FALSE(has_errors(diags));
  auto p03 = with_code(diags, "CA-P03");
  EXPECT_TRUE(std::any_of(p03.begin(), p03.end(), [](const Diagnostic& d) {
    return d.element == "SALE 6" && d.severity == Severity::info;
  }));
}

TEST(PartitionCheck, ConflictingLoopbackAssertions) {
  auto repo = parse_model({{"a.ced", "process T { event 1 \"a\" { primary P } event 2 \"b\" { primary P } 1 -> 2 -> 1 [loopback] }"},
                           {"b.ced", "extern \"T 1\"\nextern \"T 2\"\n\"T 2\" -> \"T 1\""}});
  auto diags = check_partition(repo);
  EXPECT_EQ(count_code(diags, "CA-P04"), 1);
  EXPECT_EQ(count_code(diags, "CA-P05"), 1);
}
