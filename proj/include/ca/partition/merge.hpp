#pragma once

// Union of all diagram views: externs resolved to their defining events and
// edges asserted by several diagrams collapsed into one.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "ca/ced/model.hpp"
#include "ca/diagnostic.hpp"

namespace ca::partition {

using ced::NodeKind;

struct GraphNode {
  std::string id;
  NodeKind kind = NodeKind::event;
  ced::AndKind and_kind = ced::AndKind::unspecified;
  std::string unit;  // owning full event for events and variants, the node itself otherwise
  std::set<std::string> diagrams;
  SourceLocation location;

  friend bool operator==(const GraphNode& a, const GraphNode& b) {
    return a.id == b.id && a.kind == b.kind && a.and_kind == b.and_kind && a.unit == b.unit;
  }
};

struct GraphEdge {
  std::string source;
  std::string target;
  std::set<std::string> diagrams;
  std::map<std::string, bool> loopback_assertions;  // diagram -> asserted flag
  bool loopback = false;                            // set by classification
  SourceLocation location;
};

class MergedGraph {
 public:
  std::map<std::string, GraphNode> nodes;
  std::vector<GraphEdge> edges;  // sorted by (source, target)
  std::vector<Diagnostic> diagnostics;

  const GraphNode* find(const std::string& id) const {
    auto it = nodes.find(id);
    return it == nodes.end() ? nullptr : &it->second;
  }

  const std::vector<std::size_t>& out_edges(const std::string& id) const { return lookup(out_, id); }
  const std::vector<std::size_t>& in_edges(const std::string& id) const { return lookup(in_, id); }

  /// Rebuilds adjacency after `edges` changes.
  void index() {
    std::sort(edges.begin(), edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
      return std::tie(a.source, a.target) < std::tie(b.source, b.target);
    });
    out_.clear();
    in_.clear();
    for (std::size_t i = 0; i < edges.size(); ++i) {
      out_[edges[i].source].push_back(i);
      in_[edges[i].target].push_back(i);
    }
  }

  std::set<std::pair<std::string, std::string>> edge_pairs() const {
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& e : edges) out.emplace(e.source, e.target);
    return out;
  }

 private:
  std::map<std::string, std::vector<std::size_t>> out_;
  std::map<std::string, std::vector<std::size_t>> in_;

  static const std::vector<std::size_t>& lookup(const std::map<std::string, std::vector<std::size_t>>& m,
                                                const std::string& id) {
    static const std::vector<std::size_t> empty;
    auto it = m.find(id);
    return it == m.end() ? empty : it->second;
  }
};

namespace detail_merge {

struct Definition {
  NodeKind kind;
  std::string unit;
  SourceLocation location;
};

inline std::map<std::string, Definition> full_definitions(const ced::ModelRepository& repo) {
  std::map<std::string, Definition> defs;
  for (const auto& e : repo.events) {
    defs.try_emplace(e.id, Definition{NodeKind::event, e.id, e.location});
    ced::for_each_variant(e.variants, [&](const ced::EventVariant& v, int) {
      defs.try_emplace(v.id, Definition{NodeKind::variant, e.id, v.location});
    });
  }
  return defs;
}

}  // namespace detail_merge

/// Merges every diagram of the repository. Externs without a full definition
/// stay as extern nodes and are reported as CA-P02; edges declared between
/// two externs of the same diagram are reported as CA-P05.
inline MergedGraph merge_views(const ced::ModelRepository& repo) {
  MergedGraph g;
  auto defs = detail_merge::full_definitions(repo);
  std::map<std::pair<std::string, std::string>, std::size_t> edge_at;

  for (const auto& d : repo.diagrams) {
    for (const auto& n : d.nodes) {
      GraphNode node;
      node.id = n.id;
      node.kind = n.kind;
      node.and_kind = n.and_kind;
      node.unit = n.id;
      node.location = n.location;
      if (n.kind == NodeKind::extern_ref || n.kind == NodeKind::event || n.kind == NodeKind::variant) {
        if (auto it = defs.find(n.id); it != defs.end()) {
          node.kind = it->second.kind;
          node.unit = it->second.unit;
          node.location = it->second.location;
        } else {
          g.diagnostics.push_back(make_diagnostic(
              "CA-P02", "out-of-scope reference \"" + n.id + "\" in diagram '" + d.name + "' has no full definition",
              n.location, n.id));
        }
      }
      auto [it, inserted] = g.nodes.try_emplace(node.id, node);
      it->second.diagrams.insert(d.name);
    }
    for (const auto& e : d.edges) {
      const auto* src = d.find_node(e.source);
      const auto* dst = d.find_node(e.target);
      if (src && dst && src->kind == NodeKind::extern_ref && dst->kind == NodeKind::extern_ref) {
        g.diagnostics.push_back(make_diagnostic("CA-P05",
                                                "precedence \"" + e.source + "\" -> \"" + e.target +
                                                    "\" joins two out-of-scope references in diagram '" + d.name + "'",
                                                e.location, e.source + " -> " + e.target));
      }
      auto key = std::make_pair(e.source, e.target);
      auto [it, inserted] = edge_at.try_emplace(key, g.edges.size());
      if (inserted) g.edges.push_back(GraphEdge{e.source, e.target, {}, {}, false, e.location});
      auto& merged = g.edges[it->second];
      merged.diagrams.insert(d.name);
      auto [flag, fresh] = merged.loopback_assertions.try_emplace(d.name, e.loopback_asserted);
      if (!fresh) flag->second = flag->second || e.loopback_asserted;
    }
  }
  g.index();
  return g;
}

}  // namespace ca::partition
