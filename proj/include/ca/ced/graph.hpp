#pragma once

// Depth, loopback classification, topological order and direct
// precedents/successors over the merged precedence graph. Events and their
// variants form one unit; all depth and order computations work on units.

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ca/ced/model.hpp"
#include "ca/detail/text.hpp"
#include "ca/diagnostic.hpp"
#include "ca/partition/merge.hpp"

namespace ca::ced {

using partition::GraphEdge;
using partition::GraphNode;
using partition::MergedGraph;

inline constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

struct DepthResult {
  std::map<std::string, std::size_t> depth;  // every node except start
  std::vector<Diagnostic> diagnostics;       // CA-G06 per unreachable unit

  std::size_t of(const std::string& id) const {
    auto it = depth.find(id);
    return it == depth.end() ? kUnreachable : it->second;
  }
};

namespace detail_graph {

inline const std::string& unit_of(const MergedGraph& g, const std::string& id) {
  const auto* n = g.find(id);
  return n ? n->unit : id;
}

inline bool is_logical(NodeKind k) { return k == NodeKind::and_node || k == NodeKind::or_node; }
inline bool is_event_like(NodeKind k) {
  return k == NodeKind::event || k == NodeKind::variant || k == NodeKind::extern_ref;
}

/// Unit-level adjacency; self-unit edges are dropped.
struct UnitGraph {
  std::vector<std::string> units;  // sorted
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<std::size_t>> succ;
  std::vector<bool> has_foreign_pred;
};

inline UnitGraph build_units(const MergedGraph& g, bool (*keep)(const GraphEdge&) = nullptr) {
  UnitGraph u;
  std::set<std::string> ids;
  for (const auto& [id, n] : g.nodes) ids.insert(n.unit);
  u.units.assign(ids.begin(), ids.end());
  for (std::size_t i = 0; i < u.units.size(); ++i) u.index[u.units[i]] = i;
  u.succ.resize(u.units.size());
  u.has_foreign_pred.assign(u.units.size(), false);
  for (const auto& e : g.edges) {
    if (keep && !keep(e)) continue;
    auto s = u.index.at(unit_of(g, e.source));
    auto t = u.index.at(unit_of(g, e.target));
    if (s == t) continue;
    u.succ[s].push_back(t);
    u.has_foreign_pred[t] = true;
  }
  for (auto& list : u.succ) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return u;
}

/// Strongly connected component id per unit (Tarjan, iterative).
inline std::vector<std::size_t> scc_ids(const UnitGraph& u) {
  const std::size_t n = u.units.size();
  const std::size_t unset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> idx(n, unset), low(n, 0), comp(n, unset);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::size_t counter = 0, comps = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (idx[root] != unset) continue;
    std::vector<std::pair<std::size_t, std::size_t>> work{{root, 0}};
    idx[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!work.empty()) {
      auto& [v, child] = work.back();
      if (child < u.succ[v].size()) {
        std::size_t w = u.succ[v][child++];
        if (idx[w] == unset) {
          idx[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          work.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], idx[w]);
        }
        continue;
      }
      if (low[v] == idx[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = comps;
        } while (w != v);
        ++comps;
      }
      std::size_t done = v;
      work.pop_back();
      if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[done]);
    }
  }
  return comp;
}

}  // namespace detail_graph

/// Breadth-first depth of every unit. Seeds (depth 0) are the successors of
/// the start node and every event with no precedence from another unit; such
/// events are implicitly connected to the start node. Logical nodes are never
/// seeds, so an isolated logical node is unreachable.
inline DepthResult event_depth(const MergedGraph& g) {
  using namespace detail_graph;
  DepthResult result;
  UnitGraph u = build_units(g);
  std::vector<std::size_t> depth(u.units.size(), kUnreachable);
  std::deque<std::size_t> queue;
  auto seed = [&](std::size_t i) {
    if (depth[i] == 0) return;
    depth[i] = 0;
    queue.push_back(i);
  };
  const std::string start = kStartId;
  for (std::size_t ei : g.out_edges(start)) {
    const auto& target_unit = unit_of(g, g.edges[ei].target);
    if (target_unit != start) seed(u.index.at(target_unit));
  }
  for (std::size_t i = 0; i < u.units.size(); ++i) {
    const auto* node = g.find(u.units[i]);
    bool event_unit = node ? is_event_like(node->kind) : true;
    if (event_unit && !u.has_foreign_pred[i]) seed(i);
  }
  while (!queue.empty()) {
    std::size_t s = queue.front();
    queue.pop_front();
    for (std::size_t t : u.succ[s]) {
      if (u.units[t] == start || depth[t] != kUnreachable) continue;
      depth[t] = depth[s] + 1;
      queue.push_back(t);
    }
  }
  for (const auto& [id, node] : g.nodes) {
    if (node.kind == NodeKind::start) continue;
    result.depth[id] = depth[u.index.at(node.unit)];
  }
  for (std::size_t i = 0; i < u.units.size(); ++i) {
    const auto* node = g.find(u.units[i]);
    if (depth[i] != kUnreachable || !node || node->kind == NodeKind::start || node->kind == NodeKind::end) continue;
    result.diagnostics.push_back(make_diagnostic(
        "CA-G06", std::string(to_string(node->kind)) + " '" + node->id + "' cannot be reached from any start",
        node->location, node->id));
  }
  return result;
}

/// Flags loopbacks in place. An edge is a loopback when it enters the start
/// node, stays within one event and its variants, or lies on a cycle and
/// points to a strictly shallower unit. Cycles whose units all share one
/// depth are broken at the back edges of a depth-first search in identifier
/// order. Throws CyclicResidue if the remaining edges still contain a cycle.
inline void classify_precedences(MergedGraph& g, const DepthResult& depths) {
  using namespace detail_graph;
  UnitGraph u = build_units(g);
  auto comp = scc_ids(u);
  for (auto& e : g.edges) {
    if (e.target == kStartId) {
      e.loopback = true;
      continue;
    }
    if (e.source == kStartId) {
      e.loopback = false;
      continue;
    }
    const auto& su = unit_of(g, e.source);
    const auto& tu = unit_of(g, e.target);
    bool same_cycle = comp[u.index.at(su)] == comp[u.index.at(tu)];
    e.loopback = su == tu || (same_cycle && depths.of(tu) < depths.of(su));
  }

  // Equal-depth cycles: mark DFS back edges.
  {
    enum class Mark { fresh, active, done };
    std::map<std::string, Mark> mark;
    for (const auto& [id, n] : g.nodes) mark[id] = Mark::fresh;
    for (const auto& [root, unused] : g.nodes) {
      if (mark[root] != Mark::fresh) continue;
      std::vector<std::pair<std::string, std::size_t>> work{{root, 0}};
      mark[root] = Mark::active;
      while (!work.empty()) {
        auto& [id, next] = work.back();
        const auto& outs = g.out_edges(id);
        if (next < outs.size()) {
          auto& e = g.edges[outs[next++]];
          if (e.loopback) continue;
          Mark& m = mark[e.target];
          if (m == Mark::active) {
            e.loopback = true;
          } else if (m == Mark::fresh) {
            m = Mark::active;
            work.emplace_back(e.target, 0);
          }
          continue;
        }
        mark[id] = Mark::done;
        work.pop_back();
      }
    }
  }

  // Residue check on node level (Kahn).
  std::map<std::string, std::size_t> indegree;
  for (const auto& [id, n] : g.nodes) indegree[id] = 0;
  for (const auto& e : g.edges)
    if (!e.loopback) ++indegree[e.target];
  std::vector<std::string> ready;
  for (const auto& [id, d] : indegree)
    if (d == 0) ready.push_back(id);
  std::size_t seen = 0;
  while (!ready.empty()) {
    std::string id = ready.back();
    ready.pop_back();
    ++seen;
    for (std::size_t ei : g.out_edges(id)) {
      const auto& e = g.edges[ei];
      if (!e.loopback && --indegree[e.target] == 0) ready.push_back(e.target);
    }
  }
  if (seen != indegree.size()) {
    std::vector<std::string> stuck;
    for (const auto& [id, d] : indegree)
      if (d > 0) stuck.push_back(id);
    throw CyclicResidue("precedence graph without loopbacks still has a cycle through " + detail::join(stuck, ", "));
  }
}

/// Merged, depth-annotated and classified graph of a repository.
struct AnalyzedGraph {
  MergedGraph graph;
  DepthResult depth;
};

inline AnalyzedGraph analyze(const ModelRepository& repo) {
  AnalyzedGraph a{partition::merge_views(repo), {}};
  a.depth = event_depth(a.graph);
  classify_precedences(a.graph, a.depth);
  return a;
}

inline DepthResult event_depth(const ModelRepository& repo) { return event_depth(partition::merge_views(repo)); }

inline MergedGraph classify_precedences(const ModelRepository& repo) { return analyze(repo).graph; }

/// Full events in temporal order: every non-loopback precedence between
/// events (through logical nodes too) is respected; ties are broken by
/// process acronym, then event number.
inline std::vector<std::string> topological_event_ids(const MergedGraph& classified) {
  using namespace detail_graph;
  UnitGraph u = build_units(classified, [](const GraphEdge& e) { return !e.loopback; });
  std::vector<std::size_t> indegree(u.units.size(), 0);
  for (const auto& list : u.succ)
    for (std::size_t t : list) ++indegree[t];
  auto is_event = [&](std::size_t i) {
    const auto* n = classified.find(u.units[i]);
    return n && n->kind == NodeKind::event;
  };
  auto before = [&](std::size_t a, std::size_t b) {
    bool ea = is_event(a), eb = is_event(b);
    if (ea != eb) return !ea;
    if (ea) return detail::event_id_less(u.units[a], u.units[b]);
    return u.units[a] < u.units[b];
  };
  std::set<std::size_t, decltype(before)> ready(before);
  for (std::size_t i = 0; i < u.units.size(); ++i)
    if (indegree[i] == 0) ready.insert(i);
  std::vector<std::string> order;
  std::size_t processed = 0;
  while (!ready.empty()) {
    std::size_t i = *ready.begin();
    ready.erase(ready.begin());
    ++processed;
    if (is_event(i)) order.push_back(u.units[i]);
    for (std::size_t t : u.succ[i])
      if (--indegree[t] == 0) ready.insert(t);
  }
  if (processed != u.units.size()) throw CyclicResidue("precedence graph without loopbacks has a cycle between events");
  return order;
}

inline std::vector<const CommunicativeEvent*> topological_order(const ModelRepository& repo) {
  std::vector<const CommunicativeEvent*> out;
  for (const auto& id : topological_event_ids(analyze(repo).graph)) {
    if (const auto* e = repo.find_event(id)) out.push_back(e);
  }
  return out;
}

namespace detail_graph {

/// Walks from `from` along edges (forward or backward), passing through
/// logical nodes only. Reached events, variants and unresolved externs are
/// reported via `collect`; nodes of `skip_unit` are ignored.
inline void walk_through_logical(const MergedGraph& g, const std::vector<std::string>& from, bool forward,
                                 const std::string& skip_unit, const std::function<void(const GraphNode&)>& collect) {
  std::set<std::string> visited(from.begin(), from.end());
  std::vector<std::string> stack(from.begin(), from.end());
  while (!stack.empty()) {
    std::string id = stack.back();
    stack.pop_back();
    for (std::size_t ei : forward ? g.out_edges(id) : g.in_edges(id)) {
      const auto& e = g.edges[ei];
      const std::string& other = forward ? e.target : e.source;
      const auto* n = g.find(other);
      if (!n || !visited.insert(other).second) continue;
      if (is_logical(n->kind)) {
        stack.push_back(other);
      } else if (is_event_like(n->kind) && n->unit != skip_unit) {
        collect(*n);
      }
    }
  }
}

inline std::vector<std::string> unit_members(const MergedGraph& g, const std::string& unit) {
  std::vector<std::string> out;
  if (g.find(unit)) out.push_back(unit);
  const std::string prefix = unit + ".";
  for (auto it = g.nodes.lower_bound(prefix); it != g.nodes.end() && it->first.compare(0, prefix.size(), prefix) == 0; ++it) {
    if (it->second.unit == unit) out.push_back(it->first);
  }
  return out;
}

inline std::vector<std::string> direct_neighbours(const MergedGraph& g, const std::string& event_id, bool forward) {
  const auto* node = g.find(event_id);
  if (!node) return {};
  const std::string unit = node->unit;
  std::set<std::string, detail::EventIdLess> found;
  walk_through_logical(g, unit_members(g, unit), forward, unit, [&](const GraphNode& n) { found.insert(n.unit); });
  return {found.begin(), found.end()};
}

}  // namespace detail_graph

/// Events (units) that directly precede `event_id`, possibly through logical
/// nodes. A variant id is treated as its owning event.
inline std::vector<std::string> direct_precedents(const MergedGraph& g, const std::string& event_id) {
  return detail_graph::direct_neighbours(g, event_id, false);
}

inline std::vector<std::string> direct_successors(const MergedGraph& g, const std::string& event_id) {
  return detail_graph::direct_neighbours(g, event_id, true);
}

inline std::vector<std::string> direct_precedents(const ModelRepository& repo, const std::string& event_id) {
  return direct_precedents(partition::merge_views(repo), event_id);
}

inline std::vector<std::string> direct_successors(const ModelRepository& repo, const std::string& event_id) {
  return direct_successors(partition::merge_views(repo), event_id);
}

/// Successors of one node (not its whole unit), keeping variant ids.
inline std::set<std::string> node_successors(const MergedGraph& g, const std::string& node_id) {
  std::set<std::string> found;
  detail_graph::walk_through_logical(g, {node_id}, true, "",
                                     [&](const GraphNode& n) { found.insert(n.id); });
  return found;
}

}  // namespace ca::ced
