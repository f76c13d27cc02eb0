#pragma once

// Graphviz export of the merged communicative event diagram.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ca/ced/graph.hpp"
#include "ca/ced/model.hpp"
#include "ca/detail/text.hpp"

namespace ca::render {

namespace detail_dot {

enum class Symbol { event, specialised, variant, and_node, or_node, start, end, unresolved, actor, ingoing, outgoing,
                    precedence, loopback };

inline const char* legend_text(Symbol s) {
  switch (s) {
    case Symbol::event: return "box: communicative event (identifier and name)";
    case Symbol::specialised: return "cluster: specialised event and its variants";
    case Symbol::variant: return "box in cluster: event variant";
    case Symbol::and_node: return "circle 'and': and node (fork or join)";
    case Symbol::or_node: return "circle 'or': or node";
    case Symbol::start: return "filled circle: start";
    case Symbol::end: return "double circle: end";
    case Symbol::unresolved: return "grey dashed box: out-of-scope reference without a definition";
    case Symbol::actor: return "plain text: organisational role";
    case Symbol::ingoing: return "bold green edge role -> event: ingoing interaction";
    case Symbol::outgoing: return "bold red edge event -> role: outgoing interaction";
    case Symbol::precedence: return "open arrow: precedence";
    case Symbol::loopback: return "dashed open arrow: loopback precedence";
  }
  return "";
}

inline std::string q(const std::string& s) { return detail::quote(s); }

inline std::string event_label(const std::string& id, const std::string& name) { return q(id + "\n" + name); }

}  // namespace detail_dot

/// DOT text for the classified merged graph. Nodes and edges are emitted in
/// sorted order so equal models give byte-identical output.
inline std::string to_dot(const ced::ModelRepository& repo, const std::string& title = "model") {
  using namespace detail_dot;
  auto analyzed = ced::analyze(repo);
  const auto& g = analyzed.graph;
  std::set<Symbol> used;
  std::vector<std::string> body;

  std::map<std::string, const ced::CommunicativeEvent*> events;
  for (const auto& e : repo.events) events.emplace(e.id, &e);

  auto variant_name = [&](const ced::CommunicativeEvent& e, const std::string& vid) {
    std::string name;
    ced::for_each_variant(e.variants, [&](const ced::EventVariant& v, int) {
      if (v.id == vid) name = v.name;
    });
    return name;
  };

  std::set<std::string> clustered;
  for (const auto& [id, ev] : events) {
    if (!ev->specialised() || !g.find(id)) continue;
    used.insert(Symbol::specialised);
    used.insert(Symbol::variant);
    std::string cluster = "  subgraph " + q("cluster_" + id) + " {\n    label=" + q(id) + ";\n    style=rounded;\n";
    cluster += "    " + q(id) + " [shape=box, style=rounded, label=" + event_label(id, ev->name) + "];\n";
    clustered.insert(id);
    for (const auto& member : ced::detail_graph::unit_members(g, id)) {
      if (member == id) continue;
      cluster += "    " + q(member) + " [shape=box, style=rounded, label=" + event_label(member, variant_name(*ev, member)) +
                 "];\n";
      clustered.insert(member);
    }
    cluster += "  }";
    body.push_back(cluster);
  }

  for (const auto& [id, n] : g.nodes) {
    if (clustered.count(id)) continue;
    std::string attrs;
    switch (n.kind) {
      case ced::NodeKind::event:
      case ced::NodeKind::variant: {
        used.insert(Symbol::event);
        auto it = events.find(n.unit);
        std::string name = it == events.end() ? "" : (n.kind == ced::NodeKind::event ? it->second->name
                                                                                      : variant_name(*it->second, id));
        attrs = "shape=box, style=rounded, label=" + event_label(id, name);
        break;
      }
      case ced::NodeKind::and_node:
        used.insert(Symbol::and_node);
        attrs = "shape=circle, label=\"and\", xlabel=" + q(id);
        break;
      case ced::NodeKind::or_node:
        used.insert(Symbol::or_node);
        attrs = "shape=circle, label=\"or\", xlabel=" + q(id);
        break;
      case ced::NodeKind::start:
        used.insert(Symbol::start);
        attrs = "shape=circle, style=filled, fillcolor=black, label=\"\", width=0.25";
        break;
      case ced::NodeKind::end:
        used.insert(Symbol::end);
        attrs = "shape=doublecircle, label=\"\", width=0.2";
        break;
      case ced::NodeKind::extern_ref:
        used.insert(Symbol::unresolved);
        attrs = "shape=box, style=\"rounded,filled,dashed\", fillcolor=grey, label=" + q(id);
        break;
    }
    body.push_back("  " + q(id) + " [" + attrs + "];");
  }

  std::vector<std::string> edges;
  for (const auto& e : g.edges) {
    used.insert(e.loopback ? Symbol::loopback : Symbol::precedence);
    std::string attrs = "arrowhead=onormal";
    if (e.loopback) attrs += ", style=dashed, constraint=false";
    edges.push_back("  " + q(e.source) + " -> " + q(e.target) + " [" + attrs + "];");
  }

  std::set<std::string> actors;
  auto interaction = [&](const std::string& owner, const ced::Interaction& i) {
    std::string actor = "role:" + owner + ":" + i.counterpart;
    if (actors.insert(actor).second)
      body.push_back("  " + q(actor) + " [shape=plaintext, label=" + q(i.counterpart) + "];");
    used.insert(Symbol::actor);
    if (i.direction == ced::Direction::ingoing) {
      used.insert(Symbol::ingoing);
      edges.push_back("  " + q(actor) + " -> " + q(owner) + " [style=bold, color=green, label=" + q(i.label) + "];");
    } else {
      used.insert(Symbol::outgoing);
      edges.push_back("  " + q(owner) + " -> " + q(actor) + " [style=bold, color=red3, label=" + q(i.label) + "];");
    }
  };
  for (const auto& [id, ev] : events) {
    for (const auto& i : ev->interactions) interaction(id, i);
    ced::for_each_variant(ev->variants, [&](const ced::EventVariant& v, int) {
      for (const auto& i : v.interactions) interaction(v.id, i);
    });
  }
  std::sort(edges.begin(), edges.end());

  std::string out = "// Legend\n";
  for (Symbol s : used) out += "//   " + std::string(legend_text(s)) + "\n";
  out += "digraph " + q(title) + " {\n  rankdir=TB;\n  node [fontname=\"Helvetica\"];\n  edge [fontname=\"Helvetica\"];\n";
  for (const auto& line : body) out += line + "\n";
  for (const auto& line : edges) out += line + "\n";
  out += "}\n";
  return out;
}

}  // namespace ca::render
