#pragma once

#include <set>
#include <string>
#include <vector>

#include "ca/ced/graph.hpp"
#include "ca/ced/model.hpp"
#include "ca/diagnostic.hpp"
#include "ca/partition/merge.hpp"

namespace ca::partition {

/// Units represented in a diagram, either fully or through an extern.
inline std::set<std::string> covered_units(const ced::Diagram& d, const MergedGraph& g) {
  std::set<std::string> out;
  for (const auto& n : d.nodes) {
    const auto* node = g.find(n.id);
    out.insert(node ? node->unit : n.id);
  }
  return out;
}

/// Cross-diagram consistency: missing out-of-scope precedents (CA-P01),
/// missing out-of-scope successors (CA-P03) and conflicting loopback
/// assertions (CA-P04), plus the merge findings (CA-P02, CA-P05).
inline std::vector<Diagnostic> check_partition(const ced::ModelRepository& repo, const MergedGraph& g) {
  std::vector<Diagnostic> out = g.diagnostics;
  for (const auto& d : repo.diagrams) {
    auto covered = covered_units(d, g);
    std::set<std::string> seen;
    for (const auto& e : repo.events) {
      if (e.diagram != d.name || !seen.insert(e.id).second) continue;
      for (const auto& p : ced::direct_precedents(g, e.id)) {
        if (covered.count(p)) continue;
        out.push_back(make_diagnostic("CA-P01",
                                      "direct precedent " + p + " of " + e.id + " is not represented in diagram '" +
                                          d.name + "'; add extern \"" + p + "\"",
                                      e.location, e.id));
      }
      for (const auto& s : ced::direct_successors(g, e.id)) {
        if (covered.count(s)) continue;
        out.push_back(make_diagnostic("CA-P03",
                                      "direct successor " + s + " of " + e.id + " is not represented in diagram '" +
                                          d.name + "'",
                                      e.location, e.id));
      }
    }
  }
  for (const auto& e : g.edges) {
    bool any_true = false, any_false = false;
    for (const auto& [diagram, flag] : e.loopback_assertions) (flag ? any_true : any_false) = true;
    if (any_true && any_false) {
      std::vector<std::string> marking;
      for (const auto& [diagram, flag] : e.loopback_assertions)
        if (flag) marking.push_back(diagram);
      out.push_back(make_diagnostic("CA-P04",
                                    "precedence " + e.source + " -> " + e.target + " is marked as a loopback only in " +
                                        detail::join(marking, ", "),
                                    e.location, e.source + " -> " + e.target));
    }
  }
  return out;
}

inline std::vector<Diagnostic> check_partition(const ced::ModelRepository& repo) {
  return check_partition(repo, merge_views(repo));
}

}  // namespace ca::partition
