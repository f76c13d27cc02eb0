#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ca/ced/graph.hpp"
#include "ca/ced/model.hpp"
#include "ca/diagnostic.hpp"
#include "ca/msl.hpp"
#include "ca/partition/check.hpp"
#include "json.hpp"

namespace ca::lint {

using ced::CommunicativeEvent;
using ced::EventVariant;
using ced::ModelRepository;
using ced::NodeKind;

struct LintConfig {
  msl::Stage stage = msl::Stage::analysis;
  std::map<std::string, Severity> severity_overrides;
  std::set<std::string> disabled;
  int max_diagram_elements = 50;
  bool strict_table9_c4 = false;
};

/// Accepts "CA-G03", "ca-g03" and "G03".
inline std::optional<std::string> normalize_code(std::string_view text) {
  std::string code(detail::trim(text));
  for (auto& c : code) c = detail::ascii_upper(c);
  if (code.rfind("CA-", 0) != 0) code = "CA-" + code;
  if (!find_code(code)) return std::nullopt;
  return code;
}

/// Rejects overrides that would turn a metamodel constraint into an info.
inline void validate_config(const LintConfig& cfg, const SourceLocation& loc = {}) {
  for (const auto& [code, sev] : cfg.severity_overrides) {
    if (!find_code(code)) throw ConfigError("unknown diagnostic code '" + code + "'", loc);
    if (code.rfind("CA-C", 0) == 0 && sev == Severity::info)
      throw ConfigError("metamodel constraint " + code + " cannot be lowered below warning", loc);
  }
  for (const auto& code : cfg.disabled)
    if (!find_code(code)) throw ConfigError("unknown diagnostic code '" + code + "'", loc);
  if (cfg.max_diagram_elements <= 0) throw ConfigError("max_diagram_elements must be positive", loc);
}

/// Line-oriented `key = value` configuration; '#' starts a comment.
inline LintConfig parse_config(std::string_view text, const std::string& file = "ca.conf", LintConfig cfg = {}) {
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    SourceLocation loc{file, line_no, 1};
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", loc);
    std::string key = detail::to_lower(detail::trim(line.substr(0, eq)));
    std::string value(detail::trim(line.substr(eq + 1)));

    if (key == "stage") {
      auto s = msl::parse_stage(value);
      if (!s) throw ConfigError("unknown stage '" + value + "'", loc);
      cfg.stage = *s;
    } else if (key == "max_diagram_elements") {
      auto n = detail::parse_int(value);
      if (!n || *n <= 0) throw ConfigError("max_diagram_elements must be a positive integer", loc);
      cfg.max_diagram_elements = *n;
    } else if (key == "disable") {
      for (const auto& part : detail::split(value, ',')) {
        if (part.empty()) continue;
        auto code = normalize_code(part);
        if (!code) throw ConfigError("unknown diagnostic code '" + part + "'", loc);
        cfg.disabled.insert(*code);
      }
    } else if (key == "strict_table9_c4") {
      std::string v = detail::to_lower(value);
      if (v == "true" || v == "yes" || v == "1") cfg.strict_table9_c4 = true;
      else if (v == "false" || v == "no" || v == "0") cfg.strict_table9_c4 = false;
      else throw ConfigError("expected true or false for strict_table9_c4", loc);
    } else if (key.rfind("severity.", 0) == 0) {
      auto code = normalize_code(key.substr(9));
      if (!code) throw ConfigError("unknown diagnostic code '" + key.substr(9) + "'", loc);
      auto sev = parse_severity(detail::to_lower(value));
      if (!sev) throw ConfigError("unknown severity '" + value + "'", loc);
      cfg.severity_overrides[*code] = *sev;
      validate_config(cfg, loc);
    } else {
      throw ConfigError("unknown configuration key '" + key + "'", loc);
    }
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Metamodel

namespace detail_lint {

inline std::string edge_element(const std::string& s, const std::string& t) { return s + " -> " + t; }

inline void check_logical_arity(const partition::MergedGraph& g, const LintConfig& cfg, std::vector<Diagnostic>& out) {
  for (const auto& [id, n] : g.nodes) {
    std::size_t in = g.in_edges(id).size(), outs = g.out_edges(id).size();
    std::string counts = std::to_string(in) + " incoming and " + std::to_string(outs) + " outgoing";
    bool join_shape = in >= 2 && outs == 1;
    bool fork_shape = in == 1 && outs >= 2;
    if (n.kind == NodeKind::and_node) {
      bool ok = n.and_kind == ced::AndKind::join   ? join_shape
                : n.and_kind == ced::AndKind::fork ? fork_shape
                                                   : (join_shape || fork_shape);
      if (!ok) {
        std::string shape = n.and_kind == ced::AndKind::join   ? "an and-join needs at least 2 incoming and 1 outgoing"
                            : n.and_kind == ced::AndKind::fork ? "an and-fork needs 1 incoming and at least 2 outgoing"
                                                               : "an and node must be shaped as a join or a fork";
        out.push_back(make_diagnostic("CA-C03", "and node '" + id + "' has " + counts + " precedences; " + shape,
                                      n.location, id));
      }
    } else if (n.kind == NodeKind::or_node) {
      bool ok = cfg.strict_table9_c4 ? fork_shape : join_shape;
      if (!ok) {
        std::string shape = cfg.strict_table9_c4 ? "1 incoming and at least 2 outgoing" : "at least 2 incoming and 1 outgoing";
        out.push_back(make_diagnostic("CA-C04", "or node '" + id + "' has " + counts + " precedences; expected " + shape,
                                      n.location, id));
      }
    }
  }
}

inline void check_variant_numbers(const std::vector<EventVariant>& siblings, const std::string& parent,
                                  std::vector<Diagnostic>& out) {
  std::set<int> seen;
  for (const auto& v : siblings) {
    if (!seen.insert(v.number).second) {
      out.push_back(make_diagnostic("CA-C06", "variant number " + std::to_string(v.number) + " is used twice in " + parent,
                                    v.location, v.id));
    }
    check_variant_numbers(v.variants, v.id, out);
  }
}

}  // namespace detail_lint

/// Structure-level findings (CA-C07 to CA-C11, CA-S01, CA-S02) for every
/// message structure, plus condition references against the event's message.
inline std::vector<Diagnostic> check_structures(const ModelRepository& repo, const LintConfig& cfg) {
  std::vector<Diagnostic> out;
  for (const auto& [name, ms] : repo.message_structures) {
    auto v = msl::validate_structure(ms, cfg.stage);
    out.insert(out.end(), v.begin(), v.end());
    auto r = msl::check_formula_roles(ms);
    out.insert(out.end(), r.begin(), r.end());
  }
  for (const auto& e : repo.events) {
    auto msg = e.message_ref();
    const auto* ms = msg ? repo.find_structure(*msg) : nullptr;
    if (!ms) continue;
    auto fields = msl::collect_fields(*ms);
    ced::for_each_variant(e.variants, [&](const EventVariant& v, int) {
      if (!v.condition) return;
      for (const auto& ref : v.condition->field_refs) {
        bool found = std::any_of(fields.begin(), fields.end(),
                                 [&](const msl::FieldPath& f) { return msl::ref_matches_field(ref, f.name); });
        if (!found)
          out.push_back(make_diagnostic("CA-S02",
                                        "condition of " + v.id + " references ':" + ref + "', which is not a field of " +
                                            ms->name,
                                        v.location, v.id));
      }
    });
  }
  return out;
}

inline std::vector<Diagnostic> check_metamodel(const ModelRepository& repo, const partition::MergedGraph& g,
                                               const LintConfig& cfg = {}) {
  std::vector<Diagnostic> out;
  for (const auto& e : g.edges) {
    if (e.target == ced::kStartId)
      out.push_back(make_diagnostic("CA-C01", "start node has an incoming precedence from '" + e.source + "'", e.location,
                                    detail_lint::edge_element(e.source, e.target)));
    if (e.source == ced::kEndId)
      out.push_back(make_diagnostic("CA-C02", "end node has an outgoing precedence to '" + e.target + "'", e.location,
                                    detail_lint::edge_element(e.source, e.target)));
  }
  detail_lint::check_logical_arity(g, cfg, out);

  std::set<std::string> seen;
  for (const auto& e : repo.events) {
    if (!seen.insert(e.id).second)
      out.push_back(make_diagnostic("CA-C05", "event number " + std::to_string(e.number) + " is used twice in process " +
                                                  e.acronym,
                                    e.location, e.id));
    detail_lint::check_variant_numbers(e.variants, e.id, out);
  }

  for (auto& d : check_structures(repo, cfg))
    if (d.code.rfind("CA-C", 0) == 0) out.push_back(std::move(d));
  return out;
}

inline std::vector<Diagnostic> check_metamodel(const ModelRepository& repo, const LintConfig& cfg = {}) {
  return check_metamodel(repo, partition::merge_views(repo), cfg);
}

// ---------------------------------------------------------------------------
// Unity

/// Per-event template information used by the reaction advisory: true when
/// the event's template has a non-empty reaction section.
using ReactionCoverage = std::map<std::string, bool>;

inline std::vector<Diagnostic> check_unity(const ModelRepository& repo, const ReactionCoverage& reactions = {}) {
  std::vector<Diagnostic> out;
  for (const auto& e : repo.events) {
    if (e.roles_of(ced::RoleKind::primary).empty())
      out.push_back(make_diagnostic("CA-U01", "event " + e.id + " has no primary role", e.location, e.id));

    auto msg = e.message_ref();
    if (!msg) {
      out.push_back(make_diagnostic("CA-U02", "event " + e.id + " conveys no message", e.location, e.id));
    } else if (const auto* ms = repo.find_structure(*msg); !ms) {
      out.push_back(make_diagnostic("CA-U02", "message structure " + *msg + " of event " + e.id + " is not defined",
                                    e.location, e.id));
    } else {
      auto fields = msl::collect_fields(*ms);
      bool any_input = std::any_of(fields.begin(), fields.end(),
                                   [](const msl::FieldPath& f) { return f.props.op == msl::AcquisitionOp::input; });
      if (!any_input)
        out.push_back(make_diagnostic("CA-U02", "message " + ms->name + " of event " + e.id + " has no input fields",
                                      e.location, e.id));
    }

    auto is_out = [](const ced::Interaction& i) { return i.direction == ced::Direction::outgoing; };
    bool has_out = std::any_of(e.interactions.begin(), e.interactions.end(), is_out);
    ced::for_each_variant(e.variants, [&](const EventVariant& v, int) {
      has_out = has_out || std::any_of(v.interactions.begin(), v.interactions.end(), is_out);
    });
    auto r = reactions.find(e.id);
    bool reaction_specified = r != reactions.end() && r->second;
    if (!has_out && !reaction_specified)
      out.push_back(make_diagnostic("CA-U03", "event " + e.id + " has no outgoing interaction and no specified reaction",
                                    e.location, e.id));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Guidelines

/// Shallow "actor + action + object" check: an optional article, one to
/// three actor words, a verb in third person singular, then an object.
inline bool follows_naming_pattern(std::string_view name) {
  auto words = detail::split_words(name);
  if (!words.empty()) {
    auto first = detail::to_lower(words.front());
    if (first == "a" || first == "an" || first == "the") words.erase(words.begin());
  }
  for (std::size_t i = 1; i < words.size() && i <= 3; ++i) {
    const auto& w = words[i];
    bool lower = std::all_of(w.begin(), w.end(), [](char c) { return c < 'A' || c > 'Z'; });
    bool verb = lower && w.size() > 1 && w.back() == 's' && w[w.size() - 2] != 's';
    if (verb) return i + 1 < words.size();
  }
  return false;
}

inline std::string label_key(std::string_view s) { return detail::to_lower(detail::collapse_spaces(s)); }

inline std::size_t diagram_element_count(const ced::Diagram& d, const ModelRepository& repo) {
  std::size_t n = d.edges.size();
  for (const auto& node : d.nodes) {
    switch (node.kind) {
      case NodeKind::event:
      case NodeKind::variant:
      case NodeKind::and_node:
      case NodeKind::or_node: ++n; break;
      default: break;
    }
  }
  for (const auto& e : repo.events) {
    if (e.diagram != d.name) continue;
    n += e.interactions.size();
    ced::for_each_variant(e.variants, [&](const EventVariant& v, int) { n += v.interactions.size(); });
  }
  return n;
}

namespace detail_lint {

inline void check_variant_paths(const partition::MergedGraph& g, const std::vector<EventVariant>& variants,
                                const std::string& parent, const SourceLocation& loc, std::vector<Diagnostic>& out) {
  std::set<std::string> ids;
  for (const auto& v : variants) ids.insert(v.id);
  if (ids.size() >= 2) {
    auto first = ced::node_successors(g, *ids.begin());
    bool same = std::all_of(std::next(ids.begin()), ids.end(),
                            [&](const std::string& id) { return ced::node_successors(g, id) == first; });
    if (same) {
      std::vector<std::string> targets(first.begin(), first.end());
      out.push_back(make_diagnostic("CA-G02",
                                    "all variants of " + parent + " lead to the same successors {" +
                                        detail::join(targets, ", ") + "}",
                                    loc, parent));
    }
  }
  for (const auto& v : variants) check_variant_paths(g, v.variants, v.id, v.location, out);
}

}  // namespace detail_lint

inline std::vector<Diagnostic> check_guidelines(const ModelRepository& repo, const partition::MergedGraph& g,
                                                const LintConfig& cfg = {}) {
  std::vector<Diagnostic> out;
  for (const auto& e : repo.events) {
    if (!follows_naming_pattern(e.name))
      out.push_back(make_diagnostic("CA-G01", "name of " + e.id + " (\"" + e.name +
                                                  "\") does not read as actor + action + object",
                                    e.location, e.id));
    detail_lint::check_variant_paths(g, e.variants, e.id, e.location, out);
    for (const auto& i : e.interactions) {
      if (i.direction != ced::Direction::ingoing || !i.message) continue;
      if (label_key(i.label) != label_key(*i.message))
        out.push_back(make_diagnostic("CA-G04", "ingoing interaction \"" + i.label + "\" of " + e.id +
                                                    " carries message structure " + *i.message,
                                      i.location, e.id));
    }
    ced::for_each_variant(e.variants, [&](const EventVariant& v, int level) {
      if (level > 2)
        out.push_back(make_diagnostic("CA-G05", "variant " + v.id + " is nested " + std::to_string(level) + " levels deep",
                                      v.location, v.id));
    });
  }
  for (const auto& d : repo.diagrams) {
    auto n = diagram_element_count(d, repo);
    if (n > static_cast<std::size_t>(cfg.max_diagram_elements))
      out.push_back(make_diagnostic("CA-G03", "diagram '" + d.name + "' has " + std::to_string(n) +
                                                  " elements (limit " + std::to_string(cfg.max_diagram_elements) +
                                                  "); consider splitting it",
                                    d.location, d.name));
  }
  return out;
}

inline std::vector<Diagnostic> check_guidelines(const ModelRepository& repo, const LintConfig& cfg = {}) {
  return check_guidelines(repo, partition::merge_views(repo), cfg);
}

// ---------------------------------------------------------------------------
// Aggregation

struct LintReport {
  std::vector<Diagnostic> diagnostics;

  bool has_errors() const { return ca::has_errors(diagnostics); }
  std::size_t count(Severity s) const {
    return static_cast<std::size_t>(std::count_if(diagnostics.begin(), diagnostics.end(),
                                                  [&](const Diagnostic& d) { return d.severity == s; }));
  }
};

/// Findings produced outside the model passes (templates, derivation).
struct LintExtras {
  ReactionCoverage reactions;
  std::vector<Diagnostic> diagnostics;
};

/// Drops disabled codes, applies severity overrides and sorts.
inline LintReport finalize(std::vector<Diagnostic> diags, const LintConfig& cfg) {
  LintReport report;
  for (auto& d : diags) {
    if (cfg.disabled.count(d.code)) continue;
    if (auto it = cfg.severity_overrides.find(d.code); it != cfg.severity_overrides.end()) d.severity = it->second;
    report.diagnostics.push_back(std::move(d));
  }
  sort_diagnostics(report.diagnostics);
  report.diagnostics.erase(std::unique(report.diagnostics.begin(), report.diagnostics.end(),
                                       [](const Diagnostic& a, const Diagnostic& b) {
                                         return !report_order(a, b) && !report_order(b, a) && a.severity == b.severity;
                                       }),
                           report.diagnostics.end());
  return report;
}

inline LintReport run_lints(const ModelRepository& repo, const LintConfig& cfg = {}, const LintExtras& extras = {}) {
  auto analyzed = ced::analyze(repo);
  const auto& g = analyzed.graph;
  std::vector<Diagnostic> all;
  auto append = [&](std::vector<Diagnostic> v) { all.insert(all.end(), v.begin(), v.end()); };

  append(check_metamodel(repo, g, cfg));
  append(check_unity(repo, extras.reactions));
  append(check_guidelines(repo, g, cfg));
  for (auto& d : check_structures(repo, cfg))
    if (d.code.rfind("CA-C", 0) != 0) all.push_back(std::move(d));
  append(analyzed.depth.diagnostics);
  append(partition::check_partition(repo, g));
  append(extras.diagnostics);
  return finalize(std::move(all), cfg);
}

// ---------------------------------------------------------------------------
// Output

inline std::string format_text(const Diagnostic& d, bool color = false) {
  const char* tint = "";
  if (color) tint = d.severity == Severity::error ? "\033[31m" : d.severity == Severity::warning ? "\033[33m" : "\033[36m";
  std::string out = d.location.file.empty() ? std::string("<input>") : d.location.file;
  out += ':' + std::to_string(d.location.line) + ':' + std::to_string(d.location.column) + ": ";
  out += color ? std::string(tint) + std::string(to_string(d.severity)) + "\033[0m" : std::string(to_string(d.severity));
  out += ": " + d.message + " [" + d.code + "]";
  if (d.element) out += " (" + *d.element + ")";
  return out;
}

inline std::string format_text(const LintReport& r, bool color = false) {
  std::string out;
  for (const auto& d : r.diagnostics) out += format_text(d, color) + '\n';
  return out;
}

inline nlohmann::ordered_json to_json(const Diagnostic& d) {
  nlohmann::ordered_json j;
  j["code"] = d.code;
  j["severity"] = std::string(to_string(d.severity));
  j["message"] = d.message;
  j["file"] = d.location.file;
  j["line"] = d.location.line;
  j["column"] = d.location.column;
  j["element"] = d.element ? nlohmann::ordered_json(*d.element) : nlohmann::ordered_json(nullptr);
  return j;
}

inline std::string format_json(const LintReport& r) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& d : r.diagnostics) arr.push_back(to_json(d));
  return arr.dump(2) + '\n';
}

}  // namespace ca::lint
