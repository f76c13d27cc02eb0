#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ca/ced/graph.hpp"
#include "ca/derive.hpp"
#include "ca/lint.hpp"
#include "ca/render.hpp"
#include "ca/templates.hpp"
#include "ca/workspace.hpp"

namespace ca::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode { kOk = 0, kFindings = 1, kFailure = 2 };

struct Options {
  bool color = false;  // colour severities in text output
};

namespace detail_cli {

namespace fs = std::filesystem;

inline std::string plural(std::size_t n, const char* word) {
  return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

inline void print_summary(const workspace::LoadedWorkspace& lw, std::ostream& out) {
  const auto& repo = lw.repo;
  const auto& ws = lw.files;
  std::size_t specialised = 0, variants = 0;
  for (const auto& e : repo.events) {
    specialised += e.specialised();
    ced::for_each_variant(e.variants, [&](const ced::EventVariant&, int) { ++variants; });
  }
  out << "files: " << ws.ced_files.size() << " .ced, " << ws.msl_files.size() << " .msl, " << ws.cet_files.size()
      << " .cet\n";
  out << "processes: " << repo.processes.size() << "\n";
  out << "events: " << repo.events.size() << " (" << specialised << " specialised, " << plural(variants, "variant")
      << ")\n";
  out << "diagrams: " << repo.diagrams.size() << "\n";
  for (const auto& d : repo.diagrams) {
    std::size_t full = 0, externs = 0, logical = 0;
    for (const auto& n : d.nodes) {
      full += n.kind == ced::NodeKind::event;
      externs += n.kind == ced::NodeKind::extern_ref;
      logical += n.kind == ced::NodeKind::and_node || n.kind == ced::NodeKind::or_node;
    }
    out << "  " << d.name << " (" << d.file << "): " << plural(full, "event") << ", " << plural(externs, "extern")
        << ", " << plural(logical, "logical node") << ", " << plural(d.edges.size(), "precedence") << "\n";
  }
  out << "message structures: " << repo.message_structures.size() << "\n";
  for (const auto& [name, ms] : repo.message_structures) {
    out << "  " << name << ": " << plural(msl::collect_fields(ms).size(), "field") << ", "
        << plural(msl::count_complex(ms.root), "complex substructure") << "\n";
  }
  out << "business objects: " << repo.business_objects.size() << "\n";
  out << "templates: " << lw.templates.size() << "\n";
}

inline void print_report(const lint::LintReport& report, const std::string& format, bool color, std::ostream& out,
                         std::ostream& err) {
  if (format == "json") {
    out << lint::format_json(report);
    return;
  }
  out << lint::format_text(report, color);
  err << plural(report.count(Severity::error), "error") << ", " << plural(report.count(Severity::warning), "warning")
      << ", " << plural(report.count(Severity::info), "info") << "\n";
}

}  // namespace detail_cli

/// Runs one command. `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, Options opts = {}) {
  namespace fs = std::filesystem;
  using namespace detail_cli;

  CLI::App app{"Communication Analysis model toolkit", "ca"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string path = ".";
  std::string format = "text";
  std::string stage;
  std::string config;
  bool strict_c4 = false;
  bool dot = false, json = false;
  std::string event_id, output, template_file, template_workspace;

  auto* parse_cmd = app.add_subcommand("parse", "Parse a workspace and print a structural summary");
  parse_cmd->add_option("path", path, "Workspace directory or model file");

  auto* lint_cmd = app.add_subcommand("lint", "Check the model and print diagnostics");
  lint_cmd->add_option("path", path, "Workspace directory or model file");
  lint_cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
  lint_cmd->add_option("--stage", stage, "Development stage for field-property checks")
      ->check(CLI::IsMember({"analysis", "design-memory", "design-interface"}));
  lint_cmd->add_option("--config", config, "Configuration file (default: ca.conf in the workspace)");
  lint_cmd->add_flag("--strict-table9-c4", strict_c4, "Require or nodes to have 1 incoming and 2+ outgoing precedences");

  auto* render_cmd = app.add_subcommand("render", "Export the merged event diagram");
  render_cmd->add_option("path", path, "Workspace directory or model file");
  render_cmd->add_flag("--dot", dot, "Graphviz DOT output (default)");

  auto* derive_cmd = app.add_subcommand("derive", "Derive the class model");
  derive_cmd->add_option("path", path, "Workspace directory or model file");
  auto* derive_dot = derive_cmd->add_flag("--dot", dot, "Graphviz DOT output");
  derive_cmd->add_flag("--json", json, "JSON output (default)")->excludes(derive_dot);

  auto* order_cmd = app.add_subcommand("order", "Print events in temporal order");
  order_cmd->add_option("path", path, "Workspace directory or model file");

  auto* tpl_cmd = app.add_subcommand("template", "Event specification templates");
  tpl_cmd->require_subcommand(1);
  auto* gen_cmd = tpl_cmd->add_subcommand("gen", "Write a template skeleton for an event");
  gen_cmd->add_option("event", event_id, "Event identifier, e.g. \"SALE 1\"")->required();
  gen_cmd->add_option("path", path, "Workspace directory or model file");
  gen_cmd->add_option("-o,--output", output, "Write to this file instead of standard output");
  auto* check_cmd = tpl_cmd->add_subcommand("check", "Check every template against the model");
  check_cmd->add_option("path", path, "Workspace directory or model file");
  check_cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
  auto* render_tpl_cmd = tpl_cmd->add_subcommand("render", "Render a template as Markdown");
  render_tpl_cmd->add_option("file", template_file, "Template file (.cet)")->required();
  render_tpl_cmd->add_option("--workspace", template_workspace, "Workspace used to look up the message structure");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kFailure;
  }

  try {
    if (parse_cmd->parsed()) {
      print_summary(workspace::load(path), out);
      return kOk;
    }
    if (lint_cmd->parsed()) {
      auto lw = workspace::load(fs::path(path), config.empty() ? std::nullopt : std::optional<fs::path>(config));
      auto cfg = lw.config;
      if (!stage.empty()) cfg.stage = *msl::parse_stage(stage);
      if (strict_c4) cfg.strict_table9_c4 = true;
      auto report = workspace::lint_workspace(lw, cfg);
      print_report(report, format, opts.color, out, err);
      return report.has_errors() ? kFindings : kOk;
    }
    if (render_cmd->parsed()) {
      out << render::to_dot(workspace::load(path).repo);
      return kOk;
    }
    if (derive_cmd->parsed()) {
      auto model = derive::derive_class_model(workspace::load(path).repo);
      for (const auto& d : model.diagnostics) err << lint::format_text(d, opts.color) << "\n";
      if (dot) out << derive::to_dot(model);
      else out << derive::to_json(model).dump(2) << "\n";
      return kOk;
    }
    if (order_cmd->parsed()) {
      auto lw = workspace::load(path);
      for (const auto* e : ced::topological_order(lw.repo)) out << e->id << "  " << e->name << "\n";
      return kOk;
    }
    if (gen_cmd->parsed()) {
      auto text = templates::format_template(templates::generate_template(workspace::load(path).repo, event_id));
      if (output.empty()) {
        out << text;
      } else {
        std::ofstream file(output, std::ios::binary);
        if (!file) throw Error("io error", "cannot write file", SourceLocation{output});
        file << text;
      }
      return kOk;
    }
    if (check_cmd->parsed()) {
      auto lw = workspace::load(path);
      auto report = lint::finalize(workspace::template_extras(lw).diagnostics, lw.config);
      print_report(report, format, opts.color, out, err);
      return report.has_errors() ? kFindings : kOk;
    }
    if (render_tpl_cmd->parsed()) {
      fs::path file(template_file);
      auto spec = templates::parse_template(workspace::read_text(file), file.filename().generic_string());
      fs::path root = template_workspace.empty() ? (file.has_parent_path() ? file.parent_path() : fs::path("."))
                                                 : fs::path(template_workspace);
      auto lw = workspace::load(root);
      out << templates::render_template(spec, lw.repo.find_structure(spec.message.structure_ref));
      return kOk;
    }
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

}  // namespace ca::cli
