#pragma once

// A model workspace: every .ced, .msl and .cet file under a root directory
// plus an optional ca.conf.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ca/ced/parser.hpp"
#include "ca/derive.hpp"
#include "ca/diagnostic.hpp"
#include "ca/lint.hpp"
#include "ca/msl.hpp"
#include "ca/templates.hpp"

namespace ca::workspace {

namespace fs = std::filesystem;

inline constexpr const char* kConfigName = "ca.conf";

struct Workspace {
  fs::path root;
  std::optional<fs::path> config;
  std::vector<std::string> ced_files;  // relative to root, generic separators, sorted
  std::vector<std::string> msl_files;
  std::vector<std::string> cet_files;
};

inline std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("io error", "cannot read file", SourceLocation{p.generic_string()});
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Recursive discovery in lexicographic order of relative paths. A single
/// file is accepted as a one-file workspace rooted at its directory.
inline Workspace discover(const fs::path& path) {
  Workspace ws;
  std::error_code ec;
  if (fs::is_regular_file(path, ec)) {
    ws.root = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::string name = path.filename().generic_string();
    auto ext = path.extension();
    if (ext == ".ced") ws.ced_files.push_back(name);
    else if (ext == ".msl") ws.msl_files.push_back(name);
    else if (ext == ".cet") ws.cet_files.push_back(name);
    else throw Error("io error", "not a model file (.ced, .msl or .cet)", SourceLocation{path.generic_string()});
    return ws;
  }
  if (!fs::is_directory(path, ec)) throw Error("io error", "no such file or directory", SourceLocation{path.generic_string()});
  ws.root = path;
  for (auto it = fs::recursive_directory_iterator(path, fs::directory_options::skip_permission_denied, ec);
       !ec && it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (!it->is_regular_file(ec)) continue;
    std::string rel = fs::relative(it->path(), path, ec).generic_string();
    auto ext = it->path().extension();
    if (ext == ".ced") ws.ced_files.push_back(rel);
    else if (ext == ".msl") ws.msl_files.push_back(rel);
    else if (ext == ".cet") ws.cet_files.push_back(rel);
  }
  if (ec) throw Error("io error", ec.message(), SourceLocation{path.generic_string()});
  std::sort(ws.ced_files.begin(), ws.ced_files.end());
  std::sort(ws.msl_files.begin(), ws.msl_files.end());
  std::sort(ws.cet_files.begin(), ws.cet_files.end());
  if (fs::is_regular_file(path / kConfigName, ec)) ws.config = path / kConfigName;
  return ws;
}

struct TemplateFile {
  std::string file;
  templates::EventSpec spec;
};

struct LoadedWorkspace {
  Workspace files;
  ced::ModelRepository repo;
  std::vector<TemplateFile> templates;
  lint::LintConfig config;
};

/// Parses every file. Message structures are read leniently so that an
/// initial specialisation is reported by the lint rather than thrown.
inline LoadedWorkspace load(const Workspace& ws, const std::optional<fs::path>& config_override = std::nullopt) {
  LoadedWorkspace lw;
  lw.files = ws;
  std::vector<ced::SourceText> sources;
  for (const auto& f : ws.ced_files) sources.push_back({f, read_text(ws.root / f)});
  lw.repo = ced::parse_model(sources);

  std::map<std::string, std::string> structure_file;
  for (const auto& f : ws.msl_files) {
    for (auto& ms : msl::parse_msl(read_text(ws.root / f), f, msl::ParseOptions{false})) {
      if (auto it = structure_file.find(ms.name); it != structure_file.end())
        throw DuplicateDefinition("message structure " + ms.name + " is already defined in " + it->second, ms.location);
      structure_file[ms.name] = f;
      lw.repo.message_structures.emplace(ms.name, std::move(ms));
    }
  }
  for (const auto& f : ws.cet_files) lw.templates.push_back({f, templates::parse_template(read_text(ws.root / f), f)});

  auto config_path = config_override ? config_override : ws.config;
  if (config_path) {
    std::string shown = config_override ? config_path->generic_string() : std::string(kConfigName);
    lw.config = lint::parse_config(read_text(*config_path), shown);
  }
  return lw;
}

inline LoadedWorkspace load(const fs::path& path, const std::optional<fs::path>& config_override = std::nullopt) {
  return load(discover(path), config_override);
}

/// Template findings and reaction coverage of every template file.
inline lint::LintExtras template_extras(const LoadedWorkspace& lw) {
  lint::LintExtras extras;
  for (const auto& t : lw.templates) {
    auto diags = templates::check_template(t.spec, lw.repo);
    extras.diagnostics.insert(extras.diagnostics.end(), diags.begin(), diags.end());
    auto id = templates::resolved_event_id(t.spec, lw.repo);
    if (!id.empty()) extras.reactions[id] = extras.reactions[id] || !t.spec.reaction.empty();
  }
  return extras;
}

/// Full lint of a workspace: model passes, template checks and derivation
/// findings.
inline lint::LintReport lint_workspace(const LoadedWorkspace& lw, const lint::LintConfig& cfg) {
  auto extras = template_extras(lw);
  auto derived = derive::derive_class_model(lw.repo);
  extras.diagnostics.insert(extras.diagnostics.end(), derived.diagnostics.begin(), derived.diagnostics.end());
  return lint::run_lints(lw.repo, cfg, extras);
}

inline lint::LintReport lint_workspace(const LoadedWorkspace& lw) { return lint_workspace(lw, lw.config); }

}  // namespace ca::workspace
