#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace ca {

/// Position of a construct in a source file. Lines and columns are 1-based;
/// zero means "unknown".
struct SourceLocation {
  std::string file;
  int line = 0;
  int column = 0;

  friend bool operator==(const SourceLocation&, const SourceLocation&) = default;

  std::string str() const {
    std::string out = file.empty() ? std::string("<input>") : file;
    if (line > 0) {
      out += ':' + std::to_string(line);
      if (column > 0) out += ':' + std::to_string(column);
    }
    return out;
  }
};

enum class Severity { info, warning, error };

inline std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::info: return "info";
    case Severity::warning: return "warning";
    case Severity::error: return "error";
  }
  return "?";
}

inline std::optional<Severity> parse_severity(std::string_view s) {
  if (s == "info") return Severity::info;
  if (s == "warning") return Severity::warning;
  if (s == "error") return Severity::error;
  return std::nullopt;
}

/// One validation finding.
struct Diagnostic {
  std::string code;
  Severity severity = Severity::error;
  std::string message;
  SourceLocation location;
  std::optional<std::string> element;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// Total order used for reports: file, line, code, then the remaining fields
/// so that two distinct diagnostics never compare equal.
inline bool report_order(const Diagnostic& a, const Diagnostic& b) {
  auto key = [](const Diagnostic& d) {
    return std::tie(d.location.file, d.location.line, d.code, d.location.column,
                    d.element, d.message);
  };
  if (key(a) != key(b)) return key(a) < key(b);
  return a.severity < b.severity;
}

inline void sort_diagnostics(std::vector<Diagnostic>& diags) {
  std::sort(diags.begin(), diags.end(), report_order);
}

inline bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::error; });
}

// ---------------------------------------------------------------------------
// Code table

struct CodeInfo {
  std::string_view code;
  Severity default_severity;
  std::string_view summary;
};

inline constexpr std::array kCodeTable = {
    CodeInfo{"CA-C01", Severity::error, "start node has incoming precedence relations"},
    CodeInfo{"CA-C02", Severity::error, "end node has outgoing precedence relations"},
    CodeInfo{"CA-C03", Severity::error, "and node arity (join: >=2 in / 1 out, fork: 1 in / >=2 out)"},
    CodeInfo{"CA-C04", Severity::error, "or node arity (merge: >=2 in / 1 out)"},
    CodeInfo{"CA-C05", Severity::error, "duplicate event number within a process"},
    CodeInfo{"CA-C06", Severity::error, "duplicate variant number within a specialised event"},
    CodeInfo{"CA-C07", Severity::error, "formula bound to more than one role"},
    CodeInfo{"CA-C08", Severity::error, "initial substructure is a specialisation"},
    CodeInfo{"CA-C09", Severity::error, "field occurs more than once in its substructure"},
    CodeInfo{"CA-C10", Severity::error, "aggregation or iteration occurs more than once in its substructure"},
    CodeInfo{"CA-C11", Severity::error, "specialisation occurs more than once in its substructure"},
    CodeInfo{"CA-S01", Severity::warning, "field property not recommended at this stage"},
    CodeInfo{"CA-S02", Severity::error, "unresolved field reference in formula"},
    CodeInfo{"CA-U01", Severity::error, "trigger unity: event has no primary role"},
    CodeInfo{"CA-U02", Severity::warning, "communication unity: message missing or without input fields"},
    CodeInfo{"CA-U03", Severity::info, "reaction unity: no outgoing interaction and no reaction"},
    CodeInfo{"CA-G01", Severity::info, "event name does not follow actor + action + object"},
    CodeInfo{"CA-G02", Severity::warning, "event variants share identical successor sets"},
    CodeInfo{"CA-G03", Severity::warning, "diagram exceeds the element limit"},
    CodeInfo{"CA-G04", Severity::warning, "ingoing interaction label differs from its message structure"},
    CodeInfo{"CA-G05", Severity::info, "event specialisation nested deeper than two levels"},
    CodeInfo{"CA-G06", Severity::info, "node unreachable from any start"},
    CodeInfo{"CA-P01", Severity::error, "out-of-scope direct precedent not represented in diagram"},
    CodeInfo{"CA-P02", Severity::error, "out-of-scope reference has no full definition"},
    CodeInfo{"CA-P03", Severity::info, "out-of-scope direct successor not represented in diagram"},
    CodeInfo{"CA-P04", Severity::error, "diagrams disagree on whether a precedence is a loopback"},
    CodeInfo{"CA-P05", Severity::info, "precedence declared between two out-of-scope references"},
    CodeInfo{"CA-D01", Severity::warning, "reference field domain is not a known business object"},
    CodeInfo{"CA-D02", Severity::warning, "attribute domain conflicts across class diagram views"},
    CodeInfo{"CA-D03", Severity::warning, "class has more than one generated identifier"},
    CodeInfo{"CA-T01", Severity::error, "template event identifier does not resolve"},
    CodeInfo{"CA-T02", Severity::warning, "template primary actor differs from the diagram"},
    CodeInfo{"CA-T03", Severity::warning, "field descriptions do not match the message structure"},
    CodeInfo{"CA-T04", Severity::info, "linked communications miss an outgoing interaction"},
    CodeInfo{"CA-T05", Severity::error, "template references an unknown message structure"},
};

inline const CodeInfo* find_code(std::string_view code) {
  for (const auto& c : kCodeTable)
    if (c.code == code) return &c;
  return nullptr;
}

/// Builds a diagnostic with the code's default severity.
inline Diagnostic make_diagnostic(std::string_view code, std::string message,
                                  SourceLocation loc,
                                  std::optional<std::string> element = std::nullopt) {
  const CodeInfo* info = find_code(code);
  return Diagnostic{std::string(code), info ? info->default_severity : Severity::error,
                    std::move(message), std::move(loc), std::move(element)};
}

// ---------------------------------------------------------------------------
// Exceptions

class Error : public std::runtime_error {
 public:
  Error(std::string kind, std::string message, SourceLocation loc = {})
      : std::runtime_error(loc.str() + ": " + kind + ": " + message),
        kind_(std::move(kind)),
        message_(std::move(message)),
        location_(std::move(loc)) {}

  const std::string& kind() const noexcept { return kind_; }
  const std::string& message() const noexcept { return message_; }
  const SourceLocation& location() const noexcept { return location_; }

 private:
  std::string kind_;
  std::string message_;
  SourceLocation location_;
};

struct SyntaxError : Error {
  SyntaxError(std::string msg, SourceLocation loc) : Error("syntax error", std::move(msg), std::move(loc)) {}
};

/// A message structure whose initial substructure is a specialisation.
struct StructureError : Error {
  StructureError(std::string msg, SourceLocation loc) : Error("structure error", std::move(msg), std::move(loc)) {}
};

struct DuplicateDefinition : Error {
  DuplicateDefinition(std::string msg, SourceLocation loc)
      : Error("duplicate definition", std::move(msg), std::move(loc)) {}
};

struct CyclicResidue : Error {
  explicit CyclicResidue(std::string msg) : Error("cyclic residue", std::move(msg)) {}
};

struct UnknownEvent : Error {
  explicit UnknownEvent(const std::string& id) : Error("unknown event", "no event with identifier '" + id + "'") {}
};

struct ConfigError : Error {
  ConfigError(std::string msg, SourceLocation loc = {}) : Error("config error", std::move(msg), std::move(loc)) {}
};

}  // namespace ca
