#pragma once

// Event specification templates: the sectioned .cet text format, generation
// from the model, consistency checks and Markdown rendering.

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ca/ced/model.hpp"
#include "ca/detail/text.hpp"
#include "ca/diagnostic.hpp"
#include "ca/msl.hpp"

namespace ca::templates {

struct FieldDescription {
  std::string field;
  std::string text;
  SourceLocation location;

  friend bool operator==(const FieldDescription& a, const FieldDescription& b) {
    return a.field == b.field && a.text == b.text;
  }
};

struct Header {
  std::string event_id;
  std::optional<std::string> alias;  // diagram identifier when it differs from event_id
  std::string name;
  std::string goal;
  std::string description;
  std::optional<std::string> explanatory_diagram;
  std::vector<std::string> notes;

  friend bool operator==(const Header&, const Header&) = default;
};

struct Contact {
  std::string primary_actor;
  std::vector<std::string> support_actors;
  std::vector<std::string> interface_actors;
  std::string availability;
  std::string medium;
  std::string accreditation;
  std::string verification;
  std::string occurrence_constraints;
  std::string frequency;
  std::vector<std::string> business_forms;  // relative paths

  friend bool operator==(const Contact&, const Contact&) = default;
};

struct Message {
  std::string structure_ref;
  std::vector<FieldDescription> field_descriptions;
  std::vector<std::string> structural_constraints;
  std::vector<std::string> contextual_constraints;

  friend bool operator==(const Message&, const Message&) = default;
};

struct Reaction {
  std::optional<std::string> data_view;
  std::vector<std::string> treatments;
  std::vector<std::string> linked_behaviours;
  std::vector<std::string> linked_communications;

  bool empty() const {
    return !data_view && treatments.empty() && linked_behaviours.empty() && linked_communications.empty();
  }

  friend bool operator==(const Reaction&, const Reaction&) = default;
};

struct EventSpec {
  Header header;
  Contact contact;
  Message message;
  Reaction reaction;
  SourceLocation location;  // of the header line

  friend bool operator==(const EventSpec& a, const EventSpec& b) {
    return a.header == b.header && a.contact == b.contact && a.message == b.message && a.reaction == b.reaction;
  }
};

// ---------------------------------------------------------------------------
// .cet format

namespace detail_cet {

enum class Section { none, general, contact, message, reaction };

enum class Slot { scalar, optional_scalar, list, fields };

struct KeyInfo {
  Section section;
  const char* key;
  Slot slot;
};

inline constexpr KeyInfo kKeys[] = {
    {Section::general, "name", Slot::scalar},
    {Section::general, "goal", Slot::scalar},
    {Section::general, "description", Slot::scalar},
    {Section::general, "explanatory diagram", Slot::optional_scalar},
    {Section::general, "notes", Slot::list},
    {Section::contact, "primary actor", Slot::scalar},
    {Section::contact, "support actors", Slot::list},
    {Section::contact, "interface actors", Slot::list},
    {Section::contact, "availability", Slot::scalar},
    {Section::contact, "medium", Slot::scalar},
    {Section::contact, "accreditation", Slot::scalar},
    {Section::contact, "verification", Slot::scalar},
    {Section::contact, "occurrence constraints", Slot::scalar},
    {Section::contact, "frequency", Slot::scalar},
    {Section::contact, "business forms", Slot::list},
    {Section::message, "structure", Slot::scalar},
    {Section::message, "fields", Slot::fields},
    {Section::message, "structural constraints", Slot::list},
    {Section::message, "contextual constraints", Slot::list},
    {Section::reaction, "data view", Slot::optional_scalar},
    {Section::reaction, "treatments", Slot::list},
    {Section::reaction, "linked behaviours", Slot::list},
    {Section::reaction, "linked communications", Slot::list},
};

inline std::string normalize_key(std::string_view k) {
  std::string s = detail::to_lower(detail::trim(k));
  std::replace(s.begin(), s.end(), '_', ' ');
  std::replace(s.begin(), s.end(), '-', ' ');
  return detail::collapse_spaces(s);
}

inline std::string_view section_name(Section s) {
  switch (s) {
    case Section::general: return "general";
    case Section::contact: return "contact";
    case Section::message: return "message";
    case Section::reaction: return "reaction";
    default: return "";
  }
}

/// Reads a double-quoted string starting at `pos`; returns the end offset.
inline std::optional<std::pair<std::string, std::size_t>> read_quoted(std::string_view s, std::size_t pos) {
  if (pos >= s.size() || s[pos] != '"') return std::nullopt;
  std::string out;
  for (std::size_t i = pos + 1; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      char n = s[++i];
      out += n == 'n' ? '\n' : n;
    } else if (s[i] == '"') {
      return std::make_pair(out, i + 1);
    } else {
      out += s[i];
    }
  }
  return std::nullopt;
}

class CetParser {
 public:
  CetParser(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {}

  EventSpec parse() {
    std::istringstream in{std::string(text_)};
    std::string raw;
    bool have_header = false;
    while (std::getline(in, raw)) {
      ++line_;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      std::string_view line = detail::trim(raw);
      if (line.empty() || line.front() == '#') continue;
      bool indented = !raw.empty() && detail::is_space(raw.front());

      if (!have_header) {
        parse_header(line, raw);
        have_header = true;
        continue;
      }
      if (line.front() == '[') {
        open_section(line, raw);
      } else if (line.front() == '-') {
        list_item(detail::trim(line.substr(1)), raw);
      } else if (indented && current_ && last_scalar_) {
        *last_scalar_ += ' ';
        *last_scalar_ += line;
      } else {
        key_value(line, raw);
      }
    }
    if (!have_header) throw SyntaxError("expected an 'event \"ID\"' header line", loc(1));
    return std::move(spec_);
  }

 private:
  std::string_view text_;
  std::string file_;
  int line_ = 0;
  EventSpec spec_;
  Section section_ = Section::none;
  const KeyInfo* current_ = nullptr;
  std::string* last_scalar_ = nullptr;
  std::map<std::string, int> seen_keys_;

  SourceLocation loc(int column) const { return {file_, line_, column}; }
  int column_of(const std::string& raw) const {
    auto p = raw.find_first_not_of(" \t");
    return p == std::string::npos ? 1 : static_cast<int>(p) + 1;
  }

  void parse_header(std::string_view line, const std::string& raw) {
    if (line.rfind("event", 0) != 0) throw SyntaxError("expected an 'event \"ID\"' header line", loc(column_of(raw)));
    spec_.location = loc(column_of(raw));
    std::size_t pos = line.find_first_not_of(" \t", 5);
    auto id = pos == std::string_view::npos ? std::nullopt : read_quoted(line, pos);
    if (!id) throw SyntaxError("expected a quoted event identifier after 'event'", loc(column_of(raw)));
    spec_.header.event_id = id->first;
    std::string_view rest = detail::trim(line.substr(id->second));
    if (rest.empty()) return;
    if (rest.rfind("alias", 0) != 0) throw SyntaxError("unexpected text after the event identifier", loc(column_of(raw)));
    pos = rest.find_first_not_of(" \t", 5);
    auto alias = pos == std::string_view::npos ? std::nullopt : read_quoted(rest, pos);
    if (!alias || !detail::trim(rest.substr(alias->second)).empty())
      throw SyntaxError("expected a quoted identifier after 'alias'", loc(column_of(raw)));
    spec_.header.alias = alias->first;
  }

  void open_section(std::string_view line, const std::string& raw) {
    if (line.back() != ']') throw SyntaxError("unterminated section header", loc(column_of(raw)));
    std::string name = normalize_key(line.substr(1, line.size() - 2));
    Section s = name == "general"    ? Section::general
                : name == "contact"  ? Section::contact
                : name == "message"  ? Section::message
                : name == "reaction" ? Section::reaction
                                     : Section::none;
    if (s == Section::none) throw SyntaxError("unknown section [" + name + "]", loc(column_of(raw)));
    section_ = s;
    current_ = nullptr;
    last_scalar_ = nullptr;
  }

  std::string* scalar_slot(const std::string& key) {
    auto& h = spec_.header;
    auto& c = spec_.contact;
    if (key == "name") return &h.name;
    if (key == "goal") return &h.goal;
    if (key == "description") return &h.description;
    if (key == "explanatory diagram") return &h.explanatory_diagram.emplace();
    if (key == "primary actor") return &c.primary_actor;
    if (key == "availability") return &c.availability;
    if (key == "medium") return &c.medium;
    if (key == "accreditation") return &c.accreditation;
    if (key == "verification") return &c.verification;
    if (key == "occurrence constraints") return &c.occurrence_constraints;
    if (key == "frequency") return &c.frequency;
    if (key == "structure") return &spec_.message.structure_ref;
    if (key == "data view") return &spec_.reaction.data_view.emplace();
    return nullptr;
  }

  std::vector<std::string>* list_slot(const std::string& key) {
    if (key == "notes") return &spec_.header.notes;
    if (key == "support actors") return &spec_.contact.support_actors;
    if (key == "interface actors") return &spec_.contact.interface_actors;
    if (key == "business forms") return &spec_.contact.business_forms;
    if (key == "structural constraints") return &spec_.message.structural_constraints;
    if (key == "contextual constraints") return &spec_.message.contextual_constraints;
    if (key == "treatments") return &spec_.reaction.treatments;
    if (key == "linked behaviours") return &spec_.reaction.linked_behaviours;
    if (key == "linked communications") return &spec_.reaction.linked_communications;
    return nullptr;
  }

  void key_value(std::string_view line, const std::string& raw) {
    if (section_ == Section::none)
      throw SyntaxError("expected a section header such as [general]", loc(column_of(raw)));
    auto colon = line.find(':');
    if (colon == std::string_view::npos) throw SyntaxError("expected 'key: value'", loc(column_of(raw)));
    std::string key = normalize_key(line.substr(0, colon));
    std::string value(detail::trim(line.substr(colon + 1)));
    const KeyInfo* info = nullptr;
    for (const auto& k : kKeys)
      if (k.section == section_ && key == k.key) info = &k;
    if (!info)
      throw SyntaxError("unknown key '" + key + "' in section [" + std::string(section_name(section_)) + "]",
                        loc(column_of(raw)));
    if (seen_keys_[key]++) throw SyntaxError("key '" + key + "' is given more than once", loc(column_of(raw)));
    current_ = info;
    last_scalar_ = nullptr;
    if (info->slot == Slot::scalar || info->slot == Slot::optional_scalar) {
      last_scalar_ = scalar_slot(key);
      *last_scalar_ = value;
    } else if (!value.empty()) {
      add_item(value, raw);
    }
  }

  void list_item(std::string_view item, const std::string& raw) {
    if (!current_ || current_->slot == Slot::scalar || current_->slot == Slot::optional_scalar)
      throw SyntaxError("list item without a list key", loc(column_of(raw)));
    add_item(item, raw);
  }

  void add_item(std::string_view item, const std::string& raw) {
    last_scalar_ = nullptr;
    if (current_->slot == Slot::fields) {
      auto colon = item.find(':');
      FieldDescription fd;
      fd.field = std::string(detail::trim(item.substr(0, colon)));
      fd.text = colon == std::string_view::npos ? std::string() : std::string(detail::trim(item.substr(colon + 1)));
      fd.location = loc(column_of(raw));
      if (fd.field.empty()) throw SyntaxError("field description without a field name", fd.location);
      spec_.message.field_descriptions.push_back(std::move(fd));
      last_scalar_ = &spec_.message.field_descriptions.back().text;
      return;
    }
    list_slot(current_->key)->push_back(std::string(item));
    last_scalar_ = &list_slot(current_->key)->back();
  }
};

}  // namespace detail_cet

inline EventSpec parse_template(std::string_view text, const std::string& file = "template.cet") {
  return detail_cet::CetParser(text, file).parse();
}

/// Inverse of parse_template for single-line values.
inline std::string format_template(const EventSpec& spec) {
  std::string out = "event " + detail::quote(spec.header.event_id);
  if (spec.header.alias) out += " alias " + detail::quote(*spec.header.alias);
  out += "\n";
  auto scalar = [&](const char* key, const std::string& v) { out += std::string(key) + ": " + v + "\n"; };
  auto list = [&](const char* key, const std::vector<std::string>& items) {
    out += std::string(key) + ":\n";
    for (const auto& i : items) out += "- " + i + "\n";
  };
  const auto& h = spec.header;
  out += "\n[general]\n";
  scalar("name", h.name);
  scalar("goal", h.goal);
  scalar("description", h.description);
  if (h.explanatory_diagram) scalar("explanatory diagram", *h.explanatory_diagram);
  if (!h.notes.empty()) list("notes", h.notes);

  const auto& c = spec.contact;
  out += "\n[contact]\n";
  scalar("primary actor", c.primary_actor);
  list("support actors", c.support_actors);
  list("interface actors", c.interface_actors);
  scalar("availability", c.availability);
  scalar("medium", c.medium);
  scalar("accreditation", c.accreditation);
  scalar("verification", c.verification);
  scalar("occurrence constraints", c.occurrence_constraints);
  scalar("frequency", c.frequency);
  list("business forms", c.business_forms);

  const auto& m = spec.message;
  out += "\n[message]\n";
  scalar("structure", m.structure_ref);
  out += "fields:\n";
  for (const auto& f : m.field_descriptions) out += "- " + f.field + ":" + (f.text.empty() ? "" : " " + f.text) + "\n";
  list("structural constraints", m.structural_constraints);
  list("contextual constraints", m.contextual_constraints);

  const auto& r = spec.reaction;
  out += "\n[reaction]\n";
  if (r.data_view) scalar("data view", *r.data_view);
  list("treatments", r.treatments);
  list("linked behaviours", r.linked_behaviours);
  list("linked communications", r.linked_communications);
  return out;
}

// ---------------------------------------------------------------------------
// Generation

/// Names under which a structure's fields are described: the plain field
/// name, or the full path when the name occurs more than once.
inline std::vector<std::string> describable_fields(const msl::MessageStructure& ms) {
  auto fields = msl::collect_fields(ms);
  std::map<std::string, int> uses;
  for (const auto& f : fields) ++uses[f.name];
  std::vector<std::string> out;
  for (const auto& f : fields) out.push_back(uses[f.name] > 1 ? f.path : f.name);
  return out;
}

inline std::string resolved_event_id(const EventSpec& spec, const ced::ModelRepository& repo) {
  if (repo.find_event(spec.header.event_id)) return spec.header.event_id;
  if (spec.header.alias && repo.find_event(*spec.header.alias)) return *spec.header.alias;
  return {};
}

namespace detail_cet {
template <typename Fn>
void for_each_outgoing(const ced::CommunicativeEvent& e, Fn&& fn) {
  for (const auto& i : e.interactions)
    if (i.direction == ced::Direction::outgoing) fn(i);
  ced::for_each_variant(e.variants, [&](const ced::EventVariant& v, int) {
    for (const auto& i : v.interactions)
      if (i.direction == ced::Direction::outgoing) fn(i);
  });
}
}  // namespace detail_cet

inline EventSpec generate_template(const ced::ModelRepository& repo, const std::string& event_id) {
  const auto* e = repo.find_event(event_id);
  if (!e) throw UnknownEvent(event_id);
  EventSpec spec;
  spec.header.event_id = e->id;
  spec.header.name = e->name;
  spec.header.goal = e->goal.value_or("");
  auto primaries = e->roles_of(ced::RoleKind::primary);
  if (!primaries.empty()) spec.contact.primary_actor = primaries.front();
  spec.contact.interface_actors = e->roles_of(ced::RoleKind::interface_role);

  auto msg = e->message_ref();
  if (const auto* ms = msg ? repo.find_structure(*msg) : nullptr) {
    spec.message.structure_ref = ms->name;
    for (const auto& f : describable_fields(*ms)) spec.message.field_descriptions.push_back({f, "", {}});
  } else if (msg) {
    spec.header.notes.push_back("CA-U02: message structure " + *msg + " is not defined");
  } else {
    spec.header.notes.push_back("CA-U02: the event conveys no message");
  }
  detail_cet::for_each_outgoing(*e, [&](const ced::Interaction& i) {
    spec.reaction.linked_communications.push_back(i.counterpart + ": " + i.label);
  });
  return spec;
}

// ---------------------------------------------------------------------------
// Checks

inline bool mentions(const std::vector<std::string>& texts, const std::string& needle) {
  auto n = detail::to_lower(detail::collapse_spaces(needle));
  return std::any_of(texts.begin(), texts.end(), [&](const std::string& t) {
    return detail::to_lower(detail::collapse_spaces(t)).find(n) != std::string::npos;
  });
}

inline std::vector<Diagnostic> check_template(const EventSpec& spec, const ced::ModelRepository& repo) {
  std::vector<Diagnostic> out;
  const std::string& id = spec.header.event_id;
  auto resolved = resolved_event_id(spec, repo);
  if (resolved.empty()) {
    std::string what = "template event \"" + id + "\"";
    if (spec.header.alias) what += " (alias \"" + *spec.header.alias + "\")";
    out.push_back(make_diagnostic("CA-T01", what + " does not resolve to an event of the model", spec.location, id));
    return out;
  }
  const auto& e = *repo.find_event(resolved);

  auto primaries = e.roles_of(ced::RoleKind::primary);
  bool primary_ok = std::any_of(primaries.begin(), primaries.end(),
                                [&](const std::string& r) { return detail::iequals(r, spec.contact.primary_actor); });
  if (!primary_ok) {
    std::string expected = primaries.empty() ? std::string("none") : detail::join(primaries, ", ");
    out.push_back(make_diagnostic("CA-T02",
                                  "primary actor '" + spec.contact.primary_actor + "' differs from the primary role of " +
                                      e.id + " (" + expected + ")",
                                  spec.location, e.id));
  }

  if (!spec.message.structure_ref.empty()) {
    const auto* ms = repo.find_structure(spec.message.structure_ref);
    if (!ms) {
      out.push_back(make_diagnostic("CA-T05", "message structure " + spec.message.structure_ref + " is not defined",
                                    spec.location, e.id));
    } else {
      auto fields = msl::collect_fields(*ms);
      auto names = describable_fields(*ms);
      auto known = [&](const std::string& f) {
        return std::any_of(fields.begin(), fields.end(),
                           [&](const msl::FieldPath& p) { return p.name == f || p.path == f; });
      };
      for (const auto& fd : spec.message.field_descriptions) {
        if (!known(fd.field))
          out.push_back(make_diagnostic("CA-T03", "description given for '" + fd.field + "', which is not a field of " +
                                                      ms->name,
                                        fd.location.line ? fd.location : spec.location, e.id));
      }
      for (std::size_t i = 0; i < fields.size(); ++i) {
        auto it = std::find_if(spec.message.field_descriptions.begin(), spec.message.field_descriptions.end(),
                               [&](const FieldDescription& fd) { return fd.field == names[i] || fd.field == fields[i].path; });
        if (it == spec.message.field_descriptions.end()) {
          out.push_back(make_diagnostic("CA-T03", "field '" + names[i] + "' of " + ms->name + " has no description",
                                        spec.location, e.id));
        } else if (detail::trim(it->text).empty()) {
          out.push_back(make_diagnostic("CA-T03", "description of field '" + names[i] + "' is empty",
                                        it->location.line ? it->location : spec.location, e.id));
        }
      }
    }
  }

  detail_cet::for_each_outgoing(e, [&](const ced::Interaction& i) {
    const auto& links = spec.reaction.linked_communications;
    if (!mentions(links, i.counterpart) && !mentions(links, i.label))
      out.push_back(make_diagnostic("CA-T04",
                                    "outgoing interaction \"" + i.label + "\" to " + i.counterpart +
                                        " is not covered by the linked communications",
                                    spec.location, e.id));
  });
  return out;
}

// ---------------------------------------------------------------------------
// Rendering

namespace detail_cet {

inline std::string cell(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

inline void bullet(std::string& out, const char* label, const std::string& value) {
  if (!value.empty()) out += "- **" + std::string(label) + ":** " + value + "\n";
}

inline void items(std::string& out, const char* title, const std::vector<std::string>& list) {
  if (list.empty()) return;
  out += "\n### " + std::string(title) + "\n\n";
  for (const auto& i : list) out += "- " + i + "\n";
}

inline void none_if_empty(std::string& out, std::size_t mark) {
  if (out.size() == mark) out += "(none specified)\n";
}

}  // namespace detail_cet

/// Markdown document with the four numbered sections. The structure, when
/// given, is printed in its textual notation.
inline std::string render_template(const EventSpec& spec, const msl::MessageStructure* structure = nullptr) {
  using namespace detail_cet;
  const auto& h = spec.header;
  std::string title = h.event_id + ". " + h.name;
  for (auto& ch : title) ch = detail::ascii_upper(ch);
  std::string out = "# " + title + "\n";
  if (h.alias) out += "\nDiagram identifier: " + *h.alias + "\n";
  for (const auto& n : h.notes) out += "\n> Note: " + n + "\n";

  out += "\n## 1 General information\n\n";
  std::size_t mark = out.size();
  if (!h.goal.empty()) out += "### Goals\n\n" + h.goal + "\n\n";
  if (!h.description.empty()) out += "### Description\n\n" + h.description + "\n\n";
  if (h.explanatory_diagram) out += "### Explanatory diagram\n\n" + *h.explanatory_diagram + "\n\n";
  none_if_empty(out, mark);

  const auto& c = spec.contact;
  out += "\n## 2 Contact requirements\n\n";
  mark = out.size();
  bullet(out, "Primary actor", c.primary_actor);
  bullet(out, "Support actors", detail::join(c.support_actors, ", "));
  bullet(out, "Interface actors", detail::join(c.interface_actors, ", "));
  bullet(out, "Availability", c.availability);
  bullet(out, "Communication channel", c.medium);
  bullet(out, "Accreditation", c.accreditation);
  bullet(out, "Verification", c.verification);
  bullet(out, "Occurrence temporal constraints", c.occurrence_constraints);
  bullet(out, "Frequency of occurrence", c.frequency);
  items(out, "Business forms", c.business_forms);
  none_if_empty(out, mark);

  const auto& m = spec.message;
  out += "\n## 3 Message requirements\n\n";
  mark = out.size();
  if (!m.structure_ref.empty()) {
    out += "### Message structure\n\n";
    if (structure) out += "```\n" + msl::serialize(*structure) + "```\n";
    else out += m.structure_ref + "\n";
  }
  if (!m.field_descriptions.empty()) {
    out += "\n### Field descriptions\n\n| Field | Description |\n| --- | --- |\n";
    for (const auto& f : m.field_descriptions) out += "| " + cell(f.field) + " | " + cell(f.text) + " |\n";
  }
  items(out, "Structural constraints", m.structural_constraints);
  items(out, "Contextual constraints", m.contextual_constraints);
  none_if_empty(out, mark);

  const auto& r = spec.reaction;
  out += "\n## 4 Reaction requirements\n\n";
  mark = out.size();
  if (r.data_view) out += "### Data view\n\n" + *r.data_view + "\n";
  items(out, "Treatments", r.treatments);
  items(out, "Linked behaviours", r.linked_behaviours);
  items(out, "Linked communications", r.linked_communications);
  none_if_empty(out, mark);
  return out;
}

}  // namespace ca::templates
