#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ca/detail/text.hpp"
#include "ca/diagnostic.hpp"
#include "ca/msl.hpp"

namespace ca::ced {

enum class RoleKind { primary, receiver, interface_role, support };

inline std::string_view to_string(RoleKind k) {
  switch (k) {
    case RoleKind::primary: return "primary";
    case RoleKind::receiver: return "receiver";
    case RoleKind::interface_role: return "interface";
    case RoleKind::support: return "support";
  }
  return "?";
}

struct RoleBinding {
  std::string role;
  RoleKind kind = RoleKind::primary;
  SourceLocation location;
};

enum class Direction { ingoing, outgoing };

struct Interaction {
  Direction direction = Direction::ingoing;
  std::string label;
  std::optional<std::string> message;  // ingoing only
  std::string counterpart;             // primary role (ingoing) or receiver (outgoing)
  SourceLocation location;
};

struct EventVariant {
  int number = 0;
  std::string name;
  std::string id;
  std::optional<msl::Formula> condition;
  std::vector<EventVariant> variants;
  std::vector<Interaction> interactions;
  std::optional<std::string> goal;
  SourceLocation location;
};

struct CommunicativeEvent {
  std::string acronym;
  int number = 0;
  std::string name;
  std::string id;
  std::vector<RoleBinding> roles;
  std::vector<Interaction> interactions;
  std::vector<EventVariant> variants;
  std::optional<std::string> goal;
  std::optional<std::string> precondition;
  std::string diagram;  // name of the diagram holding the full definition
  SourceLocation location;

  bool specialised() const { return !variants.empty(); }

  std::vector<std::string> roles_of(RoleKind kind) const {
    std::vector<std::string> out;
    for (const auto& r : roles)
      if (r.kind == kind && std::find(out.begin(), out.end(), r.role) == out.end()) out.push_back(r.role);
    return out;
  }

  /// The message of the first ingoing interaction that names one.
  std::optional<std::string> message_ref() const {
    for (const auto& i : interactions)
      if (i.direction == Direction::ingoing && i.message) return i.message;
    return std::nullopt;
  }
};

struct Process {
  std::string acronym;
  std::string name;
  SourceLocation location;
};

enum class NodeKind { event, variant, and_node, or_node, start, end, extern_ref };

inline std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::event: return "event";
    case NodeKind::variant: return "variant";
    case NodeKind::and_node: return "and";
    case NodeKind::or_node: return "or";
    case NodeKind::start: return "start";
    case NodeKind::end: return "end";
    case NodeKind::extern_ref: return "extern";
  }
  return "?";
}

enum class AndKind { unspecified, fork, join };

inline constexpr const char* kStartId = "start";
inline constexpr const char* kEndId = "end";

/// A member of one diagram. `id` is the event or variant identifier, the
/// logical node name, "start"/"end", or the referenced id of an extern.
struct DiagramNode {
  NodeKind kind = NodeKind::event;
  std::string id;
  AndKind and_kind = AndKind::unspecified;
  SourceLocation location;
};

struct Edge {
  std::string source;
  std::string target;
  bool loopback_asserted = false;
  SourceLocation location;
};

struct Diagram {
  std::string name;
  std::string file;
  std::vector<DiagramNode> nodes;
  std::vector<Edge> edges;
  SourceLocation location;

  const DiagramNode* find_node(const std::string& id) const {
    for (const auto& n : nodes)
      if (n.id == id) return &n;
    return nullptr;
  }
};

struct ModelRepository {
  std::map<std::string, Process> processes;
  std::vector<CommunicativeEvent> events;  // sorted by identifier
  std::vector<Diagram> diagrams;           // sorted by name
  std::map<std::string, msl::MessageStructure> message_structures;
  std::set<std::string> business_objects;

  const CommunicativeEvent* find_event(const std::string& id) const {
    for (const auto& e : events)
      if (e.id == id) return &e;
    return nullptr;
  }

  const msl::MessageStructure* find_structure(const std::string& name) const {
    auto it = message_structures.find(name);
    return it == message_structures.end() ? nullptr : &it->second;
  }
};

// ---------------------------------------------------------------------------
// Identifiers

inline std::string event_identifier(const std::string& acronym, int number) {
  return acronym + " " + std::to_string(number);
}

inline std::string variant_identifier(const std::string& parent_id, int number) {
  return parent_id + "." + std::to_string(number);
}

namespace detail_ids {
inline void assign_variant_ids(std::vector<EventVariant>& variants, const std::string& parent) {
  for (auto& v : variants) {
    v.id = variant_identifier(parent, v.number);
    assign_variant_ids(v.variants, v.id);
  }
}
}  // namespace detail_ids

/// Recomputes every event and variant identifier from acronyms and numbers.
inline ModelRepository assign_identifiers(ModelRepository repo) {
  for (auto& e : repo.events) {
    e.id = event_identifier(e.acronym, e.number);
    detail_ids::assign_variant_ids(e.variants, e.id);
  }
  return repo;
}

/// The full event owning an event or variant id ("SALE 3.1" -> "SALE 3").
inline std::string root_event_id(const std::string& id) {
  auto parts = detail::split_event_id(id);
  if (!parts) return id;
  return event_identifier(parts->acronym, parts->numbers.front());
}

/// Depth-first visit of every variant of an event, nested ones included.
template <typename Fn>
void for_each_variant(const std::vector<EventVariant>& variants, Fn&& fn, int level = 1) {
  for (const auto& v : variants) {
    fn(v, level);
    for_each_variant(v.variants, fn, level + 1);
  }
}

}  // namespace ca::ced
