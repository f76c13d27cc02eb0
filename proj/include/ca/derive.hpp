#pragma once

// Class-model views derived from message structures and their integration
// in temporal order.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "ca/ced/graph.hpp"
#include "ca/ced/model.hpp"
#include "ca/diagnostic.hpp"
#include "ca/msl.hpp"
#include "json.hpp"

namespace ca::derive {

enum class AttributeKind { stored, generated_id, derived };
enum class Cardinality { one, many };
enum class AssociationKind { composition, reference };

inline std::string_view to_string(AttributeKind k) {
  switch (k) {
    case AttributeKind::stored: return "stored";
    case AttributeKind::generated_id: return "generated_id";
    case AttributeKind::derived: return "derived";
  }
  return "?";
}
inline std::string_view to_string(Cardinality c) { return c == Cardinality::one ? "one" : "many"; }
inline std::string_view to_string(AssociationKind k) {
  return k == AssociationKind::composition ? "composition" : "reference";
}

struct Attribute {
  std::string name;
  msl::DomainRef domain;
  AttributeKind kind = AttributeKind::stored;
  std::optional<msl::Formula> formula;
  std::string origin_event;
  SourceLocation location;
};

struct Class {
  std::string name;
  std::vector<Attribute> attributes;
  std::set<std::string> origin_events;

  const Attribute* find(const std::string& attr) const {
    for (const auto& a : attributes)
      if (a.name == attr) return &a;
    return nullptr;
  }
};

struct Association {
  std::string from;
  std::string to;
  Cardinality card_from = Cardinality::one;
  Cardinality card_to = Cardinality::many;
  AssociationKind kind = AssociationKind::composition;
  std::string origin_event;
  std::string label;  // field name for references, substructure name for compositions

  auto key() const { return std::tie(from, to, kind); }
};

struct ClassModel {
  std::map<std::string, Class> classes;
  std::vector<Association> associations;
  std::vector<Diagnostic> diagnostics;

  const Class* find(const std::string& name) const {
    auto it = classes.find(name);
    return it == classes.end() ? nullptr : &it->second;
  }

  const Association* find_association(const std::string& from, const std::string& to, AssociationKind kind) const {
    for (const auto& a : associations)
      if (a.from == from && a.to == to && a.kind == kind) return &a;
    return nullptr;
  }
};

using Registry = std::set<std::string>;

inline bool is_basic_domain(std::string_view name) {
  static const std::set<std::string> basic{"number", "date",   "text", "money",   "integer",
                                           "real",   "boolean", "time", "datetime"};
  return basic.count(detail::to_lower(detail::trim(name))) > 0;
}

namespace detail_derive {

struct ViewBuilder {
  const std::string& event_id;
  const Registry& registry;
  ClassModel& view;

  Class& open_class(const std::string& name) {
    auto& c = view.classes[name];
    c.name = name;
    c.origin_events.insert(event_id);
    return c;
  }

  void compose(const std::string& container, const std::string& member, Cardinality card, const std::string& label) {
    view.associations.push_back(
        Association{container, member, Cardinality::one, card, AssociationKind::composition, event_id, label});
  }

  void field(const msl::Substructure& f, const std::string& owner) {
    const auto& p = f.props;
    Attribute attr{detail::class_name(f.name), p.domain, AttributeKind::stored, std::nullopt, event_id, f.location};
    if (p.domain.kind != msl::DomainRef::Kind::enumeration && !is_basic_domain(p.domain.name)) {
      std::string target = detail::class_name(p.domain.name);
      if (registry.count(target)) {
        view.associations.push_back(Association{owner, target, Cardinality::many, Cardinality::one,
                                                AssociationKind::reference, event_id, f.name});
        return;
      }
      view.diagnostics.push_back(make_diagnostic("CA-D01",
                                                 "domain '" + p.domain.name + "' of field '" + f.name + "' in " +
                                                     event_id + " is neither basic nor a known business object",
                                                 f.location, owner + "." + attr.name));
    }
    if (p.op == msl::AcquisitionOp::generation) {
      attr.kind = AttributeKind::generated_id;
    } else if (p.op == msl::AcquisitionOp::derivation) {
      attr.kind = AttributeKind::derived;
      attr.formula = p.derivation_formula ? p.derivation_formula : msl::Formula::from_text("");
    }
    auto& cls = view.classes[owner];
    if (!cls.find(attr.name)) cls.attributes.push_back(std::move(attr));
  }

  /// Class name for the aggregation body of an iteration: the iteration's
  /// own name when the body was introduced by desugaring.
  static std::string body_name(const msl::Substructure& iteration, const msl::Substructure& body) {
    return body.name == iteration.name + "_1" ? iteration.name : body.name;
  }

  void children(const msl::Substructure& node, const std::string& owner) {
    for (const auto& child : node.children) {
      switch (child.kind) {
        case msl::Kind::field: field(child, owner); break;
        case msl::Kind::aggregation: {
          std::string name = detail::class_name(child.name);
          open_class(name);
          compose(owner, name, Cardinality::one, child.name);
          children(child, name);
          break;
        }
        case msl::Kind::iteration: {
          for (const auto& body : child.children) {
            std::string name = detail::class_name(body_name(child, body));
            open_class(name);
            compose(owner, name, Cardinality::many, child.name);
            children(body, name);
          }
          break;
        }
        case msl::Kind::specialisation: variants(child, owner); break;
      }
    }
  }

  void variants(const msl::Substructure& spec, const std::string& owner) {
    for (const auto& v : spec.children) {
      std::string name = detail::class_name(v.name);
      open_class(name);
      compose(owner, name, Cardinality::one, spec.name);
      children(v, name);
    }
  }

  void root(const msl::Substructure& r) {
    if (r.kind == msl::Kind::iteration) {
      for (const auto& body : r.children) {
        std::string name = detail::class_name(body_name(r, body));
        open_class(name);
        children(body, name);
      }
      return;
    }
    std::string name = detail::class_name(r.name);
    open_class(name);
    if (r.kind == msl::Kind::specialisation) variants(r, name);
    else children(r, name);
  }
};

}  // namespace detail_derive

/// View of one message structure as received by `event_id`.
inline ClassModel derive_view(const msl::MessageStructure& structure, const std::string& event_id,
                              const Registry& registry) {
  ClassModel view;
  auto ms = msl::desugar(structure);
  detail_derive::ViewBuilder{event_id, registry, view}.root(ms.root);
  return view;
}

/// View of an event's ingoing message; empty when the event has none or the
/// structure is not defined.
inline ClassModel derive_view(const ced::CommunicativeEvent& event, const ced::ModelRepository& repo,
                              const Registry& registry) {
  auto msg = event.message_ref();
  const auto* ms = msg ? repo.find_structure(*msg) : nullptr;
  if (!ms) return {};
  return derive_view(*ms, event.id, registry);
}

/// Folds `view` into `model`: classes merge by name, attributes by name with
/// the first domain kept, associations dedupe on (from, to, kind).
inline void integrate_into(ClassModel& model, const ClassModel& view) {
  for (const auto& [name, cls] : view.classes) {
    auto& target = model.classes[name];
    target.name = name;
    target.origin_events.insert(cls.origin_events.begin(), cls.origin_events.end());
    for (const auto& attr : cls.attributes) {
      const Attribute* existing = target.find(attr.name);
      if (!existing) {
        target.attributes.push_back(attr);
      } else if (!(existing->domain == attr.domain)) {
        model.diagnostics.push_back(make_diagnostic(
            "CA-D02",
            "attribute " + name + "." + attr.name + " has domain '" + attr.domain.text() + "' in " + attr.origin_event +
                " but '" + existing->domain.text() + "' in " + existing->origin_event + "; keeping the first",
            attr.location, name + "." + attr.name));
      }
    }
  }
  for (const auto& a : view.associations) {
    bool dup = std::any_of(model.associations.begin(), model.associations.end(),
                           [&](const Association& b) { return b.key() == a.key(); });
    if (!dup) model.associations.push_back(a);
  }
  model.diagnostics.insert(model.diagnostics.end(), view.diagnostics.begin(), view.diagnostics.end());
}

inline void check_identifiers(ClassModel& model) {
  for (const auto& [name, cls] : model.classes) {
    std::vector<const Attribute*> ids;
    for (const auto& a : cls.attributes)
      if (a.kind == AttributeKind::generated_id) ids.push_back(&a);
    if (ids.size() > 1) {
      std::vector<std::string> names;
      for (const auto* a : ids) names.push_back(a->name);
      model.diagnostics.push_back(make_diagnostic("CA-D03",
                                                  "class " + name + " has " + std::to_string(ids.size()) +
                                                      " generated identifiers (" + detail::join(names, ", ") + ")",
                                                  ids[1]->location, name));
    }
  }
}

inline ClassModel integrate(const std::vector<ClassModel>& views) {
  ClassModel model;
  for (const auto& v : views) integrate_into(model, v);
  check_identifiers(model);
  return model;
}

/// Adds attribute-less classes for association endpoints not defined yet.
inline void add_stub_classes(ClassModel& model) {
  for (const auto& a : model.associations)
    for (const auto* end : {&a.from, &a.to})
      if (!model.classes.count(*end)) model.classes[*end].name = *end;
}

inline ClassModel derive_class_model(const ced::ModelRepository& repo) {
  auto analyzed = ced::analyze(repo);
  auto order = ced::topological_event_ids(analyzed.graph);

  Registry registry;
  for (const auto& bo : repo.business_objects) registry.insert(detail::class_name(bo));
  for (const auto& id : order) {
    const auto* e = repo.find_event(id);
    if (!e || !ced::direct_precedents(analyzed.graph, id).empty()) continue;
    for (const auto& [name, cls] : derive_view(*e, repo, registry).classes) registry.insert(name);
  }

  ClassModel model;
  for (const auto& id : order) {
    const auto* e = repo.find_event(id);
    if (!e) continue;
    Registry known = registry;
    for (const auto& [name, cls] : model.classes) known.insert(name);
    integrate_into(model, derive_view(*e, repo, known));
  }
  check_identifiers(model);
  add_stub_classes(model);
  std::stable_sort(model.associations.begin(), model.associations.end(),
                   [](const Association& a, const Association& b) { return a.key() < b.key(); });
  return model;
}

// ---------------------------------------------------------------------------
// Export

inline std::string card_text(Cardinality c) { return c == Cardinality::one ? "1" : "*"; }

inline nlohmann::ordered_json to_json(const ClassModel& model) {
  nlohmann::ordered_json j;
  j["classes"] = nlohmann::ordered_json::array();
  for (const auto& [name, cls] : model.classes) {
    nlohmann::ordered_json c;
    c["name"] = name;
    c["origin_events"] = std::vector<std::string>(cls.origin_events.begin(), cls.origin_events.end());
    c["attributes"] = nlohmann::ordered_json::array();
    for (const auto& a : cls.attributes) {
      nlohmann::ordered_json aj;
      aj["name"] = a.name;
      aj["domain"] = a.domain.text();
      aj["kind"] = std::string(to_string(a.kind));
      aj["formula"] = a.formula ? nlohmann::ordered_json(a.formula->text) : nlohmann::ordered_json(nullptr);
      c["attributes"].push_back(std::move(aj));
    }
    j["classes"].push_back(std::move(c));
  }
  j["associations"] = nlohmann::ordered_json::array();
  for (const auto& a : model.associations) {
    nlohmann::ordered_json aj;
    aj["from"] = a.from;
    aj["to"] = a.to;
    aj["kind"] = std::string(to_string(a.kind));
    aj["card_from"] = std::string(to_string(a.card_from));
    aj["card_to"] = std::string(to_string(a.card_to));
    aj["label"] = a.label;
    aj["origin_event"] = a.origin_event;
    j["associations"].push_back(std::move(aj));
  }
  return j;
}

namespace detail_derive {
inline std::string record_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '{' || c == '}' || c == '|' || c == '<' || c == '>' || c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}
}  // namespace detail_derive

inline std::string to_dot(const ClassModel& model) {
  using detail_derive::record_escape;
  std::string out = "digraph class_model {\n  rankdir=BT;\n  node [shape=record, fontname=\"Helvetica\"];\n"
                    "  edge [fontname=\"Helvetica\", fontsize=10];\n";
  for (const auto& [name, cls] : model.classes) {
    std::string attrs;
    for (const auto& a : cls.attributes) {
      attrs += record_escape(a.name + " : " + a.domain.text());
      if (a.kind == AttributeKind::generated_id) attrs += " \\{id\\}";
      if (a.kind == AttributeKind::derived) attrs += record_escape(" = " + (a.formula ? a.formula->text : ""));
      attrs += "\\l";
    }
    out += "  " + detail::quote(name) + " [label=\"{" + record_escape(name) + "|" + attrs + "}\"];\n";
  }
  for (const auto& a : model.associations) {
    out += "  " + detail::quote(a.from) + " -> " + detail::quote(a.to) + " [";
    if (a.kind == AssociationKind::composition)
      out += "dir=both, arrowtail=diamond, arrowhead=none, ";
    else
      out += "arrowhead=vee, ";
    out += "taillabel=\"" + card_text(a.card_from) + "\", headlabel=\"" + card_text(a.card_to) + "\", label=" +
           detail::quote(a.label) + "];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace ca::derive
