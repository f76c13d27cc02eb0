#pragma once

// Reader for .ced files: processes, events, logical nodes, externs and
// precedence edges, grouped into diagrams.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ca/ced/model.hpp"
#include "ca/detail/text.hpp"
#include "ca/diagnostic.hpp"

namespace ca::ced {

struct SourceText {
  std::string path;
  std::string text;
};

namespace detail_ced {

enum class Tok { word, string, punct, arrow, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  SourceLocation loc;
};

inline bool is_punct(char c) { return c == '{' || c == '}' || c == ';' || c == '=' || c == '[' || c == ']'; }

inline std::vector<Token> tokenize(std::string_view src, const std::string& file) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&] {
    if (src[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  };
  auto arrow_at = [&](std::size_t k) { return k + 1 < src.size() && src[k] == '-' && src[k + 1] == '>'; };
  while (i < src.size()) {
    char c = src[i];
    if (ca::detail::is_space(c)) {
      advance();
      continue;
    }
    SourceLocation loc{file, line, col};
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance();
      continue;
    }
    if (arrow_at(i)) {
      advance();
      advance();
      out.push_back({Tok::arrow, "->", loc});
      continue;
    }
    if (c == '"') {
      advance();
      std::string text;
      bool closed = false;
      while (i < src.size()) {
        if (src[i] == '"') {
          advance();
          closed = true;
          break;
        }
        if (src[i] == '\n') break;
        if (src[i] == '\\' && i + 1 < src.size()) {
          advance();
          text += src[i] == 'n' ? '\n' : src[i];
          advance();
          continue;
        }
        text += src[i];
        advance();
      }
      if (!closed) throw SyntaxError("unterminated string literal", loc);
      out.push_back({Tok::string, std::move(text), loc});
      continue;
    }
    if (is_punct(c)) {
      out.push_back({Tok::punct, std::string(1, c), loc});
      advance();
      continue;
    }
    std::string word;
    while (i < src.size() && !ca::detail::is_space(src[i]) && !is_punct(src[i]) && src[i] != '"' && src[i] != '#' &&
           !arrow_at(i)) {
      word += src[i];
      advance();
    }
    out.push_back({Tok::word, std::move(word), loc});
  }
  out.push_back({Tok::end, "", SourceLocation{file, line, col}});
  return out;
}

inline bool is_number_path(std::string_view s) {
  if (s.empty() || s.front() == '.' || s.back() == '.') return false;
  for (char c : s)
    if (!((c >= '0' && c <= '9') || c == '.')) return false;
  return s.find("..") == std::string_view::npos;
}

inline std::string strip_extension(const std::string& path) {
  auto slash = path.find_last_of('/');
  auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
  return path.substr(0, dot);
}

/// Parse state shared by every file of one repository.
struct Registry {
  ModelRepository repo;
  std::map<std::string, std::string> event_owner;  // event id -> diagram name
  std::map<std::string, std::string> node_owner;   // logical node id -> diagram name
  std::map<std::string, std::size_t> diagram_index;
};

class FileParser {
 public:
  FileParser(Registry& reg, const SourceText& src) : reg_(reg), file_(src.path), tokens_(tokenize(src.text, src.path)) {}

  void parse() {
    std::optional<std::size_t> implicit;
    while (!at_end()) {
      if (is_word("diagram")) {
        parse_diagram();
        continue;
      }
      if (!implicit) implicit = open_diagram(strip_extension(file_), peek().loc, false);
      parse_member(*implicit, std::nullopt);
    }
    if (implicit) check_membership(*implicit);
  }

 private:
  Registry& reg_;
  std::string file_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;

  // -- token helpers --------------------------------------------------------
  const Token& peek(std::size_t ahead = 0) const { return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)]; }
  const Token& next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == Tok::end; }
  bool is_word(std::string_view w, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::word && peek(ahead).text == w;
  }
  bool is_punct(char c, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::punct && peek(ahead).text[0] == c;
  }
  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::end: return "end of input";
      case Tok::string: return "string \"" + t.text + "\"";
      case Tok::arrow: return "'->'";
      default: return "'" + t.text + "'";
    }
  }
  [[noreturn]] void fail(const std::string& msg, const Token& at) const { throw SyntaxError(msg, at.loc); }
  void expect_punct(char c, const std::string& what) {
    if (!is_punct(c)) fail(std::string("expected '") + c + "' " + what + ", found " + describe(peek()), peek());
    next();
  }
  std::string expect_string(const std::string& what) {
    if (peek().kind != Tok::string) fail("expected a quoted " + what + ", found " + describe(peek()), peek());
    return next().text;
  }
  void skip_semicolon() {
    if (is_punct(';')) next();
  }

  /// Words on the same line as `anchor`, up to ';', a punctuation token, or
  /// one of the stop words. A single quoted string is accepted as well.
  std::string read_phrase(const Token& anchor, const std::string& what,
                          std::initializer_list<std::string_view> stops = {}) {
    if (peek().kind == Tok::string && peek().loc.line == anchor.loc.line) return next().text;
    std::string out;
    while (peek().kind == Tok::word && peek().loc.line == anchor.loc.line) {
      if (std::find(stops.begin(), stops.end(), peek().text) != stops.end()) break;
      if (!out.empty()) out += ' ';
      out += next().text;
    }
    if (out.empty()) fail("expected " + what + " after '" + anchor.text + "'", peek());
    return out;
  }

  int read_number(const std::string& what) {
    const Token& t = peek();
    auto n = t.kind == Tok::word ? ca::detail::parse_int(t.text) : std::nullopt;
    if (!n || *n <= 0) fail("expected a positive " + what + ", found " + describe(t), t);
    next();
    return *n;
  }

  // -- diagrams ---------------------------------------------------------------
  std::size_t open_diagram(const std::string& name, const SourceLocation& loc, bool explicit_block) {
    if (auto it = reg_.diagram_index.find(name); it != reg_.diagram_index.end()) {
      throw DuplicateDefinition("diagram '" + name + "' is defined more than once (first in " +
                                    reg_.repo.diagrams[it->second].file + ")",
                                loc);
    }
    (void)explicit_block;
    Diagram d;
    d.name = name;
    d.file = file_;
    d.location = loc;
    reg_.repo.diagrams.push_back(std::move(d));
    reg_.diagram_index[name] = reg_.repo.diagrams.size() - 1;
    return reg_.repo.diagrams.size() - 1;
  }

  Diagram& diagram(std::size_t idx) { return reg_.repo.diagrams[idx]; }

  void parse_diagram() {
    const Token kw = next();
    std::string name = expect_string("diagram name");
    std::size_t idx = open_diagram(name, kw.loc, true);
    expect_punct('{', "to open diagram '" + name + "'");
    while (!is_punct('}')) {
      if (at_end()) fail("expected '}' to close diagram '" + name + "'", peek());
      if (is_word("diagram")) fail("diagrams cannot be nested", peek());
      parse_member(idx, std::nullopt);
    }
    next();
    check_membership(idx);
  }

  void add_member(std::size_t idx, DiagramNode node) {
    auto& d = diagram(idx);
    if (node.kind != NodeKind::event && node.kind != NodeKind::variant && d.find_node(node.id)) return;
    d.nodes.push_back(std::move(node));
  }

  void check_membership(std::size_t idx) {
    const auto& d = diagram(idx);
    for (const auto& e : d.edges) {
      for (const auto* end : {&e.source, &e.target}) {
        if (!d.find_node(*end)) {
          throw SyntaxError("edge endpoint '" + *end + "' is not a member of diagram '" + d.name +
                                "'; declare it or add an extern reference",
                            e.location);
        }
      }
    }
  }

  // -- members ----------------------------------------------------------------
  void parse_member(std::size_t idx, const std::optional<std::string>& process) {
    if (is_punct(';')) {
      next();
      return;
    }
    const Token& t = peek();
    if (t.kind == Tok::word || t.kind == Tok::string) {
      if (peek(1).kind == Tok::arrow) {
        parse_edge(idx, process);
        return;
      }
    }
    if (t.kind != Tok::word) fail("expected a declaration or an edge, found " + describe(t), t);
    const std::string& kw = t.text;
    if (kw == "process") {
      if (process) fail("process blocks cannot be nested", t);
      parse_process(idx);
    } else if (kw == "event" || kw == "variant-event") {
      if (!process) fail("'" + kw + "' must appear inside a process block", t);
      parse_event(idx, *process);
    } else if (kw == "node") {
      parse_node(idx);
    } else if (kw == "extern") {
      parse_extern(idx);
    } else if (kw == "start" || kw == "end") {
      const Token k = next();
      add_member(idx, DiagramNode{kw == "start" ? NodeKind::start : NodeKind::end, k.text, AndKind::unspecified, k.loc});
      skip_semicolon();
    } else if (kw == "business-object") {
      const Token k = next();
      reg_.repo.business_objects.insert(read_phrase(k, "a business object name"));
      skip_semicolon();
    } else if (kw == "support") {
      fail("support actors are recorded in event specification templates, not in diagrams", t);
    } else {
      fail("unexpected " + describe(t) + "; expected process, event, node, extern, start, end or an edge", t);
    }
  }

  void parse_process(std::size_t idx) {
    const Token kw = next();
    const Token acr = peek();
    if (acr.kind != Tok::word || !ca::detail::is_acronym(acr.text)) {
      fail("expected an uppercase alphanumeric process acronym, found " + describe(acr), acr);
    }
    next();
    std::string name = peek().kind == Tok::string ? next().text : std::string();
    auto& procs = reg_.repo.processes;
    if (auto it = procs.find(acr.text); it != procs.end()) {
      if (!name.empty() && !it->second.name.empty() && it->second.name != name) {
        throw DuplicateDefinition("process " + acr.text + " is already named \"" + it->second.name + "\"", acr.loc);
      }
      if (it->second.name.empty()) it->second.name = name;
    } else {
      procs.emplace(acr.text, Process{acr.text, name, acr.loc});
    }
    expect_punct('{', "to open process " + acr.text);
    while (!is_punct('}')) {
      if (at_end()) fail("expected '}' to close process " + acr.text + " opened at line " + std::to_string(kw.loc.line), peek());
      parse_member(idx, acr.text);
    }
    next();
  }

  void parse_node(std::size_t idx) {
    const Token kw = next();
    const Token kind_tok = peek();
    if (kind_tok.kind != Tok::word) fail("expected and, and-join, and-fork or or after 'node'", kind_tok);
    NodeKind kind = NodeKind::and_node;
    AndKind and_kind = AndKind::unspecified;
    if (kind_tok.text == "and") {
    } else if (kind_tok.text == "and-join") {
      and_kind = AndKind::join;
    } else if (kind_tok.text == "and-fork") {
      and_kind = AndKind::fork;
    } else if (kind_tok.text == "or") {
      kind = NodeKind::or_node;
    } else {
      fail("unknown logical node kind '" + kind_tok.text + "'", kind_tok);
    }
    next();
    const Token id = peek();
    if (id.kind != Tok::word || id.text == "start" || id.text == "end" || is_number_path(id.text)) {
      fail("expected a logical node identifier, found " + describe(id), id);
    }
    next();
    if (auto it = reg_.node_owner.find(id.text); it != reg_.node_owner.end()) {
      throw DuplicateDefinition("logical node '" + id.text + "' is already declared in diagram '" + it->second + "'",
                                id.loc);
    }
    reg_.node_owner[id.text] = diagram(idx).name;
    add_member(idx, DiagramNode{kind, id.text, and_kind, kw.loc});
    skip_semicolon();
  }

  void parse_extern(std::size_t idx) {
    const Token kw = next();
    const Token id = peek();
    std::string ref = expect_string("event identifier");
    ref = ca::detail::collapse_spaces(ref);
    if (!ca::detail::split_event_id(ref)) {
      fail("extern references must name an event identifier such as \"SALE 7\", found \"" + ref + "\"", id);
    }
    add_member(idx, DiagramNode{NodeKind::extern_ref, ref, AndKind::unspecified, kw.loc});
    skip_semicolon();
  }

  std::string endpoint(std::size_t idx, const std::optional<std::string>& process) {
    const Token t = next();
    if (t.kind == Tok::string) return ca::detail::collapse_spaces(t.text);
    if (t.kind != Tok::word) fail("expected an edge endpoint, found " + describe(t), t);
    if (is_number_path(t.text)) {
      if (!process) fail("bare event number '" + t.text + "' used outside a process block; quote the full identifier", t);
      return *process + " " + t.text;
    }
    if (t.text == kStartId || t.text == kEndId) {
      add_member(idx, DiagramNode{t.text == kStartId ? NodeKind::start : NodeKind::end, t.text, AndKind::unspecified, t.loc});
    }
    return t.text;
  }

  void parse_edge(std::size_t idx, const std::optional<std::string>& process) {
    std::vector<std::pair<std::string, SourceLocation>> chain;
    SourceLocation first = peek().loc;
    chain.emplace_back(endpoint(idx, process), first);
    while (peek().kind == Tok::arrow) {
      SourceLocation at = next().loc;
      chain.emplace_back(endpoint(idx, process), at);
    }
    bool loopback = false;
    if (is_punct('[')) {
      next();
      if (!is_word("loopback")) fail("expected 'loopback' inside edge annotation", peek());
      next();
      expect_punct(']', "to close the edge annotation");
      loopback = true;
    }
    skip_semicolon();
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
      diagram(idx).edges.push_back(Edge{chain[i].first, chain[i + 1].first, loopback, i == 0 ? first : chain[i + 1].second});
    }
  }

  // -- events -----------------------------------------------------------------
  void parse_event(std::size_t idx, const std::string& acronym) {
    const Token kw = next();
    bool specialised = kw.text == "variant-event";
    CommunicativeEvent ev;
    ev.acronym = acronym;
    ev.number = read_number("event number");
    ev.name = expect_string("event name");
    ev.id = event_identifier(acronym, ev.number);
    ev.diagram = diagram(idx).name;
    ev.location = kw.loc;
    expect_punct('{', "to open event " + ev.id);
    while (!is_punct('}')) {
      if (at_end()) fail("expected '}' to close event " + ev.id, peek());
      if (is_punct(';')) {
        next();
        continue;
      }
      const Token t = peek();
      if (t.kind != Tok::word) fail("unexpected " + describe(t) + " in event " + ev.id, t);
      if (t.text == "primary" || t.text == "receiver" || t.text == "interface") {
        next();
        RoleKind kind = t.text == "primary" ? RoleKind::primary : t.text == "receiver" ? RoleKind::receiver : RoleKind::interface_role;
        ev.roles.push_back(RoleBinding{read_phrase(t, "a role name"), kind, t.loc});
      } else if (t.text == "support") {
        fail("support actors are recorded in event specification templates, not in diagrams", t);
      } else if (t.text == "in") {
        ev.interactions.push_back(parse_ingoing());
      } else if (t.text == "out") {
        ev.interactions.push_back(parse_outgoing());
      } else if (t.text == "goal") {
        next();
        ev.goal = expect_string("goal");
      } else if (t.text == "precondition") {
        next();
        ev.precondition = expect_string("precondition");
      } else if (t.text == "variant") {
        if (!specialised) fail("variants are only allowed in a variant-event", t);
        ev.variants.push_back(parse_variant(ev.id));
      } else {
        fail("unknown event statement '" + t.text + "'", t);
      }
      skip_semicolon();
    }
    next();
    if (specialised && ev.variants.empty()) fail("variant-event " + ev.id + " declares no variants", kw);
    finish_event(ev);
    register_event(idx, std::move(ev));
  }

  Interaction parse_ingoing() {
    const Token kw = next();
    Interaction in;
    in.direction = Direction::ingoing;
    in.location = kw.loc;
    in.label = expect_string("interaction label");
    if (is_word("message")) {
      const Token m = next();
      expect_punct('=', "after 'message'");
      in.message = read_phrase(m, "a message structure name", {"from"});
    }
    if (is_word("from")) {
      const Token f = next();
      in.counterpart = read_phrase(f, "a primary role name");
    }
    return in;
  }

  Interaction parse_outgoing() {
    const Token kw = next();
    Interaction out;
    out.direction = Direction::outgoing;
    out.location = kw.loc;
    out.label = expect_string("interaction label");
    if (!is_word("to")) fail("expected 'to ROLE' after outgoing interaction label", peek());
    const Token t = next();
    out.counterpart = read_phrase(t, "a receiver role name");
    return out;
  }

  EventVariant parse_variant(const std::string& parent_id) {
    const Token kw = next();
    EventVariant v;
    v.number = read_number("variant number");
    v.name = expect_string("variant name");
    v.id = variant_identifier(parent_id, v.number);
    v.location = kw.loc;
    if (is_word("condition")) {
      next();
      expect_punct('=', "after 'condition'");
      v.condition = msl::Formula::from_text(expect_string("specialisation condition"));
    }
    expect_punct('{', "to open variant " + v.id);
    while (!is_punct('}')) {
      if (at_end()) fail("expected '}' to close variant " + v.id, peek());
      if (is_punct(';')) {
        next();
        continue;
      }
      const Token t = peek();
      if (is_word("out")) {
        v.interactions.push_back(parse_outgoing());
      } else if (is_word("goal")) {
        next();
        v.goal = expect_string("goal");
      } else if (is_word("variant")) {
        v.variants.push_back(parse_variant(v.id));
      } else {
        fail("unexpected " + describe(t) + " in variant " + v.id + "; expected out, goal or variant", t);
      }
      skip_semicolon();
    }
    next();
    return v;
  }

  static void bind_receivers(CommunicativeEvent& ev, const std::vector<Interaction>& interactions) {
    for (const auto& i : interactions) {
      if (i.direction != Direction::outgoing) continue;
      auto receivers = ev.roles_of(RoleKind::receiver);
      if (std::find(receivers.begin(), receivers.end(), i.counterpart) == receivers.end()) {
        ev.roles.push_back(RoleBinding{i.counterpart, RoleKind::receiver, i.location});
      }
    }
  }

  void finish_event(CommunicativeEvent& ev) {
    auto primaries = ev.roles_of(RoleKind::primary);
    for (auto& i : ev.interactions) {
      if (i.direction != Direction::ingoing) continue;
      if (i.counterpart.empty()) {
        if (!primaries.empty()) i.counterpart = primaries.front();
      } else if (std::find(primaries.begin(), primaries.end(), i.counterpart) == primaries.end()) {
        throw SyntaxError("ingoing interaction \"" + i.label + "\" comes from '" + i.counterpart +
                              "', which is not a primary role of " + ev.id,
                          i.location);
      }
    }
    bind_receivers(ev, ev.interactions);
    for_each_variant(ev.variants, [&](const EventVariant& v, int) { bind_receivers(ev, v.interactions); });
  }

  void register_event(std::size_t idx, CommunicativeEvent ev) {
    const std::string& dname = diagram(idx).name;
    if (auto it = reg_.event_owner.find(ev.id); it != reg_.event_owner.end() && it->second != dname) {
      throw DuplicateDefinition("event " + ev.id + " is fully defined in diagrams '" + it->second + "' and '" + dname + "'",
                                ev.location);
    }
    reg_.event_owner[ev.id] = dname;
    add_member(idx, DiagramNode{NodeKind::event, ev.id, AndKind::unspecified, ev.location});
    for_each_variant(ev.variants, [&](const EventVariant& v, int) {
      add_member(idx, DiagramNode{NodeKind::variant, v.id, AndKind::unspecified, v.location});
    });
    reg_.repo.events.push_back(std::move(ev));
  }
};

}  // namespace detail_ced

/// Builds a repository from .ced sources. Events are ordered by identifier
/// and diagrams by name, so the result does not depend on source order
/// except for which location a duplicate definition is reported at.
inline ModelRepository parse_model(const std::vector<SourceText>& sources) {
  detail_ced::Registry reg;
  for (const auto& src : sources) detail_ced::FileParser(reg, src).parse();
  auto& repo = reg.repo;
  std::stable_sort(repo.events.begin(), repo.events.end(),
                   [](const CommunicativeEvent& a, const CommunicativeEvent& b) { return detail::event_id_less(a.id, b.id); });
  std::stable_sort(repo.diagrams.begin(), repo.diagrams.end(),
                   [](const Diagram& a, const Diagram& b) { return a.name < b.name; });
  return std::move(repo);
}

inline ModelRepository parse_model(std::string_view text, const std::string& path = "model.ced") {
  return parse_model(std::vector<SourceText>{SourceText{path, std::string(text)}});
}

}  // namespace ca::ced
