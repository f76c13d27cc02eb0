#pragma once

// Message Structures: structured-text specification of the message conveyed
// in a communicative event. Aggregation '< a + b >', iteration '{ B }',
// specialisation '[ a | b ]' and fields 'Name : op : domain "example"'.

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ca/detail/text.hpp"
#include "ca/diagnostic.hpp"

namespace ca::msl {

enum class AcquisitionOp { input, generation, derivation };

inline char op_letter(AcquisitionOp op) {
  switch (op) {
    case AcquisitionOp::input: return 'i';
    case AcquisitionOp::generation: return 'g';
    case AcquisitionOp::derivation: return 'd';
  }
  return '?';
}

inline std::optional<AcquisitionOp> parse_op(std::string_view s) {
  if (s == "i") return AcquisitionOp::input;
  if (s == "g") return AcquisitionOp::generation;
  if (s == "d") return AcquisitionOp::derivation;
  return std::nullopt;
}

struct DomainRef {
  enum class Kind { basic, business_object, enumeration };
  Kind kind = Kind::basic;
  std::string name;
  std::vector<std::string> tokens;  // enumeration literals

  static DomainRef basic(std::string n) { return {Kind::basic, std::move(n), {}}; }
  static DomainRef enumeration(std::vector<std::string> t) { return {Kind::enumeration, {}, std::move(t)}; }

  std::string text() const {
    if (kind == Kind::enumeration) return "[" + detail::join(tokens, "|") + "]";
    return name;
  }

  friend bool operator==(const DomainRef&, const DomainRef&) = default;
};

/// All ':'-prefixed identifiers of a formula, in order of first appearance.
inline std::vector<std::string> extract_field_refs(std::string_view text) {
  auto head = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9'); };
  std::vector<std::string> refs;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != ':' || i + 1 >= text.size() || !head(text[i + 1])) continue;
    std::size_t j = i + 1;
    while (j < text.size() && tail(text[j])) ++j;
    std::string ref(text.substr(i + 1, j - i - 1));
    if (std::find(refs.begin(), refs.end(), ref) == refs.end()) refs.push_back(std::move(ref));
    i = j - 1;
  }
  return refs;
}

/// Opaque formula text; only field references are extracted.
struct Formula {
  std::string text;
  std::vector<std::string> field_refs;

  static Formula from_text(std::string t) {
    auto refs = extract_field_refs(t);
    return Formula{std::move(t), std::move(refs)};
  }

  friend bool operator==(const Formula&, const Formula&) = default;
};

/// True when a formula reference such as "Person_in_charge" names the field
/// "Person in charge".
inline bool ref_matches_field(std::string_view ref, std::string_view field_name) {
  std::string r(ref);
  std::replace(r.begin(), r.end(), '_', ' ');
  return detail::collapse_spaces(r) == detail::collapse_spaces(field_name);
}

struct FieldProperties {
  AcquisitionOp op = AcquisitionOp::input;
  DomainRef domain = DomainRef::basic("text");
  std::optional<std::string> example;
  std::optional<std::string> description;
  std::optional<std::string> label;
  std::optional<std::string> link_with_memory;
  std::optional<bool> mandatory;
  std::optional<Formula> init_formula;
  std::optional<bool> visible;
  std::optional<Formula> derivation_formula;

  friend bool operator==(const FieldProperties&, const FieldProperties&) = default;
};

enum class Kind { aggregation, iteration, specialisation, field };

inline std::string_view to_string(Kind k) {
  switch (k) {
    case Kind::aggregation: return "aggregation";
    case Kind::iteration: return "iteration";
    case Kind::specialisation: return "specialisation";
    case Kind::field: return "field";
  }
  return "?";
}

/// A node of a message structure. Complex substructures keep their members in
/// `children`: aggregation members, the iteration body, or the specialisation
/// variants (one child per variant). Fields use `props`.
struct Substructure {
  Kind kind = Kind::field;
  std::string name;  // empty for anonymous complex substructures
  std::vector<Substructure> children;
  FieldProperties props;
  SourceLocation location;

  bool is_complex() const { return kind != Kind::field; }

  /// Structural equality; source locations are ignored.
  friend bool operator==(const Substructure& a, const Substructure& b) {
    return a.kind == b.kind && a.name == b.name && a.props == b.props && a.children == b.children;
  }
};

struct MessageStructure {
  std::string name;
  Substructure root;
  SourceLocation location;

  friend bool operator==(const MessageStructure& a, const MessageStructure& b) {
    return a.name == b.name && a.root == b.root;
  }
};

// ---------------------------------------------------------------------------
// Lexer

namespace detail_lex {

enum class Tok { word, string, formula, punct, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  SourceLocation loc;
};

inline bool is_punct(char c) {
  switch (c) {
    case '<': case '>': case '{': case '}': case '[': case ']':
    case '|': case '+': case '=': case ':': case ';':
      return true;
    default:
      return false;
  }
}

inline bool is_word_char(char c) {
  return !ca::detail::is_space(c) && !is_punct(c) && c != '"' && c != '#' && c != '(' && c != ')';
}

inline std::vector<Token> tokenize(std::string_view src, const std::string& file) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
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
    if (c == '"') {
      advance();
      std::string text;
      bool closed = false;
      while (i < src.size()) {
        char d = src[i];
        if (d == '"') {
          advance();
          closed = true;
          break;
        }
        if (d == '\\' && i + 1 < src.size()) {
          char e = src[i + 1];
          text += e == 'n' ? '\n' : e;
          advance(2);
          continue;
        }
        text += d;
        advance();
      }
      if (!closed) throw SyntaxError("unterminated string literal", loc);
      out.push_back({Tok::string, std::move(text), loc});
      continue;
    }
    if (c == '(') {
      int depth = 0;
      std::size_t start = i;
      do {
        if (src[i] == '(') ++depth;
        if (src[i] == ')') --depth;
        advance();
      } while (i < src.size() && depth > 0);
      if (depth != 0) throw SyntaxError("unbalanced '(' in formula", loc);
      auto inner = src.substr(start + 1, i - start - 2);
      out.push_back({Tok::formula, std::string(ca::detail::trim(inner)), loc});
      continue;
    }
    if (c == ')') throw SyntaxError("unexpected ')'", loc);
    if (is_punct(c)) {
      out.push_back({Tok::punct, std::string(1, c), loc});
      advance();
      continue;
    }
    std::string word;
    while (i < src.size() && is_word_char(src[i])) {
      word += src[i];
      advance();
    }
    out.push_back({Tok::word, std::move(word), loc});
  }
  out.push_back({Tok::end, "", SourceLocation{file, line, col}});
  return out;
}

}  // namespace detail_lex

// ---------------------------------------------------------------------------
// Parser

struct ParseOptions {
  /// Reject structures whose initial substructure is a specialisation.
  /// Workspace loading turns this off so the lint reports CA-C08 instead.
  bool enforce_initial_substructure = true;
};

namespace detail_parse {

using detail_lex::Tok;
using detail_lex::Token;

inline char closer_for(char opener) {
  switch (opener) {
    case '<': return '>';
    case '{': return '}';
    case '[': return ']';
  }
  return '?';
}

inline Kind kind_for(char opener) {
  switch (opener) {
    case '<': return Kind::aggregation;
    case '{': return Kind::iteration;
    default: return Kind::specialisation;
  }
}

struct FieldMatch {
  Substructure* field;
  std::vector<std::string> path;
};

inline void collect_named_paths(Substructure& node, std::vector<std::string>& prefix, std::vector<FieldMatch>& out) {
  if (node.kind == Kind::field) {
    auto path = prefix;
    path.push_back(node.name);
    out.push_back({&node, std::move(path)});
    return;
  }
  if (!node.name.empty()) prefix.push_back(node.name);
  for (auto& child : node.children) collect_named_paths(child, prefix, out);
  if (!node.name.empty()) prefix.pop_back();
}

class Parser {
 public:
  Parser(std::string_view src, std::string file, ParseOptions opts)
      : tokens_(detail_lex::tokenize(src, file)), opts_(opts) {}

  std::vector<MessageStructure> parse_all() {
    std::vector<MessageStructure> out;
    while (!at_end()) {
      const Token& start = peek();
      if (start.kind != Tok::word) throw SyntaxError("expected a structure name, found " + describe(start), start.loc);
      std::string name = read_name();
      if (is_punct('{') && (name == "field" || name.rfind("field ", 0) == 0)) {
        if (out.empty()) throw SyntaxError("field properties block before any message structure", start.loc);
        if (name == "field") throw SyntaxError("field properties block needs a field name", start.loc);
        parse_field_block(out.back(), name.substr(6), start.loc);
        continue;
      }
      out.push_back(parse_structure_body(std::move(name), start.loc));
    }
    return out;
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  ParseOptions opts_;

  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == Tok::end; }
  bool is_punct(char c, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Tok::punct && t.text[0] == c;
  }
  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::end: return "end of input";
      case Tok::string: return "string literal";
      case Tok::formula: return "formula";
      case Tok::word: return "'" + t.text + "'";
      case Tok::punct: return "'" + t.text + "'";
    }
    return "token";
  }
  void expect(char c, const std::string& what) {
    if (!is_punct(c)) throw SyntaxError(std::string("expected '") + c + "' " + what + ", found " + describe(peek()), peek().loc);
    next();
  }

  std::string read_name() {
    std::string name;
    while (peek().kind == Tok::word) {
      if (!name.empty()) name += ' ';
      name += next().text;
    }
    return name;
  }

  MessageStructure parse_structure_body(std::string name, SourceLocation loc) {
    expect('=', "after message structure name '" + name + "'");
    const Token& open = peek();
    if (!(is_punct('<') || is_punct('{') || is_punct('['))) {
      throw SyntaxError("expected '<', '{' or '[' to start the initial substructure of '" + name + "', found " +
                            describe(open),
                        open.loc);
    }
    Substructure root = parse_complex(name, loc);
    if (opts_.enforce_initial_substructure && root.kind == Kind::specialisation) {
      throw StructureError("the initial substructure of '" + name + "' cannot be a specialisation", root.location);
    }
    return MessageStructure{std::move(name), std::move(root), std::move(loc)};
  }

  // Parses one bracketed substructure starting at the opener.
  Substructure parse_complex(std::string name, const SourceLocation& name_loc) {
    const Token open = next();
    char opener = open.text[0];
    char closer = closer_for(opener);
    Substructure node;
    node.kind = kind_for(opener);
    node.name = std::move(name);
    node.location = node.name.empty() ? open.loc : name_loc;
    const char* what = node.kind == Kind::aggregation ? "aggregation" : node.kind == Kind::iteration ? "iteration" : "specialisation";

    if (node.kind == Kind::specialisation) {
      while (true) {
        auto items = parse_list(what, open.loc);
        if (items.size() == 1) {
          node.children.push_back(std::move(items.front()));
        } else {
          Substructure group;
          group.kind = Kind::aggregation;
          group.location = items.front().location;
          group.children = std::move(items);
          node.children.push_back(std::move(group));
        }
        if (is_punct('|')) {
          next();
          continue;
        }
        break;
      }
    } else {
      node.children = parse_list(what, open.loc);
    }
    if (!is_punct(closer)) {
      throw SyntaxError(std::string("expected '") + closer + "' to close " + what + " opened at " +
                            std::to_string(open.loc.line) + ":" + std::to_string(open.loc.column) + ", found " +
                            describe(peek()),
                        peek().loc);
    }
    next();
    return node;
  }

  std::vector<Substructure> parse_list(const char* what, const SourceLocation& open_loc) {
    std::vector<Substructure> items;
    if (is_punct('>') || is_punct('}') || is_punct(']') || is_punct('|')) {
      throw SyntaxError(std::string("empty ") + what, open_loc);
    }
    items.push_back(parse_substructure());
    while (is_punct('+')) {
      next();
      items.push_back(parse_substructure());
    }
    return items;
  }

  Substructure parse_substructure() {
    const Token& t = peek();
    if (is_punct('<') || is_punct('{') || is_punct('[')) return parse_complex("", t.loc);
    if (t.kind != Tok::word) throw SyntaxError("expected a substructure, found " + describe(t), t.loc);
    SourceLocation loc = t.loc;
    std::string name = read_name();
    if (is_punct('=')) {
      next();
      if (!(is_punct('<') || is_punct('{') || is_punct('['))) {
        throw SyntaxError("expected '<', '{' or '[' after '" + name + " =', found " + describe(peek()), peek().loc);
      }
      return parse_complex(std::move(name), loc);
    }
    return parse_field(std::move(name), std::move(loc));
  }

  Substructure parse_field(std::string name, SourceLocation loc) {
    Substructure f;
    f.kind = Kind::field;
    f.name = std::move(name);
    f.location = std::move(loc);
    if (is_punct(':')) {
      next();
      const Token& op_tok = peek();
      auto op = op_tok.kind == Tok::word ? parse_op(op_tok.text) : std::nullopt;
      if (!op) throw SyntaxError("expected acquisition operation i, g or d for field '" + f.name + "'", op_tok.loc);
      next();
      f.props.op = *op;
      if (is_punct(':')) {
        next();
        f.props.domain = parse_domain(f.name);
      }
    }
    if (peek().kind == Tok::string) f.props.example = next().text;
    if (peek().kind == Tok::formula) {
      f.props.derivation_formula = Formula::from_text(next().text);
    }
    return f;
  }

  DomainRef parse_domain(const std::string& field) {
    if (is_punct('[')) {
      const Token open = next();
      std::vector<std::string> tokens;
      while (true) {
        std::string tok = read_name();
        if (tok.empty()) throw SyntaxError("expected an enumeration literal in domain of '" + field + "'", peek().loc);
        tokens.push_back(std::move(tok));
        if (is_punct('|')) {
          next();
          continue;
        }
        break;
      }
      if (!is_punct(']')) throw SyntaxError("expected ']' to close enumeration domain of '" + field + "'", peek().loc);
      next();
      if (tokens.size() < 2) {
        throw SyntaxError("degenerate enumeration domain of '" + field + "': needs at least two literals", open.loc);
      }
      return DomainRef::enumeration(std::move(tokens));
    }
    std::string name = read_name();
    if (name.empty()) throw SyntaxError("expected a domain for field '" + field + "'", peek().loc);
    return DomainRef::basic(std::move(name));
  }

  void parse_field_block(MessageStructure& ms, const std::string& ref, const SourceLocation& loc) {
    Substructure& field = resolve_field(ms, ref, loc);
    expect('{', "to open the field properties block");
    std::set<std::string> seen;
    while (!is_punct('}')) {
      if (is_punct(';')) {
        next();
        continue;
      }
      const Token key = peek();
      if (key.kind != Tok::word) throw SyntaxError("expected a property name, found " + describe(key), key.loc);
      next();
      if (!seen.insert(key.text).second) throw SyntaxError("property '" + key.text + "' given twice", key.loc);
      expect('=', "after property name");
      const Token value = next();
      if (value.kind != Tok::string && value.kind != Tok::word && value.kind != Tok::formula) {
        throw SyntaxError("expected a value for property '" + key.text + "'", value.loc);
      }
      apply_property(field.props, key, value);
    }
    next();
  }

  static bool parse_bool(const Token& value) {
    if (value.text == "true" || value.text == "yes") return true;
    if (value.text == "false" || value.text == "no") return false;
    throw SyntaxError("expected true or false, found '" + value.text + "'", value.loc);
  }

  static void apply_property(FieldProperties& p, const Token& key, const Token& value) {
    const std::string& k = key.text;
    if (k == "example") p.example = value.text;
    else if (k == "description") p.description = value.text;
    else if (k == "label") p.label = value.text;
    else if (k == "link") p.link_with_memory = value.text;
    else if (k == "mandatory") p.mandatory = parse_bool(value);
    else if (k == "visible") p.visible = parse_bool(value);
    else if (k == "init") p.init_formula = Formula::from_text(value.text);
    else if (k == "formula") p.derivation_formula = Formula::from_text(value.text);
    else throw SyntaxError("unknown field property '" + k + "'", key.loc);
  }

  static Substructure& resolve_field(MessageStructure& ms, const std::string& ref, const SourceLocation& loc) {
    std::vector<std::string> wanted;
    for (const auto& part : ca::detail::split(ref, '/')) wanted.push_back(ca::detail::collapse_spaces(part));
    std::vector<FieldMatch> fields;
    std::vector<std::string> prefix;
    collect_named_paths(ms.root, prefix, fields);
    std::vector<Substructure*> hits;
    for (auto& f : fields) {
      if (f.path.size() < wanted.size()) continue;
      if (std::equal(wanted.rbegin(), wanted.rend(), f.path.rbegin())) hits.push_back(f.field);
    }
    if (hits.empty()) throw SyntaxError("no field '" + ref + "' in message structure '" + ms.name + "'", loc);
    if (hits.size() > 1) throw SyntaxError("field reference '" + ref + "' is ambiguous; qualify it with a path", loc);
    return *hits.front();
  }
};

}  // namespace detail_parse

/// Parses every message structure of an .msl source.
inline std::vector<MessageStructure> parse_msl(std::string_view source, const std::string& file = {},
                                               ParseOptions opts = {}) {
  return detail_parse::Parser(source, file, opts).parse_all();
}

/// Parses a source holding exactly one message structure.
inline MessageStructure parse_message_structure(std::string_view source, const std::string& file = {},
                                                ParseOptions opts = {}) {
  auto all = parse_msl(source, file, opts);
  if (all.empty()) throw SyntaxError("no message structure in input", SourceLocation{file, 1, 1});
  if (all.size() > 1) throw SyntaxError("expected one message structure, found " + std::to_string(all.size()), all[1].location);
  return std::move(all.front());
}

// ---------------------------------------------------------------------------
// Desugaring

namespace detail_desugar {

inline Substructure wrap(std::vector<Substructure> items, std::string name) {
  Substructure agg;
  agg.kind = Kind::aggregation;
  agg.name = std::move(name);
  agg.location = items.empty() ? SourceLocation{} : items.front().location;
  agg.children = std::move(items);
  return agg;
}

inline void desugar_node(Substructure& node) {
  if (node.kind == Kind::field) return;
  auto synth = [&](std::size_t position) { return node.name + "_" + std::to_string(position); };

  if (node.kind == Kind::iteration) {
    bool explicit_body = node.children.size() == 1 && node.children.front().kind == Kind::aggregation;
    if (!explicit_body) {
      auto body = wrap(std::move(node.children), synth(1));
      node.children.clear();
      node.children.push_back(std::move(body));
    }
  } else if (node.kind == Kind::specialisation) {
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      auto& variant = node.children[i];
      if (variant.kind != Kind::aggregation) {
        std::vector<Substructure> items;
        items.push_back(std::move(variant));
        variant = wrap(std::move(items), synth(i + 1));
      }
    }
  }
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    auto& child = node.children[i];
    if (child.is_complex() && child.name.empty()) child.name = synth(i + 1);
    desugar_node(child);
  }
}

}  // namespace detail_desugar

/// Names anonymous complex substructures (parent name + "_" + 1-based
/// position) and makes implicit aggregations explicit: every iteration body
/// and every specialisation variant becomes a single aggregation.
inline MessageStructure desugar(MessageStructure ms) {
  if (ms.root.name.empty()) ms.root.name = ms.name;
  detail_desugar::desugar_node(ms.root);
  return ms;
}

// ---------------------------------------------------------------------------
// Field paths

struct FieldPath {
  std::string path;  // "ORDER/DESTINATIONS/DESTINATION/Address"
  std::vector<std::string> components;
  std::string name;
  FieldProperties props;
  SourceLocation location;
};

namespace detail_fields {

inline void walk(const Substructure& node, std::vector<std::string>& prefix, std::vector<FieldPath>& out) {
  if (node.kind == Kind::field) {
    auto comps = prefix;
    comps.push_back(node.name);
    out.push_back(FieldPath{ca::detail::join(comps, "/"), comps, node.name, node.props, node.location});
    return;
  }
  if (!node.name.empty()) prefix.push_back(node.name);
  for (const auto& child : node.children) walk(child, prefix, out);
  if (!node.name.empty()) prefix.pop_back();
}

}  // namespace detail_fields

/// Every field with the names of its enclosing substructures, in document order.
inline std::vector<FieldPath> collect_fields(const MessageStructure& ms) {
  std::vector<FieldPath> out;
  std::vector<std::string> prefix;
  detail_fields::walk(ms.root, prefix, out);
  return out;
}

/// Number of complex substructures, the root included.
inline std::size_t count_complex(const Substructure& node) {
  if (!node.is_complex()) return 0;
  std::size_t n = 1;
  for (const auto& c : node.children) n += count_complex(c);
  return n;
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail_serialize {

inline bool has_block_properties(const FieldProperties& p, bool formula_inline) {
  return p.description || p.label || p.link_with_memory || p.mandatory || p.init_formula || p.visible ||
         (p.derivation_formula && !formula_inline);
}

inline bool balanced_parens(std::string_view s) {
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')' && --depth < 0) return false;
  }
  return depth == 0;
}

inline bool formula_inline(const FieldProperties& p) {
  return p.derivation_formula && balanced_parens(p.derivation_formula->text);
}

inline std::string field_text(const Substructure& f) {
  std::string out = f.name + ":" + op_letter(f.props.op) + ":" + f.props.domain.text();
  if (f.props.example) out += " " + ca::detail::quote(*f.props.example);
  if (formula_inline(f.props)) out += " (" + f.props.derivation_formula->text + ")";
  return out;
}

inline char opener(Kind k) { return k == Kind::aggregation ? '<' : k == Kind::iteration ? '{' : '['; }
inline char closer(Kind k) { return k == Kind::aggregation ? '>' : k == Kind::iteration ? '}' : ']'; }

inline void emit(const Substructure& node, int indent, std::string& out) {
  if (node.kind == Kind::field) {
    out += field_text(node);
    return;
  }
  if (node.children.size() == 1 && node.children.front().kind == Kind::field) {
    out += opener(node.kind);
    out += ' ';
    out += field_text(node.children.front());
    out += ' ';
    out += closer(node.kind);
    return;
  }
  out += opener(node.kind);
  out += '\n';
  const std::string pad(std::size_t(indent + 2), ' ');
  const char* sep = node.kind == Kind::specialisation ? " |" : " +";
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    const auto& child = node.children[i];
    out += pad;
    if (child.is_complex() && !child.name.empty()) out += child.name + " = ";
    emit(child, indent + 2, out);
    if (i + 1 < node.children.size()) out += sep;
    out += '\n';
  }
  out += std::string(std::size_t(indent), ' ');
  out += closer(node.kind);
}

inline std::string bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace detail_serialize

/// Canonical text: two-space indentation per nesting level, one substructure
/// per line, extra field properties in trailing `field` blocks.
inline std::string serialize(const MessageStructure& ms) {
  using namespace detail_serialize;
  std::string out = ms.name + " = ";
  emit(ms.root, 0, out);
  out += '\n';

  auto fields = collect_fields(ms);
  std::map<std::string, int> name_count;
  for (const auto& f : fields) ++name_count[f.name];
  for (const auto& f : fields) {
    const auto& p = f.props;
    bool inline_formula = formula_inline(p);
    if (!has_block_properties(p, inline_formula)) continue;
    std::vector<std::string> kv;
    if (p.description) kv.push_back("description=" + ca::detail::quote(*p.description));
    if (p.label) kv.push_back("label=" + ca::detail::quote(*p.label));
    if (p.link_with_memory) kv.push_back("link=" + ca::detail::quote(*p.link_with_memory));
    if (p.mandatory) kv.push_back("mandatory=" + bool_text(*p.mandatory));
    if (p.init_formula) kv.push_back("init=" + ca::detail::quote(p.init_formula->text));
    if (p.visible) kv.push_back("visible=" + bool_text(*p.visible));
    if (p.derivation_formula && !inline_formula) kv.push_back("formula=" + ca::detail::quote(p.derivation_formula->text));
    const std::string& ref = name_count[f.name] > 1 ? f.path : f.name;
    out += "field " + ref + " { " + ca::detail::join(kv, " ") + " }\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation

enum class Stage { analysis, design_memory, design_interface };

inline std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::analysis: return "analysis";
    case Stage::design_memory: return "design-memory";
    case Stage::design_interface: return "design-interface";
  }
  return "?";
}

inline std::optional<Stage> parse_stage(std::string_view s) {
  if (s == "analysis") return Stage::analysis;
  if (s == "design-memory") return Stage::design_memory;
  if (s == "design-interface") return Stage::design_interface;
  return std::nullopt;
}

/// Recommendation levels of the stage applicability table.
enum class Advice { highly_recommended, recommended, not_recommended, discouraged };

enum class Property { name, op_input, op_generation, op_derivation, domain, example, description,
                      label, link_with_memory, compulsoriness, initialisation, visibility };

inline std::string_view to_string(Property p) {
  switch (p) {
    case Property::name: return "name";
    case Property::op_input: return "acquisition operation i";
    case Property::op_generation: return "acquisition operation g";
    case Property::op_derivation: return "acquisition operation d";
    case Property::domain: return "domain";
    case Property::example: return "example";
    case Property::description: return "description";
    case Property::label: return "label";
    case Property::link_with_memory: return "link with memory";
    case Property::compulsoriness: return "compulsoriness";
    case Property::initialisation: return "initialisation";
    case Property::visibility: return "visibility";
  }
  return "?";
}

inline Advice applicability(Stage stage, Property prop) {
  using A = Advice;
  constexpr A H = A::highly_recommended, R = A::recommended, N = A::not_recommended;
  // name, i, g, d, domain, example, description, label, link, compulsoriness, initialisation, visibility
  constexpr std::array<std::array<A, 12>, 3> table{{
      {H, H, H, N, H, H, H, N, N, N, N, N},
      {H, H, H, H, H, H, H, N, H, R, N, N},
      {H, H, H, H, H, H, H, H, H, H, H, R},
  }};
  return table[std::size_t(stage)][std::size_t(prop)];
}

namespace detail_validate {

inline Property op_property(AcquisitionOp op) {
  switch (op) {
    case AcquisitionOp::input: return Property::op_input;
    case AcquisitionOp::generation: return Property::op_generation;
    case AcquisitionOp::derivation: return Property::op_derivation;
  }
  return Property::op_input;
}

inline void check_siblings(const Substructure& node, std::vector<Diagnostic>& out) {
  if (!node.is_complex()) return;
  std::map<std::string, int> seen;
  for (const auto& child : node.children) {
    if (child.name.empty()) continue;
    if (seen[child.name]++ == 0) continue;
    const char* code = child.kind == Kind::field ? "CA-C09"
                       : child.kind == Kind::specialisation ? "CA-C11"
                                                            : "CA-C10";
    std::string what = child.kind == Kind::field ? "field" : std::string(to_string(child.kind));
    out.push_back(make_diagnostic(code,
                                  what + " '" + child.name + "' occurs more than once in '" +
                                      (node.name.empty() ? std::string("<anonymous>") : node.name) + "'",
                                  child.location, child.name));
  }
  for (const auto& child : node.children) check_siblings(child, out);
}

}  // namespace detail_validate

/// Structural constraints, stage applicability and formula references of one
/// message structure. Findings are returned, never thrown.
inline std::vector<Diagnostic> validate_structure(const MessageStructure& ms, Stage stage) {
  std::vector<Diagnostic> out;
  if (ms.root.kind == Kind::specialisation) {
    out.push_back(make_diagnostic("CA-C08", "the initial substructure of '" + ms.name + "' is a specialisation",
                                  ms.root.location, ms.name));
  }
  detail_validate::check_siblings(ms.root, out);

  auto fields = collect_fields(ms);
  for (const auto& f : fields) {
    const auto& p = f.props;
    std::vector<Property> used{Property::name, detail_validate::op_property(p.op), Property::domain};
    if (p.example) used.push_back(Property::example);
    if (p.description) used.push_back(Property::description);
    if (p.label) used.push_back(Property::label);
    if (p.link_with_memory) used.push_back(Property::link_with_memory);
    if (p.mandatory) used.push_back(Property::compulsoriness);
    if (p.init_formula) used.push_back(Property::initialisation);
    if (p.visible) used.push_back(Property::visibility);
    for (Property prop : used) {
      Advice a = applicability(stage, prop);
      if (a != Advice::not_recommended && a != Advice::discouraged) continue;
      auto d = make_diagnostic("CA-S01",
                               "field '" + f.name + "' uses " + std::string(to_string(prop)) + ", which is " +
                                   (a == Advice::discouraged ? "discouraged" : "not recommended") + " at the " +
                                   std::string(to_string(stage)) + " stage",
                               f.location, f.path);
      d.severity = a == Advice::discouraged ? Severity::error : Severity::warning;
      out.push_back(std::move(d));
    }
    for (const auto* formula : {p.init_formula ? &*p.init_formula : nullptr,
                                p.derivation_formula ? &*p.derivation_formula : nullptr}) {
      if (!formula) continue;
      for (const auto& ref : formula->field_refs) {
        bool found = std::any_of(fields.begin(), fields.end(),
                                 [&](const FieldPath& other) { return ref_matches_field(ref, other.name); });
        if (!found) {
          out.push_back(make_diagnostic("CA-S02",
                                        "formula of field '" + f.name + "' references unknown field ':" + ref + "'",
                                        f.location, f.path));
        }
      }
    }
  }
  return out;
}

/// Fields whose formulas play more than one role: an initialisation formula
/// on a derived field, or a derivation formula on a non-derived field.
inline std::vector<Diagnostic> check_formula_roles(const MessageStructure& ms) {
  std::vector<Diagnostic> out;
  for (const auto& f : collect_fields(ms)) {
    const auto& p = f.props;
    std::string problem;
    if (p.op == AcquisitionOp::derivation && p.init_formula) {
      problem = "derived field '" + f.name + "' also carries an initialisation formula";
    } else if (p.op != AcquisitionOp::derivation && p.derivation_formula) {
      problem = "field '" + f.name + "' has a derivation formula but acquisition operation '" +
                std::string(1, op_letter(p.op)) + "'";
    }
    if (!problem.empty()) out.push_back(make_diagnostic("CA-C07", problem, f.location, f.path));
  }
  return out;
}

}  // namespace ca::msl
