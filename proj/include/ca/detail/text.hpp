#pragma once

#include <cctype>
#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ca::detail {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

/// Trims and collapses every whitespace run to a single space.
inline std::string collapse_spaces(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : trim(s)) {
    if (is_space(c)) {
      pending = true;
      continue;
    }
    if (pending && !out.empty()) out += ' ';
    pending = false;
    out += c;
  }
  return out;
}

inline char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? char(c - 'A' + 'a') : c; }
inline char ascii_upper(char c) { return (c >= 'a' && c <= 'z') ? char(c - 'a' + 'A') : c; }

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = ascii_lower(c);
  return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (ascii_lower(a[i]) != ascii_lower(b[i])) return false;
  return true;
}

inline std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : s) {
    if (is_space(c)) {
      if (!cur.empty()) words.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.emplace_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return parts;
}

/// "Client address" -> "ClientAddress", "ORDER" -> "Order".
inline std::string class_name(std::string_view s) {
  std::string out;
  for (const auto& w : split_words(s)) {
    bool first = true;
    for (char c : w) {
      if (c == '_' || c == '-') {
        first = true;
        continue;
      }
      out += first ? ascii_upper(c) : ascii_lower(c);
      first = false;
    }
  }
  return out;
}

/// Double-quoted literal with backslash escapes for '"', '\\' and newlines.
inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  out += '"';
  return out;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

inline std::optional<int> parse_int(std::string_view s) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

/// Splits an event or variant identifier ("SALE 3.1") into acronym and the
/// number path. Returns nullopt when the text is not an identifier.
struct EventIdParts {
  std::string acronym;
  std::vector<int> numbers;
};

inline bool is_acronym(std::string_view s) {
  if (s.empty() || !(s[0] >= 'A' && s[0] <= 'Z')) return false;
  for (char c : s)
    if (!((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'))) return false;
  return true;
}

inline std::optional<EventIdParts> split_event_id(std::string_view id) {
  auto sp = id.find(' ');
  if (sp == std::string_view::npos) return std::nullopt;
  EventIdParts parts;
  parts.acronym = std::string(id.substr(0, sp));
  if (!is_acronym(parts.acronym)) return std::nullopt;
  for (const auto& piece : split(id.substr(sp + 1), '.')) {
    auto n = parse_int(piece);
    if (!n || *n <= 0) return std::nullopt;
    parts.numbers.push_back(*n);
  }
  if (parts.numbers.empty()) return std::nullopt;
  return parts;
}

/// Orders event identifiers by acronym, then numerically by number path;
/// non-identifiers sort after identifiers, lexicographically.
inline bool event_id_less(std::string_view a, std::string_view b) {
  auto pa = split_event_id(a);
  auto pb = split_event_id(b);
  if (pa && pb) {
    if (pa->acronym != pb->acronym) return pa->acronym < pb->acronym;
    if (pa->numbers != pb->numbers) return pa->numbers < pb->numbers;
    return a < b;
  }
  if (bool(pa) != bool(pb)) return bool(pa);
  return a < b;
}

struct EventIdLess {
  bool operator()(std::string_view a, std::string_view b) const { return event_id_less(a, b); }
};

}  // namespace ca::detail
