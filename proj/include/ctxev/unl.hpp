#pragma once

// UNL-style corpus notation: concepts, relations, sentences, documents.
//
// Concept token grammar:
//   concept    := headword [ "(" constraint { "," constraint } ")" ] { ".@" attribute }
//   constraint := key ">" value
//
// Document files are line oriented:
//   #DOC <doc_id>
//   #TITLE <concept> <concept> ...      (optional)
//   #DATE <dd>_<mm>_<yyyy>              (optional)
//   #SENT <sentence_id>                 (repeated, followed by relation lines)
//   label(concept, concept)
//   #END
// Lines starting with ';' are comments.

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <optional>
#include <regex>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ctxev {

class MalformedConcept : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedDocument : public std::runtime_error {
 public:
  MalformedDocument(std::string_view source, std::size_t line, const std::string& what)
      : std::runtime_error(std::string(source) + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline bool has_forbidden_char(std::string_view s) {
  return std::any_of(s.begin(), s.end(),
                     [](char c) { return c == '(' || c == ')' || c == ',' || is_space(c); });
}

}  // namespace detail

/// ASCII case folding; bytes outside ASCII pass through untouched.
inline std::string fold_case(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

struct Constraint {
  std::string key;
  std::string value;

  auto operator<=>(const Constraint&) const = default;
};

struct Concept {
  std::string headword;
  std::vector<Constraint> constraints;
  std::vector<std::string> attributes;

  bool operator==(const Concept&) const = default;

  /// Only the first constraint takes part in matching; later ones are carried along.
  const Constraint* primary_constraint() const {
    return constraints.empty() ? nullptr : &constraints.front();
  }

  /// True when the first constraint is icl>`category`.
  bool is_a(std::string_view category) const {
    const Constraint* c = primary_constraint();
    return c != nullptr && c->key == "icl" && c->value == category;
  }

  bool has_attribute(std::string_view name) const {
    return std::find(attributes.begin(), attributes.end(), name) != attributes.end();
  }
};

/// Identity used for head matching: headword plus first constraint, e.g. "go|icl>action".
inline std::string concept_key(const Concept& c) {
  if (const Constraint* p = c.primary_constraint()) return c.headword + "|" + p->key + ">" + p->value;
  return c.headword;
}

/// Headword plus first constraint only, attributes dropped.
inline Concept head_form(const Concept& c) {
  Concept out{c.headword, {}, {}};
  if (const Constraint* p = c.primary_constraint()) out.constraints.push_back(*p);
  return out;
}

inline Concept parse_concept(std::string_view token) {
  using detail::has_forbidden_char;
  const std::string_view text = detail::trim(token);
  const std::size_t paren = text.find('(');
  const std::size_t attr = text.find(".@");
  const std::size_t head_end = std::min({paren, attr, text.size()});

  const std::string_view head = text.substr(0, head_end);
  if (head.empty()) throw MalformedConcept("empty headword in '" + std::string(token) + "'");
  if (head.find(')') != std::string_view::npos)
    throw MalformedConcept("unbalanced parentheses in '" + std::string(token) + "'");
  if (has_forbidden_char(head)) throw MalformedConcept("invalid headword in '" + std::string(token) + "'");

  Concept out;
  out.headword = fold_case(head);

  std::size_t pos = head_end;
  if (pos < text.size() && text[pos] == '(') {
    const std::size_t close = text.find(')', pos + 1);
    const std::size_t nested = text.find('(', pos + 1);
    if (close == std::string_view::npos || (nested != std::string_view::npos && nested < close))
      throw MalformedConcept("unbalanced parentheses in '" + std::string(token) + "'");

    std::string_view body = text.substr(pos + 1, close - pos - 1);
    while (true) {
      const std::size_t comma = body.find(',');
      const std::string_view item = detail::trim(body.substr(0, comma));
      const std::size_t gt = item.find('>');
      if (gt == std::string_view::npos)
        throw MalformedConcept("constraint without '>' in '" + std::string(token) + "'");
      const std::string_view key = detail::trim(item.substr(0, gt));
      const std::string_view value = detail::trim(item.substr(gt + 1));
      if (key.empty()) throw MalformedConcept("empty constraint key in '" + std::string(token) + "'");
      if (has_forbidden_char(key) || has_forbidden_char(value))
        throw MalformedConcept("invalid constraint in '" + std::string(token) + "'");
      out.constraints.push_back({std::string(key), std::string(value)});
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
    }
    pos = close + 1;
  }

  while (pos < text.size()) {
    if (text.substr(pos, 2) != ".@") {
      if (text.find(')', pos) != std::string_view::npos || text.find('(', pos) != std::string_view::npos)
        throw MalformedConcept("unbalanced parentheses in '" + std::string(token) + "'");
      throw MalformedConcept("unexpected text after constraints in '" + std::string(token) + "'");
    }
    pos += 2;
    const std::size_t next = text.find(".@", pos);
    const std::string_view name = text.substr(pos, next == std::string_view::npos ? text.npos : next - pos);
    if (name.empty()) throw MalformedConcept("empty attribute in '" + std::string(token) + "'");
    if (has_forbidden_char(name)) {
      if (name.find_first_of("()") != std::string_view::npos)
        throw MalformedConcept("unbalanced parentheses in '" + std::string(token) + "'");
      throw MalformedConcept("invalid attribute in '" + std::string(token) + "'");
    }
    out.attributes.emplace_back(name);
    pos += name.size();
  }
  return out;
}

inline std::string serialize_concept(const Concept& c) {
  std::string out = c.headword;
  if (!c.constraints.empty()) {
    out += '(';
    for (std::size_t i = 0; i < c.constraints.size(); ++i) {
      if (i > 0) out += ',';
      out += c.constraints[i].key;
      out += '>';
      out += c.constraints[i].value;
    }
    out += ')';
  }
  for (const auto& a : c.attributes) {
    out += ".@";
    out += a;
  }
  return out;
}

struct Relation {
  std::string label;
  Concept source;
  Concept target;

  bool operator==(const Relation&) const = default;
};

inline bool is_relation_label(std::string_view label) {
  return label.size() >= 2 && label.size() <= 4 &&
         std::all_of(label.begin(), label.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

/// Parses `label(concept, concept)`. Throws MalformedConcept on any syntax error.
inline Relation parse_relation(std::string_view line) {
  const std::string_view text = detail::trim(line);
  const std::size_t open = text.find('(');
  if (open == std::string_view::npos || text.empty() || text.back() != ')')
    throw MalformedConcept("relation must have the form label(concept, concept): '" + std::string(line) + "'");
  const std::string_view label = detail::trim(text.substr(0, open));
  if (!is_relation_label(label))
    throw MalformedConcept("relation label must be 2-4 lowercase letters: '" + std::string(label) + "'");

  const std::string_view body = text.substr(open + 1, text.size() - open - 2);
  int depth = 0;
  std::size_t split = std::string_view::npos;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == '(') ++depth;
    else if (body[i] == ')') --depth;
    else if (body[i] == ',' && depth == 0) {
      split = i;
      break;
    }
    if (depth < 0) break;
  }
  if (split == std::string_view::npos)
    throw MalformedConcept("relation needs two comma-separated concepts: '" + std::string(line) + "'");
  return Relation{std::string(label), parse_concept(body.substr(0, split)), parse_concept(body.substr(split + 1))};
}

inline std::string serialize_relation(const Relation& r) {
  return r.label + "(" + serialize_concept(r.source) + ", " + serialize_concept(r.target) + ")";
}

struct Sentence {
  std::string sentence_id;
  std::vector<Relation> relations;

  bool operator==(const Sentence&) const = default;
};

struct Date {
  int day = 1;
  int month = 1;
  int year = 1;

  auto operator<=>(const Date& o) const {
    if (auto c = year <=> o.year; c != 0) return c;
    if (auto c = month <=> o.month; c != 0) return c;
    return day <=> o.day;
  }
  bool operator==(const Date&) const = default;

  static bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

  static int days_in_month(int m, int y) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
  }

  static std::optional<Date> make(int d, int m, int y) {
    if (y < 1 || m < 1 || m > 12 || d < 1 || d > days_in_month(m, y)) return std::nullopt;
    return Date{d, m, y};
  }

  /// DD_MM_YYYY, the form used in corpus file names and index rows.
  std::string to_string() const {
    auto pad = [](int v, std::size_t width) {
      std::string s = std::to_string(v);
      return std::string(width > s.size() ? width - s.size() : 0, '0') + s;
    };
    return pad(day, 2) + "_" + pad(month, 2) + "_" + pad(year, 4);
  }
};

/// Parses exactly "DD_MM_YYYY"; anything else (or an impossible date) is nullopt.
inline std::optional<Date> parse_date(std::string_view s) {
  if (s.size() != 10 || s[2] != '_' || s[5] != '_') return std::nullopt;
  for (std::size_t i : {0, 1, 3, 4, 6, 7, 8, 9}) {
    if (!detail::is_digit(s[i])) return std::nullopt;
  }
  auto num = [&](std::size_t from, std::size_t len) {
    int v = 0;
    for (std::size_t i = from; i < from + len; ++i) v = v * 10 + (s[i] - '0');
    return v;
  };
  return Date::make(num(0, 2), num(3, 2), num(6, 4));
}

/// The last DD_MM_YYYY group embedded in a document id, day first. A last group
/// that is not a real calendar date yields nullopt.
inline std::optional<Date> extract_date(std::string_view doc_id) {
  static const std::regex kGroup(R"((?:^|[^0-9])([0-9]{2}_[0-9]{2}_[0-9]{4})(?![0-9]))");
  const std::string text(doc_id);
  std::optional<std::string> last;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kGroup); it != std::sregex_iterator(); ++it) {
    last = (*it)[1].str();
  }
  if (!last) return std::nullopt;
  return parse_date(*last);
}

enum class DateSource { none, directive, doc_id };

struct UnlDocument {
  std::string doc_id;
  std::vector<Concept> title_concepts;
  std::optional<Date> date;
  DateSource date_source = DateSource::none;
  std::vector<Sentence> sentences;

  bool operator==(const UnlDocument&) const = default;
};

namespace detail {

/// Splits on whitespace outside parentheses.
inline std::vector<std::string_view> split_concept_tokens(std::string_view s) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = std::string_view::npos;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    const bool end = i == s.size();
    const char c = end ? ' ' : s[i];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (is_space(c) && depth <= 0) {
      if (start != std::string_view::npos) out.push_back(s.substr(start, i - start));
      start = std::string_view::npos;
    } else if (start == std::string_view::npos) {
      start = i;
    }
  }
  return out;
}

inline std::pair<std::string_view, std::string_view> split_directive(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && !is_space(line[i])) ++i;
  return {line.substr(0, i), trim(line.substr(i))};
}

}  // namespace detail

/// Parses one corpus file. `source` names the input in error messages.
inline UnlDocument parse_document(std::string_view text, std::string_view source = "<input>") {
  UnlDocument doc;
  bool seen_doc = false;
  bool seen_title = false;
  bool seen_date = false;
  bool ended = false;
  std::set<std::string> sentence_ids;
  Sentence* current = nullptr;

  std::size_t line_no = 0;
  std::size_t last_content = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == ';') continue;
    last_content = line_no;
    auto fail = [&](const std::string& msg) -> MalformedDocument { return {source, line_no, msg}; };

    if (ended) throw fail("content after #END");

    if (line.front() == '#') {
      const auto [directive, arg] = detail::split_directive(line);
      if (!seen_doc && directive != "#DOC") throw fail("expected #DOC as the first directive");
      if (directive == "#DOC") {
        if (seen_doc) throw fail("duplicate #DOC");
        if (arg.empty() || detail::has_forbidden_char(arg)) throw fail("#DOC needs a single document id");
        doc.doc_id = std::string(arg);
        seen_doc = true;
      } else if (directive == "#TITLE") {
        if (seen_title) throw fail("duplicate #TITLE");
        if (current != nullptr) throw fail("#TITLE after the first #SENT");
        seen_title = true;
        try {
          for (auto token : detail::split_concept_tokens(arg)) doc.title_concepts.push_back(parse_concept(token));
        } catch (const MalformedConcept& e) {
          throw fail(e.what());
        }
      } else if (directive == "#DATE") {
        if (seen_date) throw fail("duplicate #DATE");
        if (current != nullptr) throw fail("#DATE after the first #SENT");
        seen_date = true;
        doc.date = parse_date(arg);
        if (!doc.date) throw fail("#DATE must be a valid DD_MM_YYYY date");
        doc.date_source = DateSource::directive;
      } else if (directive == "#SENT") {
        if (arg.empty() || detail::has_forbidden_char(arg)) throw fail("#SENT needs a single sentence id");
        if (!sentence_ids.insert(std::string(arg)).second) throw fail("duplicate sentence id '" + std::string(arg) + "'");
        doc.sentences.push_back(Sentence{std::string(arg), {}});
        current = &doc.sentences.back();
      } else if (directive == "#END") {
        ended = true;
      } else {
        throw fail("unknown directive '" + std::string(directive) + "'");
      }
      continue;
    }

    if (!seen_doc) throw fail("expected #DOC as the first directive");
    if (current == nullptr) throw fail("relation outside a #SENT block");
    try {
      current->relations.push_back(parse_relation(line));
    } catch (const MalformedConcept& e) {
      throw fail(e.what());
    }
  }

  if (!seen_doc) throw MalformedDocument(source, std::max<std::size_t>(last_content, 1), "empty document");
  if (!ended) throw MalformedDocument(source, last_content, "missing #END");

  if (!seen_date) {
    doc.date = extract_date(doc.doc_id);
    doc.date_source = doc.date ? DateSource::doc_id : DateSource::none;
  }
  return doc;
}

/// Canonical text form; parse_document(serialize_document(d)) == d.
inline std::string serialize_document(const UnlDocument& doc) {
  std::string out = "#DOC " + doc.doc_id + "\n";
  if (!doc.title_concepts.empty()) {
    out += "#TITLE";
    for (const auto& c : doc.title_concepts) out += " " + serialize_concept(c);
    out += "\n";
  }
  if (doc.date_source == DateSource::directive && doc.date) out += "#DATE " + doc.date->to_string() + "\n";
  for (const auto& s : doc.sentences) {
    out += "#SENT " + s.sentence_id + "\n";
    for (const auto& r : s.relations) out += serialize_relation(r) + "\n";
  }
  out += "#END\n";
  return out;
}

}  // namespace ctxev
