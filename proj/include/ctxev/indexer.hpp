#pragma once

// Person, Place and Event indices. One row per (key, main event, document).
//
// On disk each index is `<kind>.idx`: a header line `#INDEX <kind> v1` followed
// by one JSON object per line with keys in column order.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <type_traits>
#include <span>
#include <iterator>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctxev/event_model.hpp"
#include "ctxev/unl.hpp"

namespace ctxev {

class IoFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatVersionMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QueryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class KeyNotFound : public QueryError {
 public:
  explicit KeyNotFound(const std::string& key) : QueryError("no entries for '" + key + "'") {}
};

class EmptyIndex : public QueryError {
 public:
  EmptyIndex() : QueryError("index is empty") {}
};

using StringList = std::vector<std::string>;

struct PersonIndexEntry {
  std::string person;
  std::string event_name;
  StringList sub_events;
  std::string document_id;
  StringList places;
  std::string time;
  StringList sentences;

  static constexpr std::string_view kKind = "person";
  const std::string& key() const { return person; }
  auto tie() const { return std::tie(person, event_name, sub_events, document_id, places, time, sentences); }
  auto tie() { return std::tie(person, event_name, sub_events, document_id, places, time, sentences); }
  bool operator==(const PersonIndexEntry&) const = default;
};

struct PlaceIndexEntry {
  std::string place;
  std::string event_name;
  StringList sub_events;
  std::string document_id;
  StringList persons;
  std::string time;
  StringList sentences;

  static constexpr std::string_view kKind = "place";
  const std::string& key() const { return place; }
  auto tie() const { return std::tie(place, event_name, sub_events, document_id, persons, time, sentences); }
  auto tie() { return std::tie(place, event_name, sub_events, document_id, persons, time, sentences); }
  bool operator==(const PlaceIndexEntry&) const = default;
};

struct EventIndexEntry {
  std::string event_name;
  StringList sub_events;
  std::string document_id;
  StringList persons;
  StringList places;
  std::string time;
  StringList sentences;

  static constexpr std::string_view kKind = "event";
  const std::string& key() const { return event_name; }
  auto tie() const { return std::tie(event_name, sub_events, document_id, persons, places, time, sentences); }
  auto tie() { return std::tie(event_name, sub_events, document_id, persons, places, time, sentences); }
  bool operator==(const EventIndexEntry&) const = default;
};

/// Column names, JSON keys and TSV headers, in row order.
template <class Entry>
struct IndexColumns;

template <>
struct IndexColumns<PersonIndexEntry> {
  static constexpr std::string_view json[] = {"person", "event_name", "sub_events", "document_id",
                                              "places", "time",       "sentences"};
  static constexpr std::string_view tsv[] = {"Person", "Event_Name", "Sub_Event", "Document_ID",
                                             "Places", "Time",       "Sentence"};
};

template <>
struct IndexColumns<PlaceIndexEntry> {
  static constexpr std::string_view json[] = {"place",   "event_name", "sub_events", "document_id",
                                              "persons", "time",       "sentences"};
  static constexpr std::string_view tsv[] = {"Place",  "Event_Name", "Sub_Event", "Document_ID",
                                             "Person", "Time",       "Sentence"};
};

template <>
struct IndexColumns<EventIndexEntry> {
  static constexpr std::string_view json[] = {"event_name", "sub_events", "document_id", "persons",
                                              "places",     "time",       "sentences"};
  static constexpr std::string_view tsv[] = {"Event_Name", "Sub_Event", "Document_ID", "Persons",
                                             "Places",     "Time",      "Sentence"};
};

template <class Entry>
struct Index {
  std::vector<Entry> entries;

  bool operator==(const Index&) const = default;
};

using PersonIndex = Index<PersonIndexEntry>;
using PlaceIndex = Index<PlaceIndexEntry>;
using EventIndex = Index<EventIndexEntry>;

struct IndexSet {
  PersonIndex person;
  PlaceIndex place;
  EventIndex event;

  bool operator==(const IndexSet&) const = default;
};

namespace detail {

inline std::string fold(std::string_view s) { return fold_case(s); }

inline StringList fold_all(const StringList& xs) {
  StringList out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(fold_case(x));
  return out;
}

template <class Entry>
void sort_entries(std::vector<Entry>& v) {
  std::sort(v.begin(), v.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.key(), a.document_id, a.event_name) < std::tie(b.key(), b.document_id, b.event_name);
  });
}

}  // namespace detail

/// Builds the three indices. A document occurrence spanning several segments
/// with differing resolved dates keeps the first; each dropped date is reported
/// through `warnings` when given.
inline IndexSet build_indices(std::span<const EventRecord> records, std::vector<std::string>* warnings = nullptr) {
  IndexSet out;
  for (const auto& rec : records) {
    const std::string event = detail::fold(rec.main_event.headword);
    for (const auto& occ : rec.occurrences) {
      std::string time;
      if (!occ.times.empty() && occ.times.front().date) time = occ.times.front().date->to_string();
      for (std::size_t i = 1; i < occ.times.size(); ++i) {
        const std::string other = occ.times[i].date ? occ.times[i].date->to_string() : "";
        if (other != time && warnings != nullptr)
          warnings->push_back("event '" + event + "' in " + occ.doc_id + ": dropped time '" + other + "', kept '" +
                              time + "'");
      }
      const std::string doc = detail::fold(occ.doc_id);
      const StringList subs = detail::fold_all(occ.sub_events);
      const StringList persons = detail::fold_all(occ.persons);
      const StringList places = detail::fold_all(occ.places);
      const StringList sentences = detail::fold_all(occ.sentence_ids);

      out.event.entries.push_back({event, subs, doc, persons, places, time, sentences});
      for (const auto& p : persons) out.person.entries.push_back({p, event, subs, doc, places, time, sentences});
      for (const auto& p : places) out.place.entries.push_back({p, event, subs, doc, persons, time, sentences});
    }
  }
  detail::sort_entries(out.person.entries);
  detail::sort_entries(out.place.entries);
  detail::sort_entries(out.event.entries);
  return out;
}

/// All entries whose key column equals `key` after case folding, in stored order.
template <class Entry>
std::vector<Entry> query(const Index<Entry>& index, std::string_view key) {
  if (index.entries.empty()) throw EmptyIndex();
  const std::string folded = fold_case(key);
  std::vector<Entry> out;
  std::copy_if(index.entries.begin(), index.entries.end(), std::back_inserter(out),
               [&](const Entry& e) { return e.key() == folded; });
  if (out.empty()) throw KeyNotFound(folded);
  return out;
}

// --- persistence -----------------------------------------------------------

template <class Entry>
nlohmann::ordered_json entry_to_json(const Entry& e) {
  nlohmann::ordered_json j;
  std::size_t i = 0;
  std::apply([&](const auto&... field) { ((j[std::string(IndexColumns<Entry>::json[i++])] = field), ...); }, e.tie());
  return j;
}

template <class Entry>
Entry entry_from_json(const nlohmann::json& j) {
  Entry e;
  std::size_t i = 0;
  std::apply(
      [&](auto&... field) {
        ((field = j.at(std::string(IndexColumns<Entry>::json[i++])).template get<std::remove_cvref_t<decltype(field)>>()),
         ...);
      },
      e.tie());
  return e;
}

inline constexpr std::string_view kIndexVersion = "v1";

template <class Entry>
std::string index_file_name() {
  return std::string(Entry::kKind) + ".idx";
}

template <class Entry>
std::string serialize_index(const Index<Entry>& index) {
  std::string out = "#INDEX " + std::string(Entry::kKind) + " " + std::string(kIndexVersion) + "\n";
  for (const auto& e : index.entries) out += entry_to_json(e).dump() + "\n";
  return out;
}

template <class Entry>
Index<Entry> parse_index(std::string_view text) {
  const std::string header = "#INDEX " + std::string(Entry::kKind) + " " + std::string(kIndexVersion);
  const std::size_t nl = text.find('\n');
  if (text.substr(0, nl) != header)
    throw FormatVersionMismatch("expected header '" + header + "' in " + index_file_name<Entry>());
  Index<Entry> out;
  std::istringstream in{std::string(nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1))};
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.entries.push_back(entry_from_json<Entry>(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw FormatVersionMismatch(index_file_name<Entry>() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoFailure("failed writing " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class Entry>
Index<Entry> load_one(const std::filesystem::path& dir) {
  const auto path = dir / index_file_name<Entry>();
  if (!std::filesystem::exists(path)) throw FormatVersionMismatch("missing " + path.string());
  return parse_index<Entry>(read_file(path));
}

}  // namespace detail

inline void save_indices(const IndexSet& indices, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoFailure("cannot create " + dir.string() + ": " + ec.message());
  detail::write_file(dir / index_file_name<PersonIndexEntry>(), serialize_index(indices.person));
  detail::write_file(dir / index_file_name<PlaceIndexEntry>(), serialize_index(indices.place));
  detail::write_file(dir / index_file_name<EventIndexEntry>(), serialize_index(indices.event));
}

inline IndexSet load_indices(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoFailure(dir.string() + " is not a directory");
  return {detail::load_one<PersonIndexEntry>(dir), detail::load_one<PlaceIndexEntry>(dir),
          detail::load_one<EventIndexEntry>(dir)};
}

// --- TSV ---------------------------------------------------------------------

namespace detail {

/// Name lists print as "[a, b]"; sentence lists as "[s1,s2]".
inline std::string tsv_list(const StringList& xs, std::string_view sep) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += sep;
    out += xs[i];
  }
  return out + "]";
}

inline std::string tsv_cell(const std::string& s) { return s; }
inline std::string tsv_cell(const StringList& xs) { return tsv_list(xs, ", "); }

}  // namespace detail

template <class Entry>
std::string tsv_header() {
  std::string out;
  for (auto name : IndexColumns<Entry>::tsv) {
    if (!out.empty()) out += '\t';
    out += name;
  }
  return out;
}

template <class Entry>
std::string tsv_row(const Entry& e) {
  std::vector<std::string> cells;
  std::apply([&](const auto&... field) { (cells.push_back(detail::tsv_cell(field)), ...); }, e.tie());
  cells.back() = detail::tsv_list(e.sentences, ",");
  std::string out;
  for (const auto& c : cells) out += (out.empty() ? "" : "\t") + c;
  return out;
}

template <class Entry>
std::string to_tsv(std::span<const Entry> entries) {
  std::string out = tsv_header<Entry>() + "\n";
  for (const auto& e : entries) out += tsv_row(e) + "\n";
  return out;
}

}  // namespace ctxev
