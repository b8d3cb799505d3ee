#pragma once

// JSON-lines persistence of pipeline intermediates: document metadata,
// segments and clusters. Each file opens with `#ARTIFACT <kind> v1`.

#include <cmath>
#include <filesystem>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctxev/clusterer.hpp"
#include "ctxev/indexer.hpp"
#include "ctxev/segmenter.hpp"
#include "ctxev/unl.hpp"

namespace ctxev {

/// Document header data plus the digest of the file it came from.
struct DocumentInfo {
  UnlDocument document;  // sentences are not persisted
  std::string file;
  std::string sha256;
};

namespace detail {

using ojson = nlohmann::ordered_json;

inline std::vector<std::string> concept_strings(const std::vector<Concept>& cs) {
  std::vector<std::string> out;
  for (const auto& c : cs) out.push_back(serialize_concept(c));
  return out;
}

inline std::vector<Concept> concepts_from(const nlohmann::json& j) {
  std::vector<Concept> out;
  for (const auto& s : j) out.push_back(parse_concept(s.get<std::string>()));
  return out;
}

inline std::string_view to_string(DateSource s) {
  switch (s) {
    case DateSource::directive: return "directive";
    case DateSource::doc_id: return "doc_id";
    case DateSource::none: return "none";
  }
  return "none";
}

inline DateSource date_source_from(std::string_view s) {
  if (s == "directive") return DateSource::directive;
  if (s == "doc_id") return DateSource::doc_id;
  if (s == "none") return DateSource::none;
  throw FormatVersionMismatch("unknown date source '" + std::string(s) + "'");
}

inline std::string artifact_header(std::string_view kind) { return "#ARTIFACT " + std::string(kind) + " v1"; }

template <class T, class ToJson>
std::string write_lines(std::string_view kind, std::span<const T> items, ToJson to_json) {
  std::string out = artifact_header(kind) + "\n";
  for (const auto& item : items) out += to_json(item).dump() + "\n";
  return out;
}

template <class FromJson>
auto read_lines(std::string_view kind, std::string_view text, FromJson from_json) {
  using T = decltype(from_json(nlohmann::json{}));
  const std::size_t nl = text.find('\n');
  if (text.substr(0, nl) != artifact_header(kind))
    throw FormatVersionMismatch("expected header '" + artifact_header(kind) + "'");
  std::vector<T> out;
  std::istringstream in{std::string(nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1))};
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw FormatVersionMismatch(std::string(kind) + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const MalformedConcept& e) {
      throw FormatVersionMismatch(std::string(kind) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace detail

inline std::string serialize_documents(std::span<const DocumentInfo> docs) {
  return detail::write_lines("documents", docs, [](const DocumentInfo& d) {
    detail::ojson j;
    j["doc_id"] = d.document.doc_id;
    j["file"] = d.file;
    j["sha256"] = d.sha256;
    j["title"] = detail::concept_strings(d.document.title_concepts);
    j["date"] = d.document.date ? nlohmann::ordered_json(d.document.date->to_string()) : nlohmann::ordered_json();
    j["date_source"] = detail::to_string(d.document.date_source);
    return j;
  });
}

inline std::vector<DocumentInfo> parse_documents(std::string_view text) {
  return detail::read_lines("documents", text, [](const nlohmann::json& j) {
    DocumentInfo d;
    d.document.doc_id = j.at("doc_id").get<std::string>();
    d.file = j.at("file").get<std::string>();
    d.sha256 = j.at("sha256").get<std::string>();
    d.document.title_concepts = detail::concepts_from(j.at("title"));
    if (!j.at("date").is_null()) {
      d.document.date = parse_date(j.at("date").get<std::string>());
      if (!d.document.date) throw FormatVersionMismatch("invalid date for " + d.document.doc_id);
    }
    d.document.date_source = detail::date_source_from(j.at("date_source").get<std::string>());
    return d;
  });
}

inline std::string serialize_segments(std::span<const Segment> segments) {
  return detail::write_lines("segments", segments, [](const Segment& s) {
    detail::ojson j;
    j["doc_id"] = s.doc_id;
    j["index"] = s.index;
    j["sentence_ids"] = s.sentence_ids;
    j["head"] = s.head ? nlohmann::ordered_json(serialize_concept(*s.head)) : nlohmann::ordered_json();
    j["concepts"] = detail::concept_strings(s.concepts);
    std::vector<std::string> relations;
    for (const auto& r : s.relations) relations.push_back(serialize_relation(r));
    j["relations"] = relations;
    j["persons"] = detail::concept_strings(s.persons);
    j["places"] = detail::concept_strings(s.places);
    j["times"] = detail::concept_strings(s.times);
    j["has_duration"] = s.has_duration;
    return j;
  });
}

inline std::vector<Segment> parse_segments(std::string_view text) {
  return detail::read_lines("segments", text, [](const nlohmann::json& j) {
    Segment s;
    s.doc_id = j.at("doc_id").get<std::string>();
    s.index = j.at("index").get<std::size_t>();
    s.sentence_ids = j.at("sentence_ids").get<std::vector<std::string>>();
    if (!j.at("head").is_null()) s.head = parse_concept(j.at("head").get<std::string>());
    s.concepts = detail::concepts_from(j.at("concepts"));
    for (const auto& r : j.at("relations")) s.relations.push_back(parse_relation(r.get<std::string>()));
    s.persons = detail::concepts_from(j.at("persons"));
    s.places = detail::concepts_from(j.at("places"));
    s.times = detail::concepts_from(j.at("times"));
    s.has_duration = j.at("has_duration").get<bool>();
    return s;
  });
}

inline std::string serialize_clusters(std::span<const EventCluster> clusters) {
  return detail::write_lines("clusters", clusters, [](const EventCluster& c) {
    detail::ojson j;
    j["cluster_id"] = c.cluster_id;
    j["head"] = serialize_concept(c.head);
    j["members"] = detail::ojson::array();
    for (const auto& m : c.members) j["members"].push_back({{"doc_id", m.doc_id}, {"index", m.index}});
    j["matches"] = detail::ojson::array();
    for (const auto& m : c.matches) {
      detail::ojson mj;
      mj["doc_a"] = m.a.doc_id;
      mj["segment_a"] = m.a.index;
      mj["doc_b"] = m.b.doc_id;
      mj["segment_b"] = m.b.index;
      mj["score"] = m.score.to_string();
      j["matches"].push_back(mj);
    }
    j["cohesion"] = c.cohesion;
    return j;
  });
}

inline std::vector<EventCluster> parse_clusters(std::string_view text) {
  return detail::read_lines("clusters", text, [](const nlohmann::json& j) {
    EventCluster c;
    c.cluster_id = j.at("cluster_id").get<int>();
    c.head = parse_concept(j.at("head").get<std::string>());
    for (const auto& m : j.at("members")) c.members.push_back({m.at("doc_id").get<std::string>(), m.at("index").get<std::size_t>()});
    for (const auto& m : j.at("matches")) {
      const std::string score = m.at("score").get<std::string>();
      const int tenths = static_cast<int>(std::lround(std::stod(score) * 10));
      c.matches.push_back({c.head,
                           {m.at("doc_a").get<std::string>(), m.at("segment_a").get<std::size_t>()},
                           {m.at("doc_b").get<std::string>(), m.at("segment_b").get<std::size_t>()},
                           Score::from_tenths(tenths)});
    }
    c.cohesion = j.at("cohesion").get<double>();
    return c;
  });
}

}  // namespace ctxev
