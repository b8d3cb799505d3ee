#pragma once

// Per-head event table, main/sub event identification and timeline resolution.
//
// Main events are icl>event heads; sub-events are icl>action concepts that occur
// inside a main event's cluster member segments.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ctxev/clusterer.hpp"
#include "ctxev/segmenter.hpp"
#include "ctxev/unl.hpp"

namespace ctxev {

/// Resolves SegmentRefs against a segment list.
class SegmentLookup {
 public:
  explicit SegmentLookup(std::span<const Segment> segments) {
    for (const auto& s : segments) by_ref_.emplace(s.ref(), &s);
  }

  const Segment& at(const SegmentRef& ref) const {
    auto it = by_ref_.find(ref);
    if (it == by_ref_.end())
      throw std::out_of_range("unknown segment " + ref.doc_id + "#" + std::to_string(ref.index));
    return *it->second;
  }

 private:
  std::map<SegmentRef, const Segment*> by_ref_;
};

inline std::string pos_tag(const Concept& head) {
  if (head.is_a("event")) return "noun-event";
  if (head.is_a("action")) return "verb-action";
  return "other";
}

struct EventEntry {
  Concept head;
  std::vector<Concept> concept_nodes;
  std::vector<Relation> relations;
  int frequency = 0;
  std::string pos;
  std::set<std::string> doc_ids;
  std::map<std::string, std::vector<std::string>> sentence_ids;
  std::map<std::string, int> doc_frequency;
};

struct EventTable {
  std::map<std::string, EventEntry> entries;  // keyed by concept_key(head)

  const EventEntry* find(std::string_view key) const {
    auto it = entries.find(std::string(key));
    return it == entries.end() ? nullptr : &it->second;
  }
  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
};

inline EventTable build_event_table(std::span<const EventCluster> clusters, std::span<const Segment> segments) {
  const SegmentLookup lookup(segments);
  EventTable table;
  std::map<std::string, std::set<std::string>> seen_concepts, seen_relations;
  for (const auto& cluster : clusters) {
    const std::string key = concept_key(cluster.head);
    EventEntry& e = table.entries[key];
    if (e.frequency == 0) {
      e.head = cluster.head;
      e.pos = pos_tag(cluster.head);
    }
    for (const auto& ref : cluster.members) {
      const Segment& seg = lookup.at(ref);
      ++e.frequency;
      ++e.doc_frequency[seg.doc_id];
      e.doc_ids.insert(seg.doc_id);
      auto& sids = e.sentence_ids[seg.doc_id];
      for (const auto& sid : seg.sentence_ids) {
        if (std::find(sids.begin(), sids.end(), sid) == sids.end()) sids.push_back(sid);
      }
      for (const auto& c : seg.concepts) {
        if (seen_concepts[key].insert(serialize_concept(c)).second) e.concept_nodes.push_back(c);
      }
      for (const auto& r : seg.relations) {
        if (seen_relations[key].insert(serialize_relation(r)).second) e.relations.push_back(r);
      }
    }
  }
  return table;
}

enum class TimeQualifier { explicit_date, before, after, published, unknown };

inline std::string_view to_string(TimeQualifier q) {
  switch (q) {
    case TimeQualifier::explicit_date: return "explicit";
    case TimeQualifier::before: return "before";
    case TimeQualifier::after: return "after";
    case TimeQualifier::published: return "published";
    case TimeQualifier::unknown: return "unknown";
  }
  return "unknown";
}

struct ResolvedTime {
  std::optional<Date> date;
  TimeQualifier qualifier = TimeQualifier::unknown;

  bool operator==(const ResolvedTime&) const = default;
};

/// Timeline rules, first match wins:
///   1. a time concept whose headword is a DD_MM_YYYY date   -> that date, explicit
///   2. head marked @past / @future and the document is dated -> document date, before / after
///   3. the document is dated                                 -> document date, published
///   4. otherwise                                             -> no date, unknown
inline ResolvedTime resolve_time(const UnlDocument& doc, const Segment& segment) {
  for (const auto& t : segment.times) {
    if (auto d = parse_date(t.headword)) return {d, TimeQualifier::explicit_date};
  }
  if (segment.head && doc.date) {
    const std::string key = concept_key(*segment.head);
    for (const auto& r : segment.relations) {
      for (const Concept* c : {&r.source, &r.target}) {
        if (concept_key(*c) != key) continue;
        if (c->has_attribute("past")) return {doc.date, TimeQualifier::before};
        if (c->has_attribute("future")) return {doc.date, TimeQualifier::after};
      }
    }
  }
  if (doc.date) return {doc.date, TimeQualifier::published};
  return {};
}

/// The slice of an event record that falls in one document.
struct DocumentOccurrence {
  std::string doc_id;
  std::vector<std::string> sub_events;
  std::vector<std::string> persons;
  std::vector<std::string> places;
  std::vector<ResolvedTime> times;  // one per member segment, in segment order
  std::vector<std::string> sentence_ids;
  std::vector<SegmentRef> segments;
};

struct EventRecord {
  Concept main_event;
  int frequency = 0;
  std::vector<std::string> sub_events;
  std::vector<std::string> persons;
  std::vector<std::string> places;
  std::vector<Date> times;
  std::vector<std::string> doc_ids;
  std::vector<DocumentOccurrence> occurrences;  // sorted by doc_id

  /// Number of distinct places the event occurred in.
  std::size_t place_count() const { return places.size(); }
};

namespace detail {

inline void append_unique(std::vector<std::string>& out, const std::string& v) {
  if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
}


}  // namespace detail

/// Main events are icl>event entries, ordered by descending frequency then headword.
inline std::vector<EventRecord> identify_main_events(const EventTable& table, std::span<const EventCluster> clusters,
                                                     std::span<const Segment> segments,
                                                     std::span<const UnlDocument> documents) {
  const SegmentLookup lookup(segments);
  std::map<std::string_view, const UnlDocument*> docs_by_id;
  for (const auto& d : documents) docs_by_id.emplace(d.doc_id, &d);

  std::vector<EventRecord> out;
  for (const auto& [key, entry] : table.entries) {
    if (!entry.head.is_a("event")) continue;
    EventRecord rec;
    rec.main_event = entry.head;
    rec.frequency = entry.frequency;

    std::vector<SegmentRef> refs;
    for (const auto& c : clusters) {
      if (concept_key(c.head) == key) refs.insert(refs.end(), c.members.begin(), c.members.end());
    }
    std::sort(refs.begin(), refs.end());

    std::map<std::string, DocumentOccurrence> by_doc;
    for (const auto& ref : refs) {
      const Segment& seg = lookup.at(ref);
      DocumentOccurrence& occ = by_doc[seg.doc_id];
      occ.doc_id = seg.doc_id;
      occ.segments.push_back(ref);
      for (const auto& p : seg.persons) {
        detail::append_unique(occ.persons, p.headword);
        detail::append_unique(rec.persons, p.headword);
      }
      for (const auto& p : seg.places) {
        detail::append_unique(occ.places, p.headword);
        detail::append_unique(rec.places, p.headword);
      }
      for (const auto& sid : seg.sentence_ids) detail::append_unique(occ.sentence_ids, sid);
      const auto doc = docs_by_id.find(seg.doc_id);
      UnlDocument missing;
      missing.doc_id = seg.doc_id;
      const ResolvedTime t = resolve_time(doc != docs_by_id.end() ? *doc->second : missing, seg);
      occ.times.push_back(t);
      if (t.date && std::find(rec.times.begin(), rec.times.end(), *t.date) == rec.times.end())
        rec.times.push_back(*t.date);
    }
    for (auto& [doc_id, occ] : by_doc) {
      rec.doc_ids.push_back(doc_id);
      rec.occurrences.push_back(std::move(occ));
    }
    out.push_back(std::move(rec));
  }
  std::stable_sort(out.begin(), out.end(), [](const EventRecord& a, const EventRecord& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.main_event.headword < b.main_event.headword;
  });
  return out;
}

/// Fills sub_events: distinct icl>action headwords found in the main event's
/// member segments, in order of first occurrence.
inline std::vector<EventRecord> attach_sub_events(std::vector<EventRecord> mains, std::span<const Segment> segments) {
  const SegmentLookup lookup(segments);
  for (auto& rec : mains) {
    rec.sub_events.clear();
    for (auto& occ : rec.occurrences) {
      occ.sub_events.clear();
      for (const auto& ref : occ.segments) {
        for (const auto& c : lookup.at(ref).concepts) {
          if (!c.is_a("action") || c.headword == rec.main_event.headword) continue;
          detail::append_unique(occ.sub_events, c.headword);
          detail::append_unique(rec.sub_events, c.headword);
        }
      }
    }
  }
  return mains;
}

/// Table, main events and sub-events in one pass.
inline std::vector<EventRecord> build_event_records(std::span<const EventCluster> clusters,
                                                    std::span<const Segment> segments,
                                                    std::span<const UnlDocument> documents) {
  const EventTable table = build_event_table(clusters, segments);
  return attach_sub_events(identify_main_events(table, clusters, segments, documents), segments);
}

}  // namespace ctxev
