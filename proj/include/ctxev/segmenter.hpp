#pragma once

// Groups consecutive sentences of a document into event segments using the
// modified scoring scheme: condition score + feature score + conjunction score.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ctxev/score.hpp"
#include "ctxev/unl.hpp"

namespace ctxev {

inline bool is_head_candidate(const Concept& c) { return c.is_a("event") || c.is_a("action"); }
inline bool is_conjunction(const Relation& r) { return r.label == "and" || r.label == "or"; }

namespace detail {

template <class Key>
void push_unique(std::vector<Concept>& out, std::set<std::string>& seen, const Concept& c, Key key) {
  if (seen.insert(key(c)).second) out.push_back(c);
}

inline std::string by_headword(const Concept& c) { return c.headword; }
inline std::string by_text(const Concept& c) { return serialize_concept(c); }

inline bool shares_headword(const std::vector<Concept>& a, const std::vector<Concept>& b) {
  for (const auto& x : a) {
    for (const auto& y : b) {
      if (x.headword == y.headword) return true;
    }
  }
  return false;
}

}  // namespace detail

struct SentenceFeatures {
  std::vector<Concept> concepts;          // distinct, first occurrence order
  std::vector<Concept> heads;             // distinct head candidates (by concept_key), attributes dropped
  std::vector<Concept> head_occurrences;  // every event/action endpoint, in relation order
  std::vector<Concept> persons;
  std::vector<Concept> places;
  std::vector<Concept> times;
  bool has_duration = false;
  std::vector<Relation> conjunctions;
  std::string first_label;
};

inline SentenceFeatures sentence_features(const Sentence& s) {
  SentenceFeatures f;
  std::set<std::string> seen_concepts, seen_heads, seen_persons, seen_places, seen_times;
  if (!s.relations.empty()) f.first_label = s.relations.front().label;

  for (const auto& r : s.relations) {
    if (r.label == "dur") f.has_duration = true;
    if (is_conjunction(r)) f.conjunctions.push_back(r);
    for (const Concept* c : {&r.source, &r.target}) {
      detail::push_unique(f.concepts, seen_concepts, *c, detail::by_text);
      if (c->has_attribute("dur")) f.has_duration = true;
      if (is_head_candidate(*c)) {
        f.head_occurrences.push_back(head_form(*c));
        detail::push_unique(f.heads, seen_heads, head_form(*c), concept_key);
      }
      if (c->is_a("person")) detail::push_unique(f.persons, seen_persons, *c, detail::by_headword);
      if (c->is_a("place")) detail::push_unique(f.places, seen_places, *c, detail::by_headword);
      if (c->is_a("time")) detail::push_unique(f.times, seen_times, *c, detail::by_headword);
    }
    if (r.label == "tim" || r.label == "dur") detail::push_unique(f.times, seen_times, r.target, detail::by_headword);
  }
  return f;
}

struct PairScore {
  Score condition;
  Score feature;
  Score conjunction;

  Score total() const { return condition + feature + conjunction; }
};

/// 0.5 for a shared icl>event head, else 0.4 for a shared icl>action head, else 0.
inline Score head_condition(const std::vector<Concept>& a, const std::vector<Concept>& b) {
  bool action = false;
  for (const auto& x : a) {
    for (const auto& y : b) {
      if (concept_key(x) != concept_key(y)) continue;
      if (x.is_a("event")) return weight::kEventHead;
      if (x.is_a("action")) action = true;
    }
  }
  return action ? weight::kActionHead : Score{};
}

namespace detail {

inline Score feature_score(const std::vector<Concept>& places_a, const std::vector<Concept>& places_b,
                           const std::vector<Concept>& persons_a, const std::vector<Concept>& persons_b,
                           bool duration_a, bool duration_b) {
  Score s;
  if (shares_headword(places_a, places_b)) s += weight::kPlace;
  if (shares_headword(persons_a, persons_b)) s += weight::kPerson;
  if (duration_a && duration_b) s += weight::kDuration;
  return s;
}

inline bool links(const SentenceFeatures& a, const SentenceFeatures& b) {
  std::set<std::string> in_a, in_b;
  for (const auto& c : a.concepts) in_a.insert(concept_key(c));
  for (const auto& c : b.concepts) in_b.insert(concept_key(c));
  auto spans = [&](const Relation& r) {
    const std::string s = concept_key(r.source);
    const std::string t = concept_key(r.target);
    return (in_a.contains(s) && in_b.contains(t)) || (in_b.contains(s) && in_a.contains(t));
  };
  return std::any_of(a.conjunctions.begin(), a.conjunctions.end(), spans) ||
         std::any_of(b.conjunctions.begin(), b.conjunctions.end(), spans);
}

}  // namespace detail

/// Score for adjacent sentences `a` then `b`. The conjunction term fires when an
/// and/or relation connects concepts of both sentences, or when `b` opens with one.
inline PairScore pair_score(const SentenceFeatures& a, const SentenceFeatures& b, const ScoringOptions& opts = {}) {
  PairScore out;
  out.condition = head_condition(a.heads, b.heads);
  if (out.condition.tenths() > 0 || opts.loose_features) {
    out.feature = detail::feature_score(a.places, b.places, a.persons, b.persons, a.has_duration, b.has_duration);
  }
  if (b.first_label == "and" || b.first_label == "or" || detail::links(a, b)) out.conjunction = weight::kConjunction;
  return out;
}

inline PairScore pair_score(const Sentence& a, const Sentence& b, const ScoringOptions& opts = {}) {
  return pair_score(sentence_features(a), sentence_features(b), opts);
}

struct SegmentRef {
  std::string doc_id;
  std::size_t index = 0;

  auto operator<=>(const SegmentRef&) const = default;
};

struct Segment {
  std::string doc_id;
  std::size_t index = 0;
  std::vector<std::string> sentence_ids;
  std::optional<Concept> head;
  std::vector<Concept> concepts;
  std::vector<Relation> relations;
  std::vector<Concept> persons;
  std::vector<Concept> places;
  std::vector<Concept> times;
  bool has_duration = false;

  SegmentRef ref() const { return {doc_id, index}; }
  bool operator==(const Segment&) const = default;
};

namespace detail {

/// Most frequent head occurrence; ties go to the earliest first occurrence.
inline std::optional<Concept> most_frequent_head(const std::vector<Concept>& occurrences) {
  std::map<std::string, int> counts;
  for (const auto& c : occurrences) ++counts[concept_key(c)];
  std::optional<Concept> best;
  int best_count = 0;
  for (const auto& c : occurrences) {
    const int n = counts[concept_key(c)];
    if (n > best_count) {
      best = c;
      best_count = n;
    }
  }
  return best;
}

inline Segment assemble_segment(const UnlDocument& doc, std::size_t index, std::size_t first, std::size_t last,
                                const std::vector<SentenceFeatures>& features) {
  Segment seg;
  seg.doc_id = doc.doc_id;
  seg.index = index;
  std::vector<Concept> occurrences;
  std::set<std::string> seen_concepts, seen_persons, seen_places, seen_times;
  for (std::size_t i = first; i <= last; ++i) {
    const Sentence& s = doc.sentences[i];
    const SentenceFeatures& f = features[i];
    seg.sentence_ids.push_back(s.sentence_id);
    seg.relations.insert(seg.relations.end(), s.relations.begin(), s.relations.end());
    occurrences.insert(occurrences.end(), f.head_occurrences.begin(), f.head_occurrences.end());
    for (const auto& c : f.concepts) push_unique(seg.concepts, seen_concepts, c, by_text);
    for (const auto& c : f.persons) push_unique(seg.persons, seen_persons, c, by_headword);
    for (const auto& c : f.places) push_unique(seg.places, seen_places, c, by_headword);
    for (const auto& c : f.times) push_unique(seg.times, seen_times, c, by_headword);
    seg.has_duration = seg.has_duration || f.has_duration;
  }
  seg.head = most_frequent_head(occurrences);
  return seg;
}

}  // namespace detail

/// Greedy left-to-right merge: the next sentence joins the open segment when its
/// score against the segment's last sentence exceeds the threshold, or when the
/// conjunction term fires.
inline std::vector<Segment> build_segments(const UnlDocument& doc, Threshold threshold = kDefaultThreshold,
                                           const ScoringOptions& opts = {}) {
  std::vector<SentenceFeatures> features;
  features.reserve(doc.sentences.size());
  for (const auto& s : doc.sentences) features.push_back(sentence_features(s));

  std::vector<Segment> out;
  if (doc.sentences.empty()) return out;
  std::size_t first = 0;
  for (std::size_t i = 1; i < doc.sentences.size(); ++i) {
    const PairScore p = pair_score(features[i - 1], features[i], opts);
    if (threshold.exceeded_by(p.total()) || p.conjunction.tenths() > 0) continue;
    out.push_back(detail::assemble_segment(doc, out.size(), first, i - 1, features));
    first = i;
  }
  out.push_back(detail::assemble_segment(doc, out.size(), first, doc.sentences.size() - 1, features));
  return out;
}

}  // namespace ctxev
