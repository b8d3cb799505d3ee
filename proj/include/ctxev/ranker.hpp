#pragma once

// Event ranking: a weighted sum of document spread, corpus frequency and the
// number of documents whose title mentions the event.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ctxev/event_model.hpp"
#include "ctxev/unl.hpp"

namespace ctxev {

class EmptyCorpus : public std::runtime_error {
 public:
  EmptyCorpus() : std::runtime_error("no main events to rank") {}
};

struct RankWeights {
  double df = 1.0;
  double tf = 1.0;
  double title = 3.0;

  bool operator==(const RankWeights&) const = default;
};

struct RankOptions {
  RankWeights weights;
  /// Replace the document-spread term with df * ln(N / doc_count).
  bool idf = false;
  /// N for the idf variant; number of documents in the corpus.
  std::size_t corpus_size = 0;
};

struct EventStats {
  std::string event_name;
  int doc_count = 1;
  int total_frequency = 1;
  int title_count = 0;
};

struct RankedEvent {
  std::string event_name;
  int doc_count = 0;
  int total_frequency = 0;
  int title_count = 0;
  double score = 0.0;
  int rank = 0;

  bool operator==(const RankedEvent&) const = default;
};

/// Documents whose title concepts include `event` (case-folded headword match).
inline int title_hits(std::string_view event, std::span<const UnlDocument> documents) {
  const std::string key = fold_case(event);
  return static_cast<int>(std::count_if(documents.begin(), documents.end(), [&](const UnlDocument& d) {
    return std::any_of(d.title_concepts.begin(), d.title_concepts.end(),
                       [&](const Concept& c) { return fold_case(c.headword) == key; });
  }));
}

inline double rank_score(const EventStats& s, const RankOptions& opts) {
  const RankWeights& w = opts.weights;
  const double spread = opts.idf ? std::log(static_cast<double>(opts.corpus_size) / s.doc_count) : s.doc_count;
  return w.df * spread + w.tf * s.total_frequency + w.title * s.title_count;
}

/// Sorted by descending score, ties by ascending name; ranks are 1..N with no sharing.
inline std::vector<RankedEvent> rank_stats(std::span<const EventStats> stats, const RankOptions& opts = {}) {
  const RankWeights& w = opts.weights;
  if (!(w.df > 0 && w.tf > 0 && w.title > 0)) throw std::invalid_argument("rank weights must be strictly positive");
  if (opts.idf && opts.corpus_size == 0) throw std::invalid_argument("idf ranking needs the corpus size");

  std::vector<RankedEvent> out;
  out.reserve(stats.size());
  for (const auto& s : stats) {
    out.push_back({s.event_name, s.doc_count, s.total_frequency, s.title_count, rank_score(s, opts), 0});
  }
  std::sort(out.begin(), out.end(), [](const RankedEvent& a, const RankedEvent& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.event_name < b.event_name;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i + 1);
  return out;
}

/// Ranks every main (icl>event) entry of the table.
inline std::vector<RankedEvent> rank_events(const EventTable& table, std::span<const UnlDocument> documents,
                                            RankOptions opts = {}) {
  std::vector<EventStats> stats;
  for (const auto& [key, e] : table.entries) {
    if (!e.head.is_a("event")) continue;
    stats.push_back({e.head.headword, static_cast<int>(e.doc_ids.size()), e.frequency,
                     title_hits(e.head.headword, documents)});
  }
  if (stats.empty()) throw EmptyCorpus();
  if (opts.corpus_size == 0) opts.corpus_size = documents.size();
  return rank_stats(stats, opts);
}

}  // namespace ctxev
