#pragma once

// Cross-document event clusters: connected components of the graph whose edges
// are segment pairs with equal heads and similarity above the threshold.

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "ctxev/score.hpp"
#include "ctxev/segmenter.hpp"

namespace ctxev {

/// S = p + p1 + p2 + p3 over two segments' heads, places, persons and durations.
inline Score segment_similarity(const Segment& a, const Segment& b, const ScoringOptions& opts = {}) {
  Score s;
  if (a.head && b.head && concept_key(*a.head) == concept_key(*b.head)) {
    if (a.head->is_a("event")) s = weight::kEventHead;
    else if (a.head->is_a("action")) s = weight::kActionHead;
  }
  if (s.tenths() > 0 || opts.loose_features) {
    s += detail::feature_score(a.places, b.places, a.persons, b.persons, a.has_duration, b.has_duration);
  }
  return s;
}

struct SegmentPairMatch {
  Concept head;
  SegmentRef a;  // a < b
  SegmentRef b;
  Score score;

  bool operator==(const SegmentPairMatch&) const = default;
};

struct EventCluster {
  int cluster_id = 0;
  Concept head;
  std::vector<SegmentRef> members;  // sorted
  std::vector<SegmentPairMatch> matches;
  double cohesion = 0.0;

  bool operator==(const EventCluster&) const = default;
};

struct ClusterOptions {
  Threshold threshold = kDefaultThreshold;
  bool keep_singletons = false;
  ScoringOptions scoring;
};

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

/// Segments without a head never cluster. Output is independent of input order.
inline std::vector<EventCluster> cluster_segments(std::span<const Segment> segments, const ClusterOptions& opts = {}) {
  std::vector<const Segment*> headed;
  for (const auto& s : segments) {
    if (s.head) headed.push_back(&s);
  }
  std::sort(headed.begin(), headed.end(), [](const Segment* x, const Segment* y) { return x->ref() < y->ref(); });
  for (std::size_t i = 1; i < headed.size(); ++i) {
    if (headed[i - 1]->ref() == headed[i]->ref())
      throw std::invalid_argument("duplicate segment " + headed[i]->doc_id + "#" + std::to_string(headed[i]->index));
  }

  std::vector<std::string> keys;
  keys.reserve(headed.size());
  for (const Segment* s : headed) keys.push_back(concept_key(*s->head));

  detail::DisjointSets sets(headed.size());
  std::vector<std::pair<std::size_t, SegmentPairMatch>> matches;  // (index of endpoint a, match)
  std::vector<bool> matched(headed.size(), false);
  for (std::size_t i = 0; i < headed.size(); ++i) {
    for (std::size_t j = i + 1; j < headed.size(); ++j) {
      if (keys[i] != keys[j]) continue;
      const Score s = segment_similarity(*headed[i], *headed[j], opts.scoring);
      if (!opts.threshold.exceeded_by(s)) continue;
      matches.emplace_back(i, SegmentPairMatch{*headed[i]->head, headed[i]->ref(), headed[j]->ref(), s});
      sets.unite(i, j);
      matched[i] = matched[j] = true;
    }
  }

  std::map<std::size_t, std::vector<std::size_t>> components;
  for (std::size_t i = 0; i < headed.size(); ++i) {
    if (matched[i] || opts.keep_singletons) components[sets.find(i)].push_back(i);
  }

  std::vector<EventCluster> out;
  for (const auto& [root, idx] : components) {
    EventCluster c;
    c.head = *headed[root]->head;
    for (std::size_t i : idx) c.members.push_back(headed[i]->ref());
    for (const auto& [endpoint, m] : matches) {
      if (sets.find(endpoint) == root) c.matches.push_back(m);
    }
    if (idx.size() > 1) {
      long total = 0;
      long pairs = 0;
      for (std::size_t x = 0; x < idx.size(); ++x) {
        for (std::size_t y = x + 1; y < idx.size(); ++y) {
          total += segment_similarity(*headed[idx[x]], *headed[idx[y]], opts.scoring).tenths();
          ++pairs;
        }
      }
      c.cohesion = static_cast<double>(total) / (10.0 * static_cast<double>(pairs));
    }
    out.push_back(std::move(c));
  }

  std::sort(out.begin(), out.end(), [](const EventCluster& x, const EventCluster& y) {
    return std::tie(x.head.headword, x.members.front().doc_id, x.members.front().index) <
           std::tie(y.head.headword, y.members.front().doc_id, y.members.front().index);
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].cluster_id = static_cast<int>(i + 1);
  return out;
}

/// One line per matching document pair:
///   `<head> Matches doc1 <doc_a> doc2 <doc_b>`
/// sorted by (head, doc_a, doc_b), unordered pairs deduplicated. `verbatim`
/// reproduces the historical "Macths ... doc2<doc_b>" spelling for fixture diffs.
inline std::string emit_match_log(std::span<const EventCluster> clusters, bool verbatim = false) {
  std::set<std::tuple<std::string, std::string, std::string>> rows;
  for (const auto& c : clusters) {
    for (const auto& m : c.matches) {
      const auto [lo, hi] = std::minmax(m.a.doc_id, m.b.doc_id);
      rows.emplace(serialize_concept(m.head), lo, hi);
    }
  }
  std::string out;
  for (const auto& [head, a, b] : rows) {
    if (verbatim) out += head + " Macths doc1 " + a + " doc2" + b + "\n";
    else out += head + " Matches doc1 " + a + " doc2 " + b + "\n";
  }
  return out;
}

}  // namespace ctxev
