#pragma once

// Random corpora, brute-force oracles and property checks shared by the unit
// tests and the acceptance runner. All randomness is seeded.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "ctxev/ctxev.hpp"

namespace ctxev::testing {

namespace fs = std::filesystem;

/// Fresh empty directory under the system temp dir.
inline fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ctxev_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

inline std::string fixture(const std::string& name) { return std::string(CTXEV_FIXTURES) + "/" + name; }

struct Check {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

// --- generators --------------------------------------------------------------

class CorpusGen {
 public:
  explicit CorpusGen(unsigned seed) : rng_(seed) {}

  std::mt19937& rng() { return rng_; }

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  Concept head() {
    static const char* kEvents[] = {"election", "festival", "incident"};
    static const char* kActions[] = {"wait", "go", "conduct"};
    return coin() ? parse_concept(std::string(kEvents[pick(3)]) + "(icl>event)")
                  : parse_concept(std::string(kActions[pick(3)]) + "(icl>action)");
  }

  Sentence sentence(const std::string& id) {
    static const char* kPersons[] = {"student", "farmer", "leader"};
    static const char* kPlaces[] = {"madurai", "chennai", "delhi"};
    Sentence s{id, {}};
    const Concept h = head();
    const int n = 1 + pick(4);
    if (coin(0.1)) s.relations.push_back({"and", head(), h});
    for (int i = 0; i < n; ++i) {
      switch (pick(5)) {
        case 0: s.relations.push_back({"agt", h, parse_concept(std::string(kPersons[pick(3)]) + "(icl>person)")}); break;
        case 1: s.relations.push_back({"plc", h, parse_concept(std::string(kPlaces[pick(3)]) + "(icl>place)")}); break;
        case 2: s.relations.push_back({"dur", h, parse_concept("hour(icl>time)")}); break;
        case 3: s.relations.push_back({"obj", head(), h}); break;
        default: s.relations.push_back({"mod", h, parse_concept("thing")}); break;
      }
    }
    return s;
  }

  UnlDocument document(const std::string& doc_id, int max_sentences = 8) {
    UnlDocument d;
    d.doc_id = doc_id;
    d.date = Date::make(1 + pick(28), 1 + pick(12), 2009 + pick(3));
    d.date_source = DateSource::directive;
    if (coin(0.3)) d.title_concepts.push_back(head_form(head()));
    const int n = 1 + pick(max_sentences);
    for (int i = 0; i < n; ++i) d.sentences.push_back(sentence("s" + std::to_string(i + 1)));
    return d;
  }

  std::vector<UnlDocument> corpus(int docs) {
    std::vector<UnlDocument> out;
    for (int i = 0; i < docs; ++i) out.push_back(document("doc" + std::to_string(i)));
    return out;
  }

 private:
  std::mt19937 rng_;
};

inline std::vector<Segment> segment_all(std::span<const UnlDocument> docs, const ScoringOptions& opts = {}) {
  std::vector<Segment> out;
  for (const auto& d : docs) {
    auto s = build_segments(d, kDefaultThreshold, opts);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

// --- oracles -------------------------------------------------------------------

/// Similarity recomputed from the published weights, in doubles.
inline double oracle_similarity(const Segment& a, const Segment& b, bool loose) {
  double p = 0;
  const bool same = a.head && b.head && a.head->headword == b.head->headword &&
                    a.head->constraints.front() == b.head->constraints.front();
  if (same) p = a.head->is_a("event") ? 0.5 : a.head->is_a("action") ? 0.4 : 0.0;
  if (p == 0 && !loose) return 0;
  auto shares = [](const std::vector<Concept>& x, const std::vector<Concept>& y) {
    for (const auto& c : x)
      for (const auto& d : y)
        if (c.headword == d.headword) return true;
    return false;
  };
  if (shares(a.places, b.places)) p += 0.2;
  if (shares(a.persons, b.persons)) p += 0.2;
  if (a.has_duration && b.has_duration) p += 0.1;
  return p;
}

/// Components of the equal-head, S > 0.8 match graph by breadth-first search.
inline std::set<std::set<SegmentRef>> oracle_components(const std::vector<Segment>& segs) {
  const std::size_t n = segs.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || !segs[i].head || !segs[j].head) continue;
      if (concept_key(*segs[i].head) != concept_key(*segs[j].head)) continue;
      if (oracle_similarity(segs[i], segs[j], false) > 0.8 + 1e-9) adj[i].push_back(j);
    }
  }
  std::set<std::set<SegmentRef>> out;
  std::vector<bool> seen(n, false);
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s] || adj[s].empty()) continue;
    std::set<SegmentRef> comp;
    std::queue<std::size_t> q;
    q.push(s);
    seen[s] = true;
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      comp.insert(segs[u].ref());
      for (std::size_t v : adj[u]) {
        if (!seen[v]) {
          seen[v] = true;
          q.push(v);
        }
      }
    }
    out.insert(comp);
  }
  return out;
}

/// O(n^2) silhouette over a flat (label, value) list, singleton a = 0.
inline std::vector<double> oracle_silhouettes(const std::vector<std::pair<int, double>>& pts) {
  std::vector<double> out;
  std::set<int> labels;
  for (const auto& [l, v] : pts) labels.insert(l);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::map<int, std::pair<double, int>> sums;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      auto& s = sums[pts[j].first];
      s.first += std::fabs(pts[i].second - pts[j].second);
      s.second += 1;
    }
    double a = 0;
    double b = 1e300;
    for (int l : labels) {
      auto it = sums.find(l);
      if (l == pts[i].first) {
        if (it != sums.end()) a = it->second.first / it->second.second;
      } else {
        b = std::min(b, it->second.first / it->second.second);
      }
    }
    const double m = std::max(a, b);
    out.push_back(m == 0 ? 0.0 : (b - a) / m);
  }
  return out;
}

// --- property checks -----------------------------------------------------------

inline Check segmentation_partition(int trials = 300) {
  Check c;
  CorpusGen gen(11);
  for (int t = 0; t < trials && c.ok; ++t) {
    const UnlDocument doc = gen.document("d" + std::to_string(t), 12);
    const bool loose = gen.coin();
    const auto segs = build_segments(doc, kDefaultThreshold, {loose});
    std::vector<std::string> ids;
    std::vector<Relation> rels;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      if (segs[i].index != i) c.fail("segment indices not consecutive");
      if (segs[i].sentence_ids.empty()) c.fail("empty segment");
      if (segs[i].doc_id != doc.doc_id) c.fail("segment carries the wrong doc id");
      ids.insert(ids.end(), segs[i].sentence_ids.begin(), segs[i].sentence_ids.end());
      rels.insert(rels.end(), segs[i].relations.begin(), segs[i].relations.end());
    }
    std::vector<std::string> want;
    std::vector<Relation> want_rels;
    for (const auto& s : doc.sentences) {
      want.push_back(s.sentence_id);
      want_rels.insert(want_rels.end(), s.relations.begin(), s.relations.end());
    }
    if (ids != want) c.fail("sentences are not partitioned in order (trial " + std::to_string(t) + ")");
    if (rels != want_rels) c.fail("relations lost or duplicated (trial " + std::to_string(t) + ")");
  }
  return c;
}

inline Check cluster_order_invariance(int trials = 60) {
  Check c;
  CorpusGen gen(23);
  for (int t = 0; t < trials && c.ok; ++t) {
    const auto docs = gen.corpus(2 + gen.pick(10));
    auto segs = segment_all(docs);
    const auto base = cluster_segments(segs);
    for (int k = 0; k < 5; ++k) {
      std::shuffle(segs.begin(), segs.end(), gen.rng());
      if (cluster_segments(segs) != base) {
        c.fail("clusters changed under permutation (trial " + std::to_string(t) + ")");
        break;
      }
    }
  }
  return c;
}

inline Check cluster_components_oracle(int trials = 80) {
  Check c;
  CorpusGen gen(29);
  for (int t = 0; t < trials && c.ok; ++t) {
    const auto segs = segment_all(gen.corpus(2 + gen.pick(12)));
    std::set<std::set<SegmentRef>> got;
    for (const auto& cl : cluster_segments(segs)) got.insert({cl.members.begin(), cl.members.end()});
    if (got != oracle_components(segs)) c.fail("components differ from the BFS oracle (trial " + std::to_string(t) + ")");
  }
  return c;
}

inline IndexSet index_corpus(std::span<const UnlDocument> docs) {
  const auto segs = segment_all(docs);
  const auto clusters = cluster_segments(segs);
  return build_indices(build_event_records(clusters, segs, docs));
}

inline Check index_save_load(int trials = 30) {
  Check c;
  CorpusGen gen(31);
  const fs::path root = scratch_dir("props_index");
  for (int t = 0; t < trials && c.ok; ++t) {
    const auto docs = gen.corpus(3 + gen.pick(12));
    const IndexSet set = index_corpus(docs);
    const fs::path a = root / ("a" + std::to_string(t));
    const fs::path b = root / ("b" + std::to_string(t));
    save_indices(set, a);
    const IndexSet loaded = load_indices(a);
    if (!(loaded == set)) c.fail("load(save(x)) != x (trial " + std::to_string(t) + ")");
    save_indices(loaded, b);
    for (const char* f : {"person.idx", "place.idx", "event.idx"}) {
      if (detail::read_file(a / f) != detail::read_file(b / f)) c.fail(std::string(f) + " not byte-stable");
    }
  }
  fs::remove_all(root);
  return c;
}

inline std::vector<std::string> rank_order(const std::vector<RankedEvent>& r) {
  std::vector<std::string> out;
  for (const auto& e : r) out.push_back(e.event_name);
  return out;
}

inline Check ranking_monotonicity(int trials = 400) {
  Check c;
  CorpusGen gen(37);
  for (int t = 0; t < trials && c.ok; ++t) {
    std::vector<EventStats> stats;
    const int n = 2 + gen.pick(8);
    for (int i = 0; i < n; ++i)
      stats.push_back({"e" + std::to_string(i), 1 + gen.pick(6), 1 + gen.pick(10), gen.pick(4)});
    const RankOptions opts{{0.5 + gen.pick(4), 0.5 + gen.pick(4), 0.5 + gen.pick(6)}, false, 0};
    const auto base = rank_stats(stats, opts);
    const std::size_t who = static_cast<std::size_t>(gen.pick(n));
    auto find = [&](const std::vector<RankedEvent>& r) {
      return *std::find_if(r.begin(), r.end(), [&](const RankedEvent& e) { return e.event_name == stats[who].event_name; });
    };
    for (int field = 0; field < 3; ++field) {
      auto bumped = stats;
      (field == 0 ? bumped[who].doc_count : field == 1 ? bumped[who].total_frequency : bumped[who].title_count) += 1;
      const auto after = rank_stats(bumped, opts);
      if (!(find(after).score > find(base).score)) c.fail("score did not increase");
      if (find(after).rank > find(base).rank) c.fail("rank got worse after a bump");
    }
    for (double k : {0.25, 2.0, 7.0, 1000.0}) {
      RankOptions scaled = opts;
      scaled.weights = {opts.weights.df * k, opts.weights.tf * k, opts.weights.title * k};
      if (rank_order(rank_stats(stats, scaled)) != rank_order(base)) c.fail("order changed under weight scaling");
    }
  }
  return c;
}

inline Check silhouette_range_antisymmetry(int trials = 20000) {
  Check c;
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> dist(0.0, 10.0);
  for (int t = 0; t < trials && c.ok; ++t) {
    const double a = t % 10 == 0 ? 0.0 : dist(rng);
    const double b = t % 7 == 0 ? a : dist(rng);
    const double s = silhouette(a, b);
    if (s < -1 || s > 1) c.fail("silhouette out of [-1, 1]");
    if (std::fabs(s + silhouette(b, a)) > 1e-12) c.fail("silhouette(a,b) != -silhouette(b,a)");
  }
  return c;
}

inline Check point_silhouette_bruteforce(int trials = 200) {
  Check c;
  std::mt19937 rng(43);
  for (int t = 0; t < trials && c.ok; ++t) {
    const int total = std::uniform_int_distribution<int>(2, 50)(rng);
    const int k = std::uniform_int_distribution<int>(2, std::min(total, 8))(rng);
    std::vector<int> sizes(k, 1);
    for (int i = k; i < total; ++i) ++sizes[std::uniform_int_distribution<int>(0, k - 1)(rng)];
    ScoredClustering sc;
    std::vector<std::pair<int, double>> flat;
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int l = 0; l < k; ++l) {
      ScoredCluster cl{"c" + std::to_string(l), {}};
      for (int i = 0; i < sizes[l]; ++i) {
        const double v = dist(rng);
        cl.points.push_back(v);
        flat.emplace_back(l, v);
      }
      sc.clusters.push_back(cl);
    }
    const auto rows = silhouette_rows(sc);
    const auto want = oracle_silhouettes(flat);
    if (rows.size() != want.size()) {
      c.fail("row count mismatch");
      break;
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (std::fabs(rows[i].coefficient - want[i]) > 1e-9)
        c.fail("point " + std::to_string(i) + " of trial " + std::to_string(t) + " disagrees with brute force");
    }
  }
  return c;
}

// --- threshold enumeration ------------------------------------------------------

struct Combination {
  std::string head;  // "event", "action" or "none" (heads differ)
  bool place = false;
  bool person = false;
  bool duration = false;
  bool loose = false;

  std::string name() const {
    std::string out = head;
    if (place) out += "+place";
    if (person) out += "+person";
    if (duration) out += "+duration";
    return out;
  }
};

inline std::vector<Combination> all_combinations() {
  std::vector<Combination> out;
  for (bool loose : {false, true})
    for (const char* h : {"event", "action", "none"})
      for (int bits = 0; bits < 8; ++bits) out.push_back({h, bool(bits & 1), bool(bits & 2), bool(bits & 4), loose});
  return out;
}

/// Two one-sentence documents whose segments realize `c`.
inline std::vector<Segment> realize(const Combination& c) {
  const std::string head_a = c.head == "action" ? "wait(icl>action)" : "election(icl>event)";
  const std::string head_b = c.head == "none" ? "festival(icl>event)" : head_a;
  auto doc = [](const std::string& id, const std::string& head, const std::string& place, const std::string& person,
                bool dur) {
    std::string text = "#DOC " + id + "\n#SENT s1\n";
    text += "plc(" + head + ", " + place + "(icl>place))\n";
    text += "agt(" + head + ", " + person + "(icl>person))\n";
    if (dur) text += "dur(" + head + ", week(icl>time))\n";
    return parse_document(text + "#END\n");
  };
  std::vector<Segment> out;
  for (const auto& d : {doc("a", head_a, "chennai", "farmer", true),
                        doc("b", head_b, c.place ? "chennai" : "delhi", c.person ? "farmer" : "leader", c.duration)}) {
    auto s = build_segments(d);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

/// Combinations the published weights put strictly above 0.8.
inline bool predicted_above_threshold(const Combination& c) {
  double p = c.head == "event" ? 0.5 : c.head == "action" ? 0.4 : 0.0;
  if (p == 0 && !c.loose) return false;
  p += (c.place ? 0.2 : 0) + (c.person ? 0.2 : 0) + (c.duration ? 0.1 : 0);
  return p > 0.8 + 1e-9 && c.head != "none";
}

struct EnumerationResult {
  std::size_t cases = 0;
  std::set<std::string> admitted;  // by name, strict and loose pooled
  std::vector<std::string> disagreements;
};

inline EnumerationResult threshold_enumeration() {
  EnumerationResult r;
  for (const auto& c : all_combinations()) {
    ++r.cases;
    const auto segs = realize(c);
    const bool admitted = !cluster_segments(segs, ClusterOptions{kDefaultThreshold, false, {c.loose}}).empty();
    if (admitted) r.admitted.insert(c.name());
    if (admitted != predicted_above_threshold(c))
      r.disagreements.push_back(c.name() + (c.loose ? " (loose)" : ""));
  }
  return r;
}

// --- match log ------------------------------------------------------------------

/// The published match rows, line wraps rejoined.
inline const std::vector<std::string>& published_match_rows() {
  static const std::vector<std::string> rows = {
      "wait(icl>action) Macths doc1 ta_bbc_agricrisis_02_01_2011.utf8 doc2ta_bbc_armydeserters_14_12_2010.utf8",
      "do(icl>action) Macths doc1 ta_bbc_agricrisis_02_01_2011.utf8 doc2ta_bbc_armydeserters_14_12_2010.utf8",
      "go(icl>action) Macths doc1 ta_bbc_alagiri_19_03_2011.utf8 doc2ta_bbc_angayarkanni_22_01_2011.utf8",
      "go(icl>action) Macths doc1 ta_bbc_alagiri_19_03_2011.utf8 doc2ta_bbc_armydeserters_14_12_2010.utf8",
      "conduct(icl>action) Macths doc1 ta_bbc_amitabhprotest_26_04_2010.utf8 doc2ta_bbc_animalsacrifice_22_08_2010.utf8",
      "go(icl>action) Macths doc1 ta_bbc_angayarkanni_22_01_2011.utf8 doc2ta_bbc_alagiri_19_03_2011.utf8",
      "go(icl>action) Macths doc1 ta_bbc_angayarkanni_22_01_2011.utf8 doc2ta_bbc_armydeserters_14_12_2010.utf8",
      "wait(icl>action) Macths doc1 ta_bbc_anglofrenchpact_02_11_2010.utf8 doc2ta_bbc_agricrisis_02_01_2011.utf8",
      "wait(icl>action) Macths doc1 ta_bbc_anglofrenchpact_02_11_2010.utf8 doc2ta_bbc_anya_25_09_2010.utf8",
      "wait(icl>action) Macths doc1 ta_bbc_anglofrenchpact_02_11_2010.utf8 doc2ta_bbc_armydeserters_14_12_2010.utf8",
      "conduct(icl>action) Macths doc1 ta_bbc_animalsacrifice_22_08_2010.utf8 doc2ta_bbc_amitabhprotest_26_04_2010.utf8",
  };
  return rows;
}

/// (head, lower doc, higher doc) for a match line in either spelling.
using MatchKey = std::tuple<std::string, std::string, std::string>;

inline std::optional<MatchKey> match_key(const std::string& line) {
  std::istringstream in(line);
  std::string head, verb, doc1_tag, a, rest;
  if (!(in >> head >> verb >> doc1_tag >> a)) return std::nullopt;
  if ((verb != "Matches" && verb != "Macths") || doc1_tag != "doc1") return std::nullopt;
  std::string tail;
  std::getline(in, tail);
  tail = std::string(detail::trim(tail));
  if (tail.rfind("doc2", 0) != 0) return std::nullopt;
  std::string b(detail::trim(std::string_view(tail).substr(4)));
  if (b.empty() || b.find(' ') != std::string::npos) return std::nullopt;
  if (b < a) std::swap(a, b);
  return MatchKey{head, a, b};
}

inline std::set<MatchKey> match_keys(const std::vector<std::string>& lines) {
  std::set<MatchKey> out;
  for (const auto& l : lines) {
    if (auto k = match_key(l)) out.insert(*k);
    else out.insert({"<unparsed>", l, ""});
  }
  return out;
}

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    if (!l.empty()) out.push_back(l);
  return out;
}

// --- figure fixtures ----------------------------------------------------------------

/// Runs the whole pipeline over a fixture corpus into a scratch directory.
inline fs::path run_fixture(const std::string& corpus, const std::string& tag, PipelineConfig cfg = {}) {
  cfg.corpus_dir = fixture(corpus);
  cfg.out_dir = scratch_dir(tag);
  std::ostringstream log;
  if (int rc = run_pipeline(cfg, log); rc != 0) throw std::runtime_error("pipeline failed: " + log.str());
  return cfg.out_dir;
}

/// sha256 of every file under `dir`, keyed by relative path.
inline std::map<std::string, std::string> tree_digest(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = sha256_hex(detail::read_file(e.path()));
  }
  return out;
}

}  // namespace ctxev::testing
