#pragma once

// End-to-end driver: corpus directory -> segments -> clusters -> indices ->
// ranking -> silhouette report. Every stage reads its inputs from, and writes
// its outputs to, the output directory, so stages can also run one at a time.
//
// Output directory:
//   documents.jsonl  segments.jsonl           (segment)
//   clusters.jsonl   matches.log              (cluster)
//   person.idx  place.idx  event.idx          (index)
//   ranking.tsv                               (rank)
//   eval_report.tsv                           (eval)
//   manifest.json                             (every stage)

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "ctxev/artifacts.hpp"
#include "ctxev/clusterer.hpp"
#include "ctxev/evaluator.hpp"
#include "ctxev/event_model.hpp"
#include "ctxev/indexer.hpp"
#include "ctxev/ranker.hpp"
#include "ctxev/segmenter.hpp"
#include "ctxev/unl.hpp"

namespace ctxev {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kEmptyCorpus = 2;
inline constexpr int kNoEntries = 3;
}  // namespace exit_code

class PipelineError : public std::runtime_error {
 public:
  PipelineError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const noexcept { return code_; }

 private:
  int code_;
};

class MissingArtifact : public PipelineError {
 public:
  explicit MissingArtifact(const std::filesystem::path& p)
      : PipelineError(exit_code::kFailure, "missing artifact " + p.string() + " (run the earlier stage first)") {}
};

struct PipelineConfig {
  std::filesystem::path corpus_dir;
  std::filesystem::path out_dir;
  Threshold threshold = kDefaultThreshold;
  RankWeights weights;
  bool loose_features = false;
  bool keep_singletons = false;
  bool idf = false;
  bool verbatim_fig2 = false;

  ScoringOptions scoring() const { return {loose_features}; }
  ClusterOptions clustering() const { return {threshold, keep_singletons, scoring()}; }
};

namespace artifact {
inline constexpr const char* kDocuments = "documents.jsonl";
inline constexpr const char* kSegments = "segments.jsonl";
inline constexpr const char* kClusters = "clusters.jsonl";
inline constexpr const char* kMatchLog = "matches.log";
inline constexpr const char* kRanking = "ranking.tsv";
inline constexpr const char* kEvalReport = "eval_report.tsv";
inline constexpr const char* kManifest = "manifest.json";
}  // namespace artifact

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

struct LoadedCorpus {
  std::vector<DocumentInfo> info;
  std::vector<UnlDocument> documents;
};

/// Parses every regular, non-hidden file of `dir` in file-name order.
inline LoadedCorpus load_corpus(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw PipelineError(exit_code::kFailure, "corpus directory " + dir.string() + " not found");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename().string().front() != '.') files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw PipelineError(exit_code::kEmptyCorpus, "corpus " + dir.string() + " has no documents");

  LoadedCorpus out;
  std::string errors;
  std::set<std::string> ids;
  for (const auto& f : files) {
    const std::string name = f.filename().string();
    const std::string text = detail::read_file(f);
    try {
      UnlDocument doc = parse_document(text, name);
      if (!ids.insert(doc.doc_id).second) {
        errors += name + ": duplicate document id '" + doc.doc_id + "'\n";
        continue;
      }
      DocumentInfo info{doc, name, sha256_hex(text)};
      info.document.sentences.clear();
      out.info.push_back(std::move(info));
      out.documents.push_back(std::move(doc));
    } catch (const MalformedDocument& e) {
      errors += std::string(e.what()) + "\n";
    }
  }
  if (!errors.empty()) throw PipelineError(exit_code::kFailure, errors);
  return out;
}

namespace detail {

inline std::string read_artifact(const std::filesystem::path& dir, const char* name) {
  const auto path = dir / name;
  if (!std::filesystem::exists(path)) throw MissingArtifact(path);
  return read_file(path);
}

inline std::vector<UnlDocument> headers_of(const std::vector<DocumentInfo>& info) {
  std::vector<UnlDocument> out;
  for (const auto& i : info) out.push_back(i.document);
  return out;
}

}  // namespace detail

inline std::string render_manifest(const PipelineConfig& cfg, std::span<const DocumentInfo> inputs) {
  nlohmann::ordered_json j;
  j["format"] = "ctxev-manifest v1";
  j["config"]["threshold"] = cfg.threshold.to_string();
  j["config"]["weights"] = {{"df", cfg.weights.df}, {"tf", cfg.weights.tf}, {"title", cfg.weights.title}};
  j["config"]["loose_features"] = cfg.loose_features;
  j["config"]["keep_singletons"] = cfg.keep_singletons;
  j["config"]["idf"] = cfg.idf;
  j["config"]["verbatim_fig2"] = cfg.verbatim_fig2;
  j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& d : inputs) {
    j["inputs"].push_back({{"file", d.file}, {"doc_id", d.document.doc_id}, {"sha256", d.sha256}});
  }
  return j.dump(2) + "\n";
}

inline void write_manifest(const PipelineConfig& cfg) {
  const auto inputs = parse_documents(detail::read_artifact(cfg.out_dir, artifact::kDocuments));
  detail::write_file(cfg.out_dir / artifact::kManifest, render_manifest(cfg, inputs));
}

inline std::string format_ranking(const std::vector<RankedEvent>& ranked) {
  std::string out = "rank\tevent\tscore\tdoc_count\ttotal_frequency\ttitle_count\n";
  for (const auto& r : ranked) {
    out += std::to_string(r.rank) + "\t" + r.event_name + "\t" + detail::fixed(r.score) + "\t" +
           std::to_string(r.doc_count) + "\t" + std::to_string(r.total_frequency) + "\t" +
           std::to_string(r.title_count) + "\n";
  }
  return out;
}

/// One scored cluster per event cluster with matches; its points are the match scores.
inline ScoredClustering match_score_clustering(std::span<const EventCluster> clusters) {
  ScoredClustering out;
  for (const auto& c : clusters) {
    if (c.matches.empty()) continue;
    ScoredCluster sc{std::to_string(c.cluster_id) + ":" + c.head.headword, {}};
    for (const auto& m : c.matches) sc.points.push_back(m.score.value());
    out.clusters.push_back(std::move(sc));
  }
  return out;
}

inline std::vector<SilhouetteRow> evaluate_clusters(std::span<const EventCluster> clusters) {
  const ScoredClustering sc = match_score_clustering(clusters);
  if (sc.clusters.size() < 2) return {};
  return silhouette_rows(sc);
}

// --- stages --------------------------------------------------------------------

inline void stage_segment(const PipelineConfig& cfg) {
  const LoadedCorpus corpus = load_corpus(cfg.corpus_dir);
  std::vector<Segment> segments;
  for (const auto& doc : corpus.documents) {
    auto segs = build_segments(doc, cfg.threshold, cfg.scoring());
    segments.insert(segments.end(), std::make_move_iterator(segs.begin()), std::make_move_iterator(segs.end()));
  }
  std::filesystem::create_directories(cfg.out_dir);
  detail::write_file(cfg.out_dir / artifact::kDocuments, serialize_documents(corpus.info));
  detail::write_file(cfg.out_dir / artifact::kSegments, serialize_segments(segments));
  write_manifest(cfg);
}

inline void stage_cluster(const PipelineConfig& cfg) {
  const auto segments = parse_segments(detail::read_artifact(cfg.out_dir, artifact::kSegments));
  const auto clusters = cluster_segments(segments, cfg.clustering());
  detail::write_file(cfg.out_dir / artifact::kClusters, serialize_clusters(clusters));
  detail::write_file(cfg.out_dir / artifact::kMatchLog, emit_match_log(clusters, cfg.verbatim_fig2));
  write_manifest(cfg);
}

inline void stage_index(const PipelineConfig& cfg, std::ostream& log) {
  const auto docs = detail::headers_of(parse_documents(detail::read_artifact(cfg.out_dir, artifact::kDocuments)));
  const auto segments = parse_segments(detail::read_artifact(cfg.out_dir, artifact::kSegments));
  const auto clusters = parse_clusters(detail::read_artifact(cfg.out_dir, artifact::kClusters));
  std::vector<std::string> warnings;
  const auto indices = build_indices(build_event_records(clusters, segments, docs), &warnings);
  for (const auto& w : warnings) log << "warning: " << w << "\n";
  save_indices(indices, cfg.out_dir);
  write_manifest(cfg);
}

inline void stage_rank(const PipelineConfig& cfg, std::ostream& log) {
  const auto docs = detail::headers_of(parse_documents(detail::read_artifact(cfg.out_dir, artifact::kDocuments)));
  const auto segments = parse_segments(detail::read_artifact(cfg.out_dir, artifact::kSegments));
  const auto clusters = parse_clusters(detail::read_artifact(cfg.out_dir, artifact::kClusters));
  std::vector<RankedEvent> ranked;
  try {
    ranked = rank_events(build_event_table(clusters, segments), docs, {cfg.weights, cfg.idf, docs.size()});
  } catch (const EmptyCorpus& e) {
    log << "warning: " << e.what() << "\n";
  }
  detail::write_file(cfg.out_dir / artifact::kRanking, format_ranking(ranked));
  write_manifest(cfg);
}

inline void stage_eval(const PipelineConfig& cfg, const std::optional<std::filesystem::path>& point_csv = {}) {
  const auto clusters = parse_clusters(detail::read_artifact(cfg.out_dir, artifact::kClusters));
  const auto rows = evaluate_clusters(clusters);
  detail::write_file(cfg.out_dir / artifact::kEvalReport, format_eval_report(rows));
  if (point_csv) detail::write_file(*point_csv, format_point_csv(rows));
  write_manifest(cfg);
}

/// All stages in order. Returns the process exit code; diagnostics go to `log`.
inline int run_pipeline(const PipelineConfig& cfg, std::ostream& log) {
  try {
    stage_segment(cfg);
    stage_cluster(cfg);
    stage_index(cfg, log);
    stage_rank(cfg, log);
    stage_eval(cfg);
    return exit_code::kOk;
  } catch (const PipelineError& e) {
    log << e.what() << (std::string_view(e.what()).ends_with('\n') ? "" : "\n");
    return e.code();
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return exit_code::kFailure;
  }
}

}  // namespace ctxev
