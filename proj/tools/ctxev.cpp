// ctxev: build and query event indices over a directory of UNL documents.

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctxev/ctxev.hpp"

namespace fs = std::filesystem;
using namespace ctxev;

namespace {

struct CommonFlags {
  std::string threshold = "0.8";
  std::string weights = "1,1,3";
  bool idf = false;
  bool loose_features = false;
  bool keep_singletons = false;
  bool verbatim_fig2 = false;
  std::string corpus;
  std::string out = "out";
};

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_corpus) {
  if (needs_corpus) cmd->add_option("corpus", f.corpus, "directory of UNL document files")->required();
  cmd->add_option("--out", f.out, "output directory")->capture_default_str();
  cmd->add_option("--threshold", f.threshold, "similarity threshold S must exceed")->capture_default_str();
  cmd->add_option("--weights", f.weights, "ranking weights df,tf,title")->capture_default_str();
  cmd->add_flag("--idf", f.idf, "use df*ln(N/doc_count) for the spread term");
  cmd->add_flag("--loose-features", f.loose_features, "count place/person/duration without a head match");
  cmd->add_flag("--keep-singletons", f.keep_singletons, "emit unmatched segments as singleton clusters");
  cmd->add_flag("--verbatim-fig2", f.verbatim_fig2, "reproduce the original match-log spelling");
}

RankWeights parse_weights(const std::string& s) {
  std::vector<double> w;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != part.size()) throw std::invalid_argument("bad weight '" + part + "'");
    w.push_back(v);
  }
  if (w.size() != 3) throw std::invalid_argument("--weights takes exactly three values df,tf,title");
  RankWeights out{w[0], w[1], w[2]};
  if (!(out.df > 0 && out.tf > 0 && out.title > 0)) throw std::invalid_argument("weights must be positive");
  return out;
}

PipelineConfig make_config(const CommonFlags& f) {
  PipelineConfig cfg;
  cfg.corpus_dir = f.corpus;
  cfg.out_dir = f.out;
  cfg.threshold = Threshold::parse(f.threshold);
  cfg.weights = parse_weights(f.weights);
  cfg.idf = f.idf;
  cfg.loose_features = f.loose_features;
  cfg.keep_singletons = f.keep_singletons;
  cfg.verbatim_fig2 = f.verbatim_fig2;
  return cfg;
}

template <class Entry>
int print_query(const Index<Entry>& index, const std::string& key) {
  try {
    const auto rows = query(index, key);
    std::cout << to_tsv<Entry>(rows);
    return exit_code::kOk;
  } catch (const QueryError&) {
    std::cout << "no entries\n";
    return exit_code::kNoEntries;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Context-based event indexing over UNL documents"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto* run = app.add_subcommand("run", "run every stage over a corpus");
  add_common(run, flags, true);
  auto* segment = app.add_subcommand("segment", "parse and segment a corpus");
  add_common(segment, flags, true);
  auto* cluster = app.add_subcommand("cluster", "cluster segments and write the match log");
  add_common(cluster, flags, false);
  auto* index = app.add_subcommand("index", "build person/place/event indices");
  add_common(index, flags, false);
  auto* rank = app.add_subcommand("rank", "rank main events");
  add_common(rank, flags, false);

  auto* eval = app.add_subcommand("eval", "silhouette report over the clusters");
  add_common(eval, flags, false);
  bool table1 = false;
  std::string fig8;
  eval->add_flag("--table1", table1, "print the reference-table consistency check and exit");
  eval->add_option("--fig8", fig8, "also write a point,coefficient CSV here");

  auto* q = app.add_subcommand("query", "look up an index");
  std::string kind, key, qdir = "out";
  q->add_option("kind", kind, "person | place | event")->required()->check(CLI::IsMember({"person", "place", "event"}));
  q->add_option("key", key, "lookup key")->required();
  q->add_option("--out", qdir, "directory holding the index files")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*q) {
      const IndexSet set = load_indices(qdir);
      if (kind == "person") return print_query(set.person, key);
      if (kind == "place") return print_query(set.place, key);
      return print_query(set.event, key);
    }
    if (*eval && table1) {
      const auto rows = reference_table_check();
      std::cout << format_reference_check(rows);
      return exit_code::kOk;
    }

    const PipelineConfig cfg = make_config(flags);
    if (*run) return run_pipeline(cfg, std::cerr);
    if (*segment) stage_segment(cfg);
    if (*cluster) stage_cluster(cfg);
    if (*index) stage_index(cfg, std::cerr);
    if (*rank) stage_rank(cfg, std::cerr);
    if (*eval) stage_eval(cfg, fig8.empty() ? std::nullopt : std::optional<fs::path>(fig8));
    return exit_code::kOk;
  } catch (const PipelineError& e) {
    std::cerr << e.what() << (std::string_view(e.what()).ends_with('\n') ? "" : "\n");
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::kFailure;
  }
}
