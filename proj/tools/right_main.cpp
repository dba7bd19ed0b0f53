// right: batch front end for the hashtag recommendation pipeline.
//
//   right [--config FILE] [--seed N] [--ablation MODE] [--backend KIND] <command> ...
//
// Exit status: 0 ok, 1 usage/config, 2 data, 3 backend.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "right/config.hpp"
#include "right/corpus.hpp"
#include "right/errors.hpp"
#include "right/hard_negatives.hpp"
#include "right/metrics.hpp"
#include "right/pipeline.hpp"
#include "right/retriever.hpp"

namespace fs = std::filesystem;
using namespace right;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string ablation;
  std::string backend;
  std::string retriever;
  std::string language;
  std::string cache_dir;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> top_k;
  std::optional<std::size_t> top_n;
};

pipeline::PipelineConfig resolve_config(const GlobalOptions& g) {
  pipeline::PipelineConfig c = g.config_path.empty() ? pipeline::PipelineConfig{} : pipeline::load_config(g.config_path);
  if (g.seed) {
    c.rng_seed = *g.seed;
    c.selector.rng_seed = *g.seed;
  }
  if (!g.ablation.empty()) c.ablation = pipeline::ablation_from_string(g.ablation);
  if (!g.backend.empty()) c.generator.backend = generator::backend_kind_from_string(g.backend);
  if (!g.retriever.empty()) c.retriever.backend = retriever::backend_from_string(g.retriever);
  if (!g.language.empty()) c.language_mode = corpus::language_mode_from_string(g.language);
  if (!g.cache_dir.empty()) c.cache_dir = g.cache_dir;
  if (g.workers) c.workers = *g.workers;
  if (g.top_k) c.selector.top_k = *g.top_k;
  if (g.top_n) c.retriever.top_n = *g.top_n;
  c.validate();
  return c;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void write_run_outputs(const pipeline::RunReport& report, const fs::path& dir) {
  fs::create_directories(dir);
  {
    auto out = open_out(dir / "predictions.jsonl");
    pipeline::write_predictions(report, out);
  }
  {
    auto out = open_out(dir / "report.json");
    pipeline::write_run_report(report, out);
  }
  {
    auto out = open_out(dir / "report.txt");
    metrics::write_report_table(report.eval, out);
  }
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  std::cerr << "retrieval cache: " << report.cache.hits << " hits, " << report.cache.misses << " misses\n";
}

nlohmann::ordered_json hit_json(const retriever::RetrievalHit& h) {
  return {{"id", h.pair->id},
          {"ordinal", h.ordinal},
          {"raw_score", h.raw_score},
          {"normalized_score", h.normalized_score},
          {"text", h.pair->text},
          {"hashtags", h.pair->hashtags}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Retrieve, select and generate hashtags for tweets."};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "RNG seed for the pipeline and perturbations");
  app.add_option("--ablation", g.ablation, "none|no-retriever|no-selector|no-generator");
  app.add_option("--backend", g.backend, "generator backend: mock|copy|chat-api");
  app.add_option("--retriever", g.retriever, "retriever backend: sparse|dense");
  app.add_option("--language", g.language, "corpus language mode: space|char");
  app.add_option("--cache-dir", g.cache_dir, "directory for the retrieval cache");
  app.add_option("--workers", g.workers, "worker threads (0 = hardware concurrency)");
  app.add_option("--top-k", g.top_k, "hashtags handed to the generator");
  app.add_option("--top-n", g.top_n, "retrieved tweets per query");

  std::string train_path, test_path, out_path, tweet, index_path, lexicon_path, predictions_path, baseline;
  std::vector<std::size_t> ks;
  bool as_json = false;

  auto* index_cmd = app.add_subcommand("index", "build and persist the retrieval index");
  index_cmd->add_option("--train", train_path, "training corpus")->required()->check(CLI::ExistingFile);
  index_cmd->add_option("--out", out_path, "snapshot path")->required();

  auto* stats_cmd = app.add_subcommand("stats", "corpus statistics");
  stats_cmd->add_option("corpus", train_path, "corpus file")->required()->check(CLI::ExistingFile);

  auto* retrieve_cmd = app.add_subcommand("retrieve", "top-N similar training tweets for one tweet");
  retrieve_cmd->add_option("--train", train_path, "training corpus")->required()->check(CLI::ExistingFile);
  retrieve_cmd->add_option("--index", index_path, "snapshot written by `index`")->check(CLI::ExistingFile);
  retrieve_cmd->add_option("tweet", tweet, "query tweet")->required();

  auto* recommend_cmd = app.add_subcommand("recommend", "hashtags for one tweet");
  recommend_cmd->add_option("--train", train_path, "training corpus")->required()->check(CLI::ExistingFile);
  recommend_cmd->add_flag("--trace", as_json, "print the full trace as JSON");
  recommend_cmd->add_option("tweet", tweet, "query tweet")->required();

  auto* run_cmd = app.add_subcommand("run", "full experiment over a test corpus");
  auto* sweep_cmd = app.add_subcommand("sweep", "experiment repeated for several k");
  for (auto* cmd : {run_cmd, sweep_cmd}) {
    cmd->add_option("--train", train_path, "training corpus")->required()->check(CLI::ExistingFile);
    cmd->add_option("--test", test_path, "test corpus")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out-dir", out_path, "output directory")->required();
  }
  run_cmd->add_option("--baseline", baseline, "retrieval-topk");
  sweep_cmd->add_option("--ks", ks, "k values")->delimiter(',')->default_str("1,3,5,7,9");

  auto* triples_cmd = app.add_subcommand("triples", "export hard-negative training triples");
  triples_cmd->add_option("--train", train_path, "training corpus")->required()->check(CLI::ExistingFile);
  triples_cmd->add_option("--lexicon", lexicon_path, "synonym lexicon (word<TAB>syn,syn)")
      ->required()
      ->check(CLI::ExistingFile);
  triples_cmd->add_option("--out", out_path, "output JSON-lines file (default stdout)");

  auto* eval_cmd = app.add_subcommand("eval", "score a predictions file against gold");
  eval_cmd->add_option("--predictions", predictions_path, "JSON-lines predictions")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--gold", test_path, "gold corpus")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--ks", ks, "F1@K cutoffs")->delimiter(',');
  eval_cmd->add_flag("--json", as_json, "JSON instead of a table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const auto config = resolve_config(g);
    const auto mode = config.language_mode;

    if (*index_cmd) {
      const auto train = corpus::load_corpus(train_path, mode);
      retriever::Retriever r(train, config.retriever);
      r.save_snapshot(out_path);
      std::cerr << "indexed " << train.size() << " pairs (" << retriever::to_string(config.retriever.backend)
                << ")\n";
    } else if (*stats_cmd) {
      const auto c = corpus::load_corpus(train_path, mode);
      const auto s = corpus::corpus_stats(c);
      nlohmann::ordered_json j = {{"pairs", s.pair_count},
                                  {"avg_hashtags_per_pair", s.avg_hashtags_per_pair},
                                  {"avg_tweet_len_tokens", s.avg_tweet_len_tokens},
                                  {"avg_hashtag_len_tokens", s.avg_hashtag_len_tokens},
                                  {"distinct_hashtags", corpus::hashtag_pool(c).size()}};
      std::cout << j.dump(2) << '\n';
    } else if (*retrieve_cmd) {
      const auto train = corpus::load_corpus(train_path, mode);
      auto r = index_path.empty() ? retriever::Retriever(train, config.retriever)
                                  : retriever::Retriever::load_snapshot(index_path, train, config.retriever);
      auto hits = r.retrieve(tweet);
      retriever::normalize_hit_scores(hits);
      for (const auto& h : hits) std::cout << hit_json(h).dump() << '\n';
    } else if (*recommend_cmd) {
      const auto train = corpus::load_corpus(train_path, mode);
      pipeline::Pipeline p(train, config);
      const auto trace = p.recommend_traced("", tweet);
      if (as_json) {
        std::cout << pipeline::trace_to_json(trace).dump(2) << '\n';
      } else {
        for (const auto& h : trace.prediction) std::cout << h << '\n';
      }
    } else if (*run_cmd) {
      auto c = config;
      if (!baseline.empty()) c.baseline = pipeline::baseline_from_string(baseline);
      c.validate();
      const auto train = corpus::load_corpus(train_path, mode);
      const auto test = corpus::load_corpus(test_path, mode);
      pipeline::Pipeline p(train, c);
      const auto report = p.run_experiment(test);
      write_run_outputs(report, out_path);
      metrics::write_report_table(report.eval, std::cout);
    } else if (*sweep_cmd) {
      if (ks.empty()) ks = {1, 3, 5, 7, 9};
      const auto train = corpus::load_corpus(train_path, mode);
      const auto test = corpus::load_corpus(test_path, mode);
      pipeline::Pipeline p(train, config);
      const auto reports = p.sweep_k(test, ks);
      for (std::size_t i = 0; i < ks.size(); ++i) {
        write_run_outputs(reports[i], fs::path(out_path) / ("k" + std::to_string(ks[i])));
      }
      auto out = open_out(fs::path(out_path) / "sweep.txt");
      pipeline::write_sweep_table(ks, reports, out);
      pipeline::write_sweep_table(ks, reports, std::cout);
    } else if (*triples_cmd) {
      const auto train = corpus::load_corpus(train_path, mode);
      const auto lexicon = selector::SynonymLexicon::load(lexicon_path);
      const auto triples = selector::build_training_triples(train, lexicon, config.selector);
      if (out_path.empty()) {
        selector::write_triples(triples, std::cout);
      } else {
        auto out = open_out(out_path);
        selector::write_triples(triples, out);
      }
      std::cerr << triples.size() << " triples\n";
    } else if (*eval_cmd) {
      if (ks.empty()) ks = config.eval_ks;
      const auto gold = corpus::load_corpus(test_path, mode);
      std::ifstream in(predictions_path, std::ios::binary);
      if (!in) throw DataError("cannot open " + predictions_path);
      const auto preds = pipeline::read_predictions(in, predictions_path);
      const auto report = pipeline::evaluate_predictions(preds, gold, ks);
      if (as_json) {
        metrics::write_report_json(report, std::cout);
      } else {
        metrics::write_report_table(report, std::cout);
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "right: config error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "right: data error: " << e.what() << '\n';
    return 2;
  } catch (const BackendError& e) {
    std::cerr << "right: backend error: " << e.what() << '\n';
    return 3;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "right: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "right: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
