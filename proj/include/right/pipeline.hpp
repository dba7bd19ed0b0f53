#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "right/config.hpp"
#include "right/corpus.hpp"
#include "right/generator.hpp"
#include "right/metrics.hpp"
#include "right/retrieval_cache.hpp"
#include "right/retriever.hpp"
#include "right/selector.hpp"

namespace right::pipeline {

// Everything the pipeline saw and decided for one tweet.
struct TraceRecord {
  std::string id;
  std::string tweet;
  std::vector<std::string> gold;
  std::vector<retriever::RetrievalHit> retrieved;
  std::vector<selector::CandidateHashtag> candidates;  // ranked when the selector ran
  std::vector<std::string> selected;                   // hashtags handed to the generator
  std::optional<generator::GeneratorExchange> exchange;
  std::vector<std::string> prediction;
};

struct RunReport {
  nlohmann::ordered_json config_echo;
  metrics::EvalReport eval;
  std::vector<TraceRecord> traces;
  std::vector<std::string> warnings;
  CacheStats cache;  // this run only; informational, not serialized
};

// Injection points; anything left null is built from the config.
struct PipelineComponents {
  std::shared_ptr<const generator::GeneratorBackend> backend;
  std::shared_ptr<const selector::SimilarityProvider> scorer;
  std::shared_ptr<const retriever::EmbeddingProvider> embedder;
  std::shared_ptr<RetrievalCache> cache;
};

// Retrieve -> select -> generate over a training corpus, plus the baseline
// and ablation variants. The training corpus must outlive the pipeline.
class Pipeline {
 public:
  Pipeline(const corpus::Corpus& train, PipelineConfig config, PipelineComponents components = {});

  // Full trace for one tweet. Backend failures are rethrown as BackendError
  // naming the tweet id.
  TraceRecord recommend_traced(const std::string& id, const std::string& tweet) const;
  std::vector<std::string> recommend(const std::string& tweet) const;

  // Retrieval-only baseline: hashtags ordered by the score of the hit that
  // first carried them, restricted to the training pool.
  std::vector<std::string> run_baseline_retrieval(const std::string& tweet) const;

  // Retrieval with the cache in front; raw scores, no normalization.
  std::vector<retriever::RetrievalHit> retrieve(const std::string& tweet) const;

  RunReport run_experiment(const corpus::Corpus& test) const;

  // One report per k; all share this pipeline's retriever and cache.
  std::vector<RunReport> sweep_k(const corpus::Corpus& test, const std::vector<std::size_t>& ks) const;

  // A pipeline over the same components with selector.top_k replaced.
  Pipeline with_top_k(std::size_t k) const;

  const PipelineConfig& config() const { return config_; }
  const retriever::Retriever& retriever() const { return *retriever_; }
  const RetrievalCache& cache() const { return *cache_; }
  RetrievalCache& cache() { return *cache_; }
  const std::vector<corpus::PoolEntry>& pool() const { return *pool_; }
  const generator::GeneratorBackend& backend() const { return *backend_; }

 private:
  Pipeline(const Pipeline& other, PipelineConfig config);

  std::vector<std::string> draw_random_hashtags(const std::string& id, std::size_t k) const;
  generator::GeneratorExchange run_generator(const std::string& tweet, const std::vector<std::string>& selected) const;

  const corpus::Corpus* train_;
  PipelineConfig config_;
  std::shared_ptr<const retriever::Retriever> retriever_;
  std::shared_ptr<const generator::GeneratorBackend> backend_;
  std::shared_ptr<const selector::SimilarityProvider> scorer_;
  std::shared_ptr<RetrievalCache> cache_;
  std::shared_ptr<const std::vector<corpus::PoolEntry>> pool_;
  std::string retriever_digest_;
};

nlohmann::ordered_json trace_to_json(const TraceRecord& trace);
// Report document: notes, config echo, warnings, summary, per-record metrics
// and traces. Contains nothing run-dependent beyond the inputs.
void write_run_report(const RunReport& report, std::ostream& out);
// Line-delimited {"id","hashtags"} predictions.
void write_predictions(const RunReport& report, std::ostream& out);

struct Prediction {
  std::string id;
  std::vector<std::string> hashtags;
};
std::vector<Prediction> read_predictions(std::istream& in, std::string_view source_name = "<stream>");

// Predictions matched to gold pairs by id, scored with evaluate_dataset.
metrics::EvalReport evaluate_predictions(const std::vector<Prediction>& predictions, const corpus::Corpus& gold,
                                         const std::vector<std::size_t>& ks);

// Per-k summary rows (k, ROUGE-1/2/L, F1@K...) for plotting.
void write_sweep_table(const std::vector<std::size_t>& ks, const std::vector<RunReport>& reports, std::ostream& out);

}  // namespace right::pipeline
