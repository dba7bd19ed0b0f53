#include "right/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "right/errors.hpp"
#include "right/parallel.hpp"
#include "right/text.hpp"

namespace right::pipeline {

using nlohmann::json;
using nlohmann::ordered_json;

Pipeline::Pipeline(const corpus::Corpus& train, PipelineConfig config, PipelineComponents components)
    : train_(&train), config_(std::move(config)) {
  config_.validate();
  if (train.empty()) throw DataError("pipeline: empty training corpus");
  if (train.language_mode() != config_.language_mode) {
    throw ConfigError("training corpus language mode does not match config.language_mode");
  }
  auto embedder = components.embedder ? components.embedder
                                      : retriever::make_embedding_provider(train, config_.retriever);
  retriever_ = std::make_shared<retriever::Retriever>(train, config_.retriever, embedder);
  scorer_ = components.scorer ? components.scorer : std::make_shared<selector::EmbeddingCosineScorer>(embedder);
  backend_ = components.backend ? components.backend
                                : std::shared_ptr<const generator::GeneratorBackend>(make_backend(config_.generator));
  cache_ = components.cache ? components.cache : std::make_shared<RetrievalCache>(config_.cache_dir);
  cache_->set_corpus_size(train.digest(), train.size());
  pool_ = std::make_shared<const std::vector<corpus::PoolEntry>>(corpus::hashtag_pool(train));
  retriever_digest_ = retriever_config_digest(config_.retriever, config_.language_mode);
}

Pipeline::Pipeline(const Pipeline& other, PipelineConfig config)
    : train_(other.train_),
      config_(std::move(config)),
      retriever_(other.retriever_),
      backend_(other.backend_),
      scorer_(other.scorer_),
      cache_(other.cache_),
      pool_(other.pool_),
      retriever_digest_(other.retriever_digest_) {
  config_.validate();
  if (!(config_.retriever == other.config_.retriever)) {
    throw ConfigError("derived pipeline cannot change the retriever config");
  }
}

Pipeline Pipeline::with_top_k(std::size_t k) const {
  PipelineConfig c = config_;
  c.selector.top_k = k;
  return Pipeline(*this, std::move(c));
}

std::vector<retriever::RetrievalHit> Pipeline::retrieve(const std::string& tweet) const {
  const auto& corpus = *train_;
  if (auto cached = cache_->get(corpus.digest(), retriever_digest_, tweet)) {
    std::vector<retriever::RetrievalHit> hits;
    hits.reserve(cached->size());
    for (const auto& c : *cached) hits.push_back({&corpus[c.ordinal], c.ordinal, c.raw_score, 0.0});
    return hits;
  }
  auto hits = retriever_->retrieve(tweet);
  std::vector<CachedHit> entry;
  entry.reserve(hits.size());
  for (const auto& h : hits) entry.push_back({h.ordinal, h.raw_score});
  cache_->put(corpus.digest(), retriever_digest_, tweet, entry);
  return hits;
}

std::vector<std::string> Pipeline::draw_random_hashtags(const std::string& key, std::size_t k) const {
  // Partial Fisher-Yates: a draw without replacement, seeded per tweet so the
  // result does not depend on which worker handles it.
  text::Rng rng(text::derive_seed(config_.rng_seed, key));
  std::vector<std::size_t> idx(pool_->size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const std::size_t n = std::min(k, idx.size());
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.index(idx.size() - i);
    std::swap(idx[i], idx[j]);
    out.push_back((*pool_)[idx[i]].hashtag);
  }
  return out;
}

generator::GeneratorExchange Pipeline::run_generator(const std::string& tweet,
                                                     const std::vector<std::string>& selected) const {
  generator::GeneratorExchange ex;
  if (config_.generator.backend == generator::BackendKind::kChatApi) {
    std::optional<std::vector<std::string>> retrieved;
    if (config_.generator.prompt_variant == generator::PromptVariant::kRetrievalAugmented) retrieved = selected;
    ex.input_sequence = generator::render_chat_prompt(tweet, retrieved, config_.generator);
  } else {
    ex.input_sequence = generator::render_input(tweet, selected, config_.generator);
  }
  ex.output_sequence = backend_->generate(ex.input_sequence);
  ex.parsed_hashtags = generator::parse_output(ex.output_sequence, config_.generator, config_.language_mode);
  return ex;
}

std::vector<std::string> Pipeline::run_baseline_retrieval(const std::string& tweet) const {
  auto hits = retrieve(tweet);
  std::unordered_set<std::string> in_pool;
  for (const auto& e : *pool_) in_pool.insert(e.hashtag);
  // Hits arrive sorted by score with corpus-order ties, so the first
  // occurrence of a tag is also its best-scoring source.
  std::vector<std::string> out;
  for (const auto& hit : hits) {
    for (const auto& raw : hit.pair->hashtags) {
      if (out.size() >= config_.baseline_k) return out;
      std::string tag = corpus::normalize_hashtag(raw, config_.language_mode);
      if (!in_pool.count(tag) || std::find(out.begin(), out.end(), tag) != out.end()) continue;
      out.push_back(std::move(tag));
    }
  }
  return out;
}

TraceRecord Pipeline::recommend_traced(const std::string& id, const std::string& tweet) const {
  TraceRecord trace;
  trace.id = id;
  trace.tweet = tweet;
  const auto mode = config_.language_mode;
  const std::size_t k = config_.selector.top_k;
  try {
    if (config_.baseline == Baseline::kRetrievalTopK) {
      trace.retrieved = retrieve(tweet);
      retriever::normalize_hit_scores(trace.retrieved);
      trace.prediction = run_baseline_retrieval(tweet);
      return trace;
    }
    switch (config_.ablation) {
      case Ablation::kNone: {
        trace.retrieved = retrieve(tweet);
        retriever::normalize_hit_scores(trace.retrieved);
        trace.candidates =
            selector::rank_candidates(tweet, selector::aggregate_candidates(trace.retrieved, mode), *scorer_);
        trace.selected = selector::select_top_k(trace.candidates, k);
        break;
      }
      case Ablation::kNoRetriever:
        trace.selected = draw_random_hashtags(id.empty() ? tweet : id, k);
        break;
      case Ablation::kNoSelector: {
        trace.retrieved = retrieve(tweet);
        retriever::normalize_hit_scores(trace.retrieved);
        // Aggregation order is first appearance in hit order, i.e. the
        // retrieval ranking of each tag's best source.
        trace.candidates = selector::aggregate_candidates(trace.retrieved, mode);
        for (std::size_t i = 0; i < trace.candidates.size() && i < k; ++i) {
          trace.selected.push_back(trace.candidates[i].text);
        }
        break;
      }
      case Ablation::kNoGenerator: {
        trace.retrieved = retrieve(tweet);
        retriever::normalize_hit_scores(trace.retrieved);
        trace.candidates =
            selector::rank_candidates(tweet, selector::aggregate_candidates(trace.retrieved, mode), *scorer_);
        trace.selected = selector::select_top_k(trace.candidates, kNoGeneratorOutputCount);
        trace.prediction = trace.selected;
        return trace;
      }
    }
    trace.exchange = run_generator(tweet, trace.selected);
    trace.prediction = trace.exchange->parsed_hashtags;
  } catch (const BackendError& e) {
    throw BackendError("tweet '" + id + "': " + e.what());
  }
  return trace;
}

std::vector<std::string> Pipeline::recommend(const std::string& tweet) const {
  return recommend_traced("", tweet).prediction;
}

RunReport Pipeline::run_experiment(const corpus::Corpus& test) const {
  if (test.empty()) throw DataError("run_experiment: empty test set");
  if (test.language_mode() != config_.language_mode) {
    throw ConfigError("test corpus language mode does not match config.language_mode");
  }
  const CacheStats before = cache_->stats();

  RunReport report;
  report.config_echo = to_json(config_);
  report.traces.resize(test.size());
  std::size_t workers = config_.workers ? config_.workers : default_worker_count();
  if (config_.generator.backend == generator::BackendKind::kChatApi) {
    workers = std::min(workers, config_.generator.chat_max_in_flight);
  }
  parallel_for(test.size(), workers, [&](std::size_t i) {
    const auto& pair = test[i];
    auto trace = recommend_traced(pair.id, pair.text);
    trace.gold = pair.hashtags;
    report.traces[i] = std::move(trace);
  });

  std::vector<metrics::EvalItem> items;
  items.reserve(test.size());
  for (const auto& t : report.traces) items.push_back({t.id, t.prediction, t.gold});
  report.eval = metrics::evaluate_dataset(items, config_.eval_ks, config_.language_mode);

  const CacheStats after = cache_->stats();
  report.cache = {after.hits - before.hits, after.misses - before.misses};
  report.warnings = cache_->warnings();
  return report;
}

std::vector<RunReport> Pipeline::sweep_k(const corpus::Corpus& test, const std::vector<std::size_t>& ks) const {
  if (ks.empty()) throw ConfigError("sweep_k: no k values");
  std::vector<RunReport> reports;
  reports.reserve(ks.size());
  for (std::size_t k : ks) reports.push_back(with_top_k(k).run_experiment(test));
  return reports;
}

// ---------------------------------------------------------------------------
// Serialization

ordered_json trace_to_json(const TraceRecord& t) {
  ordered_json retrieved = ordered_json::array();
  for (const auto& h : t.retrieved) {
    retrieved.push_back({{"id", h.pair->id},
                         {"ordinal", h.ordinal},
                         {"raw_score", h.raw_score},
                         {"normalized_score", h.normalized_score},
                         {"hashtags", h.pair->hashtags}});
  }
  ordered_json candidates = ordered_json::array();
  for (const auto& c : t.candidates) {
    candidates.push_back({{"text", c.text},
                          {"frequency", c.frequency},
                          {"tweet_scores", c.tweet_scores},
                          {"hashtag_score", c.hashtag_score},
                          {"final_score", c.final_score}});
  }
  ordered_json j = {{"id", t.id},
                    {"tweet", t.tweet},
                    {"gold", t.gold},
                    {"retrieved", std::move(retrieved)},
                    {"candidates", std::move(candidates)},
                    {"selected", t.selected}};
  if (t.exchange) {
    j["exchange"] = {{"input", t.exchange->input_sequence},
                     {"output", t.exchange->output_sequence},
                     {"parsed", t.exchange->parsed_hashtags}};
  } else {
    j["exchange"] = nullptr;
  }
  j["prediction"] = t.prediction;
  return j;
}

void write_run_report(const RunReport& report, std::ostream& out) {
  ordered_json records = ordered_json::array();
  for (std::size_t i = 0; i < report.traces.size(); ++i) {
    ordered_json row = metrics::record_to_json(report.eval.records.at(i));
    row["trace"] = trace_to_json(report.traces[i]);
    records.push_back(std::move(row));
  }
  ordered_json doc = {
      {"notes", {"F1@K takes predictions in generation order as the ranking"}},
      {"config", report.config_echo},
      {"warnings", report.warnings},
      {"summary", metrics::summary_to_json(report.eval)},
      {"records", std::move(records)},
  };
  out << doc.dump(2) << '\n';
}

void write_predictions(const RunReport& report, std::ostream& out) {
  for (const auto& t : report.traces) out << json{{"id", t.id}, {"hashtags", t.prediction}}.dump() << '\n';
}

std::vector<Prediction> read_predictions(std::istream& in, std::string_view source_name) {
  std::vector<Prediction> out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const std::string where = std::string(source_name) + ":" + std::to_string(line_no);
    Prediction p;
    try {
      const auto rec = json::parse(line);
      p.id = rec.at("id").is_string() ? rec.at("id").get<std::string>() : rec.at("id").dump();
      p.hashtags = rec.at("hashtags").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw DataError(where + ": malformed prediction: " + e.what());
    }
    if (!seen.insert(p.id).second) throw DataError(where + ": duplicate id '" + p.id + "'");
    out.push_back(std::move(p));
  }
  return out;
}

metrics::EvalReport evaluate_predictions(const std::vector<Prediction>& predictions, const corpus::Corpus& gold,
                                         const std::vector<std::size_t>& ks) {
  std::unordered_map<std::string, const Prediction*> by_id;
  for (const auto& p : predictions) by_id[p.id] = &p;
  if (by_id.size() != gold.size()) {
    throw DataError("eval: " + std::to_string(by_id.size()) + " predictions for " + std::to_string(gold.size()) +
                    " gold records");
  }
  std::vector<metrics::EvalItem> items;
  items.reserve(gold.size());
  for (const auto& g : gold.pairs()) {
    auto it = by_id.find(g.id);
    if (it == by_id.end()) throw DataError("eval: no prediction for id '" + g.id + "'");
    items.push_back({g.id, it->second->hashtags, g.hashtags});
  }
  return metrics::evaluate_dataset(items, ks, gold.language_mode());
}

void write_sweep_table(const std::vector<std::size_t>& ks, const std::vector<RunReport>& reports, std::ostream& out) {
  char buf[64];
  out << "    k  ROUGE-1  ROUGE-2  ROUGE-L";
  if (!reports.empty()) {
    for (const auto& [k, v] : reports.front().eval.mean_f1_at) {
      std::snprintf(buf, sizeof(buf), "  %7s", ("F1@" + std::to_string(k)).c_str());
      out << buf;
    }
  }
  out << '\n';
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& e = reports[i].eval;
    std::snprintf(buf, sizeof(buf), "%5zu  %7.2f  %7.2f  %7.2f", ks.at(i), 100.0 * e.mean_rouge1,
                  100.0 * e.mean_rouge2, 100.0 * e.mean_rougeL);
    out << buf;
    for (const auto& [k, v] : e.mean_f1_at) {
      std::snprintf(buf, sizeof(buf), "  %7.2f", 100.0 * v);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace right::pipeline
