#include "right/config.hpp"

#include <fstream>
#include <set>

#include "right/errors.hpp"
#include "right/text.hpp"

namespace right::pipeline {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Ablation a) {
  switch (a) {
    case Ablation::kNone:
      return "none";
    case Ablation::kNoRetriever:
      return "no-retriever";
    case Ablation::kNoSelector:
      return "no-selector";
    case Ablation::kNoGenerator:
      return "no-generator";
  }
  return "unknown";
}

Ablation ablation_from_string(std::string_view s) {
  if (s == "none") return Ablation::kNone;
  if (s == "no-retriever") return Ablation::kNoRetriever;
  if (s == "no-selector") return Ablation::kNoSelector;
  if (s == "no-generator") return Ablation::kNoGenerator;
  throw ConfigError("unknown ablation '" + std::string(s) + "' (expected none|no-retriever|no-selector|no-generator)");
}

std::string_view to_string(Baseline b) { return b == Baseline::kNone ? "none" : "retrieval-topk"; }

Baseline baseline_from_string(std::string_view s) {
  if (s == "none") return Baseline::kNone;
  if (s == "retrieval-topk") return Baseline::kRetrievalTopK;
  throw ConfigError("unknown baseline '" + std::string(s) + "' (expected none|retrieval-topk)");
}

void PipelineConfig::validate() const {
  retriever.validate();
  selector.validate();
  generator.validate();
  if (ablation != Ablation::kNone && baseline != Baseline::kNone) {
    throw ConfigError("ablation and baseline cannot both be set in one run");
  }
  if (baseline_k < 1) throw ConfigError("baseline_k must be >= 1");
  if (eval_ks.empty()) throw ConfigError("eval_ks must not be empty");
  for (std::size_t k : eval_ks) {
    if (k < 1) throw ConfigError("eval_ks values must be >= 1");
  }
  if (selector.top_k > generator.max_hashtags_in) {
    throw ConfigError("selector.top_k (" + std::to_string(selector.top_k) + ") exceeds generator.max_hashtags_in (" +
                      std::to_string(generator.max_hashtags_in) + ")");
  }
}

ordered_json to_json(const PipelineConfig& c) {
  ordered_json j;
  j["retriever"] = {{"top_n", c.retriever.top_n},
                    {"backend", retriever::to_string(c.retriever.backend)},
                    {"bm25_k1", c.retriever.bm25_k1},
                    {"bm25_b", c.retriever.bm25_b},
                    {"embed_dim", c.retriever.embed_dim},
                    {"embedding_endpoint", c.retriever.embedding_endpoint}};
  j["selector"] = {{"top_k", c.selector.top_k},
                   {"temperature", c.selector.temperature},
                   {"perturbation_probs", c.selector.perturbation_probs},
                   {"rng_seed", c.selector.rng_seed}};
  j["generator"] = {{"sep1", c.generator.sep1},
                    {"sep2", c.generator.sep2},
                    {"backend", generator::to_string(c.generator.backend)},
                    {"max_hashtags_in", c.generator.max_hashtags_in},
                    {"chat_model_name", c.generator.chat_model_name},
                    {"chat_endpoint", c.generator.chat_endpoint},
                    {"prompt_variant", generator::to_string(c.generator.prompt_variant)},
                    {"chat_temperature", c.generator.chat_temperature},
                    {"chat_max_retries", c.generator.chat_max_retries},
                    {"chat_backoff_initial_ms", c.generator.chat_backoff_initial_ms},
                    {"chat_max_in_flight", c.generator.chat_max_in_flight},
                    {"mock_responses", c.generator.mock_responses}};
  j["ablation"] = to_string(c.ablation);
  j["baseline"] = to_string(c.baseline);
  j["baseline_k"] = c.baseline_k;
  j["eval_ks"] = c.eval_ks;
  j["cache_dir"] = c.cache_dir;
  j["rng_seed"] = c.rng_seed;
  j["language_mode"] = corpus::to_string(c.language_mode);
  j["workers"] = c.workers;
  return j;
}

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, std::string_view where) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  std::set<std::string_view> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

PipelineConfig from_json(const json& j) {
  PipelineConfig c;
  try {
    reject_unknown(j,
                   {"retriever", "selector", "generator", "ablation", "baseline", "baseline_k", "eval_ks", "cache_dir",
                    "rng_seed", "language_mode", "workers"},
                   "config");
    if (j.contains("retriever")) {
      const auto& r = j.at("retriever");
      reject_unknown(r, {"top_n", "backend", "bm25_k1", "bm25_b", "embed_dim", "embedding_endpoint"}, "retriever");
      read(r, "top_n", c.retriever.top_n);
      if (r.contains("backend")) c.retriever.backend = retriever::backend_from_string(r.at("backend").get<std::string>());
      read(r, "bm25_k1", c.retriever.bm25_k1);
      read(r, "bm25_b", c.retriever.bm25_b);
      read(r, "embed_dim", c.retriever.embed_dim);
      read(r, "embedding_endpoint", c.retriever.embedding_endpoint);
    }
    if (j.contains("selector")) {
      const auto& s = j.at("selector");
      reject_unknown(s, {"top_k", "temperature", "perturbation_probs", "rng_seed"}, "selector");
      read(s, "top_k", c.selector.top_k);
      read(s, "temperature", c.selector.temperature);
      read(s, "perturbation_probs", c.selector.perturbation_probs);
      read(s, "rng_seed", c.selector.rng_seed);
    }
    if (j.contains("generator")) {
      const auto& g = j.at("generator");
      reject_unknown(g,
                     {"sep1", "sep2", "backend", "max_hashtags_in", "chat_model_name", "chat_endpoint",
                      "prompt_variant", "chat_temperature", "chat_max_retries", "chat_backoff_initial_ms",
                      "chat_max_in_flight", "mock_responses"},
                     "generator");
      read(g, "sep1", c.generator.sep1);
      read(g, "sep2", c.generator.sep2);
      if (g.contains("backend")) {
        c.generator.backend = generator::backend_kind_from_string(g.at("backend").get<std::string>());
      }
      read(g, "max_hashtags_in", c.generator.max_hashtags_in);
      read(g, "chat_model_name", c.generator.chat_model_name);
      read(g, "chat_endpoint", c.generator.chat_endpoint);
      if (g.contains("prompt_variant")) {
        c.generator.prompt_variant = generator::prompt_variant_from_string(g.at("prompt_variant").get<std::string>());
      }
      read(g, "chat_temperature", c.generator.chat_temperature);
      read(g, "chat_max_retries", c.generator.chat_max_retries);
      read(g, "chat_backoff_initial_ms", c.generator.chat_backoff_initial_ms);
      read(g, "chat_max_in_flight", c.generator.chat_max_in_flight);
      read(g, "mock_responses", c.generator.mock_responses);
    }
    if (j.contains("ablation")) c.ablation = ablation_from_string(j.at("ablation").get<std::string>());
    if (j.contains("baseline")) c.baseline = baseline_from_string(j.at("baseline").get<std::string>());
    read(j, "baseline_k", c.baseline_k);
    read(j, "eval_ks", c.eval_ks);
    read(j, "cache_dir", c.cache_dir);
    read(j, "rng_seed", c.rng_seed);
    if (j.contains("language_mode")) {
      c.language_mode = corpus::language_mode_from_string(j.at("language_mode").get<std::string>());
    }
    read(j, "workers", c.workers);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

std::string retriever_config_digest(const retriever::RetrieverConfig& c, corpus::LanguageMode mode) {
  const ordered_json j = {{"top_n", c.top_n},
                          {"backend", retriever::to_string(c.backend)},
                          {"bm25_k1", c.bm25_k1},
                          {"bm25_b", c.bm25_b},
                          {"embed_dim", c.embed_dim},
                          {"embedding_endpoint", c.embedding_endpoint},
                          {"language_mode", corpus::to_string(mode)}};
  return text::digest(j.dump());
}

}  // namespace right::pipeline
