#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "right/corpus.hpp"
#include "right/generator.hpp"
#include "right/retriever_config.hpp"
#include "right/selector.hpp"

namespace right::pipeline {

enum class Ablation { kNone, kNoRetriever, kNoSelector, kNoGenerator };
enum class Baseline { kNone, kRetrievalTopK };

std::string_view to_string(Ablation a);
Ablation ablation_from_string(std::string_view s);
std::string_view to_string(Baseline b);
Baseline baseline_from_string(std::string_view s);

// The no-generator ablation always emits this many ranked candidates.
inline constexpr std::size_t kNoGeneratorOutputCount = 4;

struct PipelineConfig {
  retriever::RetrieverConfig retriever;
  selector::SelectorConfig selector;
  generator::GeneratorConfig generator;
  Ablation ablation = Ablation::kNone;
  Baseline baseline = Baseline::kNone;
  std::size_t baseline_k = 4;  // 4 for English data, 1 for single-tag data
  std::vector<std::size_t> eval_ks{1, 5};
  std::string cache_dir;  // empty: in-memory cache only
  std::uint64_t rng_seed = 0;
  corpus::LanguageMode language_mode = corpus::LanguageMode::kSpaceDelimited;
  std::size_t workers = 0;  // 0: hardware concurrency; never affects results

  void validate() const;

  bool operator==(const PipelineConfig&) const = default;
};

// Full config echo. from_json(to_json(c)) == c for valid configs. from_json
// validates the result, and unknown keys are
// rejected so typos cannot silently fall back to defaults.
nlohmann::ordered_json to_json(const PipelineConfig& config);
PipelineConfig from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& path);

// Digest of the fields that determine retrieval results.
std::string retriever_config_digest(const retriever::RetrieverConfig& config, corpus::LanguageMode mode);

}  // namespace right::pipeline
