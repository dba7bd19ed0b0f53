#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "right/corpus.hpp"
#include "right/retriever_config.hpp"

namespace right::retriever {

// Unit-norm vector, or all zeros with `zero` set when the text produced no
// features.
struct EmbeddingVector {
  std::vector<double> values;
  bool zero = true;

  std::size_t dim() const { return values.size(); }

  // L2-normalizes `raw`; flags the zero vector instead of dividing by 0.
  static EmbeddingVector from_raw(std::vector<double> raw);
};

// Dot product; for unit vectors this is cosine similarity. Zero vectors
// score 0 against everything.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::size_t dim() const = 0;
  virtual std::string name() const = 0;
  virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const = 0;

  EmbeddingVector embed(std::string_view text) const;
};

// Deterministic lexical embedder: word unigrams and character 2..4-grams
// hashed into `embed_dim` buckets, weighted by log(1+tf) * idf, where idf is
// fitted on a reference corpus.
class HashedFeatureEmbedder final : public EmbeddingProvider {
 public:
  HashedFeatureEmbedder(const corpus::Corpus& corpus, const RetrieverConfig& config);

  // Rebuilds from a persisted document-frequency table.
  HashedFeatureEmbedder(std::unordered_map<std::uint64_t, std::uint32_t> document_frequency,
                        std::size_t doc_count, corpus::LanguageMode mode, std::size_t dim);

  std::size_t dim() const override { return dim_; }
  std::string name() const override { return "hashed-features"; }
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override;
  EmbeddingVector embed_text(std::string_view text) const;

  // Feature hash -> term count for `text`. Exposed so tests can pick
  // strings whose features are provably disjoint.
  std::unordered_map<std::uint64_t, std::uint32_t> features(std::string_view text) const;
  std::vector<std::size_t> active_buckets(std::string_view text) const;

  double idf(std::uint64_t feature) const;

  const std::unordered_map<std::uint64_t, std::uint32_t>& document_frequency() const { return df_; }
  std::size_t doc_count() const { return doc_count_; }
  corpus::LanguageMode language_mode() const { return mode_; }

 private:
  std::unordered_map<std::uint64_t, std::uint32_t> df_;
  std::size_t doc_count_ = 0;
  corpus::LanguageMode mode_;
  std::size_t dim_;
};

// Talks to an external service: POST {"texts":[...]} and expects
// {"vectors":[[...], ...]} with one vector of `dim` values per text.
class RemoteEmbeddingProvider final : public EmbeddingProvider {
 public:
  RemoteEmbeddingProvider(std::string endpoint, std::size_t dim, std::size_t batch_size = 64);

  std::size_t dim() const override { return dim_; }
  std::string name() const override { return "remote:" + endpoint_; }
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override;

 private:
  std::vector<EmbeddingVector> request(std::span<const std::string> texts) const;

  std::string endpoint_;
  std::size_t dim_;
  std::size_t batch_size_;
};

}  // namespace right::retriever
