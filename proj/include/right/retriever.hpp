#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "right/corpus.hpp"
#include "right/embedding.hpp"
#include "right/retriever_config.hpp"
#include "right/sparse_index.hpp"

namespace right::retriever {

struct RetrievalHit {
  const corpus::TweetHashtagPair* pair = nullptr;
  std::size_t ordinal = 0;
  double raw_score = 0.0;
  double normalized_score = 0.0;
};

// Min-max normalization over one result list; a degenerate range maps every
// score to 1. Order is untouched.
void normalize_hit_scores(std::vector<RetrievalHit>& hits);

// Top-N tweet retrieval over a corpus with either backend. The corpus must
// outlive the retriever; hits point into it.
class Retriever {
 public:
  // For the dense backend, `embedder` overrides the provider implied by the
  // config (built-in hashed features, or a remote endpoint).
  Retriever(const corpus::Corpus& corpus, RetrieverConfig config,
            std::shared_ptr<const EmbeddingProvider> embedder = nullptr);

  // Sorted by raw score descending with corpus-order tie-break. Sparse
  // results never include zero-score documents. Scores are raw;
  // normalized_score is left 0 for the caller to fill.
  std::vector<RetrievalHit> retrieve(std::string_view tweet) const;
  std::vector<RetrievalHit> retrieve(std::string_view tweet, std::size_t top_n) const;

  // Raw score of every corpus document, indexed by ordinal.
  std::vector<double> score_all(std::string_view tweet) const;

  const corpus::Corpus& corpus() const { return *corpus_; }
  const RetrieverConfig& config() const { return config_; }
  const SparseIndex* sparse_index() const { return sparse_ ? &*sparse_ : nullptr; }
  // Dense provider; null for the sparse backend.
  const EmbeddingProvider* embedder() const { return embedder_.get(); }

  // Versioned JSON snapshot: config echo, corpus digest, and either the
  // postings or the embedder's document-frequency table.
  void save_snapshot(const std::filesystem::path& path) const;
  // Rejects snapshots whose format, config, or corpus digest do not match.
  static Retriever load_snapshot(const std::filesystem::path& path, const corpus::Corpus& corpus,
                                 const RetrieverConfig& config);

 private:
  struct SparseRow {
    std::vector<std::pair<std::uint32_t, double>> entries;
  };

  Retriever(const corpus::Corpus& corpus, RetrieverConfig config, SparseIndex index);
  Retriever(const corpus::Corpus& corpus, RetrieverConfig config, std::shared_ptr<const EmbeddingProvider> embedder,
            bool from_snapshot);
  void embed_corpus();

  const corpus::Corpus* corpus_;
  RetrieverConfig config_;
  std::optional<SparseIndex> sparse_;
  std::shared_ptr<const EmbeddingProvider> embedder_;
  std::vector<SparseRow> doc_embeddings_;
};

// Builds the provider a config asks for: remote when an endpoint is set,
// otherwise the hashed-feature embedder fitted on `corpus`.
std::shared_ptr<const EmbeddingProvider> make_embedding_provider(const corpus::Corpus& corpus,
                                                                 const RetrieverConfig& config);

}  // namespace right::retriever
