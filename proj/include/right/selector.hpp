#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "right/corpus.hpp"
#include "right/embedding.hpp"
#include "right/retriever.hpp"

namespace right::selector {

struct SelectorConfig {
  std::size_t top_k = 7;
  double temperature = 0.05;
  // synonym-replace, delete, swap-adjacent, insert-synonym
  std::array<double, 4> perturbation_probs{0.7, 0.1, 0.1, 0.1};
  std::uint64_t rng_seed = 0;

  void validate() const;

  bool operator==(const SelectorConfig&) const = default;
};

struct CandidateHashtag {
  std::string text;                 // canonical form
  std::size_t frequency = 0;        // number of retrieved pairs carrying it
  std::vector<double> tweet_scores; // normalized score of each such pair, retrieval order
  double hashtag_score = 0.0;       // tweet-to-hashtag similarity
  double final_score = 0.0;
};

// (mean tweet score + hashtag score) * (1 + (f - 1) / 10)
double mainstream_score(const CandidateHashtag& candidate);

// Tweet-to-hashtag similarity. Implementations must be deterministic and
// safe to call concurrently.
class SimilarityProvider {
 public:
  virtual ~SimilarityProvider() = default;
  virtual double similarity(std::string_view tweet, std::string_view hashtag) const = 0;
  // Batch form; the default loops over similarity().
  virtual std::vector<double> similarities(std::string_view tweet, std::span<const std::string> hashtags) const;
};

// Cosine over an embedding provider (the retriever's embedder, or a remote
// service).
class EmbeddingCosineScorer final : public SimilarityProvider {
 public:
  explicit EmbeddingCosineScorer(std::shared_ptr<const retriever::EmbeddingProvider> provider);

  double similarity(std::string_view tweet, std::string_view hashtag) const override;
  std::vector<double> similarities(std::string_view tweet, std::span<const std::string> hashtags) const override;

 private:
  std::shared_ptr<const retriever::EmbeddingProvider> provider_;
};

double selector_similarity(std::string_view tweet, std::string_view hashtag, const SimilarityProvider& scorer);

// Merges hashtags across hits by canonical form, in first-seen order. A tag
// repeated within one hit contributes once. Hits must carry normalized
// scores.
std::vector<CandidateHashtag> aggregate_candidates(const std::vector<retriever::RetrievalHit>& hits,
                                                   corpus::LanguageMode mode = corpus::LanguageMode::kSpaceDelimited);

// Fills hashtag_score and final_score, then sorts by final score desc,
// frequency desc, text asc.
std::vector<CandidateHashtag> rank_candidates(std::string_view tweet, std::vector<CandidateHashtag> candidates,
                                              const SimilarityProvider& scorer);

// Same ordering, scores already set.
void sort_ranked(std::vector<CandidateHashtag>& candidates);

// First min(k, size) texts. k must be >= 1.
std::vector<std::string> select_top_k(const std::vector<CandidateHashtag>& ranked, std::size_t k);

// One anchor's row of the contrastive objective: similarity of anchor i to
// every positive and every negative in the mini-batch.
struct LossRow {
  std::vector<double> positive;  // sim(anchor_i, pos_j), j = 0..L-1
  std::vector<double> negative;  // sim(anchor_i, neg_j)
};

// Mean over anchors of
//   -log( e^{s(i,i+)/t} / sum_j (e^{s(i,j+)/t} + e^{s(i,j-)/t}) )
// evaluated with a max shift so small temperatures cannot overflow.
double selector_loss(const std::vector<LossRow>& batch, double temperature);

}  // namespace right::selector
