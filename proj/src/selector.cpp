#include "right/selector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "right/errors.hpp"

namespace right::selector {

void SelectorConfig::validate() const {
  if (top_k < 1) throw ConfigError("selector.top_k must be >= 1");
  if (!(temperature > 0.0)) throw ConfigError("selector.temperature must be > 0");
  double sum = 0.0;
  for (double p : perturbation_probs) {
    if (!(p >= 0.0)) throw ConfigError("selector.perturbation_probs must be non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("selector.perturbation_probs must sum to 1");
}

double mainstream_score(const CandidateHashtag& c) {
  if (c.frequency == 0 || c.tweet_scores.size() != c.frequency) {
    throw std::invalid_argument("candidate '" + c.text + "': frequency does not match tweet scores");
  }
  const double mean =
      std::accumulate(c.tweet_scores.begin(), c.tweet_scores.end(), 0.0) / static_cast<double>(c.frequency);
  return (mean + c.hashtag_score) * (1.0 + static_cast<double>(c.frequency - 1) / 10.0);
}

std::vector<double> SimilarityProvider::similarities(std::string_view tweet,
                                                     std::span<const std::string> hashtags) const {
  std::vector<double> out;
  out.reserve(hashtags.size());
  for (const auto& h : hashtags) out.push_back(similarity(tweet, h));
  return out;
}

EmbeddingCosineScorer::EmbeddingCosineScorer(std::shared_ptr<const retriever::EmbeddingProvider> provider)
    : provider_(std::move(provider)) {
  if (!provider_) throw std::invalid_argument("EmbeddingCosineScorer: null provider");
}

double EmbeddingCosineScorer::similarity(std::string_view tweet, std::string_view hashtag) const {
  const std::string item(hashtag);
  return similarities(tweet, std::span<const std::string>(&item, 1)).front();
}

std::vector<double> EmbeddingCosineScorer::similarities(std::string_view tweet,
                                                        std::span<const std::string> hashtags) const {
  std::vector<std::string> texts;
  texts.reserve(hashtags.size() + 1);
  texts.emplace_back(tweet);
  texts.insert(texts.end(), hashtags.begin(), hashtags.end());
  const auto vectors = provider_->embed_batch(texts);
  std::vector<double> out;
  out.reserve(hashtags.size());
  for (std::size_t i = 1; i < vectors.size(); ++i) out.push_back(retriever::cosine(vectors[0], vectors[i]));
  return out;
}

double selector_similarity(std::string_view tweet, std::string_view hashtag, const SimilarityProvider& scorer) {
  return scorer.similarity(tweet, hashtag);
}

std::vector<CandidateHashtag> aggregate_candidates(const std::vector<retriever::RetrievalHit>& hits,
                                                   corpus::LanguageMode mode) {
  std::vector<CandidateHashtag> out;
  std::unordered_map<std::string, std::size_t> slot;
  std::vector<std::string> seen_in_hit;
  for (const auto& hit : hits) {
    seen_in_hit.clear();
    for (const auto& raw : hit.pair->hashtags) {
      std::string tag = corpus::normalize_hashtag(raw, mode);
      if (std::find(seen_in_hit.begin(), seen_in_hit.end(), tag) != seen_in_hit.end()) continue;
      seen_in_hit.push_back(tag);
      auto [it, inserted] = slot.emplace(tag, out.size());
      if (inserted) out.push_back({std::move(tag), 0, {}, 0.0, 0.0});
      auto& c = out[it->second];
      ++c.frequency;
      c.tweet_scores.push_back(hit.normalized_score);
    }
  }
  return out;
}

void sort_ranked(std::vector<CandidateHashtag>& candidates) {
  std::sort(candidates.begin(), candidates.end(), [](const CandidateHashtag& a, const CandidateHashtag& b) {
    if (a.final_score != b.final_score) return a.final_score > b.final_score;
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.text < b.text;
  });
}

std::vector<CandidateHashtag> rank_candidates(std::string_view tweet, std::vector<CandidateHashtag> candidates,
                                              const SimilarityProvider& scorer) {
  std::vector<std::string> texts;
  texts.reserve(candidates.size());
  for (const auto& c : candidates) texts.push_back(c.text);
  const auto sims = scorer.similarities(tweet, texts);
  if (sims.size() != candidates.size()) throw BackendError("similarity provider returned the wrong number of scores");
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    candidates[i].hashtag_score = sims[i];
    candidates[i].final_score = mainstream_score(candidates[i]);
  }
  sort_ranked(candidates);
  return candidates;
}

std::vector<std::string> select_top_k(const std::vector<CandidateHashtag>& ranked, std::size_t k) {
  if (k < 1) throw ConfigError("select_top_k: k must be >= 1");
  std::vector<std::string> out;
  const std::size_t n = std::min(k, ranked.size());
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(ranked[i].text);
  return out;
}

double selector_loss(const std::vector<LossRow>& batch, double temperature) {
  if (!(temperature > 0.0)) throw ConfigError("selector_loss: temperature must be > 0");
  const std::size_t L = batch.size();
  if (L == 0) throw DataError("selector_loss: empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    const auto& row = batch[i];
    if (row.positive.size() != L || row.negative.size() != L) {
      throw DataError("selector_loss: every row needs L positive and L negative similarities");
    }
    double shift = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < L; ++j) shift = std::max({shift, row.positive[j], row.negative[j]});
    shift /= temperature;
    double denom = 0.0;
    for (std::size_t j = 0; j < L; ++j) {
      denom += std::exp(row.positive[j] / temperature - shift) + std::exp(row.negative[j] / temperature - shift);
    }
    // -log(e^{a - m} / D) = log D - (a - m)
    const double loss = std::log(denom) - (row.positive[i] / temperature - shift);
    total += std::max(0.0, loss);
  }
  return total / static_cast<double>(L);
}

}  // namespace right::selector
