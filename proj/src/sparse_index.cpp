#include "right/sparse_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "right/errors.hpp"

namespace right::retriever {

std::size_t SparseIndex::document_frequency(std::string_view token) const {
  auto it = postings.find(token);
  return it == postings.end() ? 0 : it->second.size();
}

std::uint32_t SparseIndex::term_frequency(std::string_view token, std::size_t doc) const {
  auto it = postings.find(token);
  if (it == postings.end()) return 0;
  const auto& list = it->second;
  auto pos = std::lower_bound(list.begin(), list.end(), doc,
                              [](const Posting& p, std::size_t d) { return p.doc < d; });
  return (pos != list.end() && pos->doc == doc) ? pos->tf : 0;
}

SparseIndex build_sparse_index(const corpus::Corpus& corpus, const RetrieverConfig& config) {
  config.validate();
  if (corpus.empty()) throw DataError("build_sparse_index: empty corpus");
  if (corpus.size() > std::numeric_limits<std::uint32_t>::max()) throw DataError("corpus too large to index");

  SparseIndex index;
  index.language_mode = corpus.language_mode();
  index.doc_count = corpus.size();
  index.doc_lengths.reserve(corpus.size());
  std::uint64_t total = 0;
  std::map<std::string, std::uint32_t, std::less<>> tf;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const auto tokens = corpus::tokenize(corpus[d].text, corpus.language_mode());
    tf.clear();
    for (const auto& t : tokens) ++tf[t];
    for (const auto& [token, count] : tf) {
      index.postings[token].push_back({static_cast<std::uint32_t>(d), count});
    }
    index.doc_lengths.push_back(static_cast<std::uint32_t>(tokens.size()));
    total += tokens.size();
  }
  index.avg_doc_length = static_cast<double>(total) / static_cast<double>(index.doc_count);
  return index;
}

double bm25_idf(std::size_t doc_count, std::size_t df) {
  const double n = static_cast<double>(doc_count);
  const double f = static_cast<double>(df);
  return std::log(1.0 + (n - f + 0.5) / (f + 0.5));
}

namespace {

double term_weight(double idf, double tf, double doc_len, double avg_len, const RetrieverConfig& config) {
  // An all-empty corpus has avg length 0; every tf is then 0 as well.
  const double norm = avg_len > 0.0 ? doc_len / avg_len : 0.0;
  const double k1 = config.bm25_k1;
  return idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - config.bm25_b + config.bm25_b * norm));
}

}  // namespace

double bm25_score(const SparseIndex& index, const std::vector<std::string>& query_tokens, std::size_t doc,
                  const RetrieverConfig& config) {
  if (doc >= index.doc_count) throw std::out_of_range("bm25_score: ordinal out of range");
  double score = 0.0;
  for (const auto& token : query_tokens) {
    const std::uint32_t tf = index.term_frequency(token, doc);
    if (tf == 0) continue;
    const double idf = bm25_idf(index.doc_count, index.document_frequency(token));
    score += term_weight(idf, tf, index.doc_lengths[doc], index.avg_doc_length, config);
  }
  return score;
}

std::vector<double> bm25_score_all(const SparseIndex& index, const std::vector<std::string>& query_tokens,
                                   const RetrieverConfig& config) {
  std::vector<double> scores(index.doc_count, 0.0);
  for (const auto& token : query_tokens) {
    auto it = index.postings.find(token);
    if (it == index.postings.end()) continue;
    const double idf = bm25_idf(index.doc_count, it->second.size());
    for (const Posting& p : it->second) {
      scores[p.doc] += term_weight(idf, p.tf, index.doc_lengths[p.doc], index.avg_doc_length, config);
    }
  }
  return scores;
}

}  // namespace right::retriever
