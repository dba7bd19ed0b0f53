#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "right/corpus.hpp"
#include "right/retriever_config.hpp"

namespace right::retriever {

struct Posting {
  std::uint32_t doc = 0;   // corpus ordinal
  std::uint32_t tf = 0;    // term frequency in that document

  bool operator==(const Posting&) const = default;
};

// Inverted index over tokenized corpus texts. Posting lists are sorted by
// ordinal; the ordered map keeps snapshots byte-stable.
struct SparseIndex {
  std::map<std::string, std::vector<Posting>, std::less<>> postings;
  std::vector<std::uint32_t> doc_lengths;
  double avg_doc_length = 0.0;
  std::size_t doc_count = 0;
  corpus::LanguageMode language_mode = corpus::LanguageMode::kSpaceDelimited;

  std::size_t document_frequency(std::string_view token) const;
  std::uint32_t term_frequency(std::string_view token, std::size_t doc) const;

  bool operator==(const SparseIndex&) const = default;
};

SparseIndex build_sparse_index(const corpus::Corpus& corpus, const RetrieverConfig& config);

// ln(1 + (N - df + 0.5) / (df + 0.5)); always positive.
double bm25_idf(std::size_t doc_count, std::size_t df);

// Okapi BM25 of `doc` for the query. Repeated query tokens contribute once
// per occurrence.
double bm25_score(const SparseIndex& index, const std::vector<std::string>& query_tokens, std::size_t doc,
                  const RetrieverConfig& config);

// Scores every document touched by the query in one pass over the postings.
// Returned vector is indexed by ordinal; untouched documents stay 0.
std::vector<double> bm25_score_all(const SparseIndex& index, const std::vector<std::string>& query_tokens,
                                   const RetrieverConfig& config);

}  // namespace right::retriever
