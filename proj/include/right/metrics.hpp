#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "right/corpus.hpp"

namespace right::metrics {

using Tokens = std::vector<std::string>;
using HashtagList = std::vector<std::string>;

// Hashtags joined with single spaces and tokenized. Separator tokens never
// appear because hashtags are stored without them.
Tokens hashtags_to_sequence(const HashtagList& tags, corpus::LanguageMode mode);

// F-measure (beta = 1) over clipped n-gram counts. When neither side has an
// n-gram (both shorter than n), identical non-empty sequences score 1 and
// anything else 0.
double rouge_n(const Tokens& pred, const Tokens& ref, std::size_t n);

std::size_t lcs_length(const Tokens& a, const Tokens& b);
// LCS-based F-measure (beta = 1). 0 when either side is empty.
double rouge_l(const Tokens& pred, const Tokens& ref);

// Set F1 over the first min(K, |dedup(pred)|) canonical predictions against
// the canonical gold set. Throws DataError on empty gold, ConfigError on K=0.
double f1_at_k(const HashtagList& predicted, const HashtagList& gold, std::size_t k,
               corpus::LanguageMode mode = corpus::LanguageMode::kSpaceDelimited);

struct EvalRecord {
  std::string id;
  HashtagList predicted;
  HashtagList gold;
  double rouge1 = 0.0;
  double rouge2 = 0.0;
  double rougeL = 0.0;
  std::map<std::size_t, double> f1_at;
};

struct EvalReport {
  std::size_t record_count = 0;
  double mean_rouge1 = 0.0;
  double mean_rouge2 = 0.0;
  double mean_rougeL = 0.0;
  std::map<std::size_t, double> mean_f1_at;
  std::vector<EvalRecord> records;
};

struct EvalItem {
  std::string id;
  HashtagList predicted;
  HashtagList gold;
};

EvalRecord evaluate_record(const EvalItem& item, const std::vector<std::size_t>& ks, corpus::LanguageMode mode);

EvalReport evaluate_dataset(const std::vector<EvalItem>& items, const std::vector<std::size_t>& ks,
                            corpus::LanguageMode mode);
// Parallel-list form; the lists must have equal length.
EvalReport evaluate_dataset(const std::vector<HashtagList>& predicted, const std::vector<HashtagList>& gold,
                            const std::vector<std::size_t>& ks, corpus::LanguageMode mode);

nlohmann::ordered_json summary_to_json(const EvalReport& report);
nlohmann::ordered_json record_to_json(const EvalRecord& record);

// {"summary": {...}, "records": [...]} as one JSON document.
void write_report_json(const EvalReport& report, std::ostream& out);
// Fixed-width table for terminals, values in percent.
void write_report_table(const EvalReport& report, std::ostream& out);

}  // namespace right::metrics
