#include "right/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "json.hpp"
#include "right/errors.hpp"
#include "right/text.hpp"

namespace right::metrics {

Tokens hashtags_to_sequence(const HashtagList& tags, corpus::LanguageMode mode) {
  return corpus::tokenize(text::join(tags, " "), mode);
}

namespace {

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

std::map<Tokens, std::size_t> ngram_counts(const Tokens& t, std::size_t n) {
  std::map<Tokens, std::size_t> counts;
  if (t.size() < n) return counts;
  for (std::size_t i = 0; i + n <= t.size(); ++i) ++counts[Tokens(t.begin() + i, t.begin() + i + n)];
  return counts;
}

}  // namespace

double rouge_n(const Tokens& pred, const Tokens& ref, std::size_t n) {
  if (n == 0) throw ConfigError("rouge_n: n must be >= 1");
  const auto p = ngram_counts(pred, n);
  const auto r = ngram_counts(ref, n);
  if (p.empty() && r.empty()) return (!pred.empty() && pred == ref) ? 1.0 : 0.0;
  if (p.empty() || r.empty()) return 0.0;
  std::size_t overlap = 0;
  std::size_t pred_total = 0;
  std::size_t ref_total = 0;
  for (const auto& [gram, c] : p) {
    pred_total += c;
    auto it = r.find(gram);
    if (it != r.end()) overlap += std::min(c, it->second);
  }
  for (const auto& [gram, c] : r) ref_total += c;
  if (overlap == 0) return 0.0;
  return harmonic(static_cast<double>(overlap) / static_cast<double>(pred_total),
                  static_cast<double>(overlap) / static_cast<double>(ref_total));
}

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l(const Tokens& pred, const Tokens& ref) {
  if (pred.empty() || ref.empty()) return 0.0;
  const auto lcs = static_cast<double>(lcs_length(pred, ref));
  return harmonic(lcs / static_cast<double>(pred.size()), lcs / static_cast<double>(ref.size()));
}

namespace {

HashtagList canonical_unique(const HashtagList& tags, corpus::LanguageMode mode) {
  HashtagList out;
  for (const auto& t : tags) {
    std::string c;
    try {
      c = corpus::normalize_hashtag(t, mode);
    } catch (const DataError&) {
      continue;
    }
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

double f1_at_k(const HashtagList& predicted, const HashtagList& gold, std::size_t k, corpus::LanguageMode mode) {
  if (k < 1) throw ConfigError("f1_at_k: K must be >= 1");
  const HashtagList gold_set = canonical_unique(gold, mode);
  if (gold_set.empty()) throw DataError("f1_at_k: empty gold hashtag set");
  const HashtagList preds = canonical_unique(predicted, mode);
  const std::size_t taken = std::min(k, preds.size());
  if (taken == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < taken; ++i) {
    if (std::find(gold_set.begin(), gold_set.end(), preds[i]) != gold_set.end()) ++hits;
  }
  if (hits == 0) return 0.0;
  return harmonic(static_cast<double>(hits) / static_cast<double>(taken),
                  static_cast<double>(hits) / static_cast<double>(gold_set.size()));
}

EvalRecord evaluate_record(const EvalItem& item, const std::vector<std::size_t>& ks, corpus::LanguageMode mode) {
  EvalRecord rec;
  rec.id = item.id;
  rec.predicted = item.predicted;
  rec.gold = item.gold;
  const Tokens pred = hashtags_to_sequence(item.predicted, mode);
  const Tokens ref = hashtags_to_sequence(item.gold, mode);
  rec.rouge1 = rouge_n(pred, ref, 1);
  rec.rouge2 = rouge_n(pred, ref, 2);
  rec.rougeL = rouge_l(pred, ref);
  for (std::size_t k : ks) rec.f1_at[k] = f1_at_k(item.predicted, item.gold, k, mode);
  return rec;
}

EvalReport evaluate_dataset(const std::vector<EvalItem>& items, const std::vector<std::size_t>& ks,
                            corpus::LanguageMode mode) {
  if (items.empty()) throw DataError("evaluate_dataset: no records");
  if (ks.empty()) throw ConfigError("evaluate_dataset: no K values");
  EvalReport report;
  report.record_count = items.size();
  report.records.reserve(items.size());
  for (std::size_t k : ks) report.mean_f1_at[k] = 0.0;
  for (const auto& item : items) {
    if (item.gold.empty()) throw DataError("evaluate_dataset: record '" + item.id + "' has no gold hashtags");
    auto rec = evaluate_record(item, ks, mode);
    report.mean_rouge1 += rec.rouge1;
    report.mean_rouge2 += rec.rouge2;
    report.mean_rougeL += rec.rougeL;
    for (const auto& [k, v] : rec.f1_at) report.mean_f1_at[k] += v;
    report.records.push_back(std::move(rec));
  }
  const auto n = static_cast<double>(items.size());
  report.mean_rouge1 /= n;
  report.mean_rouge2 /= n;
  report.mean_rougeL /= n;
  for (auto& [k, v] : report.mean_f1_at) v /= n;
  return report;
}

EvalReport evaluate_dataset(const std::vector<HashtagList>& predicted, const std::vector<HashtagList>& gold,
                            const std::vector<std::size_t>& ks, corpus::LanguageMode mode) {
  if (predicted.size() != gold.size()) {
    throw DataError("evaluate_dataset: " + std::to_string(predicted.size()) + " predictions for " +
                    std::to_string(gold.size()) + " gold records");
  }
  std::vector<EvalItem> items;
  items.reserve(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) items.push_back({std::to_string(i), predicted[i], gold[i]});
  return evaluate_dataset(items, ks, mode);
}

nlohmann::ordered_json summary_to_json(const EvalReport& report) {
  nlohmann::ordered_json summary = {{"record_count", report.record_count},
                                    {"rouge1", report.mean_rouge1},
                                    {"rouge2", report.mean_rouge2},
                                    {"rougeL", report.mean_rougeL}};
  for (const auto& [k, v] : report.mean_f1_at) summary["f1@" + std::to_string(k)] = v;
  return summary;
}

nlohmann::ordered_json record_to_json(const EvalRecord& r) {
  nlohmann::ordered_json row = {{"id", r.id},          {"predicted", r.predicted}, {"gold", r.gold},
                                {"rouge1", r.rouge1}, {"rouge2", r.rouge2},       {"rougeL", r.rougeL}};
  for (const auto& [k, v] : r.f1_at) row["f1@" + std::to_string(k)] = v;
  return row;
}

void write_report_json(const EvalReport& report, std::ostream& out) {
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (const auto& r : report.records) records.push_back(record_to_json(r));
  nlohmann::ordered_json doc = {{"summary", summary_to_json(report)}, {"records", std::move(records)}};
  out << doc.dump(2) << '\n';
}

void write_report_table(const EvalReport& report, std::ostream& out) {
  char buf[64];
  out << "records: " << report.record_count << '\n';
  std::string header = "  ROUGE-1  ROUGE-2  ROUGE-L";
  std::string values;
  std::snprintf(buf, sizeof(buf), "  %7.2f  %7.2f  %7.2f", 100.0 * report.mean_rouge1, 100.0 * report.mean_rouge2,
                100.0 * report.mean_rougeL);
  values = buf;
  for (const auto& [k, v] : report.mean_f1_at) {
    std::snprintf(buf, sizeof(buf), "  %7s", ("F1@" + std::to_string(k)).c_str());
    header += buf;
    std::snprintf(buf, sizeof(buf), "  %7.2f", 100.0 * v);
    values += buf;
  }
  out << header << '\n' << values << '\n';
}

}  // namespace right::metrics
