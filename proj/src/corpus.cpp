#include "right/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "right/errors.hpp"
#include "right/text.hpp"

namespace right::corpus {

using nlohmann::json;

std::string_view to_string(LanguageMode mode) {
  return mode == LanguageMode::kSpaceDelimited ? "space" : "char";
}

LanguageMode language_mode_from_string(std::string_view s) {
  if (s == "space" || s == "space-delimited") return LanguageMode::kSpaceDelimited;
  if (s == "char" || s == "character" || s == "character-delimited") {
    return LanguageMode::kCharacterDelimited;
  }
  throw ConfigError("unknown language mode '" + std::string(s) + "' (expected space|char)");
}

namespace {

std::string strip_stored_hashtag(std::string_view raw) {
  std::string_view t = text::trim(raw);
  while (!t.empty() && t.front() == '#') t = text::trim(t.substr(1));
  return std::string(t);
}

}  // namespace

Corpus::Corpus(std::vector<TweetHashtagPair> pairs, LanguageMode mode, bool allow_unlabeled)
    : pairs_(std::move(pairs)), mode_(mode) {
  by_id_.reserve(pairs_.size());
  std::uint64_t h = text::fnv1a64(to_string(mode_));
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    auto& p = pairs_[i];
    for (auto& tag : p.hashtags) tag = strip_stored_hashtag(tag);
    if (text::trim(p.text).empty()) throw DataError("pair '" + p.id + "': empty tweet text");
    if (!allow_unlabeled && p.hashtags.empty()) {
      throw DataError("pair '" + p.id + "': no hashtags");
    }
    for (const auto& tag : p.hashtags) {
      if (tag.empty()) throw DataError("pair '" + p.id + "': empty hashtag");
    }
    if (!by_id_.emplace(p.id, i).second) throw DataError("duplicate id '" + p.id + "'");
    const std::string record = serialize_pair(p);
    h = text::fnv1a64(record, h);
    h = text::fnv1a64("\n", h);
  }
  digest_ = text::hex64(h);
}

std::size_t Corpus::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? npos : it->second;
}

namespace {

TweetHashtagPair parse_json_line(const std::string& line) {
  json rec = json::parse(line);  // throws json::exception
  if (!rec.is_object()) throw DataError("record is not an object");
  TweetHashtagPair pair;
  const auto& id = rec.at("id");
  pair.id = id.is_string() ? id.get<std::string>() : id.dump();
  pair.text = rec.at("text").get<std::string>();
  for (const auto& tag : rec.at("hashtags")) pair.hashtags.push_back(strip_stored_hashtag(tag.get<std::string>()));
  return pair;
}

TweetHashtagPair parse_tsv_line(const std::string& line) {
  auto fields = text::split(line, "\t");
  if (fields.size() != 3) throw DataError("expected 3 tab-separated fields, got " + std::to_string(fields.size()));
  TweetHashtagPair pair;
  pair.id = std::string(text::trim(fields[0]));
  pair.text = fields[1];
  if (!text::trim(fields[2]).empty()) {
    for (const auto& tag : text::split(fields[2], ";")) {
      if (text::trim(tag).empty()) continue;
      pair.hashtags.push_back(strip_stored_hashtag(tag));
    }
  }
  return pair;
}

}  // namespace

Corpus parse_corpus(std::istream& in, LanguageMode mode, LoadOptions options, std::string_view source_name) {
  std::vector<TweetHashtagPair> pairs;
  std::map<std::string, std::size_t> seen;  // id -> line number
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    const std::string where = std::string(source_name) + ":" + std::to_string(line_no);
    TweetHashtagPair pair;
    try {
      pair = text::trim(line).front() == '{' ? parse_json_line(line) : parse_tsv_line(line);
    } catch (const json::exception& e) {
      throw DataError(where + ": malformed record: " + e.what());
    } catch (const DataError& e) {
      throw DataError(where + ": malformed record: " + e.what());
    }
    if (pair.id.empty()) throw DataError(where + ": malformed record: empty id");
    if (text::trim(pair.text).empty()) throw DataError(where + ": malformed record: empty text");
    for (const auto& tag : pair.hashtags) {
      if (tag.empty()) throw DataError(where + ": malformed record: empty hashtag");
    }
    if (!options.allow_unlabeled && pair.hashtags.empty()) {
      throw DataError(where + ": malformed record: no hashtags");
    }
    if (auto [it, inserted] = seen.emplace(pair.id, line_no); !inserted) {
      throw DataError(where + ": duplicate id '" + pair.id + "' (first seen on line " +
                      std::to_string(it->second) + ")");
    }
    pairs.push_back(std::move(pair));
  }
  if (pairs.empty()) throw DataError(std::string(source_name) + ": empty corpus file");
  return Corpus(std::move(pairs), mode, options.allow_unlabeled);
}

Corpus load_corpus(const std::filesystem::path& path, LanguageMode mode, LoadOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file " + path.string());
  return parse_corpus(in, mode, options, path.string());
}

std::string serialize_pair(const TweetHashtagPair& pair) {
  json rec = {{"id", pair.id}, {"text", pair.text}, {"hashtags", pair.hashtags}};
  return rec.dump();
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& p : corpus.pairs()) out << serialize_pair(p) << '\n';
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write corpus file " + path.string());
  write_corpus(corpus, out);
}

namespace {

bool is_ascii_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u);
}

bool is_ascii_letter(std::string_view cp) {
  return cp.size() == 1 && ((cp[0] >= 'a' && cp[0] <= 'z') || (cp[0] >= 'A' && cp[0] <= 'Z'));
}

}  // namespace

std::vector<std::string> tokenize(std::string_view input, LanguageMode mode) {
  std::vector<std::string> tokens;
  if (mode == LanguageMode::kSpaceDelimited) {
    const std::string lowered = text::to_lower_ascii(input);
    std::size_t i = 0;
    while (i < lowered.size()) {
      while (i < lowered.size() && text::is_ascii_space(lowered[i])) ++i;
      std::size_t j = i;
      while (j < lowered.size() && !text::is_ascii_space(lowered[j])) ++j;
      std::size_t b = i;
      std::size_t e = j;
      while (b < e && is_ascii_punct(lowered[b])) ++b;
      while (e > b && is_ascii_punct(lowered[e - 1])) --e;
      if (e > b) tokens.emplace_back(lowered.substr(b, e - b));
      i = j;
    }
    return tokens;
  }

  std::string run;
  for (auto& cp : text::utf8_code_points(input)) {
    if (is_ascii_letter(cp)) {
      run += cp;
      continue;
    }
    if (!run.empty()) tokens.push_back(std::move(run));
    run.clear();
    if (cp.size() == 1 && text::is_ascii_space(cp[0])) continue;
    tokens.push_back(std::move(cp));
  }
  if (!run.empty()) tokens.push_back(std::move(run));
  return tokens;
}

std::string normalize_hashtag(std::string_view raw, LanguageMode mode) {
  std::string_view t = text::trim(raw);
  // Every leading mark goes, not just one: otherwise "##a" -> "#a" -> "a"
  // and the function would not be idempotent.
  while (!t.empty() && t.front() == '#') t = text::trim(t.substr(1));
  std::string out = text::collapse_whitespace(t);
  if (mode == LanguageMode::kSpaceDelimited) out = text::to_lower_ascii(out);
  if (out.empty()) throw DataError("empty hashtag");
  return out;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  if (corpus.empty()) throw DataError("corpus_stats: empty corpus");
  CorpusStats stats;
  stats.pair_count = corpus.size();
  std::size_t tag_count = 0;
  std::size_t tweet_tokens = 0;
  std::size_t tag_tokens = 0;
  for (const auto& p : corpus.pairs()) {
    tweet_tokens += tokenize(p.text, corpus.language_mode()).size();
    tag_count += p.hashtags.size();
    for (const auto& tag : p.hashtags) tag_tokens += tokenize(tag, corpus.language_mode()).size();
  }
  const auto n = static_cast<double>(corpus.size());
  stats.avg_hashtags_per_pair = static_cast<double>(tag_count) / n;
  stats.avg_tweet_len_tokens = static_cast<double>(tweet_tokens) / n;
  stats.avg_hashtag_len_tokens = tag_count ? static_cast<double>(tag_tokens) / static_cast<double>(tag_count) : 0.0;
  return stats;
}

std::vector<PoolEntry> hashtag_pool(const Corpus& corpus) {
  std::map<std::string, std::size_t> counts;
  for (const auto& p : corpus.pairs()) {
    for (const auto& tag : p.hashtags) ++counts[normalize_hashtag(tag, corpus.language_mode())];
  }
  std::vector<PoolEntry> pool;
  pool.reserve(counts.size());
  for (auto& [tag, count] : counts) pool.push_back({tag, count});
  // std::map iteration is already lexicographic; a stable sort keeps that
  // order among equal counts.
  std::stable_sort(pool.begin(), pool.end(), [](const PoolEntry& a, const PoolEntry& b) { return a.count > b.count; });
  return pool;
}

}  // namespace right::corpus
