#include "right/retrieval_cache.hpp"

#include <fstream>

#include "json.hpp"
#include "right/errors.hpp"
#include "right/text.hpp"

namespace right::pipeline {

using nlohmann::json;

RetrievalCache::RetrievalCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  if (!dir_.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw DataError("cannot create cache directory " + dir_.string() + ": " + ec.message());
  }
}

std::string RetrievalCache::tweet_key(const std::string& tweet) {
  // Two independent 64-bit hashes; a single one is too collision-prone for
  // a key that is trusted without comparing the text.
  return text::hex64(text::fnv1a64(tweet)) + text::hex64(text::fnv1a64(tweet, 0x84222325cbf29ce4ULL));
}

void RetrievalCache::set_corpus_size(const std::string& corpus_digest, std::size_t size) {
  std::lock_guard lock(mutex_);
  corpus_sizes_[corpus_digest] = size;
}

RetrievalCache::Shard& RetrievalCache::shard(const std::string& corpus_digest, const std::string& config_digest) {
  auto key = std::make_pair(corpus_digest, config_digest);
  auto it = shards_.find(key);
  if (it != shards_.end()) return it->second;
  Shard& s = shards_[key];
  if (!dir_.empty()) {
    s.file = dir_ / ("retrieval-" + corpus_digest + "-" + config_digest + ".jsonl");
    auto size_it = corpus_sizes_.find(corpus_digest);
    load_shard(s, size_it == corpus_sizes_.end() ? 0 : size_it->second);
  }
  return s;
}

void RetrievalCache::load_shard(Shard& s, std::size_t corpus_size) {
  std::ifstream in(s.file, std::ios::binary);
  if (!in) return;
  std::string line;
  std::size_t line_no = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto rec = json::parse(line);
      std::vector<CachedHit> hits;
      for (const auto& h : rec.at("hits")) {
        CachedHit c{h.at(0).get<std::size_t>(), h.at(1).get<double>()};
        if (corpus_size != 0 && c.ordinal >= corpus_size) throw DataError("ordinal out of range");
        hits.push_back(c);
      }
      s.entries[rec.at("tweet").get<std::string>()] = std::move(hits);
    }
  } catch (const std::exception& e) {
    warnings_.push_back("retrieval cache " + s.file.string() + " corrupt at line " + std::to_string(line_no) + " (" +
                        e.what() + "); rebuilt");
    s.entries.clear();
    std::ofstream truncate(s.file, std::ios::binary | std::ios::trunc);
  }
}

std::optional<std::vector<CachedHit>> RetrievalCache::get(const std::string& corpus_digest,
                                                          const std::string& config_digest,
                                                          const std::string& tweet) {
  std::lock_guard lock(mutex_);
  Shard& s = shard(corpus_digest, config_digest);
  auto it = s.entries.find(tweet_key(tweet));
  if (it == s.entries.end()) {
    ++stats_.misses;
    return std::nullopt;
  }
  ++stats_.hits;
  return it->second;
}

void RetrievalCache::put(const std::string& corpus_digest, const std::string& config_digest, const std::string& tweet,
                         const std::vector<CachedHit>& hits) {
  std::lock_guard lock(mutex_);
  Shard& s = shard(corpus_digest, config_digest);
  const std::string key = tweet_key(tweet);
  auto [it, inserted] = s.entries.emplace(key, hits);
  if (!inserted || s.file.empty()) return;
  json arr = json::array();
  for (const auto& h : hits) arr.push_back({h.ordinal, h.raw_score});
  std::ofstream out(s.file, std::ios::binary | std::ios::app);
  if (!out) throw DataError("cannot append to retrieval cache " + s.file.string());
  out << json{{"tweet", key}, {"hits", arr}}.dump() << '\n';
}

CacheStats RetrievalCache::stats() const {
  std::lock_guard lock(mutex_);
  return stats_;
}

void RetrievalCache::reset_stats() {
  std::lock_guard lock(mutex_);
  stats_ = {};
}

std::vector<std::string> RetrievalCache::warnings() const {
  std::lock_guard lock(mutex_);
  return warnings_;
}

}  // namespace right::pipeline
