#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace right::pipeline {

struct CachedHit {
  std::size_t ordinal = 0;
  double raw_score = 0.0;

  bool operator==(const CachedHit&) const = default;
};

struct CacheStats {
  std::size_t hits = 0;
  std::size_t misses = 0;
};

// Retrieval results keyed by (corpus digest, retriever-config digest, tweet
// digest). With a directory, each (corpus, config) pair is backed by an
// append-only JSON-lines file that is read the first time the pair is used.
// Thread-safe: lookups share a mutex with the single appending writer.
class RetrievalCache {
 public:
  explicit RetrievalCache(std::filesystem::path dir = {});

  std::optional<std::vector<CachedHit>> get(const std::string& corpus_digest, const std::string& config_digest,
                                            const std::string& tweet);
  void put(const std::string& corpus_digest, const std::string& config_digest, const std::string& tweet,
           const std::vector<CachedHit>& hits);

  CacheStats stats() const;
  void reset_stats();
  // Problems met while reading cache files (each caused a rebuild).
  std::vector<std::string> warnings() const;

  // Docs beyond this ordinal are rejected as corruption. 0 disables the check.
  void set_corpus_size(const std::string& corpus_digest, std::size_t size);

  static std::string tweet_key(const std::string& tweet);

 private:
  struct Shard {
    std::unordered_map<std::string, std::vector<CachedHit>> entries;
    std::filesystem::path file;
  };

  Shard& shard(const std::string& corpus_digest, const std::string& config_digest);
  void load_shard(Shard& s, std::size_t corpus_size);

  std::filesystem::path dir_;
  mutable std::mutex mutex_;
  std::map<std::pair<std::string, std::string>, Shard> shards_;
  std::map<std::string, std::size_t> corpus_sizes_;
  CacheStats stats_;
  std::vector<std::string> warnings_;
};

}  // namespace right::pipeline
