#pragma once

// Synthetic corpora and scratch directories shared by the unit and
// acceptance tests.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "right/corpus.hpp"

namespace right::testing {

inline std::string word(std::size_t i) { return "w" + std::to_string(i); }
inline std::string tag(std::size_t i) { return "tag" + std::to_string(i); }

struct CorpusShape {
  std::size_t docs = 20;
  std::size_t vocab = 50;
  std::size_t max_len = 12;
  std::size_t tag_vocab = 15;
  std::size_t max_tags = 4;
};

// Random pairs over a closed vocabulary w0..w{vocab-1}; every pair has at
// least one word and one hashtag.
inline std::vector<corpus::TweetHashtagPair> random_pairs(std::mt19937_64& rng, const CorpusShape& shape,
                                                          const std::string& id_prefix = "d") {
  std::uniform_int_distribution<std::size_t> len(1, shape.max_len);
  std::uniform_int_distribution<std::size_t> w(0, shape.vocab - 1);
  std::uniform_int_distribution<std::size_t> ntags(1, shape.max_tags);
  std::uniform_int_distribution<std::size_t> t(0, shape.tag_vocab - 1);
  std::vector<corpus::TweetHashtagPair> pairs;
  for (std::size_t d = 0; d < shape.docs; ++d) {
    corpus::TweetHashtagPair p;
    p.id = id_prefix + std::to_string(d);
    const std::size_t n = len(rng);
    for (std::size_t i = 0; i < n; ++i) {
      if (i) p.text += ' ';
      p.text += word(w(rng));
    }
    const std::size_t m = ntags(rng);
    for (std::size_t i = 0; i < m; ++i) p.hashtags.push_back(tag(t(rng)));
    pairs.push_back(std::move(p));
  }
  return pairs;
}

inline std::string random_query(std::mt19937_64& rng, std::size_t vocab, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<std::size_t> w(0, vocab - 1);
  std::string q;
  const std::size_t n = len(rng);
  for (std::size_t i = 0; i < n; ++i) {
    if (i) q += ' ';
    q += word(w(rng));
  }
  return q;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "right-test") {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace right::testing
