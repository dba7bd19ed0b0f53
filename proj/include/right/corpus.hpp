#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace right::corpus {

enum class LanguageMode {
  kSpaceDelimited,      // English and other whitespace-separated scripts
  kCharacterDelimited,  // Chinese: one token per code point
};

std::string_view to_string(LanguageMode mode);
LanguageMode language_mode_from_string(std::string_view s);

struct TweetHashtagPair {
  std::string id;
  std::string text;
  std::vector<std::string> hashtags;  // leading "#" and outer whitespace stripped by Corpus

  bool operator==(const TweetHashtagPair&) const = default;
};

// An immutable, validated collection of tweet/hashtag pairs. File order is
// preserved and serves as the tie-break everywhere downstream.
class Corpus {
 public:
  // Validates ids (unique), texts (non-blank), and hashtags (non-empty
  // strings). Unless `allow_unlabeled`, every pair needs at least one hashtag.
  Corpus(std::vector<TweetHashtagPair> pairs, LanguageMode mode, bool allow_unlabeled = false);

  const std::vector<TweetHashtagPair>& pairs() const { return pairs_; }
  const TweetHashtagPair& operator[](std::size_t i) const { return pairs_[i]; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  LanguageMode language_mode() const { return mode_; }

  // Index of the pair with this id, or npos.
  std::size_t find(std::string_view id) const;

  // Stable content digest over the serialized records and language mode.
  const std::string& digest() const { return digest_; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<TweetHashtagPair> pairs_;
  LanguageMode mode_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::string digest_;
};

struct CorpusStats {
  std::size_t pair_count = 0;
  double avg_hashtags_per_pair = 0.0;
  double avg_tweet_len_tokens = 0.0;
  double avg_hashtag_len_tokens = 0.0;
};

struct LoadOptions {
  // Query files (e.g. a batch of tweets to tag) may carry no hashtags.
  bool allow_unlabeled = false;
};

// Reads line-delimited JSON records {"id","text","hashtags"} or the
// tab-separated `id<TAB>text<TAB>tag1;tag2` form; blank lines are skipped.
Corpus load_corpus(const std::filesystem::path& path, LanguageMode mode, LoadOptions options = {});
Corpus parse_corpus(std::istream& in, LanguageMode mode, LoadOptions options = {},
                    std::string_view source_name = "<stream>");

// Writes the JSON-lines form. load_corpus(save_corpus(c)) reproduces c.
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
void write_corpus(const Corpus& corpus, std::ostream& out);
std::string serialize_pair(const TweetHashtagPair& pair);

std::vector<std::string> tokenize(std::string_view text, LanguageMode mode);

// Canonical match form of a hashtag: trimmed, leading '#' marks removed,
// ASCII-lowercased in space-delimited mode, internal whitespace collapsed.
// Throws DataError("empty hashtag") when nothing remains.
std::string normalize_hashtag(std::string_view raw, LanguageMode mode = LanguageMode::kSpaceDelimited);

CorpusStats corpus_stats(const Corpus& corpus);

struct PoolEntry {
  std::string hashtag;
  std::size_t count = 0;

  bool operator==(const PoolEntry&) const = default;
};

// All canonical hashtags with occurrence counts, most frequent first, ties
// broken lexicographically.
std::vector<PoolEntry> hashtag_pool(const Corpus& corpus);

}  // namespace right::corpus
