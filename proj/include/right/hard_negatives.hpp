#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "right/corpus.hpp"
#include "right/selector.hpp"
#include "right/text.hpp"

namespace right::selector {

enum class PerturbationKind { kSynonymReplace, kDelete, kSwapAdjacent, kInsertSynonym };

std::string_view to_string(PerturbationKind kind);

// word -> synonyms. File form: `word<TAB>syn1,syn2,...` per line.
class SynonymLexicon {
 public:
  SynonymLexicon() = default;
  // Throws DataError when a list is empty or a word is its own only synonym.
  explicit SynonymLexicon(std::map<std::string, std::vector<std::string>> entries);

  static SynonymLexicon load(const std::filesystem::path& path);
  static SynonymLexicon parse(std::istream& in, std::string_view source_name = "<stream>");

  // Synonyms of `word` other than the word itself; empty if none.
  std::vector<std::string> synonyms(std::string_view word) const;
  const std::map<std::string, std::vector<std::string>, std::less<>>& entries() const { return entries_; }

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> entries_;
};

struct PerturbedHashtag {
  std::string text;
  PerturbationKind kind = PerturbationKind::kSynonymReplace;  // the operation actually applied
  bool degenerate = false;  // no applicable operation; text is the input unchanged
};

// Applies one operation to one uniformly chosen word of a whitespace-split
// hashtag. Fallbacks: swap/delete on a single word become synonym-replace; a
// synonym operation on a word without synonyms becomes delete when the
// hashtag has more than one word, otherwise the result is degenerate.
PerturbedHashtag perturb_hashtag(std::string_view hashtag, const SynonymLexicon& lexicon, text::Rng& rng,
                                 const SelectorConfig& config);

// Same, with operation and position fixed (fallbacks still apply).
PerturbedHashtag perturb_hashtag_at(std::string_view hashtag, const SynonymLexicon& lexicon, text::Rng& rng,
                                    PerturbationKind kind, std::size_t position);

struct HardNegativeTriple {
  std::string anchor_tweet;
  std::string positive;
  std::string negative;
  PerturbationKind kind = PerturbationKind::kSynonymReplace;

  bool operator==(const HardNegativeTriple&) const = default;
};

// One triple per (tweet, labeled hashtag) in corpus order, degenerate ones
// dropped. Pure function of (corpus, lexicon, config.rng_seed).
std::vector<HardNegativeTriple> build_training_triples(const corpus::Corpus& corpus, const SynonymLexicon& lexicon,
                                                       const SelectorConfig& config);

// Line-delimited {"anchor","positive","negative","kind"} records.
void write_triples(const std::vector<HardNegativeTriple>& triples, std::ostream& out);

}  // namespace right::selector
