#include "right/hard_negatives.hpp"

#include <fstream>
#include <ostream>

#include "json.hpp"
#include "right/errors.hpp"

namespace right::selector {

std::string_view to_string(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::kSynonymReplace:
      return "synonym-replace";
    case PerturbationKind::kDelete:
      return "delete";
    case PerturbationKind::kSwapAdjacent:
      return "swap-adjacent";
    case PerturbationKind::kInsertSynonym:
      return "insert-synonym";
  }
  return "unknown";
}

SynonymLexicon::SynonymLexicon(std::map<std::string, std::vector<std::string>> entries) {
  for (auto& [word, syns] : entries) {
    if (syns.empty()) throw DataError("lexicon entry '" + word + "' has no synonyms");
    bool other = false;
    for (const auto& s : syns) {
      if (s.empty()) throw DataError("lexicon entry '" + word + "' has an empty synonym");
      if (s != word) other = true;
    }
    if (!other) throw DataError("lexicon entry '" + word + "' is its own sole synonym");
    entries_.emplace(word, std::move(syns));
  }
}

SynonymLexicon SynonymLexicon::parse(std::istream& in, std::string_view source_name) {
  std::map<std::string, std::vector<std::string>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    const std::string where = std::string(source_name) + ":" + std::to_string(line_no);
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError(where + ": expected word<TAB>synonyms");
    const std::string word(text::trim(std::string_view(line).substr(0, tab)));
    if (word.empty()) throw DataError(where + ": empty word");
    auto& syns = entries[word];
    for (const auto& s : text::split(std::string_view(line).substr(tab + 1), ",")) {
      const auto t = text::trim(s);
      if (!t.empty()) syns.emplace_back(t);
    }
    if (syns.empty()) throw DataError(where + ": no synonyms for '" + word + "'");
  }
  try {
    return SynonymLexicon(std::move(entries));
  } catch (const DataError& e) {
    throw DataError(std::string(source_name) + ": " + e.what());
  }
}

SynonymLexicon SynonymLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open lexicon " + path.string());
  return parse(in, path.string());
}

std::vector<std::string> SynonymLexicon::synonyms(std::string_view word) const {
  auto it = entries_.find(word);
  if (it == entries_.end()) return {};
  std::vector<std::string> out;
  for (const auto& s : it->second) {
    if (s != word) out.push_back(s);
  }
  return out;
}

namespace {

std::vector<std::string> hashtag_words(std::string_view hashtag) {
  std::vector<std::string> words;
  for (auto& w : text::split(text::collapse_whitespace(hashtag), " ")) {
    if (!w.empty()) words.push_back(std::move(w));
  }
  return words;
}

PerturbationKind draw_kind(text::Rng& rng, const SelectorConfig& config) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    acc += config.perturbation_probs[i];
    if (u < acc) return static_cast<PerturbationKind>(i);
  }
  // Rounding left u above the cumulative sum: take the last non-zero kind.
  for (std::size_t i = 4; i-- > 0;) {
    if (config.perturbation_probs[i] > 0.0) return static_cast<PerturbationKind>(i);
  }
  return PerturbationKind::kSynonymReplace;
}

}  // namespace

PerturbedHashtag perturb_hashtag_at(std::string_view hashtag, const SynonymLexicon& lexicon, text::Rng& rng,
                                    PerturbationKind kind, std::size_t position) {
  auto words = hashtag_words(hashtag);
  if (words.empty()) throw DataError("perturb_hashtag: empty hashtag");
  if (position >= words.size()) throw std::out_of_range("perturb_hashtag: position out of range");
  const std::string original = text::join(words, " ");

  if (words.size() == 1 && (kind == PerturbationKind::kSwapAdjacent || kind == PerturbationKind::kDelete)) {
    kind = PerturbationKind::kSynonymReplace;
  }
  std::vector<std::string> syns;
  if (kind == PerturbationKind::kSynonymReplace || kind == PerturbationKind::kInsertSynonym) {
    syns = lexicon.synonyms(words[position]);
    if (syns.empty()) {
      if (words.size() == 1) return {original, kind, true};
      kind = PerturbationKind::kDelete;
    }
  }

  switch (kind) {
    case PerturbationKind::kSynonymReplace:
      words[position] = syns[rng.index(syns.size())];
      break;
    case PerturbationKind::kInsertSynonym:
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(position) + 1, syns[rng.index(syns.size())]);
      break;
    case PerturbationKind::kDelete:
      words.erase(words.begin() + static_cast<std::ptrdiff_t>(position));
      break;
    case PerturbationKind::kSwapAdjacent: {
      // The last word has no right neighbour and swaps leftward.
      const std::size_t other = position + 1 < words.size() ? position + 1 : position - 1;
      std::swap(words[position], words[other]);
      break;
    }
  }
  PerturbedHashtag out{text::join(words, " "), kind, false};
  // e.g. swapping "go go": the operation ran but produced no negative.
  if (out.text == original) out.degenerate = true;
  return out;
}

PerturbedHashtag perturb_hashtag(std::string_view hashtag, const SynonymLexicon& lexicon, text::Rng& rng,
                                 const SelectorConfig& config) {
  const auto words = hashtag_words(hashtag);
  if (words.empty()) throw DataError("perturb_hashtag: empty hashtag");
  const PerturbationKind kind = draw_kind(rng, config);
  const std::size_t position = rng.index(words.size());
  return perturb_hashtag_at(hashtag, lexicon, rng, kind, position);
}

std::vector<HardNegativeTriple> build_training_triples(const corpus::Corpus& corpus, const SynonymLexicon& lexicon,
                                                       const SelectorConfig& config) {
  config.validate();
  if (corpus.empty()) throw DataError("build_training_triples: empty corpus");
  text::Rng rng(config.rng_seed);
  std::vector<HardNegativeTriple> triples;
  for (const auto& pair : corpus.pairs()) {
    for (const auto& raw : pair.hashtags) {
      const std::string positive = corpus::normalize_hashtag(raw, corpus.language_mode());
      auto neg = perturb_hashtag(positive, lexicon, rng, config);
      if (neg.degenerate) continue;
      triples.push_back({pair.text, positive, std::move(neg.text), neg.kind});
    }
  }
  return triples;
}

void write_triples(const std::vector<HardNegativeTriple>& triples, std::ostream& out) {
  for (const auto& t : triples) {
    nlohmann::json rec = {
        {"anchor", t.anchor_tweet}, {"positive", t.positive}, {"negative", t.negative}, {"kind", to_string(t.kind)}};
    out << rec.dump() << '\n';
  }
}

}  // namespace right::selector
