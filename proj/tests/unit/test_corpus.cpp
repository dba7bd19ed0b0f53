#include <catch_amalgamated.hpp>

#include <numeric>
#include <random>
#include <sstream>

#include "right/corpus.hpp"
#include "right/errors.hpp"
#include "synthetic.hpp"

using namespace right;
using namespace right::corpus;
using Catch::Matchers::ContainsSubstring;

namespace {

Corpus parse(const std::string& s, LanguageMode mode = LanguageMode::kSpaceDelimited, LoadOptions opts = {}) {
  std::istringstream in(s);
  return parse_corpus(in, mode, opts, "mem");
}

}  // namespace

TEST_CASE("load_corpus reads JSON lines in file order") {
  const auto c = parse(
      "{\"id\":\"1\",\"text\":\"first\",\"hashtags\":[\"a\"]}\n"
      "{\"id\":\"2\",\"text\":\"second\",\"hashtags\":[\"#wvd\"]}\n"
      "{\"id\":\"3\",\"text\":\"third\",\"hashtags\":[\" b \",\"c\"]}\n");
  REQUIRE(c.size() == 3);
  CHECK(c[0].id == "1");
  CHECK(c[1].hashtags == std::vector<std::string>{"wvd"});
  CHECK(c[2].hashtags == std::vector<std::string>{"b", "c"});
  CHECK(corpus_stats(c).pair_count == 3);
}

TEST_CASE("load_corpus accepts the tab-separated form") {
  const auto c = parse("x1\tkobe is gone\t#Kobe;rip kobe\n\nx2\tlakers\tlakers\n");
  REQUIRE(c.size() == 2);
  CHECK(c[0].text == "kobe is gone");
  CHECK(c[0].hashtags == std::vector<std::string>{"Kobe", "rip kobe"});
}

TEST_CASE("load_corpus errors name the line or id") {
  CHECK_THROWS_WITH(parse("{\"id\":\"1\",\"text\":\"a\",\"hashtags\":[\"x\"]}\n{broken\n"),
                    ContainsSubstring("mem:2"));
  CHECK_THROWS_WITH(parse("1\ta\tx\n1\tb\ty\n"), ContainsSubstring("'1'"));
  CHECK_THROWS_AS(parse(""), DataError);
  CHECK_THROWS_AS(parse("1\t   \tx\n"), DataError);
  CHECK_THROWS_AS(parse("1\ttext\t\n"), DataError);
  CHECK_NOTHROW(parse("1\ttext\t\n", LanguageMode::kSpaceDelimited, {true}));
  CHECK_THROWS_AS(parse("1\ttext\t#\n", LanguageMode::kSpaceDelimited, {true}), DataError);
}

TEST_CASE("load_corpus from disk; missing file is a data error") {
  testing::TempDir dir;
  testing::write_file(dir / "c.tsv", "a\thello world\tx;y\n");
  CHECK(load_corpus(dir / "c.tsv", LanguageMode::kSpaceDelimited).size() == 1);
  CHECK_THROWS_AS(load_corpus(dir / "missing.tsv", LanguageMode::kSpaceDelimited), DataError);
}

TEST_CASE("tokenize, space mode") {
  CHECK(tokenize("Geeks guide, to Teams!", LanguageMode::kSpaceDelimited) ==
        std::vector<std::string>{"geeks", "guide", "to", "teams"});
  CHECK(tokenize("", LanguageMode::kSpaceDelimited).empty());
  CHECK(tokenize(" ... !! ", LanguageMode::kSpaceDelimited).empty());
  CHECK(tokenize("don't stop", LanguageMode::kSpaceDelimited) == std::vector<std::string>{"don't", "stop"});
}

TEST_CASE("tokenize, character mode") {
  CHECK(tokenize("世界杯 ok", LanguageMode::kCharacterDelimited) == std::vector<std::string>{"世", "界", "杯", "ok"});
  CHECK(tokenize("", LanguageMode::kCharacterDelimited).empty());
  CHECK(tokenize("中国NBA队", LanguageMode::kCharacterDelimited) ==
        std::vector<std::string>{"中", "国", "NBA", "队"});
}

TEST_CASE("tokenize is idempotent on its joined output in space mode") {
  std::mt19937_64 rng(3);
  const std::string alphabet = "aB,.! x-'";
  for (int i = 0; i < 500; ++i) {
    std::string s;
    std::uniform_int_distribution<std::size_t> len(0, 20), ch(0, alphabet.size() - 1);
    for (std::size_t j = len(rng); j > 0; --j) s += alphabet[ch(rng)];
    std::vector<std::string> once = tokenize(s, LanguageMode::kSpaceDelimited);
    std::string joined;
    for (std::size_t j = 0; j < once.size(); ++j) joined += (j ? " " : "") + once[j];
    CHECK(tokenize(joined, LanguageMode::kSpaceDelimited) == once);
  }
}

TEST_CASE("normalize_hashtag") {
  CHECK(normalize_hashtag("  #World  Cup ") == "world cup");
  CHECK(normalize_hashtag("wvd") == "wvd");
  CHECK(normalize_hashtag("#WVD") == "wvd");
  CHECK(normalize_hashtag("#WVD", LanguageMode::kCharacterDelimited) == "WVD");
  CHECK_THROWS_WITH(normalize_hashtag("  # "), ContainsSubstring("empty hashtag"));
  for (const char* raw : {"##a", "  #A  b", "x", "# #y"}) {
    const auto once = normalize_hashtag(raw);
    CHECK(normalize_hashtag(once) == once);
  }
}

TEST_CASE("corpus_stats") {
  const auto two = parse("1\tone two\ta\n2\tthree\ta;b;c\n");
  CHECK(corpus_stats(two).avg_hashtags_per_pair == 2.0);
  const auto one = parse("1\ta b c d e\tx\n");
  CHECK(corpus_stats(one).avg_tweet_len_tokens == 5.0);
  CHECK(corpus_stats(two).avg_hashtag_len_tokens == 1.0);
}

TEST_CASE("hashtag_pool counts canonical forms") {
  const auto c = parse("1\tt\ta;b\n2\tt\tA\n");
  CHECK(hashtag_pool(c) == std::vector<PoolEntry>{{"a", 2}, {"b", 1}});
  const auto ties = parse("1\tt\tb\n2\tt\ta\n");
  CHECK(hashtag_pool(ties) == std::vector<PoolEntry>{{"a", 1}, {"b", 1}});
  const auto unlabeled = parse("1\tt\t\n", LanguageMode::kSpaceDelimited, {true});
  CHECK(hashtag_pool(unlabeled).empty());
}

TEST_CASE("hashtag_pool counts sum to the hashtag occurrences") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Corpus c(testing::random_pairs(rng, {}), LanguageMode::kSpaceDelimited);
    std::size_t occurrences = 0;
    for (const auto& p : c.pairs()) occurrences += p.hashtags.size();
    std::size_t total = 0;
    for (const auto& e : hashtag_pool(c)) total += e.count;
    CHECK(total == occurrences);
  }
}

TEST_CASE("serialize then load is a fixed point") {
  std::mt19937_64 rng(5);
  auto pairs = testing::random_pairs(rng, {});
  pairs[0].text = "quote \" and tab\t and 世界";
  pairs[1].hashtags = {"#Mixed Case", "two  spaces"};
  const Corpus first(pairs, LanguageMode::kSpaceDelimited);
  std::ostringstream out;
  write_corpus(first, out);
  const auto second = parse(out.str());
  CHECK(second.pairs() == first.pairs());
  CHECK(second.digest() == first.digest());
  std::ostringstream again;
  write_corpus(second, again);
  CHECK(again.str() == out.str());
}

TEST_CASE("language mode strings") {
  CHECK(language_mode_from_string("space") == LanguageMode::kSpaceDelimited);
  CHECK(language_mode_from_string("char") == LanguageMode::kCharacterDelimited);
  CHECK_THROWS_AS(language_mode_from_string("zh"), ConfigError);
}
