#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

// Byte-level text helpers shared by every module. All functions treat input
// as UTF-8; only ASCII bytes are ever case-folded or classified.
namespace right::text {

std::string_view trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);
std::string collapse_whitespace(std::string_view s);
bool is_ascii_space(char c);

// Splits on every occurrence of `sep` (which must be non-empty).
std::vector<std::string> split(std::string_view s, std::string_view sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Decodes UTF-8 into code points, each returned as its original byte
// sequence. Invalid bytes are passed through one at a time.
std::vector<std::string> utf8_code_points(std::string_view s);

// 64-bit FNV-1a. Used for feature hashing, digests, and mock-backend keys, so
// it must stay stable across platforms and releases.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);
inline std::string digest(std::string_view data) { return hex64(fnv1a64(data)); }

// mt19937_64 with hand-rolled draws: the standard distributions are
// implementation-defined, which would break cross-platform determinism.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform();
  // Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

// Combines a run seed with a per-item key into an independent stream seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key);

}  // namespace right::text
