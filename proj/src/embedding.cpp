#include "right/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "httplib.h"
#include "json.hpp"
#include "right/errors.hpp"
#include "http_endpoint.hpp"
#include "right/text.hpp"

namespace right::retriever {

EmbeddingVector EmbeddingVector::from_raw(std::vector<double> raw) {
  double sq = 0.0;
  for (double v : raw) sq += v * v;
  EmbeddingVector out;
  if (sq > 0.0 && std::isfinite(sq)) {
    const double inv = 1.0 / std::sqrt(sq);
    for (double& v : raw) v *= inv;
    out.zero = false;
  } else {
    std::fill(raw.begin(), raw.end(), 0.0);
    out.zero = true;
  }
  out.values = std::move(raw);
  return out;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.zero || b.zero) return 0.0;
  if (a.dim() != b.dim()) throw std::invalid_argument("cosine: dimension mismatch");
  double dot = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) dot += a.values[i] * b.values[i];
  return dot;
}

EmbeddingVector EmbeddingProvider::embed(std::string_view text) const {
  const std::string owned(text);
  auto out = embed_batch(std::span<const std::string>(&owned, 1));
  return std::move(out.front());
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kWordSeed = 0x77a1c3e5d2b4f601ULL;
constexpr std::uint64_t kGramSeed = 0x3c9e1f0b6a8d2457ULL;

void collect_features(std::string_view input, corpus::LanguageMode mode,
                      std::unordered_map<std::uint64_t, std::uint32_t>& out) {
  const auto tokens = corpus::tokenize(input, mode);
  for (const auto& t : tokens) ++out[text::fnv1a64(t, kWordSeed)];
  const auto cps = text::utf8_code_points(text::join(tokens, " "));
  for (std::size_t n = 2; n <= 4; ++n) {
    if (cps.size() < n) break;
    for (std::size_t i = 0; i + n <= cps.size(); ++i) {
      std::string gram;
      for (std::size_t k = 0; k < n; ++k) gram += cps[i + k];
      // n is mixed into the seed so grams of different lengths never alias.
      ++out[text::fnv1a64(gram, kGramSeed + n)];
    }
  }
}

}  // namespace

HashedFeatureEmbedder::HashedFeatureEmbedder(const corpus::Corpus& corpus, const RetrieverConfig& config)
    : doc_count_(corpus.size()), mode_(corpus.language_mode()), dim_(config.embed_dim) {
  config.validate();
  std::unordered_map<std::uint64_t, std::uint32_t> doc_features;
  for (const auto& p : corpus.pairs()) {
    doc_features.clear();
    collect_features(p.text, mode_, doc_features);
    for (const auto& [feature, count] : doc_features) ++df_[feature];
  }
}

HashedFeatureEmbedder::HashedFeatureEmbedder(std::unordered_map<std::uint64_t, std::uint32_t> document_frequency,
                                             std::size_t doc_count, corpus::LanguageMode mode, std::size_t dim)
    : df_(std::move(document_frequency)), doc_count_(doc_count), mode_(mode), dim_(dim) {
  if (dim_ < 8) throw ConfigError("embed_dim must be >= 8");
}

std::unordered_map<std::uint64_t, std::uint32_t> HashedFeatureEmbedder::features(std::string_view text) const {
  std::unordered_map<std::uint64_t, std::uint32_t> out;
  collect_features(text, mode_, out);
  return out;
}

double HashedFeatureEmbedder::idf(std::uint64_t feature) const {
  auto it = df_.find(feature);
  const double df = it == df_.end() ? 0.0 : static_cast<double>(it->second);
  return std::log((1.0 + static_cast<double>(doc_count_)) / (1.0 + df)) + 1.0;
}

std::vector<std::size_t> HashedFeatureEmbedder::active_buckets(std::string_view text) const {
  std::set<std::size_t> buckets;
  for (const auto& [feature, count] : features(text)) buckets.insert(feature % dim_);
  return {buckets.begin(), buckets.end()};
}

EmbeddingVector HashedFeatureEmbedder::embed_text(std::string_view text) const {
  // Accumulate in sorted feature order: unordered_map iteration order would
  // make the floating-point sums depend on the hash table layout.
  auto feats = features(text);
  std::vector<std::pair<std::uint64_t, std::uint32_t>> sorted(feats.begin(), feats.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> raw(dim_, 0.0);
  for (const auto& [feature, tf] : sorted) {
    raw[feature % dim_] += std::log1p(static_cast<double>(tf)) * idf(feature);
  }
  return EmbeddingVector::from_raw(std::move(raw));
}

std::vector<EmbeddingVector> HashedFeatureEmbedder::embed_batch(std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_text(t));
  return out;
}

// ---------------------------------------------------------------------------

RemoteEmbeddingProvider::RemoteEmbeddingProvider(std::string endpoint, std::size_t dim, std::size_t batch_size)
    : endpoint_(std::move(endpoint)), dim_(dim), batch_size_(std::max<std::size_t>(1, batch_size)) {
  if (dim_ < 8) throw ConfigError("embed_dim must be >= 8");
  parse_http_endpoint(endpoint_);  // validates eagerly
}

std::vector<EmbeddingVector> RemoteEmbeddingProvider::embed_batch(std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); i += batch_size_) {
    auto chunk = request(texts.subspan(i, std::min(batch_size_, texts.size() - i)));
    for (auto& v : chunk) out.push_back(std::move(v));
  }
  return out;
}

std::vector<EmbeddingVector> RemoteEmbeddingProvider::request(std::span<const std::string> texts) const {
  const HttpEndpoint ep = parse_http_endpoint(endpoint_);
  nlohmann::json body = {{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
  auto client = make_http_client(ep);
  auto res = client->Post(ep.path, body.dump(), "application/json");
  if (!res) {
    throw BackendError("embedding provider " + endpoint_ + " unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw BackendError("embedding provider " + endpoint_ + " returned HTTP " + std::to_string(res->status));
  }
  std::vector<EmbeddingVector> out;
  try {
    const auto reply = nlohmann::json::parse(res->body);
    const auto& vectors = reply.at("vectors");
    if (!vectors.is_array() || vectors.size() != texts.size()) {
      throw BackendError("embedding provider " + endpoint_ + " returned " + std::to_string(vectors.size()) +
                         " vectors for " + std::to_string(texts.size()) + " texts");
    }
    for (const auto& v : vectors) {
      auto raw = v.get<std::vector<double>>();
      if (raw.size() != dim_) {
        throw BackendError("embedding provider " + endpoint_ + " returned dimension " + std::to_string(raw.size()) +
                           ", expected " + std::to_string(dim_));
      }
      out.push_back(EmbeddingVector::from_raw(std::move(raw)));
    }
  } catch (const nlohmann::json::exception& e) {
    throw BackendError("embedding provider " + endpoint_ + " sent a malformed response: " + e.what());
  }
  return out;
}

}  // namespace right::retriever
