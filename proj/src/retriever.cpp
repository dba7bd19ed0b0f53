#include "right/retriever.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "right/errors.hpp"
#include "right/text.hpp"

namespace right::retriever {

using nlohmann::json;

std::string_view to_string(Backend backend) { return backend == Backend::kSparse ? "sparse" : "dense"; }

Backend backend_from_string(std::string_view s) {
  if (s == "sparse" || s == "bm25") return Backend::kSparse;
  if (s == "dense") return Backend::kDense;
  throw ConfigError("unknown retriever backend '" + std::string(s) + "' (expected sparse|dense)");
}

void RetrieverConfig::validate() const {
  if (top_n < 1) throw ConfigError("retriever.top_n must be >= 1");
  if (!(bm25_b >= 0.0 && bm25_b <= 1.0)) throw ConfigError("retriever.bm25_b must be in [0,1]");
  if (!(bm25_k1 >= 0.0)) throw ConfigError("retriever.bm25_k1 must be >= 0");
  if (embed_dim < 8) throw ConfigError("retriever.embed_dim must be >= 8");
}

void normalize_hit_scores(std::vector<RetrievalHit>& hits) {
  if (hits.empty()) return;
  auto [lo, hi] = std::minmax_element(hits.begin(), hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
    return a.raw_score < b.raw_score;
  });
  const double min = lo->raw_score;
  const double range = hi->raw_score - min;
  for (auto& h : hits) h.normalized_score = range > 0.0 ? (h.raw_score - min) / range : 1.0;
}

std::shared_ptr<const EmbeddingProvider> make_embedding_provider(const corpus::Corpus& corpus,
                                                                 const RetrieverConfig& config) {
  if (!config.embedding_endpoint.empty()) {
    return std::make_shared<RemoteEmbeddingProvider>(config.embedding_endpoint, config.embed_dim);
  }
  return std::make_shared<HashedFeatureEmbedder>(corpus, config);
}

Retriever::Retriever(const corpus::Corpus& corpus, RetrieverConfig config,
                     std::shared_ptr<const EmbeddingProvider> embedder)
    : corpus_(&corpus), config_(std::move(config)) {
  config_.validate();
  if (corpus.empty()) throw DataError("retriever: empty corpus");
  if (config_.backend == Backend::kSparse) {
    sparse_ = build_sparse_index(corpus, config_);
    return;
  }
  embedder_ = embedder ? std::move(embedder) : make_embedding_provider(corpus, config_);
  if (embedder_->dim() != config_.embed_dim) {
    throw ConfigError("embedding provider " + embedder_->name() + " has dimension " +
                      std::to_string(embedder_->dim()) + ", config says " + std::to_string(config_.embed_dim));
  }
  embed_corpus();
}

Retriever::Retriever(const corpus::Corpus& corpus, RetrieverConfig config, SparseIndex index)
    : corpus_(&corpus), config_(std::move(config)), sparse_(std::move(index)) {}

Retriever::Retriever(const corpus::Corpus& corpus, RetrieverConfig config,
                     std::shared_ptr<const EmbeddingProvider> embedder, bool /*from_snapshot*/)
    : corpus_(&corpus), config_(std::move(config)), embedder_(std::move(embedder)) {
  embed_corpus();
}

void Retriever::embed_corpus() {
  std::vector<std::string> texts;
  texts.reserve(corpus_->size());
  for (const auto& p : corpus_->pairs()) texts.push_back(p.text);
  const auto vectors = embedder_->embed_batch(texts);
  doc_embeddings_.clear();
  doc_embeddings_.reserve(vectors.size());
  for (const auto& v : vectors) {
    SparseRow row;
    if (!v.zero) {
      for (std::size_t i = 0; i < v.values.size(); ++i) {
        if (v.values[i] != 0.0) row.entries.emplace_back(static_cast<std::uint32_t>(i), v.values[i]);
      }
    }
    doc_embeddings_.push_back(std::move(row));
  }
}

std::vector<double> Retriever::score_all(std::string_view tweet) const {
  if (sparse_) return bm25_score_all(*sparse_, corpus::tokenize(tweet, corpus_->language_mode()), config_);
  const EmbeddingVector q = embedder_->embed(tweet);
  std::vector<double> scores(doc_embeddings_.size(), 0.0);
  if (q.zero) return scores;
  for (std::size_t d = 0; d < doc_embeddings_.size(); ++d) {
    double dot = 0.0;
    for (const auto& [i, v] : doc_embeddings_[d].entries) dot += q.values[i] * v;
    scores[d] = dot;
  }
  return scores;
}

std::vector<RetrievalHit> Retriever::retrieve(std::string_view tweet) const { return retrieve(tweet, config_.top_n); }

std::vector<RetrievalHit> Retriever::retrieve(std::string_view tweet, std::size_t top_n) const {
  const auto scores = score_all(tweet);
  std::vector<std::size_t> order;
  order.reserve(scores.size());
  for (std::size_t d = 0; d < scores.size(); ++d) {
    if (sparse_ && scores[d] <= 0.0) continue;
    order.push_back(d);
  }
  const auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  const std::size_t keep = std::min(top_n, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(), better);
  order.resize(keep);

  std::vector<RetrievalHit> hits;
  hits.reserve(keep);
  for (std::size_t d : order) hits.push_back({&(*corpus_)[d], d, scores[d], 0.0});
  return hits;
}

// ---------------------------------------------------------------------------
// Snapshots

namespace {

constexpr const char* kSnapshotFormat = "right-index";
constexpr int kSnapshotVersion = 1;

json config_echo(const RetrieverConfig& c) {
  return {{"backend", to_string(c.backend)},
          {"bm25_k1", c.bm25_k1},
          {"bm25_b", c.bm25_b},
          {"embed_dim", c.embed_dim},
          {"embedding_endpoint", c.embedding_endpoint}};
}

}  // namespace

void Retriever::save_snapshot(const std::filesystem::path& path) const {
  json snap;
  snap["format"] = kSnapshotFormat;
  snap["version"] = kSnapshotVersion;
  snap["config"] = config_echo(config_);
  snap["corpus_digest"] = corpus_->digest();
  snap["language_mode"] = corpus::to_string(corpus_->language_mode());
  snap["doc_count"] = corpus_->size();
  if (sparse_) {
    snap["doc_lengths"] = sparse_->doc_lengths;
    snap["avg_doc_length"] = sparse_->avg_doc_length;
    json postings = json::object();
    for (const auto& [token, list] : sparse_->postings) {
      json arr = json::array();
      for (const auto& p : list) arr.push_back({p.doc, p.tf});
      postings[token] = std::move(arr);
    }
    snap["postings"] = std::move(postings);
  } else if (const auto* hashed = dynamic_cast<const HashedFeatureEmbedder*>(embedder_.get())) {
    std::vector<std::pair<std::uint64_t, std::uint32_t>> df(hashed->document_frequency().begin(),
                                                           hashed->document_frequency().end());
    std::sort(df.begin(), df.end());
    json arr = json::array();
    for (const auto& [feature, count] : df) arr.push_back({text::hex64(feature), count});
    snap["document_frequency"] = std::move(arr);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write index snapshot " + path.string());
  out << snap.dump() << '\n';
}

Retriever Retriever::load_snapshot(const std::filesystem::path& path, const corpus::Corpus& corpus,
                                   const RetrieverConfig& config) {
  config.validate();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open index snapshot " + path.string());
  json snap;
  try {
    snap = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("index snapshot " + path.string() + " is not valid JSON: " + e.what());
  }
  const std::string where = "index snapshot " + path.string();
  try {
    if (snap.at("format") != kSnapshotFormat) throw DataError(where + ": unknown format");
    if (snap.at("version") != kSnapshotVersion) {
      throw DataError(where + ": unsupported version " + snap.at("version").dump());
    }
    if (snap.at("config") != config_echo(config)) {
      throw DataError(where + ": config mismatch (snapshot " + snap.at("config").dump() + ", requested " +
                      config_echo(config).dump() + ")");
    }
    if (snap.at("corpus_digest") != corpus.digest()) throw DataError(where + ": built over a different corpus");
    if (snap.at("doc_count").get<std::size_t>() != corpus.size()) throw DataError(where + ": doc count mismatch");

    if (config.backend == Backend::kSparse) {
      SparseIndex index;
      index.language_mode = corpus.language_mode();
      index.doc_count = corpus.size();
      index.doc_lengths = snap.at("doc_lengths").get<std::vector<std::uint32_t>>();
      if (index.doc_lengths.size() != index.doc_count) throw DataError(where + ": doc_lengths size mismatch");
      const double total = std::accumulate(index.doc_lengths.begin(), index.doc_lengths.end(), 0.0);
      index.avg_doc_length = total / static_cast<double>(index.doc_count);
      for (const auto& [token, arr] : snap.at("postings").items()) {
        auto& list = index.postings[token];
        for (const auto& entry : arr) {
          Posting p{entry.at(0).get<std::uint32_t>(), entry.at(1).get<std::uint32_t>()};
          if (p.doc >= index.doc_count) throw DataError(where + ": posting ordinal out of range");
          if (!list.empty() && list.back().doc >= p.doc) throw DataError(where + ": postings not sorted");
          list.push_back(p);
        }
      }
      return Retriever(corpus, config, std::move(index));
    }

    std::shared_ptr<const EmbeddingProvider> provider;
    if (config.embedding_endpoint.empty()) {
      std::unordered_map<std::uint64_t, std::uint32_t> df;
      for (const auto& entry : snap.at("document_frequency")) {
        df.emplace(std::stoull(entry.at(0).get<std::string>(), nullptr, 16), entry.at(1).get<std::uint32_t>());
      }
      provider = std::make_shared<HashedFeatureEmbedder>(std::move(df), corpus.size(), corpus.language_mode(),
                                                         config.embed_dim);
    } else {
      provider = std::make_shared<RemoteEmbeddingProvider>(config.embedding_endpoint, config.embed_dim);
    }
    return Retriever(corpus, config, std::move(provider), true);
  } catch (const json::exception& e) {
    throw DataError(where + ": malformed: " + e.what());
  }
}

}  // namespace right::retriever
