#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace right::retriever {

enum class Backend { kSparse, kDense };

std::string_view to_string(Backend backend);
Backend backend_from_string(std::string_view s);

struct RetrieverConfig {
  std::size_t top_n = 10;
  Backend backend = Backend::kSparse;
  double bm25_k1 = 1.2;
  double bm25_b = 0.75;
  std::size_t embed_dim = 512;
  // Empty: use the built-in hashed-feature embedder. Otherwise an http(s)
  // URL speaking the embedding wire format.
  std::string embedding_endpoint;

  // Throws ConfigError when an invariant is violated.
  void validate() const;

  bool operator==(const RetrieverConfig&) const = default;
};

}  // namespace right::retriever
