// Copyright 2026 The SimCT Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// Semantic similarity feature: cosine of two embeddings, clamped to [0,1].
//
// Two providers are available. The remote provider POSTs {"input": text} to
// an embedding endpoint and expects {"embedding": [numbers]}; the bearer
// token comes from SIMCT_EMBED_TOKEN. The builtin provider is an offline
// stand-in: the text is lowercased, whitespace runs collapse to one space and
// are trimmed, then every run of `ngram_order` consecutive scalars (the whole
// text when it is shorter) is hashed with 64-bit FNV-1a over its UTF-8 bytes
// into bucket `hash % dim`. The bucket counts are L2-normalized.

#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "simct/error.hpp"
#include "simct/hash.hpp"
#include "simct/http.hpp"
#include "simct/utf8.hpp"

namespace simct::dense {

enum class ProviderKind { builtin_hashed_ngram, remote_endpoint };

struct ProviderConfig {
  ProviderKind kind = ProviderKind::builtin_hashed_ngram;
  std::optional<std::string> endpoint_url;
  int ngram_order = 3;
  int dim = 512;
  // remote only
  int max_in_flight = 4;
  int retry_limit = 3;
  std::chrono::milliseconds initial_backoff{100};
  double timeout_s = 30.0;
  std::string token_env = "SIMCT_EMBED_TOKEN";
};

struct EmbeddingVector {
  std::vector<double> values;
  bool zero = false;  // no signal (empty text); not an error

  std::size_t dim() const noexcept { return values.size(); }
};

// Text normalization applied before n-gram extraction by the builtin provider.
inline std::u32string normalize_for_ngrams(std::string_view text) {
  std::u32string out;
  bool pending_space = false;
  for (char32_t c : utf8::decode(text)) {
    if (utf8::is_whitespace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(utf8::to_lower(c));
  }
  return out;
}

inline std::size_t ngram_bucket(std::u32string_view gram, int dim) {
  return static_cast<std::size_t>(fnv1a64(utf8::encode(gram)) %
                                  static_cast<std::uint64_t>(dim));
}

inline EmbeddingVector hashed_ngram_embedding(std::string_view text, int order, int dim) {
  EmbeddingVector v;
  v.values.assign(static_cast<std::size_t>(dim), 0.0);
  const std::u32string norm = normalize_for_ngrams(text);
  if (norm.empty()) {
    v.zero = true;
    return v;
  }
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(order), norm.size());
  for (std::size_t i = 0; i + n <= norm.size(); ++i)
    v.values[ngram_bucket(std::u32string_view(norm).substr(i, n), dim)] += 1.0;
  double sq = 0.0;
  for (double x : v.values) sq += x * x;
  const double norm2 = std::sqrt(sq);
  for (double& x : v.values) x /= norm2;
  return v;
}

// Handle to a configured provider. Copies share the in-flight bound and the
// dimension learned from the first remote response.
class EmbeddingProvider {
 public:
  explicit EmbeddingProvider(ProviderConfig config = {})
      : state_(std::make_shared<State>(std::move(config))) {
    const auto& c = state_->config;
    if (c.kind == ProviderKind::remote_endpoint) {
      if (!c.endpoint_url || c.endpoint_url->empty())
        throw InvalidArgument("remote embedding provider requires endpoint_url");
      http::parse_url(*c.endpoint_url);
      if (c.max_in_flight < 1) throw InvalidArgument("max_in_flight must be >= 1");
    } else {
      if (c.ngram_order < 1) throw InvalidArgument("ngram_order must be >= 1");
      if (c.dim < 1) throw InvalidArgument("dim must be >= 1");
    }
  }

  const ProviderConfig& config() const noexcept { return state_->config; }

  EmbeddingVector embed(std::string_view text) const {
    const auto& c = state_->config;
    if (c.kind == ProviderKind::builtin_hashed_ngram)
      return hashed_ngram_embedding(text, c.ngram_order, c.dim);
    if (normalize_for_ngrams(text).empty()) {
      EmbeddingVector v;
      v.values.assign(state_->dim.load(), 0.0);
      v.zero = true;
      return v;
    }
    return remote_embed(text);
  }

 private:
  struct State {
    explicit State(ProviderConfig c)
        : config(std::move(c)), in_flight(std::max(1, config.max_in_flight)) {}
    ProviderConfig config;
    std::counting_semaphore<4096> in_flight;
    std::atomic<std::size_t> dim{0};
  };

  EmbeddingVector remote_embed(std::string_view text) const {
    const auto& c = state_->config;
    const auto token = http::env_token(c.token_env);
    const nlohmann::json body = {{"input", std::string(text)}};
    auto once = [&]() -> EmbeddingVector {
      state_->in_flight.acquire();
      struct Release {
        std::counting_semaphore<4096>& s;
        ~Release() { s.release(); }
      } release{state_->in_flight};
      http::Response res;
      try {
        res = http::post_json(*c.endpoint_url, body, token, c.timeout_s);
      } catch (const http::TransportError& e) {
        throw ProviderError(e.what());
      }
      if (res.status != 200)
        throw ProviderError("embedding endpoint returned HTTP " + std::to_string(res.status));
      EmbeddingVector v;
      try {
        const auto doc = nlohmann::json::parse(res.body);
        for (const auto& x : doc.at("embedding")) v.values.push_back(x.get<double>());
      } catch (const nlohmann::json::exception& e) {
        throw ProviderError(std::string("malformed embedding response: ") + e.what());
      }
      if (v.values.empty()) throw ProviderError("embedding response has no values");
      bool all_zero = true;
      for (double x : v.values) {
        if (!std::isfinite(x)) throw ProviderError("embedding contains non-finite values");
        all_zero = all_zero && x == 0.0;
      }
      v.zero = all_zero;
      return v;
    };
    EmbeddingVector v = http::with_retries(once, c.retry_limit, c.initial_backoff);
    std::size_t expected = 0;
    if (!state_->dim.compare_exchange_strong(expected, v.dim()) && expected != v.dim())
      throw ProviderError("embedding dimension changed from " + std::to_string(expected) +
                          " to " + std::to_string(v.dim()));
    return v;
  }

  std::shared_ptr<State> state_;
};

inline EmbeddingVector embed(const EmbeddingProvider& provider, std::string_view text) {
  return provider.embed(text);
}

inline double cosine01(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) throw ProviderError("embedding dimensions differ");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
}

// Two empty texts are maximally similar; an empty text against a non-empty
// one scores 0.
inline double dense_score(const EmbeddingProvider& provider, std::string_view a,
                          std::string_view b) {
  const bool a_empty = normalize_for_ngrams(a).empty();
  const bool b_empty = normalize_for_ngrams(b).empty();
  if (a_empty && b_empty) return 1.0;
  if (a_empty || b_empty) return 0.0;
  if (a == b) return 1.0;
  const auto ea = provider.embed(a);
  const auto eb = provider.embed(b);
  if (ea.zero || eb.zero) return 0.0;
  return cosine01(ea, eb);
}

}  // namespace simct::dense
