// Copyright 2026 The SimCT Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <string>

#include "simct/dense_similarity.hpp"
#include "simct/error.hpp"
#include "simct/records.hpp"
#include "simct/text_metrics.hpp"

namespace simct {

inline constexpr std::size_t kNumFeatures = 7;

// Column order of FeatureVector::to_array(). Any change must bump the
// version: trained models refuse vectors built with another layout.
inline constexpr std::array<const char*, kNumFeatures> kFeatureNames = {
    "rouge1", "rouge2", "rougeL", "bleu", "meteor", "dense", "qtype"};
inline constexpr const char* kFeatureLayoutVersion =
    "simct.features/1:rouge1,rouge2,rougeL,bleu,meteor,dense,qtype";
inline constexpr std::size_t kQtypeFeature = 6;

struct FeatureVector {
  double rouge1 = 0.0;
  double rouge2 = 0.0;
  double rougeL = 0.0;
  double bleu = 0.0;
  double meteor = 0.0;
  double dense = 0.0;
  double qtype = 0.0;

  std::array<double, kNumFeatures> to_array() const {
    return {rouge1, rouge2, rougeL, bleu, meteor, dense, qtype};
  }

  bool operator==(const FeatureVector&) const = default;
};

inline FeatureVector features_from_texts(const std::string& a, const std::string& b,
                                         QueryType qtype,
                                         const dense::EmbeddingProvider& provider) {
  const auto scheme = text::detect_scheme({a, b});
  const auto ta = text::tokenize(a, scheme);
  const auto tb = text::tokenize(b, scheme);
  FeatureVector f;
  f.rouge1 = text::rouge_f1(ta, tb, text::RougeVariant::r1);
  f.rouge2 = text::rouge_f1(ta, tb, text::RougeVariant::r2);
  f.rougeL = text::rouge_f1(ta, tb, text::RougeVariant::rl);
  f.bleu = text::bleu_sym(ta, tb, 4);
  f.meteor = text::meteor_sym(ta, tb);
  f.dense = dense::dense_score(provider, a, b);
  f.qtype = static_cast<double>(static_cast<int>(qtype));
  for (double v : f.to_array())
    if (!std::isfinite(v)) throw InvalidData("non-finite feature value");
  return f;
}

inline FeatureVector extract_features(const Query& query, const Response& r_a,
                                      const Response& r_b,
                                      const dense::EmbeddingProvider& provider) {
  if (r_a.query_id != query.id || r_b.query_id != query.id)
    throw InvalidArgument("response query_id does not match query '" + query.id + "'");
  return features_from_texts(r_a.text, r_b.text, query.qtype, provider);
}

}  // namespace simct
