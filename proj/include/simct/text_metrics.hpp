// Copyright 2026 The SimCT Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// Lexical similarity between two responses: ROUGE-1/2/L F1, symmetrized
// sentence BLEU and an exact-match METEOR. All scores lie in [0,1] and are
// symmetric in their two arguments.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "simct/error.hpp"
#include "simct/utf8.hpp"

namespace simct::text {

enum class Scheme { word, character };

struct TokenSequence {
  std::vector<std::string> tokens;
  Scheme scheme = Scheme::word;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
  bool operator==(const TokenSequence&) const = default;
};

// word: maximal runs of non-whitespace, non-punctuation scalars, lowercased.
// character: one token per non-whitespace scalar, case preserved.
inline TokenSequence tokenize(std::string_view text, Scheme scheme) {
  TokenSequence seq;
  seq.scheme = scheme;
  const std::u32string cps = utf8::decode(text);
  if (scheme == Scheme::character) {
    for (char32_t c : cps) {
      if (utf8::is_whitespace(c)) continue;
      std::string tok;
      utf8::append(tok, c);
      seq.tokens.push_back(std::move(tok));
    }
    return seq;
  }
  std::string cur;
  for (char32_t c : cps) {
    if (utf8::is_whitespace(c) || utf8::is_punctuation(c)) {
      if (!cur.empty()) seq.tokens.push_back(std::move(cur));
      cur.clear();
    } else {
      utf8::append(cur, utf8::to_lower(c));
    }
  }
  if (!cur.empty()) seq.tokens.push_back(std::move(cur));
  return seq;
}

// Character scheme when more than half of the non-whitespace scalars across
// all given texts are CJK; word scheme otherwise.
inline Scheme detect_scheme(std::initializer_list<std::string_view> texts) {
  std::size_t total = 0;
  std::size_t cjk = 0;
  for (auto t : texts) {
    for (char32_t c : utf8::decode(t)) {
      if (utf8::is_whitespace(c)) continue;
      ++total;
      if (utf8::is_cjk(c)) ++cjk;
    }
  }
  return 2 * cjk > total ? Scheme::character : Scheme::word;
}

namespace detail {

using GramCounts = std::unordered_map<std::string, int>;

inline std::string join_gram(const std::vector<std::string>& toks,
                             std::size_t start, std::size_t n) {
  std::string key;
  for (std::size_t k = 0; k < n; ++k) {
    if (k) key.push_back('\x1f');
    key += toks[start + k];
  }
  return key;
}

inline GramCounts count_grams(const std::vector<std::string>& toks,
                              std::size_t n) {
  GramCounts counts;
  if (toks.size() < n) return counts;
  for (std::size_t i = 0; i + n <= toks.size(); ++i)
    ++counts[join_gram(toks, i, n)];
  return counts;
}

inline int clipped_overlap(const GramCounts& a, const GramCounts& b) {
  int overlap = 0;
  for (const auto& [gram, ca] : a) {
    auto it = b.find(gram);
    if (it != b.end()) overlap += std::min(ca, it->second);
  }
  return overlap;
}

inline std::size_t lcs_length(const std::vector<std::string>& a,
                              const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace detail

enum class RougeVariant { r1, r2, rl };

// F1 of clipped n-gram overlap (r1, r2) or of the LCS (rl). A non-empty
// sequence shorter than n contributes the whole sequence as its single gram,
// so short identical answers still score 1.
inline double rouge_f1(const TokenSequence& a, const TokenSequence& b,
                       RougeVariant variant) {
  std::size_t n = 0;
  switch (variant) {
    case RougeVariant::r1: n = 1; break;
    case RougeVariant::r2: n = 2; break;
    case RougeVariant::rl: n = 0; break;
    default: throw InvalidArgument("rouge_f1: unknown variant");
  }
  if (a.empty() || b.empty()) return 0.0;
  if (n == 0) {
    const auto lcs = static_cast<double>(detail::lcs_length(a.tokens, b.tokens));
    return detail::clamp01(2.0 * lcs / static_cast<double>(a.size() + b.size()));
  }
  auto grams = [n](const TokenSequence& s) {
    return s.size() < n ? detail::count_grams(s.tokens, s.size())
                        : detail::count_grams(s.tokens, n);
  };
  const auto ga = grams(a);
  const auto gb = grams(b);
  const double total_a = a.size() < n ? 1.0 : static_cast<double>(a.size() - n + 1);
  const double total_b = b.size() < n ? 1.0 : static_cast<double>(b.size() - n + 1);
  const double overlap = detail::clipped_overlap(ga, gb);
  return detail::clamp01(2.0 * overlap / (total_a + total_b));
}

// Sentence BLEU of `candidate` against a single `reference`. An order with
// zero clipped matches uses precision (m+1)/(c+1) = 1/(c+1), where c is the
// number of candidate n-grams of that order. Brevity penalty is
// exp(1 - r/c) when the candidate is not longer than the reference.
inline double sentence_bleu(const TokenSequence& candidate,
                            const TokenSequence& reference, int max_n = 4) {
  if (max_n < 1) throw InvalidArgument("bleu: max_n must be >= 1");
  if (candidate.empty() || reference.empty()) return 0.0;
  double log_sum = 0.0;
  for (int order = 1; order <= max_n; ++order) {
    const auto n = static_cast<std::size_t>(order);
    const auto cand = detail::count_grams(candidate.tokens, n);
    const auto ref = detail::count_grams(reference.tokens, n);
    const double c_n =
        candidate.size() >= n ? static_cast<double>(candidate.size() - n + 1) : 0.0;
    const double m_n = detail::clipped_overlap(cand, ref);
    const double p_n = m_n > 0.0 ? m_n / c_n : (m_n + 1.0) / (c_n + 1.0);
    log_sum += std::log(p_n);
  }
  const double c = static_cast<double>(candidate.size());
  const double r = static_cast<double>(reference.size());
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return detail::clamp01(bp * std::exp(log_sum / max_n));
}

inline double bleu_sym(const TokenSequence& a, const TokenSequence& b,
                       int max_n = 4) {
  return detail::clamp01(0.5 * (sentence_bleu(a, b, max_n) + sentence_bleu(b, a, max_n)));
}

// Exact-match METEOR of `hypothesis` against `reference`. Each hypothesis
// token, left to right, aligns to the leftmost unused identical reference
// token. A chunk is a maximal run of alignments adjacent in both sequences.
inline double meteor_directed(const TokenSequence& hypothesis,
                              const TokenSequence& reference) {
  if (hypothesis.empty() || reference.empty()) return 0.0;
  std::unordered_map<std::string, std::vector<std::size_t>> positions;
  for (std::size_t j = reference.size(); j-- > 0;)
    positions[reference.tokens[j]].push_back(j);  // reversed: back() is leftmost
  std::size_t matches = 0;
  std::size_t chunks = 0;
  bool prev_matched = false;
  std::size_t prev_ref = 0;
  for (const auto& tok : hypothesis.tokens) {
    auto it = positions.find(tok);
    if (it == positions.end() || it->second.empty()) {
      prev_matched = false;
      continue;
    }
    const std::size_t j = it->second.back();
    it->second.pop_back();
    if (!(prev_matched && j == prev_ref + 1)) ++chunks;
    ++matches;
    prev_matched = true;
    prev_ref = j;
  }
  if (matches == 0) return 0.0;
  const double m = static_cast<double>(matches);
  const double precision = m / static_cast<double>(hypothesis.size());
  const double recall = m / static_cast<double>(reference.size());
  const double fmean = 10.0 * precision * recall / (recall + 9.0 * precision);
  const double frag = static_cast<double>(chunks) / m;
  const double penalty = 0.5 * frag * frag * frag;
  return detail::clamp01(fmean * (1.0 - penalty));
}

inline double meteor_sym(const TokenSequence& a, const TokenSequence& b) {
  return detail::clamp01(0.5 * (meteor_directed(a, b) + meteor_directed(b, a)));
}

}  // namespace simct::text
