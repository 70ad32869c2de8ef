#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "simct/text_metrics.hpp"

using namespace simct::text;

namespace {

TokenSequence words(std::initializer_list<const char*> ws) {
  TokenSequence s;
  for (const char* w : ws) s.tokens.emplace_back(w);
  return s;
}

TokenSequence auto_tok(const std::string& a, const std::string& b, const std::string& which) {
  return tokenize(which, detect_scheme({a, b}));
}

}  // namespace

TEST(Tokenize, EmptyInput) {
  EXPECT_TRUE(tokenize("", Scheme::word).empty());
  EXPECT_TRUE(tokenize("", Scheme::character).empty());
  EXPECT_TRUE(tokenize("   \t\n", Scheme::word).empty());
}

TEST(Tokenize, WordSchemeLowercasesAndSplits) {
  EXPECT_EQ(tokenize("The cat sat", Scheme::word).tokens, (std::vector<std::string>{"the", "cat", "sat"}));
  EXPECT_EQ(tokenize("Hello, World!  ok?", Scheme::word).tokens,
            (std::vector<std::string>{"hello", "world", "ok"}));
}

TEST(Tokenize, CharacterScheme) {
  EXPECT_EQ(tokenize("猫坐下", Scheme::character).tokens, (std::vector<std::string>{"猫", "坐", "下"}));
  // whitespace is dropped, case kept
  EXPECT_EQ(tokenize("A b", Scheme::character).tokens, (std::vector<std::string>{"A", "b"}));
}

TEST(Tokenize, Deterministic) {
  const std::string t = "Some text, with punctuation; and 数字 mixed in.";
  EXPECT_EQ(tokenize(t, Scheme::word), tokenize(t, Scheme::word));
  EXPECT_EQ(tokenize(t, Scheme::character), tokenize(t, Scheme::character));
}

TEST(Tokenize, SchemeDetection) {
  EXPECT_EQ(detect_scheme({"猫坐在垫子上", "猫躺在垫子上"}), Scheme::character);
  EXPECT_EQ(detect_scheme({"the cat sat", "猫"}), Scheme::word);
  EXPECT_EQ(detect_scheme({"", ""}), Scheme::word);
}

TEST(Rouge, WorkedExamples) {
  const auto a = words({"the", "cat", "sat", "on", "the", "mat"});
  const auto b = words({"the", "cat", "lay", "on", "the", "mat"});
  EXPECT_NEAR(rouge_f1(a, b, RougeVariant::r1), 5.0 / 6.0, 1e-12);
  EXPECT_NEAR(rouge_f1(a, b, RougeVariant::r2), 0.6, 1e-12);
  EXPECT_NEAR(rouge_f1(a, b, RougeVariant::rl), 5.0 / 6.0, 1e-12);
  EXPECT_DOUBLE_EQ(rouge_f1(a, a, RougeVariant::r1), 1.0);
  EXPECT_DOUBLE_EQ(rouge_f1(a, a, RougeVariant::r2), 1.0);
  EXPECT_DOUBLE_EQ(rouge_f1(a, a, RougeVariant::rl), 1.0);
}

TEST(Rouge, EmptyAndShortSequences) {
  const auto e = words({});
  const auto x = words({"yes"});
  EXPECT_EQ(rouge_f1(e, x, RougeVariant::r1), 0.0);
  EXPECT_EQ(rouge_f1(e, e, RougeVariant::r2), 0.0);
  // shorter than the order: the whole sequence is one gram
  EXPECT_DOUBLE_EQ(rouge_f1(x, x, RougeVariant::r2), 1.0);
  EXPECT_EQ(rouge_f1(x, words({"no"}), RougeVariant::r2), 0.0);
}

TEST(Rouge, UnknownVariantThrows) {
  const auto x = words({"a"});
  EXPECT_THROW(rouge_f1(x, x, static_cast<RougeVariant>(9)), simct::InvalidArgument);
}

TEST(Bleu, WorkedExamples) {
  const auto a = words({"the", "cat", "sat", "on", "the", "mat"});
  const auto b = words({"the", "cat", "sat", "on", "mat"});
  const double v = bleu_sym(a, b, 4);
  EXPECT_NEAR(v, 0.56, 0.01);
  EXPECT_NEAR(v, oracle::bleu_sym(a.tokens, b.tokens), 1e-12);
  EXPECT_DOUBLE_EQ(bleu_sym(a, a, 4), 1.0);
  // no matches at all: every order falls back to 1/(c+1), the 4-gram order to 1
  EXPECT_NEAR(bleu_sym(words({"alpha", "beta", "gamma"}), words({"delta", "epsilon", "zeta"})),
              std::pow(1.0 / 24.0, 0.25), 1e-12);
  EXPECT_EQ(bleu_sym(words({}), a), 0.0);
  EXPECT_THROW(sentence_bleu(a, b, 0), simct::InvalidArgument);
}

TEST(Meteor, WorkedExamples) {
  EXPECT_NEAR(meteor_sym(words({"the", "cat", "sat"}), words({"the", "dog", "sat"})), 1.0 / 3.0, 1e-12);
  EXPECT_EQ(meteor_sym(words({"a", "b"}), words({"c", "d"})), 0.0);
  for (int m = 1; m <= 8; ++m) {
    TokenSequence x;
    for (int i = 0; i < m; ++i) x.tokens.push_back("w" + std::to_string(i));
    EXPECT_DOUBLE_EQ(meteor_sym(x, x), 1.0 - 0.5 / (m * m * m)) << "m=" << m;
  }
}

TEST(FixtureCorpus, EveryMetricMatchesOracle) {
  for (const auto& p : oracle::fixture_corpus()) {
    const auto a = auto_tok(p.a, p.b, p.a);
    const auto b = auto_tok(p.a, p.b, p.b);
    SCOPED_TRACE(p.a + " | " + p.b);
    EXPECT_NEAR(rouge_f1(a, b, RougeVariant::r1), oracle::rouge_n(a.tokens, b.tokens, 1), 1e-9);
    EXPECT_NEAR(rouge_f1(a, b, RougeVariant::r2), oracle::rouge_n(a.tokens, b.tokens, 2), 1e-9);
    EXPECT_NEAR(rouge_f1(a, b, RougeVariant::rl), oracle::rouge_l(a.tokens, b.tokens), 1e-9);
    EXPECT_NEAR(bleu_sym(a, b, 4), oracle::bleu_sym(a.tokens, b.tokens), 1e-9);
    EXPECT_NEAR(meteor_sym(a, b), oracle::meteor_sym(a.tokens, b.tokens), 1e-9);
  }
}

TEST(Properties, RangeSymmetryIdentityOnRandomSequences) {
  std::mt19937_64 rng(7);
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "e", "f"};
  for (int trial = 0; trial < 300; ++trial) {
    TokenSequence x, y;
    const auto nx = rng() % 12, ny = rng() % 12;
    for (std::size_t i = 0; i < nx; ++i) x.tokens.push_back(vocab[rng() % vocab.size()]);
    for (std::size_t i = 0; i < ny; ++i) y.tokens.push_back(vocab[rng() % vocab.size()]);
    for (auto v : {RougeVariant::r1, RougeVariant::r2, RougeVariant::rl}) {
      const double s = rouge_f1(x, y, v);
      EXPECT_GE(s, 0.0);
      EXPECT_LE(s, 1.0);
      EXPECT_DOUBLE_EQ(s, rouge_f1(y, x, v));
      if (!x.empty()) EXPECT_DOUBLE_EQ(rouge_f1(x, x, v), 1.0);
    }
    const double bl = bleu_sym(x, y);
    EXPECT_GE(bl, 0.0);
    EXPECT_LE(bl, 1.0);
    EXPECT_DOUBLE_EQ(bl, bleu_sym(y, x));
    const double me = meteor_sym(x, y);
    EXPECT_GE(me, 0.0);
    EXPECT_LE(me, 1.0);
    EXPECT_DOUBLE_EQ(me, meteor_sym(y, x));
    EXPECT_NEAR(meteor_sym(x, y), oracle::meteor_sym(x.tokens, y.tokens), 1e-12);
    EXPECT_NEAR(bl, oracle::bleu_sym(x.tokens, y.tokens), 1e-12);
    if (!x.empty()) EXPECT_DOUBLE_EQ(bleu_sym(x, x), 1.0);
  }
}
