// Copyright 2026 The QGC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"

namespace qgc {
namespace {

std::string join(const TokenSequence& t) {
  std::string out;
  for (const auto& s : t) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

TEST(Normalize, DefaultProfile) {
  EXPECT_EQ(normalize("The Cat, sat!  on\tthe  MAT."),
            (TokenSequence{"the", "cat", "sat", "on", "the", "mat"}));
  EXPECT_EQ(normalize("Straße «ÜBER» naïve\u2014café"),
            (TokenSequence{"straße", "über", "naïve", "café"}));
  EXPECT_TRUE(normalize("").empty());
  EXPECT_TRUE(normalize(" ?! ").empty());
}

TEST(Normalize, ProfileFlags) {
  EXPECT_EQ(normalize("The cat.", parse_profile("none")), (TokenSequence{"The", "cat."}));
  NormalizationProfile articles;
  articles.remove_articles = true;
  EXPECT_EQ(normalize("The cat and a dog, an owl", articles),
            (TokenSequence{"cat", "and", "dog", "owl"}));
  NormalizationProfile no_collapse;
  no_collapse.collapse_whitespace = false;
  EXPECT_EQ(normalize("a\tb c", no_collapse), (TokenSequence{"a\tb", "c"}));
}

TEST(Normalize, Idempotent) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 2000; ++i) {
    const std::string s = testing::random_phrase(rng, 0, 15);
    const TokenSequence once = normalize(s);
    EXPECT_EQ(normalize(join(once)), once) << s;
  }
}

TEST(Normalize, ProfileStringRoundTrip) {
  for (unsigned bits = 0; bits < 16; ++bits) {
    NormalizationProfile p{(bits & 1) != 0, (bits & 2) != 0, (bits & 4) != 0, (bits & 8) != 0};
    const auto back = parse_profile(profile_to_string(p));
    EXPECT_EQ(back.lowercase, p.lowercase);
    EXPECT_EQ(back.strip_punctuation, p.strip_punctuation);
    EXPECT_EQ(back.collapse_whitespace, p.collapse_whitespace);
    EXPECT_EQ(back.remove_articles, p.remove_articles);
  }
  EXPECT_THROW(parse_profile("lowercase,stemming"), Error);
}

TEST(Lcs, MatchesBruteForceOracle) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 6000; ++i) {
    const auto a = testing::random_tokens(rng, 8, 1 + i % 5);
    const auto b = testing::random_tokens(rng, 8, 1 + i % 5);
    ASSERT_EQ(lcs_length(a, b), testing::brute_force_lcs(a, b));
  }
}

TEST(Lcs, Symmetric) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    const auto a = testing::random_tokens(rng, 20, 4);
    const auto b = testing::random_tokens(rng, 20, 4);
    ASSERT_EQ(lcs_length(a, b), lcs_length(b, a));
  }
}

TEST(RougeL, GoldenValue) {
  EXPECT_NEAR(rouge_l_f1("the cat on the mat", "the cat sat on the mat").value, 10.0 / 11.0,
              1e-9);
}

TEST(RougeL, IdentityDisjointAndEmpty) {
  EXPECT_EQ(rouge_l_f1("Who took the golden goose?", "who took the golden goose").value, 1.0);
  EXPECT_EQ(rouge_l_f1("alpha beta", "gamma delta").value, 0.0);
  EXPECT_EQ(rouge_l_f1("", "gamma delta").value, 0.0);
  EXPECT_EQ(rouge_l_f1("", "").value, 0.0);
}

TEST(RougeL, MatchesOracleFormulaAndIsSymmetric) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    const auto a = testing::random_tokens(rng, 8, 4);
    const auto b = testing::random_tokens(rng, 8, 4);
    const std::string sa = join(a), sb = join(b);
    const double l = static_cast<double>(testing::brute_force_lcs(a, b));
    const double expect = l == 0 ? 0.0 : 2 * l / static_cast<double>(a.size() + b.size());
    ASSERT_NEAR(rouge_l_f1(sa, sb).value, expect, 1e-12);
    ASSERT_EQ(rouge_l_f1(sa, sb).value, rouge_l_f1(sb, sa).value);
    ASSERT_GE(rouge_l_f1(sa, sb).value, 0.0);
    ASSERT_LE(rouge_l_f1(sa, sb).value, 1.0);
  }
}

TEST(Bleu, ClippedCountsMatchExhaustiveOracle) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 1500; ++i) {
    const auto hyp = testing::random_tokens(rng, 10, 1 + i % 4);
    std::vector<TokenSequence> refs(1 + i % 3);
    for (auto& r : refs) r = testing::random_tokens(rng, 10, 1 + i % 4);
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto got = clipped_ngram_counts(hyp, refs, n);
      const auto [clipped, total] = testing::brute_force_clipped(hyp, refs, n);
      ASSERT_EQ(got.clipped, clipped);
      ASSERT_EQ(got.total, total);
    }
  }
}

TEST(Bleu, HandComputedValue) {
  const std::vector<std::string> refs = {"a b c d f"};
  const double expect = std::pow(4.0 / 5 * 3.0 / 4 * 2.0 / 3 * 1.0 / 2, 0.25);
  EXPECT_NEAR(bleu4("a b c d e", refs).value, expect, 1e-12);
  EXPECT_NEAR(bleu4("a b c d e", refs, {}, BleuSmoothing::kNone).value, expect, 1e-12);
}

TEST(Bleu, BrevityPenaltyAndClosestReference) {
  const std::vector<std::string> refs = {"a b c d e f g h", "a b c d x"};
  // Closest reference length to 4 is 5, so the penalty is exp(1 - 5/4).
  const double p = std::pow(1.0 * (3.0 / 3) * (2.0 / 2) * 1.0, 0.25);
  EXPECT_NEAR(bleu4("a b c d", refs).value, p * std::exp(1.0 - 5.0 / 4.0), 1e-12);
  const std::vector<TokenSequence> tied = {{"1", "2", "3"}, {"1", "2", "3", "4", "5"}};
  EXPECT_EQ(closest_reference_length(4, tied), 3u);
}

TEST(Bleu, Smoothing) {
  const std::vector<std::string> refs = {"a b c"};
  EXPECT_EQ(bleu4("a b c", refs, {}, BleuSmoothing::kNone).value, 0.0);
  EXPECT_NEAR(bleu4("a b c", refs, {}, BleuSmoothing::kEpsilon).value,
              std::pow(kBleuEpsilon, 0.25), 1e-12);
  const std::vector<std::string> long_ref = {"one two three four five"};
  EXPECT_EQ(bleu4("one two three four five", long_ref).value, 1.0);
}

TEST(Bleu, EmptyCases) {
  const std::vector<std::string> refs = {"a b c d"};
  EXPECT_EQ(bleu4("", refs).value, 0.0);
  EXPECT_THROW(bleu4("a", std::vector<std::string>{}), Error);
}

TEST(Bleu, NotSymmetric) {
  const std::vector<std::string> r1 = {"the cat sat on the mat today"};
  const std::vector<std::string> r2 = {"the cat sat"};
  EXPECT_NE(bleu4("the cat sat", r1).value, bleu4("the cat sat on the mat today", r2).value);
}

TEST(Bleu, BoundedAndIdentityIsOne) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const auto h = testing::random_tokens(rng, 12, 3);
    const std::vector<std::string> refs = {join(testing::random_tokens(rng, 12, 3))};
    const double v = bleu4(join(h), refs).value;
    ASSERT_GE(v, 0.0);
    ASSERT_LE(v, 1.0);
    if (h.size() >= 4) {
      const std::vector<std::string> self = {join(h)};
      ASSERT_EQ(bleu4(join(h), self).value, 1.0);
    }
  }
}

TEST(ExactMatch, UsesNormalization) {
  EXPECT_EQ(exact_match("The Fox!", "the fox").value, 1.0);
  EXPECT_EQ(exact_match("the fox", "a fox").value, 0.0);
  NormalizationProfile articles;
  articles.remove_articles = true;
  EXPECT_EQ(exact_match("the fox", "a fox", articles).value, 1.0);
}

TEST(Format, FixedThreeDecimals) {
  EXPECT_EQ(format_fixed3(0.0625), "0.062");
  EXPECT_EQ(format_fixed3(0.1875), "0.188");
  EXPECT_EQ(format_fixed3(1.0), "1.000");
  EXPECT_EQ(format_fixed3(0.0), "0.000");
  EXPECT_EQ(format_fixed3(10.0 / 11.0), "0.909");
}

}  // namespace
}  // namespace qgc
