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

#include <random>

#include "test_support.hpp"

namespace qgc {
namespace {

ControlledTestSet sample_ctest(std::uint64_t seed = 4, std::size_t pairs = 120,
                               std::size_t stories = 9) {
  testing::SyntheticSpec spec;
  spec.stories = stories;
  spec.pairs = pairs;
  return build_controlled_test(testing::synthetic_corpus(spec, seed), Split::kTest,
                               SelectionPolicy::kLargestGroup, {});
}

// Echo generations: each example's first reference pair, formatted for F.
std::vector<GenerationRecord> echo_records(const ControlledTestSet& ctest,
                                           ModelConfig config = ModelConfig::kF) {
  std::vector<GenerationRecord> out;
  for (const auto& ex : ctest.examples) {
    const auto& ref = ex.reference_pairs.front();
    Controls c;
    if (uses_explicitness(config)) c.explicitness = ex.explicitness;
    if (uses_narrative(config)) c.narrative = ex.narrative;
    out.push_back({ex.section_id, config, "", encode_target(config, ref.question, ref.answer), c});
  }
  return out;
}

TEST(Interpret, SeparatesMalformedOutputs) {
  const auto ctest = sample_ctest();
  auto records = echo_records(ctest);
  records[0].output_text = "no tokens at all";
  const auto batch = interpret_generations(records);
  EXPECT_EQ(batch.parsed.size(), records.size() - 1);
  ASSERT_EQ(batch.malformed.size(), 1u);
  EXPECT_EQ(batch.malformed[0].raw, "no tokens at all");
  EXPECT_EQ(batch.malformed[0].section_id, records[0].section_id);
}

TEST(Interpret, ControlsMustMatchConfig) {
  const auto ctest = sample_ctest();
  auto records = echo_records(ctest);
  records[0].controls.narrative.reset();
  EXPECT_THROW(interpret_generations(records), Error);
}

TEST(EvaluateQg, EchoScoresOne) {
  const auto ctest = sample_ctest();
  const auto rep = evaluate_qg(interpret_generations(echo_records(ctest)), ctest);
  EXPECT_EQ(rep.protocol, Protocol::kQgReference);
  EXPECT_EQ(rep.config, ModelConfig::kF);
  EXPECT_EQ(rep.n_examples, ctest.examples.size());
  EXPECT_EQ(rep.n_excluded, 0u);
  EXPECT_EQ(rep.overall.at("rouge_l_f1").mean, 1.0);
  EXPECT_EQ(rep.overall.at("rouge_l_f1").count, ctest.examples.size());
  EXPECT_GT(rep.overall.at("bleu4").mean, 0.0);
  for (const auto& [label, stats] : rep.by_explicitness) {
    EXPECT_EQ(stats.at("rouge_l_f1").mean, 1.0) << label;
  }
}

TEST(EvaluateQg, ReferenceAggregation) {
  ControlledTestSet ctest;
  QAPair r1, r2;
  r1.question = "who ate the cake";
  r2.question = "who baked the bread";
  ctest.examples.push_back({"s#1", "text", Explicitness::kExplicit, NarrativeElement::kAction,
                            {r1, r2}});
  const std::vector<GeneratedQA> gen = {
      {"s#1", ModelConfig::kC, "who ate the bread", "x", {}}};
  EvalOptions max_opts;
  const auto mx = evaluate_qg(gen, ctest, max_opts);
  EXPECT_DOUBLE_EQ(mx.overall.at("rouge_l_f1").mean, 0.75);
  EvalOptions mean_opts;
  mean_opts.aggregation = ReferenceAggregation::kMeanOverReferences;
  const auto mn = evaluate_qg(gen, ctest, mean_opts);
  EXPECT_DOUBLE_EQ(mn.overall.at("rouge_l_f1").mean, 0.75);
  const std::vector<GeneratedQA> gen2 = {
      {"s#1", ModelConfig::kC, "who ate the cake", "x", {}}};
  EXPECT_DOUBLE_EQ(evaluate_qg(gen2, ctest, max_opts).overall.at("rouge_l_f1").mean, 1.0);
  EXPECT_DOUBLE_EQ(evaluate_qg(gen2, ctest, mean_opts).overall.at("rouge_l_f1").mean,
                   (1.0 + 0.5) / 2);
}

TEST(EvaluateQg, ExclusionThreshold) {
  const auto ctest = sample_ctest(4, 600, 60);
  const std::size_t n = ctest.examples.size();
  ASSERT_GE(n, 21u);
  auto records = echo_records(ctest);
  // Just under five percent passes and is reported.
  const std::size_t under = (n * 5 - 1) / 100;
  for (std::size_t i = 0; i < under; ++i) records[i].output_text = "garbage";
  if (under > 0) {
    const auto rep = evaluate_qg(interpret_generations(records), ctest);
    EXPECT_EQ(rep.n_excluded, under);
    EXPECT_EQ(rep.overall.at("rouge_l_f1").count, n - under);
  }
  // Five percent or more fails.
  const std::size_t at = (n * 5 + 99) / 100;
  for (std::size_t i = 0; i < at; ++i) records[i].output_text = "garbage";
  try {
    evaluate_qg(interpret_generations(records), ctest);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kEvaluation);
    EXPECT_EQ(exit_code_for(e.kind()), 4);
  }
}

TEST(EvaluateQg, MatchingErrors) {
  const auto ctest = sample_ctest();
  auto missing = echo_records(ctest);
  missing.pop_back();
  EXPECT_THROW(evaluate_qg(interpret_generations(missing), ctest), Error);

  auto dup = echo_records(ctest);
  dup.push_back(dup.front());
  EXPECT_THROW(evaluate_qg(interpret_generations(dup), ctest), Error);

  auto stray = echo_records(ctest);
  stray.front().section_id = "not-a-section";
  EXPECT_THROW(evaluate_qg(interpret_generations(stray), ctest), Error);

  auto relabeled = echo_records(ctest);
  relabeled.front().controls.explicitness =
      ctest.examples.front().explicitness == Explicitness::kExplicit ? Explicitness::kImplicit
                                                                     : Explicitness::kExplicit;
  EXPECT_THROW(evaluate_qg(interpret_generations(relabeled), ctest), Error);
}

TEST(Aggregate, OverallIsCountWeightedMeanOfGroups) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ScoreRecord> records;
  for (int i = 0; i < 300; ++i) {
    ScoreRecord r;
    r.section_id = "s" + std::to_string(i);
    r.value = u(rng);
    r.explicitness = kAllExplicitness[static_cast<std::size_t>(i) % 2];
    r.narrative = kAllNarrativeElements[static_cast<std::size_t>(i * 7 / 3) % 7];
    records.push_back(r);
  }
  const auto groups = aggregate_by_label(records, LabelAxis::kExplicitness);
  double total = 0;
  for (const auto& r : records) total += r.value;
  EXPECT_NEAR(overall_from_groups(groups).at("rouge_l_f1").mean, total / 300, 1e-12);
  EXPECT_EQ(overall_from_groups(groups).at("rouge_l_f1").count, 300u);
  std::size_t narrative_total = 0;
  for (const auto& [l, s] : aggregate_by_label(records, LabelAxis::kNarrative)) {
    narrative_total += s.at("rouge_l_f1").count;
  }
  EXPECT_EQ(narrative_total, 300u);
}

TEST(Aggregate, PermutationInvariantBitForBit) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ScoreRecord> records;
  for (int i = 0; i < 500; ++i) {
    records.push_back({"s" + std::to_string(i), Metric::kBleu4, u(rng) * 1e-3 + u(rng),
                       kAllExplicitness[static_cast<std::size_t>(i) % 2], std::nullopt});
  }
  const auto base = aggregate_by_label(records, LabelAxis::kExplicitness);
  for (int t = 0; t < 10; ++t) {
    std::shuffle(records.begin(), records.end(), rng);
    EXPECT_EQ(aggregate_by_label(records, LabelAxis::kExplicitness), base);
  }
  EXPECT_TRUE(aggregate_by_label(records, LabelAxis::kNarrative).contains("unlabeled"));
}

TEST(EvaluateQa, EchoAnswersScoreOne) {
  const auto ctest = sample_ctest();
  const auto [gen, qa] = testing::echo_stub_tables(ctest, ModelConfig::kF);
  StubBackend qa_backend(qa);
  const auto rep = evaluate_qa_controllability(interpret_generations(echo_records(ctest)),
                                               qa_backend, ctest);
  EXPECT_EQ(rep.protocol, Protocol::kQaControllability);
  EXPECT_EQ(rep.overall.at("exact_match").mean, 1.0);
  EXPECT_EQ(rep.overall.at("rouge_l_f1").mean, 1.0);
  EXPECT_FALSE(rep.overall.contains("bleu4"));
}

TEST(EvaluateQa, WrongAnswersScoreZero) {
  const auto ctest = sample_ctest();
  StubBackend qa_backend({}, StubFallback::fixed("<ANSWER> zzzz qqqq"));
  const auto rep = evaluate_qa_controllability(interpret_generations(echo_records(ctest)),
                                               qa_backend, ctest);
  EXPECT_EQ(rep.overall.at("exact_match").mean, 0.0);
}

TEST(EvaluateQa, MalformedQaAnswersCountTowardExclusion) {
  const auto ctest = sample_ctest();
  StubBackend qa_backend({}, StubFallback::fixed("no answer token"));
  EXPECT_THROW(evaluate_qa_controllability(interpret_generations(echo_records(ctest)),
                                           qa_backend, ctest),
               Error);
}

TEST(EvaluateQa, RequiresQuestionAndAnswerConfig) {
  const auto ctest = sample_ctest();
  std::vector<GenerationRecord> records;
  for (const auto& ex : ctest.examples) {
    records.push_back({ex.section_id, ModelConfig::kB, "", "<QUESTION> why?", {}});
  }
  StubBackend qa_backend({}, StubFallback::fixed("<ANSWER> x"));
  EXPECT_THROW(evaluate_qa_controllability(interpret_generations(records), qa_backend, ctest),
               Error);
}

TEST(Report, JsonRoundTripIsExact) {
  const auto ctest = sample_ctest();
  EvalOptions opts;
  opts.profile.remove_articles = true;
  opts.smoothing = BleuSmoothing::kNone;
  auto records = echo_records(ctest);
  records[1].output_text = "<QUESTION> something else entirely <ANSWER> x";
  auto rep = evaluate_qg(interpret_generations(records), ctest, opts);
  rep.metadata.input_digest = "d1";
  rep.metadata.seed = 18446744073709551615ULL;
  const auto back = report_from_json(json::parse(report_to_json(rep).dump()));
  EXPECT_EQ(back, rep);
  EXPECT_EQ(report_to_json(back).dump(), report_to_json(rep).dump());
}

}  // namespace
}  // namespace qgc
