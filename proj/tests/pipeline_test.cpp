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

#include "test_support.hpp"

namespace qgc {
namespace {

struct EchoSetup {
  testing::ScratchDir dir{"pipeline"};
  PipelineConfig cfg;

  explicit EchoSetup(ModelConfig config = ModelConfig::kF) {
    testing::SyntheticSpec spec;
    spec.stories = 9;
    spec.pairs = 150;
    spec.empty_section_rate = 0.1;
    const Corpus corpus = testing::synthetic_corpus(spec, 31);
    testing::write_text(dir / "corpus.jsonl", export_canonical(corpus));
    const auto ctest =
        build_controlled_test(corpus, Split::kTest, SelectionPolicy::kLargestGroup, {});
    const auto [gen, qa] = testing::echo_stub_tables(ctest, config);
    testing::write_text(dir / "gen.jsonl", serialize_stub_table(gen));
    testing::write_text(dir / "qa.jsonl", serialize_stub_table(qa));
    cfg.corpus_path = dir / "corpus.jsonl";
    cfg.config = config;
    cfg.stub_table = dir / "gen.jsonl";
    cfg.qa_stub_table = dir / "qa.jsonl";
    cfg.out_dir = dir / "out";
  }
};

TEST(Pipeline, EchoRunScoresOneAndWritesEveryArtifact) {
  EchoSetup s;
  std::ostringstream log;
  const auto result = run_pipeline(s.cfg, &log);
  ASSERT_EQ(result.stages.size(), 6u);
  for (const auto& st : result.stages) {
    EXPECT_FALSE(st.skipped);
    EXPECT_TRUE(fs::exists(st.artifact)) << st.name;
  }
  const PipelineArtifacts art(s.cfg.out_dir);
  const auto qg = parse_reports_json(read_file(art.qg_report)).at(0);
  const auto qa = parse_reports_json(read_file(art.qa_report)).at(0);
  EXPECT_EQ(qg.overall.at("rouge_l_f1").mean, 1.0);
  EXPECT_EQ(qa.overall.at("exact_match").mean, 1.0);
  EXPECT_FALSE(qg.metadata.input_digest.empty());
  const std::string tables = read_file(art.tables);
  EXPECT_NE(tables.find("1.000"), std::string::npos);
  EXPECT_NE(tables.find("input_digest: "), std::string::npos);
  EXPECT_NE(log.str().find("stage generate: done"), std::string::npos);
}

TEST(Pipeline, RerunIsByteIdenticalAndResumeSkipsEverything) {
  EchoSetup s;
  run_pipeline(s.cfg);
  const PipelineArtifacts art(s.cfg.out_dir);
  const std::string first = read_file(art.tables) + read_file(art.generations);
  run_pipeline(s.cfg);
  EXPECT_EQ(read_file(art.tables) + read_file(art.generations), first);

  s.cfg.resume = true;
  const auto resumed = run_pipeline(s.cfg);
  for (const auto& st : resumed.stages) EXPECT_TRUE(st.skipped) << st.name;
  EXPECT_EQ(read_file(art.tables) + read_file(art.generations), first);
}

TEST(Pipeline, ResumeRerunsStagesDownstreamOfAChange) {
  EchoSetup s;
  run_pipeline(s.cfg);
  s.cfg.resume = true;
  s.cfg.aggregation = ReferenceAggregation::kMeanOverReferences;
  const auto resumed = run_pipeline(s.cfg);
  std::map<std::string, bool> skipped;
  for (const auto& st : resumed.stages) skipped[st.name] = st.skipped;
  EXPECT_TRUE(skipped["build-controlled-test"]);
  EXPECT_TRUE(skipped["encode"]);
  EXPECT_TRUE(skipped["generate"]);
  EXPECT_FALSE(skipped["eval-qg"]);
  EXPECT_TRUE(skipped["eval-qa"]);
  EXPECT_FALSE(skipped["report"]);
}

TEST(Pipeline, ResumeIgnoresCorruptArtifacts) {
  EchoSetup s;
  run_pipeline(s.cfg);
  const PipelineArtifacts art(s.cfg.out_dir);
  testing::write_text(art.qa_report, "{");
  s.cfg.resume = true;
  const auto resumed = run_pipeline(s.cfg);
  EXPECT_FALSE(resumed.stages[4].skipped);
  EXPECT_EQ(parse_reports_json(read_file(art.qa_report)).at(0).overall.at("exact_match").mean,
            1.0);
}

TEST(Pipeline, MissingCorpusIsValidationError) {
  EchoSetup s;
  s.cfg.corpus_path = s.dir / "absent.jsonl";
  try {
    run_pipeline(s.cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
  }
  EXPECT_FALSE(fs::exists(s.cfg.out_dir / "ctest.jsonl"));
}

TEST(Pipeline, ConfigValidation) {
  EchoSetup s;
  auto cfg = s.cfg;
  cfg.config = ModelConfig::kA;
  EXPECT_THROW(run_pipeline(cfg), Error);
  cfg = s.cfg;
  cfg.backend_url = "http://127.0.0.1:1";
  EXPECT_THROW(run_pipeline(cfg), Error);
  cfg = s.cfg;
  cfg.qa_stub_table.reset();
  EXPECT_THROW(run_pipeline(cfg), Error);
  cfg = s.cfg;
  cfg.policy = SelectionPolicy::kSeededUniform;
  EXPECT_THROW(run_pipeline(cfg), Error);
}

TEST(Pipeline, BackendFailureLeavesPartialGenerations) {
  EchoSetup s;
  StubTable partial = load_stub_table(*s.cfg.stub_table);
  partial.erase(std::prev(partial.end()));
  testing::write_text(*s.cfg.stub_table, serialize_stub_table(partial));
  try {
    run_pipeline(s.cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kBackend);
    EXPECT_NE(std::string(e.what()).find("stage generate"), std::string::npos);
  }
  const PipelineArtifacts art(s.cfg.out_dir);
  EXPECT_FALSE(fs::exists(art.generations));
  EXPECT_TRUE(fs::exists(ArtifactWriter::partial_path(art.generations)));
  EXPECT_TRUE(fs::exists(art.ctest));
}

TEST(Pipeline, SeededPolicyIsReproducible) {
  EchoSetup s;
  s.cfg.policy = SelectionPolicy::kSeededUniform;
  s.cfg.seed = 12;
  s.cfg.stub_fallback = StubFallback::fixed("<QUESTION> what? <ANSWER> that");
  s.cfg.qa_stub_fallback = StubFallback::fixed("<ANSWER> that");
  run_pipeline(s.cfg);
  const PipelineArtifacts art(s.cfg.out_dir);
  const std::string a = read_file(art.ctest) + read_file(art.tables);
  run_pipeline(s.cfg);
  EXPECT_EQ(read_file(art.ctest) + read_file(art.tables), a);
}

TEST(Prompts, FileRoundTrip) {
  const Corpus c = testing::synthetic_corpus({}, 2);
  testing::ScratchDir dir("prompts");
  for (auto config : kAllModelConfigs) {
    const auto file = encode_corpus_prompts(c, config, Split::kTrain);
    testing::write_text(dir / "p.jsonl", serialize_prompts(file, "digest"));
    const auto back = read_prompts(dir / "p.jsonl");
    EXPECT_EQ(back.config, config);
    ASSERT_EQ(back.records.size(), file.records.size());
    for (std::size_t i = 0; i < file.records.size(); ++i) {
      EXPECT_EQ(back.records[i].input_text, file.records[i].input_text);
      EXPECT_EQ(back.records[i].target_text, file.records[i].target_text);
      EXPECT_EQ(back.records[i].controls, file.records[i].controls);
      EXPECT_EQ(back.records[i].qa_id, file.records[i].qa_id);
    }
    EXPECT_EQ(embedded_digest(dir / "p.jsonl"), "digest");
  }
}

TEST(Prompts, ControlledPromptsNeedQuestionAndAnswerConfig) {
  const auto ctest = build_controlled_test(testing::synthetic_corpus({}, 2), Split::kTest,
                                           SelectionPolicy::kLargestGroup, {});
  EXPECT_THROW(encode_controlled_prompts(ctest, ModelConfig::kA), Error);
  EXPECT_THROW(encode_controlled_prompts(ctest, ModelConfig::kB), Error);
  EXPECT_EQ(encode_controlled_prompts(ctest, ModelConfig::kE).records.size(),
            ctest.examples.size());
}

}  // namespace
}  // namespace qgc
