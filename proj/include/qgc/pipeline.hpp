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

#pragma once

// Pipeline artifacts and the end-to-end run:
//
//   corpus -> ctest.jsonl -> prompts.jsonl -> generations.jsonl
//          -> report_qg.json, report_qa.json -> tables.txt
//
// Every artifact embeds the digest of its inputs (JSONL: meta line; JSON:
// metadata.input_digest; text: trailing "input_digest: " line). A resumed
// run skips a stage exactly when the existing artifact's digest matches.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qgc/backend.hpp"
#include "qgc/controlled_test.hpp"
#include "qgc/corpus_io.hpp"
#include "qgc/error.hpp"
#include "qgc/evaluation.hpp"
#include "qgc/io.hpp"
#include "qgc/promptspec.hpp"
#include "qgc/report.hpp"

namespace qgc {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Prompt files
// ---------------------------------------------------------------------------

struct PromptRecord {
  std::optional<std::string> qa_id;  // set for per-pair (training) prompts
  std::string section_id;
  Controls controls;
  std::string input_text;
  std::string target_text;
};

struct PromptFile {
  ModelConfig config = ModelConfig::kC;
  std::string source;  // "corpus" or "controlled-test"
  Split split = Split::kTest;
  std::vector<PromptRecord> records;
};

// One prompt per QA pair of the split.
inline PromptFile encode_corpus_prompts(const Corpus& corpus, ModelConfig config,
                                        Split split) {
  PromptFile file{config, "corpus", split, {}};
  for (const QAPair& p : corpus.qa_pairs()) {
    if (p.split != split) continue;
    const Section& sec = *corpus.find_section(p.section_id);
    PromptFields fields;
    if (config == ModelConfig::kA) fields.question = p.question;
    if (config == ModelConfig::kB) fields.answer = p.answer;
    if (uses_explicitness(config)) fields.explicitness = p.explicitness;
    if (uses_narrative(config)) fields.narrative = p.narrative;
    Controls controls{fields.explicitness, fields.narrative};
    file.records.push_back({p.id, p.section_id, controls,
                            encode_input(config, sec.text, fields),
                            encode_target(config, p.question, p.answer)});
  }
  return file;
}

// One inference prompt per controlled example, conditioned on the example's
// labels. The target is the first reference pair, kept for inspection.
inline PromptFile encode_controlled_prompts(const ControlledTestSet& ctest,
                                            ModelConfig config) {
  if (!produces_question_and_answer(config)) {
    fail(ErrorKind::kValidation,
         std::string("controlled-test prompts need a question-and-answer config (C-F), got ") +
             config_letter(config));
  }
  PromptFile file{config, "controlled-test", ctest.source_split, {}};
  for (const auto& ex : ctest.examples) {
    PromptFields fields;
    if (uses_explicitness(config)) fields.explicitness = ex.explicitness;
    if (uses_narrative(config)) fields.narrative = ex.narrative;
    const QAPair& ref = ex.reference_pairs.front();
    file.records.push_back({std::nullopt, ex.section_id,
                            Controls{fields.explicitness, fields.narrative},
                            encode_input(config, ex.section_text, fields),
                            encode_target(config, ref.question, ref.answer)});
  }
  return file;
}

namespace detail {

inline void put_controls(nlohmann::ordered_json& rec, const Controls& c) {
  if (c.explicitness) rec["explicitness"] = to_string(*c.explicitness);
  if (c.narrative) rec["narrative"] = to_string(*c.narrative);
}

inline Controls get_controls(const json& rec) {
  Controls c;
  if (auto it = rec.find("explicitness"); it != rec.end() && !it->is_null()) {
    const auto s = it->get<std::string>();
    c.explicitness = require_label(parse_explicitness(s), "explicitness", s);
  }
  if (auto it = rec.find("narrative"); it != rec.end() && !it->is_null()) {
    const auto s = it->get<std::string>();
    c.narrative = require_label(parse_narrative(s), "narrative", s);
  }
  return c;
}

inline const json& require_meta(const JsonlDocument& doc, std::string_view kind,
                                const std::string& origin) {
  if (!doc.meta || !doc.meta->is_object() || doc.meta->value("kind", "") != kind) {
    fail(ErrorKind::kValidation, origin + ": not a " + std::string(kind) + " file");
  }
  return *doc.meta;
}

}  // namespace detail

inline std::string serialize_prompts(const PromptFile& file,
                                     const std::string& input_digest) {
  nlohmann::ordered_json meta;
  meta["kind"] = "prompts";
  meta["config"] = std::string(1, config_letter(file.config));
  meta["config_name"] = canonical_name(file.config);
  meta["source"] = file.source;
  meta["split"] = to_string(file.split);
  meta["input_digest"] = input_digest;
  std::string out = nlohmann::ordered_json{{"meta", meta}}.dump() + "\n";
  for (const auto& r : file.records) {
    nlohmann::ordered_json rec;
    if (r.qa_id) rec["qa_id"] = *r.qa_id;
    rec["section_id"] = r.section_id;
    detail::put_controls(rec, r.controls);
    rec["input_text"] = r.input_text;
    rec["target_text"] = r.target_text;
    out += rec.dump() + "\n";
  }
  return out;
}

inline PromptFile read_prompts(const fs::path& path) {
  const JsonlDocument doc = read_jsonl(path);
  const json& meta = detail::require_meta(doc, "prompts", path.string());
  PromptFile file;
  try {
    file.config = parse_model_config(meta.at("config").get<std::string>());
    file.source = meta.value("source", "");
    const auto split = meta.value("split", "test");
    file.split = require_label(parse_split(split), "split", split);
    for (const json& rec : doc.records) {
      PromptRecord r;
      if (rec.contains("qa_id")) r.qa_id = rec.at("qa_id").get<std::string>();
      r.section_id = rec.at("section_id").get<std::string>();
      r.controls = detail::get_controls(rec);
      r.input_text = rec.at("input_text").get<std::string>();
      r.target_text = rec.value("target_text", "");
      file.records.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::kValidation, path.string() + ": malformed prompt record: " + e.what());
  }
  return file;
}

// ---------------------------------------------------------------------------
// Generation files
// ---------------------------------------------------------------------------

struct GenerationFile {
  ModelConfig config = ModelConfig::kC;
  std::vector<GenerationRecord> records;
  std::vector<std::optional<std::string>> qa_ids;  // parallel to records
};

inline nlohmann::ordered_json generations_meta(ModelConfig config,
                                               const std::string& backend_identity,
                                               const DecodingParams& params,
                                               const std::string& input_digest) {
  nlohmann::ordered_json meta;
  meta["kind"] = "generations";
  meta["config"] = std::string(1, config_letter(config));
  meta["backend"] = backend_identity;
  meta["beam_width"] = params.beam_width;
  meta["max_input_tokens"] = params.max_input_tokens;
  meta["max_new_tokens"] = params.max_new_tokens;
  meta["input_digest"] = input_digest;
  return meta;
}

inline std::string generation_line(const PromptRecord& p, const std::string& output) {
  nlohmann::ordered_json rec;
  rec["id"] = p.qa_id.value_or(p.section_id);
  if (p.qa_id) rec["qa_id"] = *p.qa_id;
  rec["section_id"] = p.section_id;
  detail::put_controls(rec, p.controls);
  rec["input_text"] = p.input_text;
  rec["output_text"] = output;
  return rec.dump();
}

// Sends every prompt through the backend, appending records to `writer`
// chunk by chunk. A failure leaves the records written so far in the
// writer's .partial file.
inline void run_generation(const PromptFile& prompts, GenerationBackend& backend,
                           const DecodingParams& params, ArtifactWriter& writer,
                           const std::string& input_digest,
                           std::size_t chunk_size = 256) {
  writer.write_line(
      nlohmann::ordered_json{
          {"meta", generations_meta(prompts.config, backend.identity(), params, input_digest)}}
          .dump());
  std::vector<GenerationRequest> all;
  all.reserve(prompts.records.size());
  for (const auto& p : prompts.records) {
    all.push_back({p.qa_id.value_or(p.section_id), p.input_text, params});
  }
  validate_requests(all);
  for (std::size_t start = 0; start < all.size(); start += chunk_size) {
    const std::size_t n = std::min(chunk_size, all.size() - start);
    const auto responses =
        backend.generate(std::span<const GenerationRequest>(all).subspan(start, n));
    if (responses.size() != n) {
      fail(ErrorKind::kBackend, "backend returned " + std::to_string(responses.size()) +
                                    " responses for " + std::to_string(n) + " requests");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (responses[i].id != all[start + i].id) {
        fail(ErrorKind::kBackend, "backend response/request id mismatch");
      }
      writer.write_line(generation_line(prompts.records[start + i], responses[i].output_text));
    }
  }
}

inline GenerationFile read_generations(const fs::path& path) {
  const JsonlDocument doc = read_jsonl(path);
  const json& meta = detail::require_meta(doc, "generations", path.string());
  GenerationFile file;
  try {
    file.config = parse_model_config(meta.at("config").get<std::string>());
    for (const json& rec : doc.records) {
      GenerationRecord r;
      r.section_id = rec.at("section_id").get<std::string>();
      r.config = file.config;
      r.input_text = rec.value("input_text", "");
      r.output_text = rec.at("output_text").get<std::string>();
      r.controls = detail::get_controls(rec);
      file.records.push_back(std::move(r));
      file.qa_ids.push_back(rec.contains("qa_id")
                                ? std::optional(rec.at("qa_id").get<std::string>())
                                : std::nullopt);
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::kValidation,
         path.string() + ": malformed generation record: " + e.what());
  }
  return file;
}

// ---------------------------------------------------------------------------
// Digests
// ---------------------------------------------------------------------------

// Content digest of a file, or of a directory tree (relative paths plus
// contents, in sorted order).
inline std::string content_digest(const fs::path& path) {
  if (!fs::is_directory(path)) return sha256_hex(read_file(path));
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(path)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  DigestBuilder d;
  for (const auto& f : files) {
    d.add(fs::relative(f, path).generic_string(), sha256_hex(read_file(f)));
  }
  return d.hex();
}

inline std::optional<std::string> embedded_digest(const fs::path& path) {
  if (!fs::is_regular_file(path)) return std::nullopt;
  try {
    const std::string text = read_file(path);
    if (path.extension() == ".jsonl") {
      const auto nl = text.find('\n');
      const json first = json::parse(text.substr(0, nl));
      return first.at("meta").at("input_digest").get<std::string>();
    }
    if (path.extension() == ".json") {
      return json::parse(text).at("metadata").at("input_digest").get<std::string>();
    }
    static constexpr std::string_view kTag = "input_digest: ";
    const auto at = text.rfind(std::string("\n") + std::string(kTag));
    if (at == std::string::npos) return std::nullopt;
    const auto start = at + 1 + kTag.size();
    return text.substr(start, text.find('\n', start) - start);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// End-to-end run
// ---------------------------------------------------------------------------

struct PipelineConfig {
  fs::path corpus_path;
  CorpusFormat corpus_format = CorpusFormat::kCanonicalJsonl;
  ModelConfig config = ModelConfig::kF;
  std::optional<std::string> backend_url;
  std::optional<fs::path> stub_table;
  StubFallback stub_fallback;
  std::optional<std::string> qa_backend_url;
  std::optional<fs::path> qa_stub_table;
  StubFallback qa_stub_fallback;
  Split split = Split::kTest;
  SelectionPolicy policy = SelectionPolicy::kLargestGroup;
  std::optional<std::uint64_t> seed;
  NormalizationProfile profile;
  BleuSmoothing smoothing = BleuSmoothing::kEpsilon;
  ReferenceAggregation aggregation = ReferenceAggregation::kMaxOverReferences;
  std::optional<std::string> scorer_url;
  DecodingParams params;
  ClientOptions client;
  fs::path out_dir = "qgc-out";
  bool resume = false;
};

inline void validate_pipeline_config(const PipelineConfig& c) {
  auto must_exist = [](const fs::path& p, std::string_view what) {
    std::error_code ec;
    if (p.empty() || !fs::exists(p, ec)) {
      fail(ErrorKind::kValidation,
           std::string(what) + " does not exist: " + (p.empty() ? "<unset>" : p.string()));
    }
  };
  must_exist(c.corpus_path, "corpus path");
  if (!produces_question_and_answer(c.config)) {
    fail(ErrorKind::kValidation,
         std::string("run needs a question-and-answer config (C-F), got ") +
             config_letter(c.config));
  }
  if (c.backend_url.has_value() == c.stub_table.has_value()) {
    fail(ErrorKind::kValidation, "set exactly one of backend url and stub table");
  }
  if (c.qa_backend_url.has_value() == c.qa_stub_table.has_value()) {
    fail(ErrorKind::kValidation, "set exactly one of QA backend url and QA stub table");
  }
  if (c.stub_table) must_exist(*c.stub_table, "stub table");
  if (c.qa_stub_table) must_exist(*c.qa_stub_table, "QA stub table");
  if (c.policy == SelectionPolicy::kSeededUniform && !c.seed) {
    fail(ErrorKind::kValidation, "policy seeded-uniform requires a seed");
  }
  if (c.out_dir.empty()) fail(ErrorKind::kValidation, "empty output directory");
}

struct StageOutcome {
  std::string name;
  bool skipped = false;
  fs::path artifact;
};

struct PipelineResult {
  std::vector<StageOutcome> stages;
};

struct PipelineArtifacts {
  fs::path ctest, prompts, generations, qg_report, qa_report, tables;

  explicit PipelineArtifacts(const fs::path& dir)
      : ctest(dir / "ctest.jsonl"),
        prompts(dir / "prompts.jsonl"),
        generations(dir / "generations.jsonl"),
        qg_report(dir / "report_qg.json"),
        qa_report(dir / "report_qa.json"),
        tables(dir / "tables.txt") {}
};

inline std::unique_ptr<GenerationBackend> make_backend(
    const std::optional<std::string>& url, const std::optional<fs::path>& stub,
    const StubFallback& fallback, const ClientOptions& client) {
  if (url) return std::make_unique<HttpBackend>(*url, client);
  if (stub) return std::make_unique<StubBackend>(load_stub_table(*stub), fallback);
  fail(ErrorKind::kValidation, "no backend configured");
}

inline std::string report_file_content(EvaluationReport report, const std::string& digest) {
  report.metadata.input_digest = digest;
  return report_to_json(report).dump(2) + "\n";
}

inline PipelineResult run_pipeline(const PipelineConfig& cfg, std::ostream* log = nullptr) {
  validate_pipeline_config(cfg);
  fs::create_directories(cfg.out_dir);
  const PipelineArtifacts art(cfg.out_dir);
  PipelineResult result;

  // Runs `produce` unless resuming with a matching digest already on disk.
  auto stage = [&](std::string_view name, const fs::path& artifact,
                   const std::string& digest, auto&& produce) {
    StageOutcome outcome{std::string(name), false, artifact};
    if (cfg.resume && embedded_digest(artifact) == digest) {
      outcome.skipped = true;
    } else {
      try {
        produce();
      } catch (const Error& e) {
        throw Error(e.kind(), "stage " + std::string(name) + ": " + e.what());
      } catch (const std::exception& e) {
        throw Error(ErrorKind::kValidation, "stage " + std::string(name) + ": " + e.what());
      }
    }
    if (log) {
      *log << "stage " << name << ": " << (outcome.skipped ? "skipped" : "done") << " ("
           << artifact.filename().string() << ")\n";
    }
    result.stages.push_back(std::move(outcome));
  };

  const std::string corpus_digest = content_digest(cfg.corpus_path);
  const std::string ctest_digest =
      DigestBuilder()
          .add("stage", "build-controlled-test")
          .add("corpus", corpus_digest)
          .add("format", cfg.corpus_format == CorpusFormat::kCanonicalJsonl
                             ? "canonical-jsonl"
                             : "fairytaleqa-source")
          .add("split", to_string(cfg.split))
          .add("policy", to_string(cfg.policy))
          .add("seed", cfg.seed ? std::to_string(*cfg.seed) : "none")
          .hex();
  stage("build-controlled-test", art.ctest, ctest_digest, [&] {
    const Corpus corpus = load_corpus(cfg.corpus_path, cfg.corpus_format);
    const auto set = build_controlled_test(corpus, cfg.split, cfg.policy, cfg.seed);
    write_file_atomic(art.ctest,
                      serialize_controlled_test(set, {{"input_digest", ctest_digest}}));
  });

  const std::string ctest_content = sha256_hex(read_file(art.ctest));
  const std::string prompts_digest = DigestBuilder()
                                         .add("stage", "encode")
                                         .add("ctest", ctest_content)
                                         .add("config", std::string(1, config_letter(cfg.config)))
                                         .hex();
  stage("encode", art.prompts, prompts_digest, [&] {
    const auto ctest = controlled_test_from_jsonl(read_jsonl(art.ctest), art.ctest.string());
    write_file_atomic(art.prompts,
                      serialize_prompts(encode_controlled_prompts(ctest, cfg.config),
                                        prompts_digest));
  });

  auto backend = make_backend(cfg.backend_url, cfg.stub_table, cfg.stub_fallback, cfg.client);
  const std::string generations_digest =
      DigestBuilder()
          .add("stage", "generate")
          .add("prompts", sha256_hex(read_file(art.prompts)))
          .add("backend", backend->identity())
          .add("beam_width", std::to_string(cfg.params.beam_width))
          .add("max_input_tokens", std::to_string(cfg.params.max_input_tokens))
          .add("max_new_tokens", std::to_string(cfg.params.max_new_tokens))
          .hex();
  stage("generate", art.generations, generations_digest, [&] {
    const PromptFile prompts = read_prompts(art.prompts);
    ArtifactWriter writer(art.generations);
    run_generation(prompts, *backend, cfg.params, writer, generations_digest);
    writer.commit();
  });

  const std::string generations_content = sha256_hex(read_file(art.generations));
  EvalOptions opts;
  opts.profile = cfg.profile;
  opts.smoothing = cfg.smoothing;
  opts.aggregation = cfg.aggregation;
  opts.scorer_endpoint = cfg.scorer_url;
  opts.qa_params = cfg.params;

  const std::string qg_digest =
      DigestBuilder()
          .add("stage", "eval-qg")
          .add("generations", generations_content)
          .add("ctest", ctest_content)
          .add("profile", profile_to_string(cfg.profile))
          .add("smoothing", to_string(cfg.smoothing))
          .add("aggregation", to_string(cfg.aggregation))
          .add("scorer", cfg.scorer_url.value_or(""))
          .hex();
  stage("eval-qg", art.qg_report, qg_digest, [&] {
    const auto ctest = controlled_test_from_jsonl(read_jsonl(art.ctest), art.ctest.string());
    const auto gens = read_generations(art.generations);
    const auto report = evaluate_qg(interpret_generations(gens.records), ctest, opts);
    write_file_atomic(art.qg_report, report_file_content(report, qg_digest));
  });

  auto qa_backend =
      make_backend(cfg.qa_backend_url, cfg.qa_stub_table, cfg.qa_stub_fallback, cfg.client);
  const std::string qa_digest =
      DigestBuilder()
          .add("stage", "eval-qa")
          .add("generations", generations_content)
          .add("ctest", ctest_content)
          .add("qa_backend", qa_backend->identity())
          .add("profile", profile_to_string(cfg.profile))
          .add("beam_width", std::to_string(cfg.params.beam_width))
          .add("max_input_tokens", std::to_string(cfg.params.max_input_tokens))
          .add("max_new_tokens", std::to_string(cfg.params.max_new_tokens))
          .hex();
  stage("eval-qa", art.qa_report, qa_digest, [&] {
    const auto ctest = controlled_test_from_jsonl(read_jsonl(art.ctest), art.ctest.string());
    const auto gens = read_generations(art.generations);
    const auto report = evaluate_qa_controllability(interpret_generations(gens.records),
                                                    *qa_backend, ctest, opts);
    write_file_atomic(art.qa_report, report_file_content(report, qa_digest));
  });

  const std::string tables_digest = DigestBuilder()
                                        .add("stage", "report")
                                        .add("qg", sha256_hex(read_file(art.qg_report)))
                                        .add("qa", sha256_hex(read_file(art.qa_report)))
                                        .hex();
  stage("report", art.tables, tables_digest, [&] {
    std::string text;
    for (const fs::path& p : {art.qg_report, art.qa_report}) {
      const auto reports = parse_reports_json(read_file(p));
      text += render_report(reports, ReportFormat::kTextTable) + "\n";
    }
    text += "input_digest: " + tables_digest + "\n";
    write_file_atomic(art.tables, text);
  });

  return result;
}

}  // namespace qgc
