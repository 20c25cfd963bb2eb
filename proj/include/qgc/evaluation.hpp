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

// Scoring protocols over a controlled test set:
//
//   qg-reference        generated question vs the example's reference
//                       questions (ROUGE-L F1, BLEU-4, optional external).
//   qa-controllability  a config-A model answers each generated question;
//                       its answer is scored against the generator's own
//                       answer (ROUGE-L F1, exact match).
//
// Both aggregate overall, by explicitness and by narrative element.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qgc/backend.hpp"
#include "qgc/controlled_test.hpp"
#include "qgc/error.hpp"
#include "qgc/external_scorer.hpp"
#include "qgc/labels.hpp"
#include "qgc/metrics.hpp"
#include "qgc/promptspec.hpp"

namespace qgc {

struct Controls {
  std::optional<Explicitness> explicitness;
  std::optional<NarrativeElement> narrative;

  bool operator==(const Controls&) const = default;
};

struct GeneratedQA {
  std::string section_id;
  ModelConfig config = ModelConfig::kC;
  std::string question;
  std::string answer;
  Controls controls;
};

// One raw model output as stored in a generations file.
struct GenerationRecord {
  std::string section_id;
  ModelConfig config = ModelConfig::kC;
  std::string input_text;
  std::string output_text;
  Controls controls;
};

struct MalformedOutput {
  std::string section_id;
  std::string raw;
  std::string reason;
};

struct GenerationBatch {
  std::vector<GeneratedQA> parsed;
  std::vector<MalformedOutput> malformed;
};

inline void check_controls(ModelConfig config, const Controls& c,
                           std::string_view section_id) {
  if (uses_explicitness(config) != c.explicitness.has_value() ||
      uses_narrative(config) != c.narrative.has_value()) {
    fail(ErrorKind::kValidation, "generation for section " + std::string(section_id) +
                                     " carries controls that do not match config " +
                                     config_letter(config));
  }
}

// Parses raw outputs. Outputs that break the schema are set aside, not
// scored.
inline GenerationBatch interpret_generations(std::span<const GenerationRecord> records) {
  GenerationBatch batch;
  for (const auto& r : records) {
    check_controls(r.config, r.controls, r.section_id);
    try {
      ParsedOutput p = parse_generated(r.config, r.output_text);
      batch.parsed.push_back({r.section_id, r.config, p.question.value_or(""),
                              p.answer.value_or(""), r.controls});
    } catch (const MalformedOutputError& e) {
      batch.malformed.push_back({r.section_id, e.raw(), e.what()});
    }
  }
  return batch;
}

enum class ReferenceAggregation { kMaxOverReferences, kMeanOverReferences };

inline std::string_view to_string(ReferenceAggregation a) {
  return a == ReferenceAggregation::kMaxOverReferences ? "max-over-references"
                                                       : "mean-over-references";
}

inline ReferenceAggregation parse_aggregation(std::string_view s) {
  if (s == "max" || s == "max-over-references") {
    return ReferenceAggregation::kMaxOverReferences;
  }
  if (s == "mean" || s == "mean-over-references") {
    return ReferenceAggregation::kMeanOverReferences;
  }
  fail(ErrorKind::kValidation, "unknown aggregation \"" + std::string(s) + "\"");
}

struct ScoreRecord {
  std::string section_id;
  Metric metric = Metric::kRougeLF1;
  double value = 0.0;
  std::optional<Explicitness> explicitness;
  std::optional<NarrativeElement> narrative;
};

struct GroupStat {
  double mean = 0.0;
  std::size_t count = 0;

  bool operator==(const GroupStat&) const = default;
};

using MetricStats = std::map<std::string, GroupStat>;        // metric -> stat
using LabelAggregate = std::map<std::string, MetricStats>;   // label -> metrics

enum class LabelAxis { kExplicitness, kNarrative };

inline constexpr std::string_view kUnlabeled = "unlabeled";

// Arithmetic means per (label, metric). Records without a label on the
// axis land under "unlabeled". Summation runs in (section id, value) order,
// so any permutation of the input gives bit-identical means.
inline LabelAggregate aggregate_by_label(std::span<const ScoreRecord> records,
                                         LabelAxis axis) {
  std::map<std::string, std::map<std::string, std::vector<std::pair<std::string, double>>>>
      buckets;
  for (const auto& r : records) {
    std::string label(kUnlabeled);
    if (axis == LabelAxis::kExplicitness && r.explicitness) {
      label = to_string(*r.explicitness);
    } else if (axis == LabelAxis::kNarrative && r.narrative) {
      label = to_string(*r.narrative);
    }
    buckets[label][std::string(to_string(r.metric))].emplace_back(r.section_id, r.value);
  }
  LabelAggregate out;
  for (auto& [label, metrics] : buckets) {
    for (auto& [metric, values] : metrics) {
      std::sort(values.begin(), values.end());
      double sum = 0.0;
      for (const auto& v : values) sum += v.second;
      out[label][metric] = {sum / static_cast<double>(values.size()), values.size()};
    }
  }
  return out;
}

// Count-weighted mean of group means, per metric.
inline MetricStats overall_from_groups(const LabelAggregate& groups) {
  std::map<std::string, std::pair<double, std::size_t>> acc;
  for (const auto& [label, metrics] : groups) {
    for (const auto& [metric, stat] : metrics) {
      acc[metric].first += stat.mean * static_cast<double>(stat.count);
      acc[metric].second += stat.count;
    }
  }
  MetricStats out;
  for (const auto& [metric, a] : acc) {
    out[metric] = {a.second ? a.first / static_cast<double>(a.second) : 0.0, a.second};
  }
  return out;
}

enum class Protocol { kQgReference, kQaControllability };

inline std::string_view to_string(Protocol p) {
  return p == Protocol::kQgReference ? "qg-reference" : "qa-controllability";
}

inline Protocol parse_protocol(std::string_view s) {
  if (s == "qg-reference") return Protocol::kQgReference;
  if (s == "qa-controllability") return Protocol::kQaControllability;
  fail(ErrorKind::kValidation, "unknown protocol \"" + std::string(s) + "\"");
}

struct ReportMetadata {
  NormalizationProfile profile;
  BleuSmoothing smoothing = BleuSmoothing::kEpsilon;
  ReferenceAggregation aggregation = ReferenceAggregation::kMaxOverReferences;
  SelectionPolicy policy = SelectionPolicy::kLargestGroup;
  std::optional<std::uint64_t> seed;
  Split source_split = Split::kTest;
  std::string external_scorer;  // empty when no external scorer was used
  std::string input_digest;

  bool operator==(const ReportMetadata&) const = default;
};

struct EvaluationReport {
  Protocol protocol = Protocol::kQgReference;
  ModelConfig config = ModelConfig::kC;
  MetricStats overall;
  LabelAggregate by_explicitness;
  LabelAggregate by_narrative;
  std::size_t n_examples = 0;
  std::size_t n_excluded = 0;
  ReportMetadata metadata;

  bool operator==(const EvaluationReport&) const = default;
};

struct EvalOptions {
  NormalizationProfile profile;
  BleuSmoothing smoothing = BleuSmoothing::kEpsilon;
  ReferenceAggregation aggregation = ReferenceAggregation::kMaxOverReferences;
  std::optional<std::string> scorer_endpoint;
  ScorerOptions scorer_options;
  double max_exclusion_rate = 0.05;
  DecodingParams qa_params;
};

namespace detail {

struct MatchedExample {
  const ControlledExample* example;
  const GeneratedQA* generated;  // null when the output was malformed
};

// Pairs every controlled example with exactly one generation.
inline std::vector<MatchedExample> match_generations(const GenerationBatch& batch,
                                                     const ControlledTestSet& ctest) {
  std::map<std::string_view, const ControlledExample*> examples;
  for (const auto& ex : ctest.examples) examples.emplace(ex.section_id, &ex);

  std::map<std::string_view, const GeneratedQA*> seen;
  auto claim = [&](std::string_view section_id, const GeneratedQA* g) {
    if (!examples.contains(section_id)) {
      fail(ErrorKind::kEvaluation, "generation for section " + std::string(section_id) +
                                       " has no controlled example");
    }
    if (!seen.emplace(section_id, g).second) {
      fail(ErrorKind::kEvaluation,
           "duplicate generations for section " + std::string(section_id));
    }
  };
  for (const auto& g : batch.parsed) claim(g.section_id, &g);
  for (const auto& m : batch.malformed) claim(m.section_id, nullptr);

  std::vector<MatchedExample> out;
  for (const auto& ex : ctest.examples) {
    auto it = seen.find(ex.section_id);
    if (it == seen.end()) {
      fail(ErrorKind::kEvaluation, "no generation for section " + ex.section_id);
    }
    if (it->second) {
      const Controls& c = it->second->controls;
      if ((c.explicitness && *c.explicitness != ex.explicitness) ||
          (c.narrative && *c.narrative != ex.narrative)) {
        fail(ErrorKind::kEvaluation, "generation for section " + ex.section_id +
                                         " was conditioned on different labels");
      }
    }
    out.push_back({&ex, it->second});
  }
  return out;
}

inline void check_exclusions(std::size_t excluded, std::size_t total, double max_rate) {
  if (excluded == 0 || total == 0) return;
  const double rate = static_cast<double>(excluded) / static_cast<double>(total);
  if (rate >= max_rate) {
    fail(ErrorKind::kEvaluation,
         std::to_string(excluded) + " of " + std::to_string(total) +
             " outputs were malformed, at or above the exclusion threshold");
  }
}

inline double aggregate_references(std::span<const double> values,
                                   ReferenceAggregation agg) {
  if (values.empty()) return 0.0;
  if (agg == ReferenceAggregation::kMaxOverReferences) {
    return *std::max_element(values.begin(), values.end());
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

inline EvaluationReport assemble_report(Protocol protocol, ModelConfig config,
                                        const std::vector<ScoreRecord>& records,
                                        std::size_t n_examples, std::size_t n_excluded,
                                        const ControlledTestSet& ctest,
                                        const EvalOptions& opts) {
  EvaluationReport rep;
  rep.protocol = protocol;
  rep.config = config;
  rep.by_explicitness = aggregate_by_label(records, LabelAxis::kExplicitness);
  rep.by_narrative = aggregate_by_label(records, LabelAxis::kNarrative);
  rep.overall = overall_from_groups(rep.by_explicitness);
  rep.n_examples = n_examples;
  rep.n_excluded = n_excluded;
  rep.metadata.profile = opts.profile;
  rep.metadata.smoothing = opts.smoothing;
  rep.metadata.aggregation = opts.aggregation;
  rep.metadata.policy = ctest.policy;
  rep.metadata.seed = ctest.seed;
  rep.metadata.source_split = ctest.source_split;
  if (protocol == Protocol::kQgReference && opts.scorer_endpoint) {
    rep.metadata.external_scorer = *opts.scorer_endpoint;
  }
  return rep;
}

inline ModelConfig batch_config(const GenerationBatch& batch,
                                const std::vector<MatchedExample>& matched) {
  std::optional<ModelConfig> config;
  for (const auto& m : matched) {
    if (!m.generated) continue;
    if (config && *config != m.generated->config) {
      fail(ErrorKind::kEvaluation, "generations mix several model configs");
    }
    config = m.generated->config;
  }
  (void)batch;
  return config.value_or(ModelConfig::kC);
}

}  // namespace detail

inline EvaluationReport evaluate_qg(const GenerationBatch& batch,
                                    const ControlledTestSet& ctest,
                                    const EvalOptions& opts = {}) {
  const auto matched = detail::match_generations(batch, ctest);
  detail::check_exclusions(batch.malformed.size(), matched.size(), opts.max_exclusion_rate);
  const ModelConfig config = detail::batch_config(batch, matched);
  if (config == ModelConfig::kA) {
    fail(ErrorKind::kValidation, "config A generates no questions to score");
  }

  std::vector<ScoringPair> external_pairs;
  std::vector<ScoreRecord> records;
  for (const auto& m : matched) {
    if (!m.generated) continue;
    const ControlledExample& ex = *m.example;
    std::vector<std::string> refs;
    for (const auto& p : ex.reference_pairs) refs.push_back(p.question);

    std::vector<double> rouge;
    for (const auto& r : refs) {
      rouge.push_back(rouge_l_f1(m.generated->question, r, opts.profile).value);
    }
    records.push_back({ex.section_id, Metric::kRougeLF1,
                       detail::aggregate_references(rouge, opts.aggregation),
                       ex.explicitness, ex.narrative});
    records.push_back({ex.section_id, Metric::kBleu4,
                       bleu4(m.generated->question, refs, opts.profile, opts.smoothing).value,
                       ex.explicitness, ex.narrative});
    if (opts.scorer_endpoint) {
      for (const auto& r : refs) external_pairs.push_back({m.generated->question, r});
    }
  }

  if (opts.scorer_endpoint) {
    const auto scores =
        external_score(external_pairs, *opts.scorer_endpoint, opts.scorer_options);
    std::size_t at = 0;
    for (const auto& m : matched) {
      if (!m.generated) continue;
      const std::size_t n = m.example->reference_pairs.size();
      std::vector<double> values;
      for (std::size_t i = 0; i < n; ++i) values.push_back(scores[at + i].value);
      at += n;
      records.push_back({m.example->section_id, Metric::kExternal,
                         detail::aggregate_references(values, opts.aggregation),
                         m.example->explicitness, m.example->narrative});
    }
  }

  return detail::assemble_report(Protocol::kQgReference, config, records, matched.size(),
                                 batch.malformed.size(), ctest, opts);
}

inline EvaluationReport evaluate_qg(std::span<const GeneratedQA> generated,
                                    const ControlledTestSet& ctest,
                                    const EvalOptions& opts = {}) {
  GenerationBatch batch;
  batch.parsed.assign(generated.begin(), generated.end());
  return evaluate_qg(batch, ctest, opts);
}

inline EvaluationReport evaluate_qa_controllability(const GenerationBatch& batch,
                                                    GenerationBackend& qa_backend,
                                                    const ControlledTestSet& ctest,
                                                    const EvalOptions& opts = {}) {
  const auto matched = detail::match_generations(batch, ctest);
  for (const auto& g : batch.parsed) {
    if (!produces_question_and_answer(g.config)) {
      fail(ErrorKind::kValidation,
           std::string("QA controllability needs question-and-answer generations, got "
                       "config ") + config_letter(g.config));
    }
  }
  detail::check_exclusions(batch.malformed.size(), matched.size(), opts.max_exclusion_rate);
  const ModelConfig config = detail::batch_config(batch, matched);

  std::vector<GenerationRequest> requests;
  std::vector<const detail::MatchedExample*> asked;
  for (const auto& m : matched) {
    if (!m.generated) continue;
    requests.push_back({m.example->section_id,
                        encode_input(ModelConfig::kA, m.example->section_text,
                                     PromptFields{.question = m.generated->question, .answer = {}, .explicitness = {}, .narrative = {}}),
                        opts.qa_params});
    asked.push_back(&m);
  }
  const auto responses = qa_backend.generate(requests);
  if (responses.size() != requests.size()) {
    fail(ErrorKind::kBackend, "QA backend returned " + std::to_string(responses.size()) +
                                  " answers for " + std::to_string(requests.size()) +
                                  " questions");
  }

  std::vector<ScoreRecord> records;
  std::size_t qa_malformed = 0;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    if (responses[i].id != requests[i].id) {
      fail(ErrorKind::kBackend, "QA backend response/request id mismatch");
    }
    std::string qa_answer;
    try {
      qa_answer = *parse_generated(ModelConfig::kA, responses[i].output_text).answer;
    } catch (const MalformedOutputError&) {
      ++qa_malformed;
      continue;
    }
    const auto& m = *asked[i];
    const std::string& target = m.generated->answer;
    records.push_back({m.example->section_id, Metric::kRougeLF1,
                       rouge_l_f1(qa_answer, target, opts.profile).value,
                       m.example->explicitness, m.example->narrative});
    records.push_back({m.example->section_id, Metric::kExactMatch,
                       exact_match(qa_answer, target, opts.profile).value,
                       m.example->explicitness, m.example->narrative});
  }
  const std::size_t excluded = batch.malformed.size() + qa_malformed;
  detail::check_exclusions(excluded, matched.size(), opts.max_exclusion_rate);

  return detail::assemble_report(Protocol::kQaControllability, config, records,
                                 matched.size(), excluded, ctest, opts);
}

// ---------------------------------------------------------------------------
// JSON form of a report. Doubles are written in shortest round-trip form.
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::ordered_json stats_json(const MetricStats& stats) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [metric, s] : stats) j[metric] = {{"mean", s.mean}, {"count", s.count}};
  return j;
}

inline nlohmann::ordered_json groups_json(const LabelAggregate& groups) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [label, stats] : groups) j[label] = stats_json(stats);
  return j;
}

inline MetricStats stats_from_json(const json& j) {
  MetricStats out;
  for (const auto& [metric, s] : j.items()) {
    out[metric] = {s.at("mean").get<double>(), s.at("count").get<std::size_t>()};
  }
  return out;
}

inline LabelAggregate groups_from_json(const json& j) {
  LabelAggregate out;
  for (const auto& [label, stats] : j.items()) out[label] = stats_from_json(stats);
  return out;
}

}  // namespace detail

inline nlohmann::ordered_json report_to_json(const EvaluationReport& r) {
  nlohmann::ordered_json j;
  j["protocol"] = to_string(r.protocol);
  j["config"] = std::string(1, config_letter(r.config));
  j["config_name"] = canonical_name(r.config);
  j["n_examples"] = r.n_examples;
  j["n_excluded"] = r.n_excluded;
  j["overall"] = detail::stats_json(r.overall);
  j["by_explicitness"] = detail::groups_json(r.by_explicitness);
  j["by_narrative"] = detail::groups_json(r.by_narrative);
  auto& m = j["metadata"];
  m["normalization"] = profile_to_string(r.metadata.profile);
  m["smoothing"] = to_string(r.metadata.smoothing);
  m["aggregation"] = to_string(r.metadata.aggregation);
  m["policy"] = to_string(r.metadata.policy);
  m["seed"] = r.metadata.seed ? nlohmann::ordered_json(*r.metadata.seed) : nlohmann::ordered_json(nullptr);
  m["source_split"] = to_string(r.metadata.source_split);
  m["external_scorer"] = r.metadata.external_scorer;
  m["input_digest"] = r.metadata.input_digest;
  return j;
}

inline EvaluationReport report_from_json(const json& j) {
  EvaluationReport r;
  try {
    r.protocol = parse_protocol(j.at("protocol").get<std::string>());
    r.config = parse_model_config(j.at("config").get<std::string>());
    r.n_examples = j.at("n_examples").get<std::size_t>();
    r.n_excluded = j.at("n_excluded").get<std::size_t>();
    r.overall = detail::stats_from_json(j.at("overall"));
    r.by_explicitness = detail::groups_from_json(j.at("by_explicitness"));
    r.by_narrative = detail::groups_from_json(j.value("by_narrative", json::object()));
    const json& m = j.at("metadata");
    r.metadata.profile = parse_profile(m.at("normalization").get<std::string>());
    r.metadata.smoothing = parse_smoothing(m.at("smoothing").get<std::string>());
    r.metadata.aggregation = parse_aggregation(m.at("aggregation").get<std::string>());
    r.metadata.policy = parse_selection_policy(m.at("policy").get<std::string>());
    if (!m.at("seed").is_null()) r.metadata.seed = m.at("seed").get<std::uint64_t>();
    const auto split = m.at("source_split").get<std::string>();
    r.metadata.source_split = require_label(parse_split(split), "split", split);
    r.metadata.external_scorer = m.value("external_scorer", "");
    r.metadata.input_digest = m.value("input_digest", "");
  } catch (const json::exception& e) {
    fail(ErrorKind::kValidation, std::string("malformed report: ") + e.what());
  }
  return r;
}

}  // namespace qgc
