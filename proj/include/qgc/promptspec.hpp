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

// The six input/output schemas. Inputs put control attributes at the head,
// then the section:
//
//   A  <QUESTION> q <SECTION> s            ->  <ANSWER> a
//   B  <ANSWER> a <SECTION> s              ->  <QUESTION> q
//   C  <SECTION> s                         ->  <QUESTION> q <ANSWER> a
//   D  <EX> x <SECTION> s                  ->  <QUESTION> q <ANSWER> a
//   E  <NAR> n <SECTION> s                 ->  <QUESTION> q <ANSWER> a
//   F  <NAR> n <EX> x <SECTION> s          ->  <QUESTION> q <ANSWER> a
//
// Tokens and fields are joined by one ASCII space. Field text is inserted
// verbatim.

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "qgc/error.hpp"
#include "qgc/labels.hpp"

namespace qgc {

inline constexpr std::string_view kQuestionToken = "<QUESTION>";
inline constexpr std::string_view kAnswerToken = "<ANSWER>";
inline constexpr std::string_view kSectionToken = "<SECTION>";
inline constexpr std::string_view kExplicitnessToken = "<EX>";
inline constexpr std::string_view kNarrativeToken = "<NAR>";

enum class ModelConfig { kA, kB, kC, kD, kE, kF };

inline constexpr std::array<ModelConfig, 6> kAllModelConfigs = {
    ModelConfig::kA, ModelConfig::kB, ModelConfig::kC,
    ModelConfig::kD, ModelConfig::kE, ModelConfig::kF};

inline char config_letter(ModelConfig c) {
  return static_cast<char>('A' + static_cast<int>(c));
}

inline std::string_view canonical_name(ModelConfig c) {
  switch (c) {
    case ModelConfig::kA:
      return "question-section:answer";
    case ModelConfig::kB:
      return "answer-section:question";
    case ModelConfig::kC:
      return "section:question-answer";
    case ModelConfig::kD:
      return "ex-section:question-answer";
    case ModelConfig::kE:
      return "nar-section:question-answer";
    case ModelConfig::kF:
      return "nar-ex-section:question-answer";
  }
  return "";
}

// "section:question-answer (C)"
inline std::string display_name(ModelConfig c) {
  return std::string(canonical_name(c)) + " (" + config_letter(c) + ")";
}

// Accepts the letter ("D") or the canonical name.
inline ModelConfig parse_model_config(std::string_view s) {
  for (ModelConfig c : kAllModelConfigs) {
    if ((s.size() == 1 && s[0] == config_letter(c)) || s == canonical_name(c)) {
      return c;
    }
  }
  fail(ErrorKind::kValidation, "unknown model config \"" + std::string(s) + "\"");
}

inline bool produces_question_and_answer(ModelConfig c) {
  return c != ModelConfig::kA && c != ModelConfig::kB;
}

inline bool uses_explicitness(ModelConfig c) {
  return c == ModelConfig::kD || c == ModelConfig::kF;
}

inline bool uses_narrative(ModelConfig c) {
  return c == ModelConfig::kE || c == ModelConfig::kF;
}

// Optional inputs to encode_input. Exactly the fields a config requires
// must be set.
struct PromptFields {
  std::optional<std::string> question;
  std::optional<std::string> answer;
  std::optional<Explicitness> explicitness;
  std::optional<NarrativeElement> narrative;
};

struct PromptExample {
  ModelConfig config = ModelConfig::kC;
  std::string input_text;
  std::string target_text;
  std::optional<std::string> source_qa_id;
};

struct ParsedOutput {
  std::optional<std::string> question;
  std::optional<std::string> answer;

  bool operator==(const ParsedOutput&) const = default;
};

namespace detail {

inline void check_field(ModelConfig config, bool required, bool present,
                        std::string_view field) {
  if (required == present) return;
  fail(ErrorKind::kValidation,
       std::string("config ") + config_letter(config) +
           (required ? " requires " : " does not take ") + std::string(field));
}

inline void append_field(std::string& out, std::string_view token,
                         std::string_view value) {
  if (!out.empty()) out.push_back(' ');
  out += token;
  out.push_back(' ');
  out += value;
}

}  // namespace detail

inline std::string encode_input(ModelConfig config, std::string_view section_text,
                                const PromptFields& fields = {}) {
  if (section_text.empty()) {
    fail(ErrorKind::kValidation, "empty section text");
  }
  detail::check_field(config, config == ModelConfig::kA, fields.question.has_value(),
                      "question");
  detail::check_field(config, config == ModelConfig::kB, fields.answer.has_value(),
                      "answer");
  detail::check_field(config, uses_explicitness(config),
                      fields.explicitness.has_value(), "explicitness");
  detail::check_field(config, uses_narrative(config), fields.narrative.has_value(),
                      "narrative");

  std::string out;
  if (fields.question) detail::append_field(out, kQuestionToken, *fields.question);
  if (fields.answer) detail::append_field(out, kAnswerToken, *fields.answer);
  if (fields.narrative) {
    detail::append_field(out, kNarrativeToken, to_string(*fields.narrative));
  }
  if (fields.explicitness) {
    detail::append_field(out, kExplicitnessToken, to_string(*fields.explicitness));
  }
  detail::append_field(out, kSectionToken, section_text);
  return out;
}

// Fields beyond what the config emits are ignored.
inline std::string encode_target(ModelConfig config,
                                 const std::optional<std::string>& question,
                                 const std::optional<std::string>& answer) {
  const bool needs_q = config != ModelConfig::kA;
  const bool needs_a = config != ModelConfig::kB;
  if (needs_q && !question) {
    fail(ErrorKind::kValidation,
         std::string("config ") + config_letter(config) + " target requires question");
  }
  if (needs_a && !answer) {
    fail(ErrorKind::kValidation,
         std::string("config ") + config_letter(config) + " target requires answer");
  }
  std::string out;
  if (needs_q) detail::append_field(out, kQuestionToken, *question);
  if (needs_a) detail::append_field(out, kAnswerToken, *answer);
  return out;
}

namespace detail {

inline std::string_view trim_view(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\n\r\f\v");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\n\r\f\v");
  return s.substr(b, e - b + 1);
}

[[noreturn]] inline void malformed(ModelConfig config, std::string_view why,
                                   std::string_view raw) {
  throw MalformedOutputError(std::string("malformed output for config ") +
                                 config_letter(config) + ": " + std::string(why),
                             std::string(raw));
}

}  // namespace detail

// Inverse of encode_target. The output must open with the schema's leading
// token (surrounding whitespace aside). Splitting uses the first occurrence
// of each token; later occurrences stay inside the field text.
inline ParsedOutput parse_generated(ModelConfig config, std::string_view generated) {
  const std::string_view body = detail::trim_view(generated);
  const std::string_view lead =
      config == ModelConfig::kA ? kAnswerToken : kQuestionToken;
  if (!body.starts_with(lead)) {
    detail::malformed(config, "missing leading " + std::string(lead), generated);
  }
  const std::string_view rest = body.substr(lead.size());

  ParsedOutput out;
  if (config == ModelConfig::kA) {
    out.answer = std::string(detail::trim_view(rest));
  } else if (config == ModelConfig::kB) {
    out.question = std::string(detail::trim_view(rest));
  } else {
    const auto at = rest.find(kAnswerToken);
    if (at == std::string_view::npos) {
      detail::malformed(config, "missing " + std::string(kAnswerToken), generated);
    }
    out.question = std::string(detail::trim_view(rest.substr(0, at)));
    out.answer = std::string(detail::trim_view(rest.substr(at + kAnswerToken.size())));
  }
  if (out.question && out.question->empty()) {
    detail::malformed(config, "empty question", generated);
  }
  if (out.answer && out.answer->empty()) {
    detail::malformed(config, "empty answer", generated);
  }
  return out;
}

}  // namespace qgc
