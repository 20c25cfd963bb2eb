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

#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include "qgc/error.hpp"

namespace qgc {

enum class Explicitness { kExplicit, kImplicit };

enum class NarrativeElement {
  kCharacter,
  kSetting,
  kAction,
  kFeeling,
  kCausalRelationship,
  kOutcomeResolution,
  kPrediction,
};

enum class Split { kTrain, kVal, kTest };

inline constexpr std::array<Explicitness, 2> kAllExplicitness = {
    Explicitness::kExplicit, Explicitness::kImplicit};

inline constexpr std::array<NarrativeElement, 7> kAllNarrativeElements = {
    NarrativeElement::kCharacter,          NarrativeElement::kSetting,
    NarrativeElement::kAction,             NarrativeElement::kFeeling,
    NarrativeElement::kCausalRelationship, NarrativeElement::kOutcomeResolution,
    NarrativeElement::kPrediction};

inline constexpr std::array<Split, 3> kAllSplits = {Split::kTrain, Split::kVal,
                                                    Split::kTest};

inline std::string_view to_string(Explicitness e) {
  return e == Explicitness::kExplicit ? "explicit" : "implicit";
}

inline std::string_view to_string(NarrativeElement n) {
  switch (n) {
    case NarrativeElement::kCharacter:
      return "character";
    case NarrativeElement::kSetting:
      return "setting";
    case NarrativeElement::kAction:
      return "action";
    case NarrativeElement::kFeeling:
      return "feeling";
    case NarrativeElement::kCausalRelationship:
      return "causal relationship";
    case NarrativeElement::kOutcomeResolution:
      return "outcome resolution";
    case NarrativeElement::kPrediction:
      return "prediction";
  }
  return "";
}

inline std::string_view to_string(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "";
}

// How label strings are matched against the enumerations.
//   kStrict:     byte-exact match against the canonical spelling.
//   kNormalized: ASCII-lowercase and collapse internal whitespace first,
//                then match exactly. Never fuzzy.
enum class LabelMatching { kStrict, kNormalized };

inline std::string normalize_label(std::string_view raw) {
  std::string out;
  bool pending_space = false;
  for (char c : raw) {
    const auto uc = static_cast<unsigned char>(c);
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
        c == '\v') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(uc < 0x80 ? static_cast<char>(std::tolower(uc)) : c);
  }
  return out;
}

namespace detail {

template <typename Enum, std::size_t N>
std::optional<Enum> match_label(std::string_view raw, LabelMatching matching,
                                const std::array<Enum, N>& values) {
  const std::string key = matching == LabelMatching::kNormalized
                              ? normalize_label(raw)
                              : std::string(raw);
  for (Enum v : values) {
    if (to_string(v) == key) return v;
  }
  return std::nullopt;
}

}  // namespace detail

inline std::optional<Explicitness> parse_explicitness(
    std::string_view raw, LabelMatching m = LabelMatching::kStrict) {
  return detail::match_label(raw, m, kAllExplicitness);
}

inline std::optional<NarrativeElement> parse_narrative(
    std::string_view raw, LabelMatching m = LabelMatching::kStrict) {
  return detail::match_label(raw, m, kAllNarrativeElements);
}

inline std::optional<Split> parse_split(
    std::string_view raw, LabelMatching m = LabelMatching::kStrict) {
  return detail::match_label(raw, m, kAllSplits);
}

template <typename Enum>
Enum require_label(std::optional<Enum> parsed, std::string_view what,
                   std::string_view raw) {
  if (!parsed) {
    fail(ErrorKind::kValidation,
         "unknown " + std::string(what) + " label \"" + std::string(raw) + "\"");
  }
  return *parsed;
}

}  // namespace qgc
