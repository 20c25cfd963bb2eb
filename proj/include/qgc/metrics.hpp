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

// Text normalization and the reference-based metrics: ROUGE-L F1 (plain F1
// over the longest common subsequence), sentence-level BLEU-4 and exact
// match. Everything here is pure.

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qgc/error.hpp"

namespace qgc {

struct NormalizationProfile {
  bool lowercase = true;
  bool strip_punctuation = true;
  bool collapse_whitespace = true;
  bool remove_articles = false;

  bool operator==(const NormalizationProfile&) const = default;
};

// Always free of empty tokens.
using TokenSequence = std::vector<std::string>;

enum class Metric { kRougeLF1, kBleu4, kExactMatch, kExternal };

inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::kRougeLF1:
      return "rouge_l_f1";
    case Metric::kBleu4:
      return "bleu4";
    case Metric::kExactMatch:
      return "exact_match";
    case Metric::kExternal:
      return "external";
  }
  return "";
}

inline Metric parse_metric(std::string_view s) {
  for (Metric m : {Metric::kRougeLF1, Metric::kBleu4, Metric::kExactMatch,
                   Metric::kExternal}) {
    if (to_string(m) == s) return m;
  }
  fail(ErrorKind::kValidation, "unknown metric \"" + std::string(s) + "\"");
}

struct Score {
  double value = 0.0;
  Metric metric = Metric::kRougeLF1;
};

enum class BleuSmoothing { kNone, kEpsilon };

inline std::string_view to_string(BleuSmoothing s) {
  return s == BleuSmoothing::kNone ? "none" : "epsilon";
}

inline BleuSmoothing parse_smoothing(std::string_view s) {
  if (s == "none") return BleuSmoothing::kNone;
  if (s == "epsilon") return BleuSmoothing::kEpsilon;
  fail(ErrorKind::kValidation, "unknown smoothing \"" + std::string(s) + "\"");
}

// Replacement numerator for zero n-gram matches under epsilon smoothing.
inline constexpr double kBleuEpsilon = 0.1;

// Steps, in order: lowercase, punctuation (Unicode P* classes) to spaces,
// whitespace runs collapsed, split on spaces, article tokens dropped. With
// collapse_whitespace off only U+0020 separates tokens.
inline TokenSequence normalize(std::string_view text,
                               const NormalizationProfile& profile = {}) {
  std::string folded;
  folded.reserve(text.size());
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  for (int32_t i = 0; i < length;) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) c = 0xFFFD;
    if (profile.lowercase) c = u_tolower(c);
    if (profile.strip_punctuation && u_ispunct(c)) c = ' ';
    if (profile.collapse_whitespace && u_isUWhiteSpace(c)) c = ' ';
    char buf[U8_MAX_LENGTH];
    int32_t n = 0;
    UBool err = false;
    U8_APPEND(reinterpret_cast<uint8_t*>(buf), n, U8_MAX_LENGTH, c, err);
    (void)err;
    folded.append(buf, static_cast<std::size_t>(n));
  }

  TokenSequence tokens;
  std::size_t pos = 0;
  while (pos < folded.size()) {
    const std::size_t end = std::min(folded.find(' ', pos), folded.size());
    if (end > pos) tokens.emplace_back(folded, pos, end - pos);
    pos = end + 1;
  }

  if (profile.remove_articles) {
    auto is_article = [](const std::string& t) {
      std::string lower = t;
      for (char& ch : lower) {
        if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
      }
      return lower == "a" || lower == "an" || lower == "the";
    };
    std::erase_if(tokens, is_article);
  }
  return tokens;
}

inline std::size_t lcs_length(std::span<const std::string> a,
                              std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  if (b.size() > a.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline Score rouge_l_f1(std::string_view hypothesis, std::string_view reference,
                        const NormalizationProfile& profile = {}) {
  const TokenSequence hyp = normalize(hypothesis, profile);
  const TokenSequence ref = normalize(reference, profile);
  const std::size_t lcs = lcs_length(hyp, ref);
  if (lcs == 0) return {0.0, Metric::kRougeLF1};
  const double recall = static_cast<double>(lcs) / static_cast<double>(ref.size());
  const double precision = static_cast<double>(lcs) / static_cast<double>(hyp.size());
  return {2.0 * precision * recall / (precision + recall), Metric::kRougeLF1};
}

// Clipped n-gram matches of a hypothesis against the per-n-gram maximum
// count over the references, and the hypothesis n-gram total.
struct NgramMatch {
  std::size_t clipped = 0;
  std::size_t total = 0;

  bool operator==(const NgramMatch&) const = default;
};

namespace detail {

using NgramCounts = std::map<std::vector<std::string_view>, std::size_t>;

inline NgramCounts count_ngrams(std::span<const std::string> tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::vector<std::string_view> gram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                       tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
    ++counts[std::move(gram)];
  }
  return counts;
}

}  // namespace detail

inline NgramMatch clipped_ngram_counts(std::span<const std::string> hypothesis,
                                       std::span<const TokenSequence> references,
                                       std::size_t n) {
  NgramMatch m;
  m.total = hypothesis.size() >= n ? hypothesis.size() - n + 1 : 0;
  if (m.total == 0) return m;
  detail::NgramCounts max_ref;
  for (const auto& ref : references) {
    for (auto& [gram, count] : detail::count_ngrams(ref, n)) {
      auto& slot = max_ref[gram];
      slot = std::max(slot, count);
    }
  }
  for (const auto& [gram, count] : detail::count_ngrams(hypothesis, n)) {
    auto it = max_ref.find(gram);
    if (it != max_ref.end()) m.clipped += std::min(count, it->second);
  }
  return m;
}

// Reference length closest to `hyp_len`; ties go to the shorter reference.
inline std::size_t closest_reference_length(std::size_t hyp_len,
                                            std::span<const TokenSequence> refs) {
  std::size_t best = refs.front().size();
  for (const auto& r : refs) {
    const auto d = [&](std::size_t len) {
      return len > hyp_len ? len - hyp_len : hyp_len - len;
    };
    if (d(r.size()) < d(best) || (d(r.size()) == d(best) && r.size() < best)) {
      best = r.size();
    }
  }
  return best;
}

inline Score bleu4_tokens(std::span<const std::string> hyp,
                          std::span<const TokenSequence> refs,
                          BleuSmoothing smoothing) {
  if (refs.empty()) fail(ErrorKind::kValidation, "bleu4 needs at least one reference");
  if (hyp.empty()) return {0.0, Metric::kBleu4};

  double log_sum = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const NgramMatch m = clipped_ngram_counts(hyp, refs, n);
    const double denom = static_cast<double>(std::max<std::size_t>(m.total, 1));
    if (m.clipped == 0) {
      if (smoothing == BleuSmoothing::kNone) return {0.0, Metric::kBleu4};
      log_sum += std::log(kBleuEpsilon / denom);
    } else {
      log_sum += std::log(static_cast<double>(m.clipped) / denom);
    }
  }
  const double c = static_cast<double>(hyp.size());
  const double r = static_cast<double>(closest_reference_length(hyp.size(), refs));
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  const double value = bp * std::exp(log_sum / 4.0);
  return {std::clamp(value, 0.0, 1.0), Metric::kBleu4};
}

inline Score bleu4(std::string_view hypothesis,
                   std::span<const std::string> references,
                   const NormalizationProfile& profile = {},
                   BleuSmoothing smoothing = BleuSmoothing::kEpsilon) {
  if (references.empty()) {
    fail(ErrorKind::kValidation, "bleu4 needs at least one reference");
  }
  std::vector<TokenSequence> refs;
  refs.reserve(references.size());
  for (const auto& r : references) refs.push_back(normalize(r, profile));
  return bleu4_tokens(normalize(hypothesis, profile), refs, smoothing);
}

inline Score exact_match(std::string_view hypothesis, std::string_view reference,
                         const NormalizationProfile& profile = {}) {
  const bool same = normalize(hypothesis, profile) == normalize(reference, profile);
  return {same ? 1.0 : 0.0, Metric::kExactMatch};
}

// "lowercase,strip_punctuation,collapse_whitespace" style flag lists.
inline std::string profile_to_string(const NormalizationProfile& p) {
  std::string out;
  auto add = [&](bool on, std::string_view name) {
    if (!on) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  add(p.lowercase, "lowercase");
  add(p.strip_punctuation, "strip_punctuation");
  add(p.collapse_whitespace, "collapse_whitespace");
  add(p.remove_articles, "remove_articles");
  return out.empty() ? "none" : out;
}

inline NormalizationProfile parse_profile(std::string_view spec) {
  NormalizationProfile p{false, false, false, false};
  if (spec == "none") return p;
  if (spec == "default") return NormalizationProfile{};
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const std::size_t end = std::min(spec.find(',', pos), spec.size());
    const std::string_view item = spec.substr(pos, end - pos);
    if (item == "lowercase") {
      p.lowercase = true;
    } else if (item == "strip_punctuation") {
      p.strip_punctuation = true;
    } else if (item == "collapse_whitespace") {
      p.collapse_whitespace = true;
    } else if (item == "remove_articles") {
      p.remove_articles = true;
    } else if (!item.empty()) {
      fail(ErrorKind::kValidation,
           "unknown normalization flag \"" + std::string(item) + "\"");
    }
    pos = end + 1;
  }
  return p;
}

}  // namespace qgc
