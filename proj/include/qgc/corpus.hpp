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

// Labeled story/section/QA corpora: the unvalidated draft form, the
// validator, the immutable cross-linked Corpus, the canonical JSONL format,
// and summary statistics.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "qgc/error.hpp"
#include "qgc/io.hpp"
#include "qgc/labels.hpp"

namespace qgc {

struct QAPair {
  std::string id;
  std::string question;
  std::string answer;
  Explicitness explicitness = Explicitness::kExplicit;
  NarrativeElement narrative = NarrativeElement::kCharacter;
  std::string section_id;
  std::string story_id;
  Split split = Split::kTrain;

  bool operator==(const QAPair&) const = default;
};

struct Section {
  std::string id;
  std::string story_id;
  std::string text;
  std::int64_t ordinal = 0;

  bool operator==(const Section&) const = default;
};

struct Story {
  std::string id;
  std::string title;
  std::vector<std::string> section_ids;  // ordered by section ordinal
  Split split = Split::kTrain;

  bool operator==(const Story&) const = default;
};

// Corpus contents before validation. Labels are still raw strings so that
// every defect can be reported, not just the first.
struct CorpusDraft {
  struct StoryRecord {
    std::string id;
    std::string title;
    std::string split;
  };
  struct SectionRecord {
    std::string id;
    std::string story_id;
    std::string text;
    std::int64_t ordinal = 0;
  };
  struct PairRecord {
    std::string id;
    std::string question;
    std::string answer;
    std::string explicitness;
    std::string narrative;
    std::string section_id;
    std::string story_id;
  };

  std::vector<StoryRecord> stories;
  std::vector<SectionRecord> sections;
  std::vector<PairRecord> pairs;
};

struct Violation {
  std::string record_id;
  std::string field;
  std::string message;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }

  std::string summary(std::size_t max_items = 5) const {
    std::string out;
    for (std::size_t i = 0; i < violations.size() && i < max_items; ++i) {
      const auto& v = violations[i];
      if (!out.empty()) out += "; ";
      out += "record " + v.record_id + " field " + v.field + ": " + v.message;
    }
    if (violations.size() > max_items) {
      out += "; and " + std::to_string(violations.size() - max_items) + " more";
    }
    return out;
  }
};

namespace detail {

inline bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\n\r\f\v") == std::string_view::npos;
}

}  // namespace detail

// Reports every invariant violation in the draft. Empty iff the draft
// would build into a valid Corpus.
inline ValidationReport validate_corpus(const CorpusDraft& draft,
                                        LabelMatching matching =
                                            LabelMatching::kStrict) {
  ValidationReport report;
  auto add = [&](std::string id, std::string field, std::string message) {
    report.violations.push_back(
        {std::move(id), std::move(field), std::move(message)});
  };

  if (draft.stories.empty() && draft.sections.empty() && draft.pairs.empty()) {
    add("-", "-", "empty corpus");
    return report;
  }

  std::map<std::string, const CorpusDraft::StoryRecord*, std::less<>> stories;
  for (const auto& s : draft.stories) {
    if (!stories.emplace(s.id, &s).second) add(s.id, "story_id", "duplicate story id");
    if (s.id.empty()) add("-", "story_id", "empty story id");
    if (!parse_split(s.split, matching)) add(s.id, "split", "unknown split label");
  }

  std::map<std::string, const CorpusDraft::SectionRecord*, std::less<>> sections;
  std::map<std::string, std::vector<std::int64_t>, std::less<>> ordinals;
  for (const auto& sec : draft.sections) {
    if (!sections.emplace(sec.id, &sec).second) {
      add(sec.id, "section_id", "duplicate section id");
    }
    if (sec.id.empty()) add("-", "section_id", "empty section id");
    if (detail::is_blank(sec.text)) add(sec.id, "section_text", "empty section text");
    if (!stories.contains(sec.story_id)) {
      add(sec.id, "story_id", "dangling story_id " + sec.story_id);
    }
    if (sec.ordinal < 0) add(sec.id, "section_ordinal", "negative ordinal");
    ordinals[sec.story_id].push_back(sec.ordinal);
  }

  for (const auto& s : draft.stories) {
    auto it = ordinals.find(s.id);
    if (it == ordinals.end()) {
      add(s.id, "section_ids", "story has no sections");
      continue;
    }
    auto ords = it->second;
    std::sort(ords.begin(), ords.end());
    for (std::size_t i = 0; i < ords.size(); ++i) {
      if (i > 0 && ords[i] == ords[i - 1]) {
        add(s.id, "section_ordinal", "duplicate ordinal " + std::to_string(ords[i]));
      } else if (ords[i] != static_cast<std::int64_t>(i)) {
        add(s.id, "section_ordinal", "ordinals not contiguous from 0");
        break;
      }
    }
  }

  std::set<std::string, std::less<>> pair_ids;
  for (const auto& p : draft.pairs) {
    if (!pair_ids.insert(p.id).second) add(p.id, "qa_id", "duplicate qa id");
    if (p.id.empty()) add("-", "qa_id", "empty qa id");
    if (detail::is_blank(p.question)) add(p.id, "question", "empty question");
    if (detail::is_blank(p.answer)) add(p.id, "answer", "empty answer");
    if (!parse_explicitness(p.explicitness, matching)) {
      add(p.id, "explicitness", "unknown explicitness label");
    }
    if (!parse_narrative(p.narrative, matching)) {
      add(p.id, "narrative", "unknown narrative label");
    }
    const bool story_known = stories.contains(p.story_id);
    if (!story_known) add(p.id, "story_id", "dangling story_id " + p.story_id);
    auto sec = sections.find(p.section_id);
    if (sec == sections.end()) {
      add(p.id, "section_id", "dangling section_id " + p.section_id);
    } else if (story_known && sec->second->story_id != p.story_id) {
      add(p.id, "story_id",
          "section " + p.section_id + " belongs to story " +
              sec->second->story_id + ", not " + p.story_id);
    }
  }
  return report;
}

// Immutable, fully cross-linked corpus. Ordering is stable: stories by id,
// sections by (story id, ordinal), pairs by (story id, section ordinal, id).
class Corpus {
 public:
  static Corpus from_draft(const CorpusDraft& draft,
                           LabelMatching matching = LabelMatching::kStrict) {
    ValidationReport report = validate_corpus(draft, matching);
    if (!report.ok()) {
      if (report.violations.front().message == "empty corpus") {
        fail(ErrorKind::kValidation, "empty corpus");
      }
      fail(ErrorKind::kValidation, "invalid corpus: " + report.summary());
    }

    Corpus c;
    std::map<std::string, Split, std::less<>> split_of;
    for (const auto& s : draft.stories) {
      Split split = *parse_split(s.split, matching);
      split_of.emplace(s.id, split);
      c.stories_.push_back(Story{s.id, s.title, {}, split});
    }
    std::sort(c.stories_.begin(), c.stories_.end(),
              [](const Story& a, const Story& b) { return a.id < b.id; });

    for (const auto& s : draft.sections) {
      c.sections_.push_back(Section{s.id, s.story_id, s.text, s.ordinal});
    }
    std::sort(c.sections_.begin(), c.sections_.end(),
              [](const Section& a, const Section& b) {
                return std::tie(a.story_id, a.ordinal) <
                       std::tie(b.story_id, b.ordinal);
              });

    for (std::size_t i = 0; i < c.stories_.size(); ++i) {
      c.story_index_.emplace(c.stories_[i].id, i);
    }
    for (std::size_t i = 0; i < c.sections_.size(); ++i) {
      const Section& sec = c.sections_[i];
      c.section_index_.emplace(sec.id, i);
      c.stories_[c.story_index_.at(sec.story_id)].section_ids.push_back(sec.id);
    }

    for (const auto& p : draft.pairs) {
      c.pairs_.push_back(QAPair{p.id, p.question, p.answer,
                                *parse_explicitness(p.explicitness, matching),
                                *parse_narrative(p.narrative, matching),
                                p.section_id, p.story_id,
                                split_of.at(p.story_id)});
    }
    std::sort(c.pairs_.begin(), c.pairs_.end(),
              [&c](const QAPair& a, const QAPair& b) {
                const auto oa = c.sections_[c.section_index_.at(a.section_id)].ordinal;
                const auto ob = c.sections_[c.section_index_.at(b.section_id)].ordinal;
                return std::tie(a.story_id, oa, a.id) < std::tie(b.story_id, ob, b.id);
              });
    for (std::size_t i = 0; i < c.pairs_.size(); ++i) {
      auto [it, inserted] =
          c.pair_ranges_.try_emplace(c.pairs_[i].section_id, i, i + 1);
      if (!inserted) it->second.second = i + 1;
    }
    return c;
  }

  const std::vector<Story>& stories() const { return stories_; }
  const std::vector<Section>& sections() const { return sections_; }
  const std::vector<QAPair>& qa_pairs() const { return pairs_; }

  const Story* find_story(std::string_view id) const {
    auto it = story_index_.find(id);
    return it == story_index_.end() ? nullptr : &stories_[it->second];
  }

  const Section* find_section(std::string_view id) const {
    auto it = section_index_.find(id);
    return it == section_index_.end() ? nullptr : &sections_[it->second];
  }

  // Pairs attached to a section, in id order. Empty for unknown sections.
  std::span<const QAPair> pairs_in_section(std::string_view section_id) const {
    auto it = pair_ranges_.find(section_id);
    if (it == pair_ranges_.end()) return {};
    return std::span<const QAPair>(pairs_).subspan(
        it->second.first, it->second.second - it->second.first);
  }

  Split split_of(const Section& section) const {
    return find_story(section.story_id)->split;
  }

  bool operator==(const Corpus& other) const {
    return stories_ == other.stories_ && sections_ == other.sections_ &&
           pairs_ == other.pairs_;
  }

 private:
  Corpus() = default;

  std::vector<Story> stories_;
  std::vector<Section> sections_;
  std::vector<QAPair> pairs_;
  std::map<std::string, std::size_t, std::less<>> story_index_;
  std::map<std::string, std::size_t, std::less<>> section_index_;
  std::map<std::string, std::pair<std::size_t, std::size_t>, std::less<>>
      pair_ranges_;
};

inline CorpusDraft to_draft(const Corpus& corpus) {
  CorpusDraft d;
  for (const auto& s : corpus.stories()) {
    d.stories.push_back({s.id, s.title, std::string(to_string(s.split))});
  }
  for (const auto& s : corpus.sections()) {
    d.sections.push_back({s.id, s.story_id, s.text, s.ordinal});
  }
  for (const auto& p : corpus.qa_pairs()) {
    d.pairs.push_back({p.id, p.question, p.answer,
                       std::string(to_string(p.explicitness)),
                       std::string(to_string(p.narrative)), p.section_id,
                       p.story_id});
  }
  return d;
}

// A built Corpus always validates; this overload exists for symmetry with
// the draft form and for round-trip checks.
inline ValidationReport validate_corpus(const Corpus& corpus) {
  return validate_corpus(to_draft(corpus));
}

// ---------------------------------------------------------------------------
// Canonical JSONL: one record per QA pair, fields
//   story_id, story_title, split, section_id, section_ordinal, section_text,
//   qa_id, question, answer, explicitness, narrative.
// A section without pairs is written once with qa_id = null and no QA fields.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string record_label(const json& rec, std::size_t line) {
  for (const char* key : {"qa_id", "section_id", "story_id"}) {
    auto it = rec.find(key);
    if (it != rec.end() && it->is_string()) return it->get<std::string>();
  }
  return "line " + std::to_string(line);
}

inline std::string require_string(const json& rec, const char* field,
                                  const std::string& label) {
  auto it = rec.find(field);
  if (it == rec.end() || it->is_null()) {
    fail(ErrorKind::kValidation,
         "record " + label + ": missing field " + field);
  }
  if (!it->is_string()) {
    fail(ErrorKind::kValidation,
         "record " + label + ": field " + field + " must be a string");
  }
  return it->get<std::string>();
}

}  // namespace detail

inline CorpusDraft parse_canonical_records(const std::vector<json>& records) {
  CorpusDraft draft;
  std::map<std::string, std::size_t, std::less<>> story_at;
  std::map<std::string, std::size_t, std::less<>> section_at;

  for (std::size_t i = 0; i < records.size(); ++i) {
    const json& rec = records[i];
    const std::string label = detail::record_label(rec, i + 1);

    CorpusDraft::StoryRecord story{detail::require_string(rec, "story_id", label),
                                   detail::require_string(rec, "story_title", label),
                                   detail::require_string(rec, "split", label)};
    auto ord = rec.find("section_ordinal");
    if (ord == rec.end() || ord->is_null()) {
      fail(ErrorKind::kValidation,
           "record " + label + ": missing field section_ordinal");
    }
    if (!ord->is_number_integer()) {
      fail(ErrorKind::kValidation,
           "record " + label + ": field section_ordinal must be an integer");
    }
    CorpusDraft::SectionRecord section{
        detail::require_string(rec, "section_id", label), story.id,
        detail::require_string(rec, "section_text", label),
        ord->get<std::int64_t>()};

    if (auto it = story_at.find(story.id); it == story_at.end()) {
      story_at.emplace(story.id, draft.stories.size());
      draft.stories.push_back(story);
    } else {
      const auto& prev = draft.stories[it->second];
      if (prev.title != story.title || prev.split != story.split) {
        fail(ErrorKind::kValidation, "record " + label +
                                         ": conflicting story fields for story " +
                                         story.id);
      }
    }
    if (auto it = section_at.find(section.id); it == section_at.end()) {
      section_at.emplace(section.id, draft.sections.size());
      draft.sections.push_back(section);
    } else {
      const auto& prev = draft.sections[it->second];
      if (prev.story_id != section.story_id || prev.text != section.text ||
          prev.ordinal != section.ordinal) {
        fail(ErrorKind::kValidation,
             "record " + label + ": conflicting section fields for section " +
                 section.id);
      }
    }

    auto qa = rec.find("qa_id");
    if (qa == rec.end() || qa->is_null()) continue;  // section-only record
    draft.pairs.push_back({detail::require_string(rec, "qa_id", label),
                           detail::require_string(rec, "question", label),
                           detail::require_string(rec, "answer", label),
                           detail::require_string(rec, "explicitness", label),
                           detail::require_string(rec, "narrative", label),
                           section.id, story.id});
  }
  return draft;
}

inline std::string export_canonical(const Corpus& corpus) {
  std::string out;
  for (const Section& sec : corpus.sections()) {
    const Story& story = *corpus.find_story(sec.story_id);
    auto base = [&] {
      nlohmann::ordered_json rec;
      rec["story_id"] = story.id;
      rec["story_title"] = story.title;
      rec["split"] = to_string(story.split);
      rec["section_id"] = sec.id;
      rec["section_ordinal"] = sec.ordinal;
      rec["section_text"] = sec.text;
      return rec;
    };
    auto pairs = corpus.pairs_in_section(sec.id);
    if (pairs.empty()) {
      auto rec = base();
      rec["qa_id"] = nullptr;
      out += rec.dump() + "\n";
      continue;
    }
    for (const QAPair& p : pairs) {
      auto rec = base();
      rec["qa_id"] = p.id;
      rec["question"] = p.question;
      rec["answer"] = p.answer;
      rec["explicitness"] = to_string(p.explicitness);
      rec["narrative"] = to_string(p.narrative);
      out += rec.dump() + "\n";
    }
  }
  return out;
}

inline Corpus load_canonical_corpus(const std::filesystem::path& path) {
  JsonlDocument doc = read_jsonl(path);
  if (doc.records.empty()) fail(ErrorKind::kValidation, "empty corpus");
  return Corpus::from_draft(parse_canonical_records(doc.records),
                            LabelMatching::kStrict);
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

struct CorpusStats {
  std::size_t total_pairs = 0;
  std::map<Split, std::size_t> pairs_per_split;
  double explicit_fraction = 0.0;
  std::map<NarrativeElement, std::size_t> pairs_per_narrative;
  double mean_sections_per_story = 0.0;
  double mean_questions_per_section = 0.0;
};

inline CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats st;
  for (Split s : kAllSplits) st.pairs_per_split[s] = 0;
  for (NarrativeElement n : kAllNarrativeElements) st.pairs_per_narrative[n] = 0;

  std::size_t n_explicit = 0;
  for (const QAPair& p : corpus.qa_pairs()) {
    ++st.pairs_per_split[p.split];
    ++st.pairs_per_narrative[p.narrative];
    if (p.explicitness == Explicitness::kExplicit) ++n_explicit;
  }
  st.total_pairs = corpus.qa_pairs().size();
  if (st.total_pairs > 0) {
    st.explicit_fraction =
        static_cast<double>(n_explicit) / static_cast<double>(st.total_pairs);
  }
  if (!corpus.stories().empty()) {
    st.mean_sections_per_story = static_cast<double>(corpus.sections().size()) /
                                 static_cast<double>(corpus.stories().size());
  }
  if (!corpus.sections().empty()) {
    st.mean_questions_per_section = static_cast<double>(st.total_pairs) /
                                    static_cast<double>(corpus.sections().size());
  }
  return st;
}

inline nlohmann::ordered_json stats_to_json(const CorpusStats& st) {
  nlohmann::ordered_json j;
  j["total_pairs"] = st.total_pairs;
  for (const auto& [split, n] : st.pairs_per_split) {
    j["pairs_per_split"][std::string(to_string(split))] = n;
  }
  j["explicit_fraction"] = st.explicit_fraction;
  for (const auto& [nar, n] : st.pairs_per_narrative) {
    j["pairs_per_narrative"][std::string(to_string(nar))] = n;
  }
  j["mean_sections_per_story"] = st.mean_sections_per_story;
  j["mean_questions_per_section"] = st.mean_questions_per_section;
  return j;
}

// Published FairytaleQA split sizes (train/val/test).
inline constexpr std::array<std::size_t, 3> kFairytaleqaSplitSizes = {8548, 1025,
                                                                      1007};

// Differences from the published split sizes. Within `tolerance` records a
// difference is a revision-drift warning; beyond it, it is reported as a
// mismatch. Callers decide whether either is fatal.
struct SplitCountCheck {
  std::vector<std::string> warnings;
  std::vector<std::string> mismatches;
};

inline SplitCountCheck check_fairytaleqa_split_sizes(const CorpusStats& st,
                                                     std::size_t tolerance = 5) {
  SplitCountCheck out;
  for (std::size_t i = 0; i < kAllSplits.size(); ++i) {
    const Split s = kAllSplits[i];
    const std::size_t expected = kFairytaleqaSplitSizes[i];
    const std::size_t got = st.pairs_per_split.at(s);
    const std::size_t diff = got > expected ? got - expected : expected - got;
    if (diff == 0) continue;
    std::string msg = std::string(to_string(s)) + " split has " +
                      std::to_string(got) + " pairs, expected " +
                      std::to_string(expected);
    (diff <= tolerance ? out.warnings : out.mismatches).push_back(std::move(msg));
  }
  return out;
}

}  // namespace qgc
