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

// Corpus loading front door, including the adapter for the published
// FairytaleQA directory layout:
//
//   <root>/[split_for_training/]{train,val,test}/<story>-story.csv
//   <root>/[split_for_training/]{train,val,test}/<story>-questions.csv
//
// Story files carry `section,text`. Question files carry at least
// `cor_section, attribute, question, ex-or-im1 (or ex-or-im), answer1 (or
// answer)`; `question_id` is used for ids when present. Multi-section
// references ("3,4") attach the pair to the first listed section.

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qgc/corpus.hpp"
#include "qgc/detail/csv.hpp"

namespace qgc {

enum class CorpusFormat { kCanonicalJsonl, kFairytaleqaSource };

inline CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "canonical-jsonl") return CorpusFormat::kCanonicalJsonl;
  if (name == "fairytaleqa-source") return CorpusFormat::kFairytaleqaSource;
  fail(ErrorKind::kValidation, "unknown corpus format \"" + std::string(name) + "\"");
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\n\r\f\v");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\n\r\f\v");
  return std::string(s.substr(b, e - b + 1));
}

inline std::optional<long long> parse_leading_int(std::string_view s) {
  const std::string t = trim(s);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr == t.data()) return std::nullopt;
  return v;
}

inline std::filesystem::path find_split_root(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  for (const fs::path& root :
       {dir, dir / "split_for_training",
        dir / "FairytaleQA_Dataset" / "split_for_training"}) {
    for (Split s : kAllSplits) {
      if (fs::is_directory(root / std::string(to_string(s)))) return root;
    }
  }
  fail(ErrorKind::kValidation,
       "no train/val/test directories under " + dir.string());
}

inline void read_fairytaleqa_story(const std::filesystem::path& story_csv,
                                   const std::string& story_id, Split split,
                                   CorpusDraft& draft) {
  namespace fs = std::filesystem;
  CsvTable story(parse_csv(read_file(story_csv), story_csv.string()),
                 story_csv.string());
  const std::size_t col_section = story.require_column({"section"});
  const std::size_t col_text = story.require_column({"text"});

  std::string title = story_id;
  std::replace(title.begin(), title.end(), '-', ' ');
  draft.stories.push_back({story_id, title, std::string(to_string(split))});

  std::vector<std::pair<long long, std::string>> sections;
  for (std::size_t r = 0; r < story.size(); ++r) {
    auto num = parse_leading_int(story.cell(r, col_section));
    if (!num) {
      fail(ErrorKind::kValidation, story_csv.string() + ": row " +
                                       std::to_string(r + 2) +
                                       ": field section is not a number");
    }
    sections.emplace_back(*num, trim(story.cell(r, col_text)));
  }
  std::stable_sort(sections.begin(), sections.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < sections.size(); ++i) {
    draft.sections.push_back({story_id + "#" + std::to_string(sections[i].first),
                              story_id, sections[i].second,
                              static_cast<std::int64_t>(i)});
  }

  const fs::path questions_csv =
      story_csv.parent_path() / (story_id + "-questions.csv");
  if (!fs::exists(questions_csv)) return;
  CsvTable qs(parse_csv(read_file(questions_csv), questions_csv.string()),
              questions_csv.string());
  const auto col_id = qs.column("question_id");
  const std::size_t col_sec = qs.require_column({"cor_section", "section"});
  const std::size_t col_attr = qs.require_column({"attribute"});
  const std::size_t col_q = qs.require_column({"question"});
  const std::size_t col_ex = qs.require_column({"ex-or-im1", "ex-or-im"});
  const std::size_t col_a = qs.require_column({"answer1", "answer"});

  for (std::size_t r = 0; r < qs.size(); ++r) {
    std::string local_id =
        col_id ? trim(qs.cell(r, *col_id)) : std::to_string(r + 1);
    if (local_id.empty()) local_id = std::to_string(r + 1);
    const std::string qa_id = story_id + "-" + local_id;
    auto sec = parse_leading_int(qs.cell(r, col_sec));
    if (!sec) {
      fail(ErrorKind::kValidation, "record " + qa_id + ": field cor_section \"" +
                                       std::string(qs.cell(r, col_sec)) +
                                       "\" is not a section number");
    }
    draft.pairs.push_back({qa_id, trim(qs.cell(r, col_q)), trim(qs.cell(r, col_a)),
                           std::string(qs.cell(r, col_ex)),
                           std::string(qs.cell(r, col_attr)),
                           story_id + "#" + std::to_string(*sec), story_id});
  }
}

}  // namespace detail

inline CorpusDraft read_fairytaleqa_draft(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  const fs::path root = detail::find_split_root(dir);
  CorpusDraft draft;
  static constexpr std::string_view kSuffix = "-story.csv";
  for (Split split : kAllSplits) {
    const fs::path split_dir = root / std::string(to_string(split));
    if (!fs::is_directory(split_dir)) continue;
    std::vector<fs::path> story_files;
    for (const auto& entry : fs::directory_iterator(split_dir)) {
      const std::string name = entry.path().filename().string();
      if (name.size() > kSuffix.size() && name.ends_with(kSuffix)) {
        story_files.push_back(entry.path());
      }
    }
    std::sort(story_files.begin(), story_files.end());
    for (const auto& f : story_files) {
      const std::string name = f.filename().string();
      detail::read_fairytaleqa_story(
          f, name.substr(0, name.size() - kSuffix.size()), split, draft);
    }
  }
  return draft;
}

inline Corpus load_fairytaleqa_source(const std::filesystem::path& dir) {
  return Corpus::from_draft(read_fairytaleqa_draft(dir), LabelMatching::kNormalized);
}

inline Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    fail(ErrorKind::kValidation, "corpus path does not exist: " + path.string());
  }
  switch (format) {
    case CorpusFormat::kCanonicalJsonl:
      return load_canonical_corpus(path);
    case CorpusFormat::kFairytaleqaSource:
      return load_fairytaleqa_source(path);
  }
  fail(ErrorKind::kValidation, "unknown corpus format");
}

}  // namespace qgc
