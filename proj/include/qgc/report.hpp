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

// Rendering of evaluation reports: aligned text tables (three decimals),
// long-format CSV and JSON (full precision).

#include <algorithm>
#include <charconv>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qgc/error.hpp"
#include "qgc/evaluation.hpp"

namespace qgc {

enum class ReportFormat { kTextTable, kCsv, kJson };

inline ReportFormat parse_report_format(std::string_view s) {
  if (s == "text-table") return ReportFormat::kTextTable;
  if (s == "csv") return ReportFormat::kCsv;
  if (s == "json") return ReportFormat::kJson;
  fail(ErrorKind::kValidation, "unknown report format \"" + std::string(s) + "\"");
}

struct RenderedTable {
  std::string title;
  std::vector<std::string> column_headers;
  std::vector<std::pair<std::string, std::vector<std::string>>> rows;
  std::string metadata_footer;
};

// Fixed three decimals. std::to_chars rounds the exact binary value, so
// exact ties resolve to even.
inline std::string format_fixed3(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 3);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

inline std::string format_shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

namespace detail {

inline void check_reports(std::span<const EvaluationReport> reports) {
  if (reports.empty()) fail(ErrorKind::kValidation, "no reports");
  for (const auto& r : reports) {
    if (r.protocol != reports.front().protocol) {
      fail(ErrorKind::kValidation, "reports mix protocols " +
                                       std::string(to_string(reports.front().protocol)) +
                                       " and " + std::string(to_string(r.protocol)));
    }
  }
}

inline std::string metadata_line(const ReportMetadata& m) {
  std::string s = "normalization=" + profile_to_string(m.profile) +
                  "; smoothing=" + std::string(to_string(m.smoothing)) +
                  "; aggregation=" + std::string(to_string(m.aggregation)) +
                  "; policy=" + std::string(to_string(m.policy)) +
                  "; seed=" + (m.seed ? std::to_string(*m.seed) : std::string("none")) +
                  "; split=" + std::string(to_string(m.source_split));
  if (!m.external_scorer.empty()) s += "; external_scorer=" + m.external_scorer;
  if (!m.input_digest.empty()) s += "; input_digest=" + m.input_digest;
  return s;
}

inline std::string cell(const MetricStats& stats, std::string_view metric) {
  auto it = stats.find(std::string(metric));
  return it == stats.end() ? "-" : format_fixed3(it->second.mean);
}

inline std::string group_cell(const LabelAggregate& groups, std::string_view label,
                              std::string_view metric) {
  auto it = groups.find(std::string(label));
  return it == groups.end() ? "-" : cell(it->second, metric);
}

}  // namespace detail

inline RenderedTable build_table(std::span<const EvaluationReport> reports) {
  detail::check_reports(reports);
  RenderedTable t;
  const Protocol protocol = reports.front().protocol;

  if (protocol == Protocol::kQaControllability) {
    t.title = "QA controllability: round-trip answer agreement (0-1)";
    for (std::string_view metric : {"ROUGE-L F1", "EXACT MATCH"}) {
      for (std::string_view group : {"Overall", "Explicit", "Implicit"}) {
        t.column_headers.push_back(std::string(metric) + " " + std::string(group));
      }
    }
    for (const auto& r : reports) {
      std::vector<std::string> values;
      for (std::string_view metric : {"rouge_l_f1", "exact_match"}) {
        values.push_back(detail::cell(r.overall, metric));
        values.push_back(detail::group_cell(r.by_explicitness, "explicit", metric));
        values.push_back(detail::group_cell(r.by_explicitness, "implicit", metric));
      }
      t.rows.emplace_back(display_name(r.config), std::move(values));
    }
  } else {
    t.title = "QG reference comparison (0-1)";
    const bool external = std::any_of(reports.begin(), reports.end(), [](const auto& r) {
      return r.overall.contains(std::string(to_string(Metric::kExternal)));
    });
    std::vector<std::string_view> metrics = {"rouge_l_f1", "bleu4"};
    t.column_headers = {"ROUGE-L F1", "BLEU-4"};
    if (external) {
      metrics.push_back("external");
      t.column_headers.push_back("BLEURT");
    }
    for (const auto& r : reports) {
      std::vector<std::string> values;
      for (auto metric : metrics) values.push_back(detail::cell(r.overall, metric));
      t.rows.emplace_back(display_name(r.config), std::move(values));
    }
  }

  std::vector<std::string> lines;
  std::set<std::string> distinct;
  for (const auto& r : reports) distinct.insert(detail::metadata_line(r.metadata));
  for (const auto& r : reports) {
    std::string line = detail::metadata_line(r.metadata);
    if (distinct.size() > 1) line = std::string(1, config_letter(r.config)) + ": " + line;
    if (std::find(lines.begin(), lines.end(), line) == lines.end()) lines.push_back(line);
  }
  for (const auto& l : lines) {
    if (!t.metadata_footer.empty()) t.metadata_footer += "\n";
    t.metadata_footer += l;
  }
  return t;
}

inline std::string render_text_table(const RenderedTable& t) {
  std::vector<std::size_t> widths;
  widths.push_back(std::string_view("Model").size());
  for (const auto& row : t.rows) widths[0] = std::max(widths[0], row.first.size());
  for (std::size_t c = 0; c < t.column_headers.size(); ++c) {
    std::size_t w = t.column_headers[c].size();
    for (const auto& row : t.rows) w = std::max(w, row.second[c].size());
    widths.push_back(w);
  }
  auto pad = [](std::string s, std::size_t w, bool right) {
    if (s.size() >= w) return s;
    return right ? std::string(w - s.size(), ' ') + s : s + std::string(w - s.size(), ' ');
  };
  std::string out = t.title + "\n";
  std::string header = pad("Model", widths[0], false);
  for (std::size_t c = 0; c < t.column_headers.size(); ++c) {
    header += "  " + pad(t.column_headers[c], widths[c + 1], true);
  }
  out += header + "\n" + std::string(header.size(), '-') + "\n";
  for (const auto& [label, values] : t.rows) {
    std::string line = pad(label, widths[0], false);
    for (std::size_t c = 0; c < values.size(); ++c) {
      line += "  " + pad(values[c], widths[c + 1], true);
    }
    out += line + "\n";
  }
  out += "\n" + t.metadata_footer + "\n";
  return out;
}

namespace detail {

inline std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

// Long format: one row per (report, group, metric).
inline std::string render_csv(std::span<const EvaluationReport> reports) {
  detail::check_reports(reports);
  std::string out =
      "protocol,config,config_name,group,metric,mean,count,n_examples,n_excluded,"
      "normalization,smoothing,aggregation,policy,seed,source_split\n";
  for (const auto& r : reports) {
    const std::string tail =
        "," + std::to_string(r.n_examples) + "," + std::to_string(r.n_excluded) + "," +
        detail::csv_escape(profile_to_string(r.metadata.profile)) + "," +
        std::string(to_string(r.metadata.smoothing)) + "," +
        std::string(to_string(r.metadata.aggregation)) + "," +
        std::string(to_string(r.metadata.policy)) + "," +
        (r.metadata.seed ? std::to_string(*r.metadata.seed) : std::string()) + "," +
        std::string(to_string(r.metadata.source_split));
    auto emit = [&](const std::string& group, const MetricStats& stats) {
      for (const auto& [metric, s] : stats) {
        out += std::string(to_string(r.protocol)) + "," + config_letter(r.config) + "," +
               std::string(canonical_name(r.config)) + "," + detail::csv_escape(group) +
               "," + metric + "," + format_shortest(s.mean) + "," +
               std::to_string(s.count) + tail + "\n";
      }
    };
    emit("overall", r.overall);
    for (const auto& [label, stats] : r.by_explicitness) emit("explicitness:" + label, stats);
    for (const auto& [label, stats] : r.by_narrative) emit("narrative:" + label, stats);
  }
  return out;
}

inline std::string render_json(std::span<const EvaluationReport> reports) {
  detail::check_reports(reports);
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) arr.push_back(report_to_json(r));
  return arr.dump(2) + "\n";
}

inline std::string render_report(std::span<const EvaluationReport> reports,
                                 ReportFormat format) {
  switch (format) {
    case ReportFormat::kTextTable:
      return render_text_table(build_table(reports));
    case ReportFormat::kCsv:
      return render_csv(reports);
    case ReportFormat::kJson:
      return render_json(reports);
  }
  fail(ErrorKind::kValidation, "unknown report format");
}

// Accepts a single report object or an array of them (the JSON rendering).
inline std::vector<EvaluationReport> parse_reports_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kValidation, std::string("invalid report JSON: ") + e.what());
  }
  std::vector<EvaluationReport> out;
  if (j.is_array()) {
    for (const auto& r : j) out.push_back(report_from_json(r));
  } else {
    out.push_back(report_from_json(j));
  }
  return out;
}

}  // namespace qgc
