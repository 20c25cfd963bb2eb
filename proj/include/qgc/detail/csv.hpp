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

// Minimal RFC 4180 reader: comma separated, double-quote quoting with ""
// escapes, quoted fields may span lines, CRLF or LF record ends.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qgc/error.hpp"

namespace qgc::detail {

using CsvRow = std::vector<std::string>;

inline std::vector<CsvRow> parse_csv(std::string_view text,
                                     const std::string& origin) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  // Strip a UTF-8 byte order mark.
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        // A quote after unquoted content is kept literally.
        if (field_started) {
          field.push_back('"');
        } else {
          in_quotes = true;
          field_started = true;
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_row();
        ++line;
        break;
      case '\n':
        end_row();
        ++line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) {
    fail(ErrorKind::kValidation, origin + ": unterminated quoted field");
  }
  if (field_started || !row.empty()) end_row();
  return rows;
}

// Header-indexed view over parsed rows.
class CsvTable {
 public:
  CsvTable(std::vector<CsvRow> rows, std::string origin)
      : origin_(std::move(origin)) {
    if (rows.empty()) fail(ErrorKind::kValidation, origin_ + ": missing header");
    for (std::size_t i = 0; i < rows[0].size(); ++i) columns_.emplace(rows[0][i], i);
    rows.erase(rows.begin());
    rows_ = std::move(rows);
  }

  std::size_t size() const { return rows_.size(); }
  const std::string& origin() const { return origin_; }

  std::optional<std::size_t> column(std::string_view name) const {
    auto it = columns_.find(std::string(name));
    if (it == columns_.end()) return std::nullopt;
    return it->second;
  }

  // First of `names` that exists as a column.
  std::optional<std::size_t> column_any(
      std::initializer_list<std::string_view> names) const {
    for (auto n : names) {
      if (auto c = column(n)) return c;
    }
    return std::nullopt;
  }

  std::size_t require_column(std::initializer_list<std::string_view> names) const {
    if (auto c = column_any(names)) return *c;
    fail(ErrorKind::kValidation,
         origin_ + ": missing column " + std::string(*names.begin()));
  }

  // Missing trailing cells read as empty.
  std::string_view cell(std::size_t row, std::size_t col) const {
    const auto& r = rows_[row];
    return col < r.size() ? std::string_view(r[col]) : std::string_view();
  }

 private:
  std::string origin_;
  std::map<std::string, std::size_t> columns_;
  std::vector<CsvRow> rows_;
};

}  // namespace qgc::detail
