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

// File plumbing shared by the pipeline stages: whole-file reads, JSONL
// documents with an optional leading meta record, SHA-256 digests, and
// artifact files that only appear under their final name once complete.

#include <openssl/evp.h>

#include <array>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qgc/error.hpp"

namespace qgc {

using json = nlohmann::json;

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kValidation, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(),
                 nullptr) != 1) {
    fail(ErrorKind::kValidation, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xf]);
  }
  return out;
}

// Accumulates named fields into a single digest. Field boundaries are
// length-prefixed so ("ab", "c") and ("a", "bc") differ.
class DigestBuilder {
 public:
  DigestBuilder& add(std::string_view name, std::string_view value) {
    buffer_ += std::to_string(name.size()) + ':' + std::string(name) + '=';
    buffer_ += std::to_string(value.size()) + ':' + std::string(value) + ';';
    return *this;
  }

  std::string hex() const { return sha256_hex(buffer_); }

 private:
  std::string buffer_;
};

// One JSONL file. A first line of the form {"meta": {...}} is lifted into
// `meta`; every other non-blank line is a record.
struct JsonlDocument {
  std::optional<json> meta;
  std::vector<json> records;
};

inline JsonlDocument parse_jsonl(std::string_view text,
                                 const std::string& origin) {
  JsonlDocument doc;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool first = true;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    json value;
    try {
      value = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(ErrorKind::kValidation, origin + ":" + std::to_string(line_no) +
                                       ": invalid JSON: " + e.what());
    }
    if (!value.is_object()) {
      fail(ErrorKind::kValidation, origin + ":" + std::to_string(line_no) +
                                       ": expected a JSON object");
    }
    if (first && value.size() == 1 && value.contains("meta")) {
      doc.meta = std::move(value["meta"]);
    } else {
      doc.records.push_back(std::move(value));
    }
    first = false;
    if (end == text.size()) break;
  }
  return doc;
}

inline JsonlDocument read_jsonl(const std::filesystem::path& path) {
  return parse_jsonl(read_file(path), path.string());
}

inline std::string meta_line(const json& meta) {
  return json{{"meta", meta}}.dump();
}

// Writes to "<path>.partial" and renames onto `path` on commit(). An
// uncommitted writer leaves the .partial file behind for inspection.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path path)
      : path_(std::move(path)), partial_(partial_path(path_)) {
    if (path_.has_parent_path()) {
      std::filesystem::create_directories(path_.parent_path());
    }
    out_.open(partial_, std::ios::binary | std::ios::trunc);
    if (!out_) fail(ErrorKind::kValidation, "cannot write " + partial_.string());
  }

  ArtifactWriter(const ArtifactWriter&) = delete;
  ArtifactWriter& operator=(const ArtifactWriter&) = delete;

  static std::filesystem::path partial_path(const std::filesystem::path& p) {
    return std::filesystem::path(p.string() + ".partial");
  }

  void write(std::string_view data) {
    out_.write(data.data(), static_cast<std::streamsize>(data.size()));
  }

  void write_line(std::string_view line) {
    write(line);
    write("\n");
  }

  void commit() {
    out_.flush();
    if (!out_) fail(ErrorKind::kValidation, "write failed: " + partial_.string());
    out_.close();
    std::filesystem::rename(partial_, path_);
    committed_ = true;
  }

  bool committed() const { return committed_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::filesystem::path partial_;
  std::ofstream out_;
  bool committed_ = false;
};

inline void write_file_atomic(const std::filesystem::path& path,
                              std::string_view content) {
  ArtifactWriter writer(path);
  writer.write(content);
  writer.commit();
}

}  // namespace qgc
