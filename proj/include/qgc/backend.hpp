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

// Generation backends. HttpBackend speaks the /v1/generate protocol:
//
//   POST /v1/generate
//     {"inputs": [...], "beam_width": 5, "max_input_tokens": 512,
//      "max_new_tokens": 128}
//   -> {"outputs": [...]}            positional correspondence
//
//   GET /v1/health -> {"status": "ok", "model": "<name>"}
//
// Request ids never go over the wire; they are reattached by position.
// StubBackend is a deterministic lookup table for offline runs.

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <future>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qgc/error.hpp"
#include "qgc/http.hpp"
#include "qgc/io.hpp"

namespace qgc {

struct DecodingParams {
  int beam_width = 5;
  int max_input_tokens = 512;
  int max_new_tokens = 128;

  bool operator==(const DecodingParams&) const = default;
};

struct GenerationRequest {
  std::string id;
  std::string input_text;
  DecodingParams params;
};

struct GenerationResponse {
  std::string id;
  std::string output_text;

  bool operator==(const GenerationResponse&) const = default;
};

// Throws before any backend work if ids repeat, inputs are empty or
// decoding parameters are not positive.
inline void validate_requests(std::span<const GenerationRequest> requests) {
  std::set<std::string_view> ids;
  for (const auto& r : requests) {
    if (!ids.insert(r.id).second) {
      fail(ErrorKind::kValidation, "duplicate request id " + r.id);
    }
    if (r.input_text.empty()) {
      fail(ErrorKind::kValidation, "request " + r.id + " has empty input_text");
    }
    if (r.params.beam_width <= 0 || r.params.max_input_tokens <= 0 ||
        r.params.max_new_tokens <= 0) {
      fail(ErrorKind::kValidation,
           "request " + r.id + " has non-positive decoding parameters");
    }
  }
}

class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;

  // One response per request, in request order, or an exception.
  virtual std::vector<GenerationResponse> generate(
      std::span<const GenerationRequest> requests) = 0;

  // Stable description used in artifact digests.
  virtual std::string identity() const = 0;
};

// ---------------------------------------------------------------------------
// Stub
// ---------------------------------------------------------------------------

struct StubFallback {
  enum class Kind { kError, kFixedString };
  Kind kind = Kind::kError;
  std::string fixed_output;

  static StubFallback error() { return {}; }
  static StubFallback fixed(std::string out) {
    return {Kind::kFixedString, std::move(out)};
  }
};

using StubTable = std::map<std::string, std::string, std::less<>>;

inline std::vector<GenerationResponse> stub_generate(
    std::span<const GenerationRequest> requests, const StubTable& table,
    const StubFallback& fallback) {
  validate_requests(requests);
  std::vector<GenerationResponse> out;
  out.reserve(requests.size());
  for (const auto& r : requests) {
    auto it = table.find(r.input_text);
    if (it != table.end()) {
      out.push_back({r.id, it->second});
    } else if (fallback.kind == StubFallback::Kind::kFixedString) {
      out.push_back({r.id, fallback.fixed_output});
    } else {
      fail(ErrorKind::kBackend, "stub backend has no entry for input \"" +
                                    r.input_text + "\"");
    }
  }
  return out;
}

class StubBackend final : public GenerationBackend {
 public:
  StubBackend(StubTable table, StubFallback fallback = StubFallback::error())
      : table_(std::move(table)), fallback_(std::move(fallback)) {}

  std::vector<GenerationResponse> generate(
      std::span<const GenerationRequest> requests) override {
    return stub_generate(requests, table_, fallback_);
  }

  std::string identity() const override {
    DigestBuilder d;
    for (const auto& [in, out] : table_) d.add(in, out);
    d.add("fallback", fallback_.kind == StubFallback::Kind::kError
                          ? "error"
                          : "fixed:" + fallback_.fixed_output);
    return "stub:" + d.hex();
  }

  const StubTable& table() const { return table_; }

 private:
  StubTable table_;
  StubFallback fallback_;
};

// Records {"input_text": ..., "output_text": ...}; a leading meta line is
// ignored. Conflicting duplicate inputs are rejected.
inline StubTable load_stub_table(const std::filesystem::path& path) {
  StubTable table;
  const JsonlDocument doc = read_jsonl(path);
  for (const auto& rec : doc.records) {
    if (!rec.contains("input_text") || !rec["input_text"].is_string() ||
        !rec.contains("output_text") || !rec["output_text"].is_string()) {
      fail(ErrorKind::kValidation,
           path.string() + ": stub records need string input_text and output_text");
    }
    auto in = rec["input_text"].get<std::string>();
    auto out = rec["output_text"].get<std::string>();
    auto [it, inserted] = table.emplace(in, out);
    if (!inserted && it->second != out) {
      fail(ErrorKind::kValidation,
           path.string() + ": conflicting outputs for input \"" + in + "\"");
    }
  }
  return table;
}

inline std::string serialize_stub_table(const StubTable& table) {
  std::string out;
  for (const auto& [in, o] : table) {
    nlohmann::ordered_json rec;
    rec["input_text"] = in;
    rec["output_text"] = o;
    out += rec.dump() + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// HTTP
// ---------------------------------------------------------------------------

struct ClientOptions {
  HttpOptions http;
  std::size_t batch_size = 16;
  std::size_t max_in_flight = 2;
};

struct HealthStatus {
  std::string status;
  std::string model;
};

inline HealthStatus check_health(const std::string& address,
                                 const HttpOptions& options = {}) {
  const nlohmann::json j = JsonHttpClient(address, options).get("/v1/health");
  if (!j.is_object() || !j.contains("status")) {
    fail(ErrorKind::kBackend, address + ": malformed health response");
  }
  return {j.value("status", ""), j.value("model", "")};
}

class HttpBackend final : public GenerationBackend {
 public:
  explicit HttpBackend(std::string address, ClientOptions options = {})
      : client_(std::move(address), options.http), options_(options) {
    if (options_.batch_size == 0 || options_.max_in_flight == 0) {
      fail(ErrorKind::kValidation, "batch_size and max_in_flight must be positive");
    }
  }

  std::vector<GenerationResponse> generate(
      std::span<const GenerationRequest> requests) override {
    validate_requests(requests);

    // Consecutive requests sharing decoding params, at most batch_size each.
    std::vector<std::span<const GenerationRequest>> batches;
    std::size_t start = 0;
    while (start < requests.size()) {
      std::size_t end = start + 1;
      while (end < requests.size() && end - start < options_.batch_size &&
             requests[end].params == requests[start].params) {
        ++end;
      }
      batches.push_back(requests.subspan(start, end - start));
      start = end;
    }

    std::vector<GenerationResponse> out;
    out.reserve(requests.size());
    for (std::size_t w = 0; w < batches.size(); w += options_.max_in_flight) {
      const std::size_t w_end = std::min(batches.size(), w + options_.max_in_flight);
      std::vector<std::future<std::vector<std::string>>> inflight;
      for (std::size_t b = w; b < w_end; ++b) {
        inflight.push_back(std::async(std::launch::async,
                                      [this, batch = batches[b]] { return send(batch); }));
      }
      // get() in launch order keeps request order; a throw discards the batch.
      for (std::size_t b = w; b < w_end; ++b) {
        std::vector<std::string> outputs = inflight[b - w].get();
        for (std::size_t i = 0; i < outputs.size(); ++i) {
          out.push_back({batches[b][i].id, std::move(outputs[i])});
        }
      }
    }
    return out;
  }

  std::string identity() const override { return "http:" + client_.address(); }

 private:
  std::vector<std::string> send(std::span<const GenerationRequest> batch) const {
    nlohmann::json body;
    body["inputs"] = nlohmann::json::array();
    for (const auto& r : batch) body["inputs"].push_back(r.input_text);
    body["beam_width"] = batch.front().params.beam_width;
    body["max_input_tokens"] = batch.front().params.max_input_tokens;
    body["max_new_tokens"] = batch.front().params.max_new_tokens;

    const nlohmann::json res = client_.post("/v1/generate", body);
    if (!res.is_object() || !res.contains("outputs") || !res["outputs"].is_array()) {
      fail(ErrorKind::kBackend, client_.address() + ": response lacks an outputs array");
    }
    const auto& outputs = res["outputs"];
    if (outputs.size() != batch.size()) {
      fail(ErrorKind::kBackend,
           client_.address() + ": response/request id mismatch (" +
               std::to_string(outputs.size()) + " outputs for " +
               std::to_string(batch.size()) + " inputs)");
    }
    std::vector<std::string> texts;
    texts.reserve(outputs.size());
    for (const auto& o : outputs) {
      if (!o.is_string()) fail(ErrorKind::kBackend, client_.address() + ": non-string output");
      texts.push_back(o.get<std::string>());
    }
    return texts;
  }

  JsonHttpClient client_;
  ClientOptions options_;
};

// Convenience entry points.
inline std::vector<GenerationResponse> generate(
    std::span<const GenerationRequest> requests, const std::string& endpoint,
    const ClientOptions& options = {}) {
  validate_requests(requests);
  if (requests.empty()) return {};
  return HttpBackend(endpoint, options).generate(requests);
}

}  // namespace qgc
