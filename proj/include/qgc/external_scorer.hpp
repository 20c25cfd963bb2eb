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

// Client for a learned-metric scoring service:
//
//   POST /v1/score {"pairs": [{"hypothesis": "...", "reference": "..."}]}
//   -> {"scores": [number, ...]}
//
// 400 means a malformed body, 503 a temporarily unavailable scorer (retried).

#include <algorithm>
#include <future>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qgc/error.hpp"
#include "qgc/http.hpp"
#include "qgc/metrics.hpp"

namespace qgc {

struct ScoringPair {
  std::string hypothesis;
  std::string reference;
};

struct ScorerOptions {
  HttpOptions http;
  std::size_t batch_size = 64;
  std::size_t max_in_flight = 2;
};

inline std::vector<Score> external_score(std::span<const ScoringPair> pairs,
                                         const std::string& endpoint,
                                         const ScorerOptions& options = {}) {
  if (pairs.empty()) return {};
  if (options.batch_size == 0 || options.max_in_flight == 0) {
    fail(ErrorKind::kValidation, "batch_size and max_in_flight must be positive");
  }
  const JsonHttpClient client(endpoint, options.http);

  auto score_batch = [&client](std::span<const ScoringPair> batch) {
    nlohmann::json body;
    body["pairs"] = nlohmann::json::array();
    for (const auto& p : batch) {
      body["pairs"].push_back({{"hypothesis", p.hypothesis}, {"reference", p.reference}});
    }
    const nlohmann::json res = client.post("/v1/score", body);
    if (!res.is_object() || !res.contains("scores") || !res["scores"].is_array()) {
      fail(ErrorKind::kBackend, client.address() + ": response lacks a scores array");
    }
    const auto& scores = res["scores"];
    if (scores.size() != batch.size()) {
      fail(ErrorKind::kBackend, client.address() + ": scorer returned " +
                                    std::to_string(scores.size()) + " scores for " +
                                    std::to_string(batch.size()) + " pairs");
    }
    std::vector<Score> out;
    out.reserve(scores.size());
    for (const auto& s : scores) {
      if (!s.is_number()) {
        fail(ErrorKind::kBackend, client.address() + ": non-numeric score " + s.dump());
      }
      out.push_back({std::clamp(s.get<double>(), 0.0, 1.0), Metric::kExternal});
    }
    return out;
  };

  std::vector<std::span<const ScoringPair>> batches;
  for (std::size_t i = 0; i < pairs.size(); i += options.batch_size) {
    batches.push_back(pairs.subspan(i, std::min(options.batch_size, pairs.size() - i)));
  }
  std::vector<Score> out;
  out.reserve(pairs.size());
  for (std::size_t w = 0; w < batches.size(); w += options.max_in_flight) {
    const std::size_t w_end = std::min(batches.size(), w + options.max_in_flight);
    std::vector<std::future<std::vector<Score>>> inflight;
    for (std::size_t b = w; b < w_end; ++b) {
      inflight.push_back(std::async(std::launch::async, score_batch, batches[b]));
    }
    for (auto& f : inflight) {
      auto scores = f.get();
      out.insert(out.end(), scores.begin(), scores.end());
    }
  }
  return out;
}

}  // namespace qgc
