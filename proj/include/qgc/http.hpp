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

// JSON-over-HTTP client plumbing shared by the generation backend and the
// external scorer: endpoint parsing, bearer tokens, retry with exponential
// backoff on transient failures.

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "qgc/error.hpp"

namespace qgc {

struct HttpEndpoint {
  std::string scheme_host_port;  // "http://host:port"
  std::string base_path;         // "" or "/prefix"

  std::string url(std::string_view route) const {
    return scheme_host_port + base_path + std::string(route);
  }
};

inline HttpEndpoint parse_endpoint(std::string_view address) {
  std::string s(address);
  while (!s.empty() && s.back() == '/') s.pop_back();
  if (s.empty()) fail(ErrorKind::kValidation, "empty service address");
  if (s.find("://") == std::string::npos) s = "http://" + s;
  if (!s.starts_with("http://")) {
    fail(ErrorKind::kValidation,
         "unsupported service address \"" + std::string(address) + "\" (http only)");
  }
  const std::size_t path_at = s.find('/', std::string_view("http://").size());
  HttpEndpoint ep;
  ep.scheme_host_port = s.substr(0, path_at);
  if (path_at != std::string::npos) ep.base_path = s.substr(path_at);
  return ep;
}

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{200};
  double multiplier = 2.0;
};

struct HttpOptions {
  RetryPolicy retry;
  std::chrono::seconds timeout{600};
  std::optional<std::string> bearer_token;
};

namespace detail {

inline bool is_transient_status(int status) {
  return status == 429 || status == 502 || status == 503 || status == 504;
}

inline std::string server_message(const std::string& body) {
  try {
    auto j = nlohmann::json::parse(body);
    if (j.is_object() && j.contains("error")) {
      return j["error"].is_string() ? j["error"].get<std::string>() : j["error"].dump();
    }
  } catch (const nlohmann::json::exception&) {
  }
  return body;
}

}  // namespace detail

class JsonHttpClient {
 public:
  JsonHttpClient(std::string address, HttpOptions options = {})
      : address_(std::move(address)),
        endpoint_(parse_endpoint(address_)),
        options_(std::move(options)) {}

  const std::string& address() const { return address_; }

  nlohmann::json get(std::string_view route) const {
    return send(route, nullptr);
  }

  nlohmann::json post(std::string_view route, const nlohmann::json& body) const {
    return send(route, &body);
  }

 private:
  nlohmann::json send(std::string_view route, const nlohmann::json* body) const {
    const std::string path = endpoint_.base_path + std::string(route);
    const std::string payload = body ? body->dump() : std::string();
    auto backoff = options_.retry.initial_backoff;
    std::string last_error;

    for (int attempt = 0; attempt <= options_.retry.max_retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(backoff);
        backoff = std::chrono::milliseconds(static_cast<long long>(
            static_cast<double>(backoff.count()) * options_.retry.multiplier));
      }
      httplib::Client client(endpoint_.scheme_host_port);
      client.set_connection_timeout(std::chrono::seconds(10));
      client.set_read_timeout(options_.timeout);
      client.set_write_timeout(options_.timeout);
      httplib::Headers headers;
      if (options_.bearer_token) {
        headers.emplace("Authorization", "Bearer " + *options_.bearer_token);
      }
      auto res = body ? client.Post(path, headers, payload, "application/json")
                      : client.Get(path, headers);
      if (!res) {
        last_error = httplib::to_string(res.error());
        continue;
      }
      if (res->status >= 200 && res->status < 300) {
        try {
          return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::parse_error&) {
          fail(ErrorKind::kBackend,
               endpoint_.url(route) + " returned a non-JSON response");
        }
      }
      const std::string msg = detail::server_message(res->body);
      if (detail::is_transient_status(res->status)) {
        last_error = "status " + std::to_string(res->status) + ": " + msg;
        continue;
      }
      fail(ErrorKind::kBackend, endpoint_.url(route) + " rejected the request (status " +
                                    std::to_string(res->status) + "): " + msg);
    }
    fail(ErrorKind::kBackend, "service at " + address_ + " failed after " +
                                  std::to_string(options_.retry.max_retries + 1) +
                                  " attempts: " + last_error);
  }

  std::string address_;
  HttpEndpoint endpoint_;
  HttpOptions options_;
};

}  // namespace qgc
