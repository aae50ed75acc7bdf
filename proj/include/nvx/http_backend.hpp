// Copyright 2026 The nvextract Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Generic chat-completions client.
//
// Request body: {"model", "messages": [{"role", "content"}], "temperature",
// <max_tokens_field>, optional penalties} with `extra_fields` merged on top.
// Reply text and usage counters are read through JSON pointers, so providers
// with a different reply shape are adapted in configuration.
//
// Header values may contain ${API_KEY}, replaced by the value of the
// environment variable named in `api_key_env`.

#ifndef NVX_HTTP_BACKEND_HPP_
#define NVX_HTTP_BACKEND_HPP_

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <map>
#include <mutex>
#include <semaphore>
#include <string>
#include <thread>
#include <utility>

#include "nvx/backend.hpp"

namespace nvx {

struct HttpBackendConfig {
  std::string base_url = "https://api.openai.com";
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string api_key_env = "OPENAI_API_KEY";
  std::map<std::string, std::string> headers = {{"Authorization", "Bearer ${API_KEY}"}};
  std::string max_tokens_field = "max_tokens";
  std::string text_pointer = "/choices/0/message/content";
  std::string input_tokens_pointer = "/usage/prompt_tokens";
  std::string output_tokens_pointer = "/usage/completion_tokens";
  nlohmann::json extra_fields = nlohmann::json::object();
  double requests_per_second = 1.0;
  double timeout_seconds = 120.0;
  int max_in_flight = 4;
};

namespace detail {

inline std::string expand_key(std::string value, const std::string& key) {
  static constexpr std::string_view kVar = "${API_KEY}";
  for (auto at = value.find(kVar); at != std::string::npos; at = value.find(kVar, at + key.size())) {
    value.replace(at, kVar.size(), key);
  }
  return value;
}

inline uint64_t read_count(const nlohmann::json& body, const std::string& pointer) {
  if (pointer.empty()) return 0;
  const nlohmann::json::json_pointer ptr(pointer);
  if (!body.contains(ptr) || !body.at(ptr).is_number()) return 0;
  const auto v = body.at(ptr).get<double>();
  return v > 0 ? static_cast<uint64_t>(v) : 0;
}

}  // namespace detail

class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig cfg, std::string id = "http")
      : cfg_(std::move(cfg)), id_(std::move(id)), slots_(std::max(cfg_.max_in_flight, 1)) {
    if (cfg_.max_in_flight < 1 || cfg_.max_in_flight > kMaxInFlight) {
      throw ConfigError("max_in_flight must be in [1, 256]");
    }
    if (cfg_.requests_per_second < 0 || cfg_.timeout_seconds <= 0) {
      throw ConfigError("rate limit and timeout must be positive");
    }
  }

  std::string id() const override { return id_; }

  nlohmann::json request_body(const Conversation& conv, const GenConfig& gen) const {
    nlohmann::json body;
    body["model"] = cfg_.model;
    auto& messages = body["messages"] = nlohmann::json::array();
    for (const auto& t : conv.turns) {
      messages.push_back({{"role", role_name(t.role)}, {"content", t.text}});
    }
    body["temperature"] = gen.temperature;
    body[cfg_.max_tokens_field] = gen.max_tokens;
    if (gen.frequency_penalty) body["frequency_penalty"] = *gen.frequency_penalty;
    if (gen.presence_penalty) body["presence_penalty"] = *gen.presence_penalty;
    if (cfg_.extra_fields.is_object()) body.merge_patch(cfg_.extra_fields);
    return body;
  }

  BackendResponse complete(const Conversation& conv, const GenConfig& gen) override {
    const std::string payload = request_body(conv, gen).dump();
    slots_.acquire();
    struct Release {
      std::counting_semaphore<kMaxInFlight>& s;
      ~Release() { s.release(); }
    } release{slots_};
    pace();

    httplib::Client client(cfg_.base_url);
    const auto timeout = std::chrono::duration<double>(cfg_.timeout_seconds);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));

    const char* key_env = cfg_.api_key_env.empty() ? nullptr : std::getenv(cfg_.api_key_env.c_str());
    const std::string key = key_env ? key_env : "";
    httplib::Headers headers;
    for (const auto& [name, value] : cfg_.headers) {
      if (value.find("${API_KEY}") != std::string::npos && key.empty()) continue;
      headers.emplace(name, detail::expand_key(value, key));
    }

    auto res = client.Post(cfg_.path, headers, payload, "application/json");
    if (!res) return BackendResponse::http_error(0);
    if (res->status < 200 || res->status >= 300) return BackendResponse::http_error(res->status);

    const auto body = nlohmann::json::parse(res->body, nullptr, false);
    if (body.is_discarded()) return BackendResponse::http_error(res->status);
    Usage usage{detail::read_count(body, cfg_.input_tokens_pointer),
                detail::read_count(body, cfg_.output_tokens_pointer)};
    const nlohmann::json::json_pointer text_ptr(cfg_.text_pointer);
    if (!body.contains(text_ptr) || !body.at(text_ptr).is_string()) {
      return BackendResponse::empty(usage);
    }
    auto text = body.at(text_ptr).get<std::string>();
    if (text.empty()) return BackendResponse::empty(usage);
    return BackendResponse::ok(std::move(text), usage);
  }

 private:
  static constexpr std::ptrdiff_t kMaxInFlight = 256;

  // Spaces request starts at least 1/rps apart.
  void pace() {
    if (cfg_.requests_per_second <= 0) return;
    using Clock = std::chrono::steady_clock;
    const auto gap = std::chrono::duration_cast<Clock::duration>(
        std::chrono::duration<double>(1.0 / cfg_.requests_per_second));
    Clock::time_point slot;
    {
      std::lock_guard lock(pace_mu_);
      const auto now = Clock::now();
      slot = std::max(now, next_slot_);
      next_slot_ = slot + gap;
    }
    std::this_thread::sleep_until(slot);
  }

  HttpBackendConfig cfg_;
  std::string id_;
  std::counting_semaphore<kMaxInFlight> slots_;
  std::mutex pace_mu_;
  std::chrono::steady_clock::time_point next_slot_{};
};

}  // namespace nvx

#endif  // NVX_HTTP_BACKEND_HPP_
