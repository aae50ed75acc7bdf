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


// JSON encodings of configuration and result types. Readers fill absent
// keys with defaults and reject unknown keys.

#ifndef NVX_JSON_IO_HPP_
#define NVX_JSON_IO_HPP_

#include <json.hpp>

#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>

#include "nvx/backend.hpp"
#include "nvx/error.hpp"
#include "nvx/match.hpp"
#include "nvx/orchestrate.hpp"

namespace nvx {

using Json = nlohmann::json;

namespace detail {

inline void expect_keys(const Json& j, std::string_view what,
                        std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) throw ConfigError(std::string(what) + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (auto key : keys) known = known || key == k;
    if (!known) throw ConfigError(std::string(what) + ": unknown key \"" + k + "\"");
  }
}

template <typename T>
void read(const Json& j, const char* key, T& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad value for \"") + key + "\": " + e.what());
  }
}

template <typename T>
void read(const Json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  T v{};
  read(j, key, v);
  out = v;
}

template <typename T>
Json opt(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace detail

inline void to_json(Json& j, const GenConfig& c) {
  j = {{"temperature", c.temperature},
       {"max_tokens", c.max_tokens},
       {"frequency_penalty", detail::opt(c.frequency_penalty)},
       {"presence_penalty", detail::opt(c.presence_penalty)}};
}

inline void from_json(const Json& j, GenConfig& c) {
  detail::expect_keys(j, "gen", {"temperature", "max_tokens", "frequency_penalty", "presence_penalty"});
  detail::read(j, "temperature", c.temperature);
  detail::read(j, "max_tokens", c.max_tokens);
  detail::read(j, "frequency_penalty", c.frequency_penalty);
  detail::read(j, "presence_penalty", c.presence_penalty);
  if (c.temperature < 0) throw ConfigError("gen.temperature must be >= 0");
  if (c.max_tokens < 1) throw ConfigError("gen.max_tokens must be >= 1");
}

inline void to_json(Json& j, const MergeConfig& c) {
  j = {{"tau_gap", c.tau_gap}, {"tau_align", c.tau_align}, {"min_len", c.min_len}};
}

inline void from_json(const Json& j, MergeConfig& c) {
  detail::expect_keys(j, "merge", {"tau_gap", "tau_align", "min_len"});
  detail::read(j, "tau_gap", c.tau_gap);
  detail::read(j, "tau_align", c.tau_align);
  detail::read(j, "min_len", c.min_len);
}

inline void to_json(Json& j, const PipelineConfig& c) { j = {{"pass1", c.pass1}, {"pass2", c.pass2}}; }

inline void from_json(const Json& j, PipelineConfig& c) {
  detail::expect_keys(j, "pipeline", {"pass1", "pass2"});
  detail::read(j, "pass1", c.pass1);
  detail::read(j, "pass2", c.pass2);
}

inline void to_json(Json& j, const RetryPolicy& r) {
  j = {{"max_attempts", r.max_attempts},
       {"base_delay", r.base_delay},
       {"backoff", r.backoff},
       {"responses_per_turn", r.responses_per_turn},
       {"empty_delay", r.empty_delay},
       {"max_consecutive_empty", r.max_consecutive_empty}};
}

inline void from_json(const Json& j, RetryPolicy& r) {
  detail::expect_keys(j, "retry", {"max_attempts", "base_delay", "backoff", "responses_per_turn",
                                   "empty_delay", "max_consecutive_empty"});
  detail::read(j, "max_attempts", r.max_attempts);
  detail::read(j, "base_delay", r.base_delay);
  detail::read(j, "backoff", r.backoff);
  detail::read(j, "responses_per_turn", r.responses_per_turn);
  detail::read(j, "empty_delay", r.empty_delay);
  detail::read(j, "max_consecutive_empty", r.max_consecutive_empty);
  if (r.max_attempts < 1) throw ConfigError("retry.max_attempts must be >= 1");
}

inline void to_json(Json& j, const Phase1Config& c) {
  j = {{"budget", c.budget},
       {"use_bon", c.use_bon},
       {"pool_seed", c.pool_seed},
       {"threshold", c.threshold},
       {"max_tokens", c.max_tokens}};
}

inline void from_json(const Json& j, Phase1Config& c) {
  detail::expect_keys(j, "phase1", {"budget", "use_bon", "pool_seed", "threshold", "max_tokens"});
  detail::read(j, "budget", c.budget);
  detail::read(j, "use_bon", c.use_bon);
  detail::read(j, "pool_seed", c.pool_seed);
  detail::read(j, "threshold", c.threshold);
  detail::read(j, "max_tokens", c.max_tokens);
  if (c.budget < 1) throw ConfigError("phase1.budget must be >= 1");
}

inline void to_json(Json& j, const Phase2Config& c) {
  j = {{"max_turns", c.max_turns},
       {"continue_instruction", c.continue_instruction},
       {"extra_instruction", detail::opt(c.extra_instruction)},
       {"gen", c.gen},
       {"retry", c.retry}};
}

inline void from_json(const Json& j, Phase2Config& c) {
  detail::expect_keys(j, "phase2",
                      {"max_turns", "continue_instruction", "extra_instruction", "gen", "retry"});
  detail::read(j, "max_turns", c.max_turns);
  detail::read(j, "continue_instruction", c.continue_instruction);
  detail::read(j, "extra_instruction", c.extra_instruction);
  detail::read(j, "gen", c.gen);
  detail::read(j, "retry", c.retry);
}

inline void to_json(Json& j, const Usage& u) {
  j = {{"input_tokens", u.input_tokens}, {"output_tokens", u.output_tokens}};
}

inline void from_json(const Json& j, Usage& u) {
  detail::read(j, "input_tokens", u.input_tokens);
  detail::read(j, "output_tokens", u.output_tokens);
}

inline void to_json(Json& j, const ExtractionMetrics& m) {
  j = {{"book_len", m.book_len},
       {"gen_len", m.gen_len},
       {"matched", m.matched},
       {"nv_recall", m.nv_recall},
       {"missing", m.missing},
       {"additional", detail::opt(m.additional)}};
}

inline void from_json(const Json& j, ExtractionMetrics& m) {
  detail::read(j, "book_len", m.book_len);
  detail::read(j, "gen_len", m.gen_len);
  detail::read(j, "matched", m.matched);
  detail::read(j, "nv_recall", m.nv_recall);
  detail::read(j, "missing", m.missing);
  detail::read(j, "additional", m.additional);
}

inline void to_json(Json& j, const MatchBlock& b) {
  Json parts = Json::array();
  for (const auto& p : b.parts) parts.push_back({p.book_start, p.gen_start, p.len});
  j = {{"book_start", b.book_start},
       {"gen_start", b.gen_start},
       {"matched_len", b.matched_len},
       {"book_span", b.book_span},
       {"gen_span", b.gen_span},
       {"parts", parts}};
}

inline void from_json(const Json& j, MatchBlock& b) {
  detail::read(j, "book_start", b.book_start);
  detail::read(j, "gen_start", b.gen_start);
  detail::read(j, "matched_len", b.matched_len);
  detail::read(j, "book_span", b.book_span);
  detail::read(j, "gen_span", b.gen_span);
  b.parts.clear();
  for (const auto& p : j.at("parts")) {
    b.parts.push_back({p.at(0).get<std::size_t>(), p.at(1).get<std::size_t>(),
                       p.at(2).get<std::size_t>()});
  }
}

inline void to_json(Json& j, const BlockSet& bs) {
  j = {{"book_len", bs.book_len}, {"gen_len", bs.gen_len}, {"blocks", bs.blocks}};
}

inline void from_json(const Json& j, BlockSet& bs) {
  detail::read(j, "book_len", bs.book_len);
  detail::read(j, "gen_len", bs.gen_len);
  detail::read(j, "blocks", bs.blocks);
}

inline std::string_view status_name(ResponseStatus s) {
  switch (s) {
    case ResponseStatus::kOk: return "ok";
    case ResponseStatus::kEmpty: return "empty";
    case ResponseStatus::kHttpError: return "http_error";
  }
  return "unknown";
}

inline ResponseStatus parse_status(std::string_view s) {
  if (s == "ok") return ResponseStatus::kOk;
  if (s == "empty") return ResponseStatus::kEmpty;
  if (s == "http_error") return ResponseStatus::kHttpError;
  throw Error("unknown response status: " + std::string(s));
}

inline void to_json(Json& j, const TranscriptEntry& e) {
  j = {{"phase", e.phase},
       {"turn", e.turn},
       {"attempt", e.attempt},
       {"prompt", e.prompt},
       {"status", status_name(e.response.status)},
       {"http_code", e.response.http_code},
       {"text", e.response.text},
       {"usage", e.response.usage},
       {"accepted", e.accepted},
       {"at", e.at}};
}

inline void from_json(const Json& j, TranscriptEntry& e) {
  detail::read(j, "phase", e.phase);
  detail::read(j, "turn", e.turn);
  detail::read(j, "attempt", e.attempt);
  detail::read(j, "prompt", e.prompt);
  e.response.status = parse_status(j.at("status").get<std::string>());
  detail::read(j, "http_code", e.response.http_code);
  detail::read(j, "text", e.response.text);
  detail::read(j, "usage", e.response.usage);
  detail::read(j, "accepted", e.accepted);
  detail::read(j, "at", e.at);
}

}  // namespace nvx

#endif  // NVX_JSON_IO_HPP_
