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


// Application configuration: one JSON file, every field optional. Defaults
// reproduce the reference settings; `nvx config --dump` prints them.

#ifndef NVX_CONFIG_HPP_
#define NVX_CONFIG_HPP_

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "nvx/backend.hpp"
#include "nvx/http_backend.hpp"
#include "nvx/json_io.hpp"
#include "nvx/orchestrate.hpp"
#include "nvx/report.hpp"
#include "nvx/run_store.hpp"

namespace nvx {

struct OracleSettings {
  std::vector<std::string> corpus;  // text files; empty means the book itself
  bool split_chapters = false;      // one corpus document per chapter
  double corruption_rate = 0.0;
  std::optional<std::size_t> refusal_after;
  double refusal_rate = 0.0;
  std::optional<std::string> refuse_instruction;
  bool refuse_at_document_end = false;
  bool emits_stop_phrase = true;
  double empty_response_rate = 0.0;
  uint64_t seed = 0;
};

struct BackendProfile {
  std::string kind = "http";  // "http" or "oracle"
  HttpBackendConfig http;
  OracleSettings oracle;
  Phase2Config phase2;
  std::optional<PriceTable> price;
};

struct SeedSettings {
  std::size_t prefix_words = 50;
  std::size_t target_words = 20;
  std::string instruction = std::string(kDefaultInstruction);
};

struct PerChapterSettings {
  std::size_t max_turns = 50;
  RetryPolicy retry{.max_attempts = 50, .base_delay = 120.0, .backoff = 1.0,
                    .responses_per_turn = 5};
};

struct AppConfig {
  PipelineConfig pipeline;
  SeedSettings seed;
  Phase1Config phase1;
  PerChapterSettings per_chapter;
  std::string chapter_pattern = R"(^\s*chapter\b.*$)";  // case-insensitive, whole line
  std::string runs_dir = "runs";
  std::map<std::string, BackendProfile> profiles;
};

inline AppConfig default_config() {
  AppConfig c;
  auto profile = [](std::string base_url, std::string path, std::string model, std::string key_env,
                    int max_tokens, std::size_t turns) {
    BackendProfile p;
    p.http.base_url = std::move(base_url);
    p.http.path = std::move(path);
    p.http.model = std::move(model);
    p.http.api_key_env = std::move(key_env);
    p.phase2.gen.max_tokens = max_tokens;
    p.phase2.max_turns = turns;
    return p;
  };

  auto claude = profile("https://api.anthropic.com", "/v1/messages", "claude-3-7-sonnet-20250219",
                        "ANTHROPIC_API_KEY", 250, 600);
  claude.http.headers = {{"x-api-key", "${API_KEY}"}, {"anthropic-version", "2023-06-01"}};
  claude.http.text_pointer = "/content/0/text";
  claude.http.input_tokens_pointer = "/usage/input_tokens";
  claude.http.output_tokens_pointer = "/usage/output_tokens";
  c.profiles["claude-3.7-sonnet"] = claude;

  auto gpt = profile("https://api.openai.com", "/v1/chat/completions", "gpt-4.1", "OPENAI_API_KEY",
                     500, 200);
  gpt.price = PriceTable{2.00, 0.50, 8.00};
  c.profiles["gpt-4.1"] = gpt;

  auto gemini = profile("https://generativelanguage.googleapis.com",
                        "/v1beta/openai/chat/completions", "gemini-2.5-pro", "GEMINI_API_KEY", 2000,
                        300);
  gemini.phase2.gen.frequency_penalty = 2.0;
  gemini.phase2.gen.presence_penalty = 0.1;
  gemini.phase2.extra_instruction = "Continue without citation metadata.";
  c.profiles["gemini-2.5-pro"] = gemini;

  c.profiles["grok-3"] =
      profile("https://api.x.ai", "/v1/chat/completions", "grok-3", "XAI_API_KEY", 500, 300);

  BackendProfile oracle;
  oracle.kind = "oracle";
  oracle.phase2.gen.max_tokens = 250;
  oracle.phase2.max_turns = 600;
  c.profiles["oracle"] = oracle;
  return c;
}

inline void to_json(Json& j, const HttpBackendConfig& h) {
  j = {{"base_url", h.base_url},
       {"path", h.path},
       {"model", h.model},
       {"api_key_env", h.api_key_env},
       {"headers", h.headers},
       {"max_tokens_field", h.max_tokens_field},
       {"text_pointer", h.text_pointer},
       {"input_tokens_pointer", h.input_tokens_pointer},
       {"output_tokens_pointer", h.output_tokens_pointer},
       {"extra_fields", h.extra_fields},
       {"requests_per_second", h.requests_per_second},
       {"timeout_seconds", h.timeout_seconds},
       {"max_in_flight", h.max_in_flight}};
}

inline void from_json(const Json& j, HttpBackendConfig& h) {
  detail::expect_keys(j, "http",
                      {"base_url", "path", "model", "api_key_env", "headers", "max_tokens_field",
                       "text_pointer", "input_tokens_pointer", "output_tokens_pointer",
                       "extra_fields", "requests_per_second", "timeout_seconds", "max_in_flight"});
  detail::read(j, "base_url", h.base_url);
  detail::read(j, "path", h.path);
  detail::read(j, "model", h.model);
  detail::read(j, "api_key_env", h.api_key_env);
  detail::read(j, "headers", h.headers);
  detail::read(j, "max_tokens_field", h.max_tokens_field);
  detail::read(j, "text_pointer", h.text_pointer);
  detail::read(j, "input_tokens_pointer", h.input_tokens_pointer);
  detail::read(j, "output_tokens_pointer", h.output_tokens_pointer);
  if (j.contains("extra_fields")) h.extra_fields = j.at("extra_fields");
  detail::read(j, "requests_per_second", h.requests_per_second);
  detail::read(j, "timeout_seconds", h.timeout_seconds);
  detail::read(j, "max_in_flight", h.max_in_flight);
}

inline void to_json(Json& j, const OracleSettings& o) {
  j = {{"corpus", o.corpus},
       {"split_chapters", o.split_chapters},
       {"corruption_rate", o.corruption_rate},
       {"refusal_after", detail::opt(o.refusal_after)},
       {"refusal_rate", o.refusal_rate},
       {"refuse_instruction", detail::opt(o.refuse_instruction)},
       {"refuse_at_document_end", o.refuse_at_document_end},
       {"emits_stop_phrase", o.emits_stop_phrase},
       {"empty_response_rate", o.empty_response_rate},
       {"seed", o.seed}};
}

inline void from_json(const Json& j, OracleSettings& o) {
  detail::expect_keys(j, "oracle",
                      {"corpus", "split_chapters", "corruption_rate", "refusal_after",
                       "refusal_rate", "refuse_instruction", "refuse_at_document_end",
                       "emits_stop_phrase", "empty_response_rate", "seed"});
  detail::read(j, "corpus", o.corpus);
  detail::read(j, "split_chapters", o.split_chapters);
  detail::read(j, "corruption_rate", o.corruption_rate);
  detail::read(j, "refusal_after", o.refusal_after);
  detail::read(j, "refusal_rate", o.refusal_rate);
  detail::read(j, "refuse_instruction", o.refuse_instruction);
  detail::read(j, "refuse_at_document_end", o.refuse_at_document_end);
  detail::read(j, "emits_stop_phrase", o.emits_stop_phrase);
  detail::read(j, "empty_response_rate", o.empty_response_rate);
  detail::read(j, "seed", o.seed);
  for (double r : {o.corruption_rate, o.refusal_rate, o.empty_response_rate}) {
    if (r < 0 || r > 1) throw ConfigError("oracle rates must be in [0, 1]");
  }
}

inline void to_json(Json& j, const PriceTable& p) {
  j = {{"input", p.input}, {"cached_input", p.cached_input}, {"output", p.output}};
}

inline void from_json(const Json& j, PriceTable& p) {
  detail::expect_keys(j, "price", {"input", "cached_input", "output"});
  detail::read(j, "input", p.input);
  detail::read(j, "cached_input", p.cached_input);
  detail::read(j, "output", p.output);
  if (p.input < 0 || p.cached_input < 0 || p.output < 0) {
    throw ConfigError("prices must be non-negative");
  }
}

inline void to_json(Json& j, const BackendProfile& p) {
  j = {{"kind", p.kind}, {"phase2", p.phase2}, {"price", detail::opt(p.price)}};
  if (p.kind == "oracle") {
    j["oracle"] = p.oracle;
  } else {
    j["http"] = p.http;
  }
}

inline void from_json(const Json& j, BackendProfile& p) {
  detail::expect_keys(j, "profile", {"kind", "http", "oracle", "phase2", "price"});
  detail::read(j, "kind", p.kind);
  if (p.kind != "http" && p.kind != "oracle") {
    throw ConfigError("profile kind must be \"http\" or \"oracle\"");
  }
  detail::read(j, "http", p.http);
  detail::read(j, "oracle", p.oracle);
  detail::read(j, "phase2", p.phase2);
  detail::read(j, "price", p.price);
}

inline void to_json(Json& j, const SeedSettings& s) {
  j = {{"prefix_words", s.prefix_words},
       {"target_words", s.target_words},
       {"instruction", s.instruction}};
}

inline void from_json(const Json& j, SeedSettings& s) {
  detail::expect_keys(j, "seed", {"prefix_words", "target_words", "instruction"});
  detail::read(j, "prefix_words", s.prefix_words);
  detail::read(j, "target_words", s.target_words);
  detail::read(j, "instruction", s.instruction);
  if (s.prefix_words < 1 || s.target_words < 1) {
    throw ConfigError("seed prefix and target must each have at least one word");
  }
}

inline void to_json(Json& j, const PerChapterSettings& s) {
  j = {{"max_turns", s.max_turns}, {"retry", s.retry}};
}

inline void from_json(const Json& j, PerChapterSettings& s) {
  detail::expect_keys(j, "per_chapter", {"max_turns", "retry"});
  detail::read(j, "max_turns", s.max_turns);
  detail::read(j, "retry", s.retry);
}

inline void to_json(Json& j, const AppConfig& c) {
  j = {{"pipeline", c.pipeline},
       {"seed", c.seed},
       {"phase1", c.phase1},
       {"per_chapter", c.per_chapter},
       {"chapter_pattern", c.chapter_pattern},
       {"runs_dir", c.runs_dir},
       {"profiles", c.profiles}};
}

/// Fields present in `j` override the defaults; profiles are merged by name,
/// so a file may tweak one field of a built-in profile.
inline AppConfig config_from_json(const Json& j) {
  detail::expect_keys(j, "config", {"pipeline", "seed", "phase1", "per_chapter", "chapter_pattern",
                                    "runs_dir", "profiles"});
  AppConfig c = default_config();
  Json base = c;
  if (j.contains("profiles")) {
    if (!j.at("profiles").is_object()) throw ConfigError("profiles: expected an object");
    for (const auto& [name, value] : j.at("profiles").items()) {
      if (!value.is_object()) throw ConfigError("profile " + name + ": expected an object");
      Json merged = base["profiles"].contains(name) ? base["profiles"][name] : Json::object();
      if (value.contains("kind") && merged.contains("kind") && merged["kind"] != value["kind"]) {
        merged = Json::object();
      }
      merged.merge_patch(value);
      base["profiles"][name] = merged;
    }
  }
  Json rest = j;
  rest.erase("profiles");
  base.merge_patch(rest);

  detail::read(base, "pipeline", c.pipeline);
  detail::read(base, "seed", c.seed);
  detail::read(base, "phase1", c.phase1);
  detail::read(base, "per_chapter", c.per_chapter);
  detail::read(base, "chapter_pattern", c.chapter_pattern);
  detail::read(base, "runs_dir", c.runs_dir);
  c.profiles.clear();
  for (const auto& [name, value] : base.at("profiles").items()) {
    c.profiles[name] = value.get<BackendProfile>();
  }
  try {
    std::regex(c.chapter_pattern, std::regex::icase | std::regex::multiline);
  } catch (const std::regex_error& e) {
    throw ConfigError("chapter_pattern: " + std::string(e.what()));
  }
  return c;
}

inline AppConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  const auto j = Json::parse(read_file(path), nullptr, false, true);
  if (j.is_discarded()) throw ConfigError("malformed JSON in config file: " + path.string());
  try {
    return config_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

/// Splits on whole lines matching the chapter pattern; each chapter keeps its
/// heading line. Text before the first heading is its own chapter when it
/// has any words.
inline std::vector<std::string> split_chapters(const std::string& text, const std::string& pattern) {
  const std::regex heading(pattern, std::regex::icase | std::regex::multiline);
  std::vector<std::string> out;
  std::size_t from = 0;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), heading);
       it != std::sregex_iterator(); ++it) {
    const auto at = static_cast<std::size_t>(it->position(0));
    if (at > from) {
      const auto piece = text.substr(from, at - from);
      if (!tokenize(piece).empty()) out.push_back(piece);
    }
    from = at;
  }
  const auto tail = text.substr(from);
  if (!tokenize(tail).empty()) out.push_back(tail);
  return out;
}

inline OraclePolicy oracle_policy(const OracleSettings& s, const std::vector<std::string>& texts,
                                  const std::string& chapter_pattern) {
  OraclePolicy p;
  for (const auto& t : texts) {
    if (s.split_chapters) {
      for (const auto& ch : split_chapters(t, chapter_pattern)) p.corpus.push_back(normalized_words(ch));
    } else {
      p.corpus.push_back(normalized_words(t));
    }
  }
  p.corruption_rate = s.corruption_rate;
  p.refusal_after = s.refusal_after;
  p.refusal_rate = s.refusal_rate;
  p.refuse_instruction = s.refuse_instruction;
  p.refuse_at_document_end = s.refuse_at_document_end;
  p.emits_stop_phrase = s.emits_stop_phrase;
  p.empty_response_rate = s.empty_response_rate;
  p.seed = s.seed;
  return p;
}

/// Builds the backend for `profile_name`; `book_text` is the oracle corpus
/// when the profile lists no corpus files.
inline std::unique_ptr<Backend> make_backend(const AppConfig& cfg, const std::string& profile_name,
                                             const std::string& book_text) {
  const auto it = cfg.profiles.find(profile_name);
  if (it == cfg.profiles.end()) throw ConfigError("unknown backend profile: " + profile_name);
  const auto& p = it->second;
  if (p.kind == "oracle") {
    std::vector<std::string> texts;
    for (const auto& f : p.oracle.corpus) texts.push_back(read_file(f));
    if (texts.empty()) texts.push_back(book_text);
    return std::make_unique<OracleBackend>(oracle_policy(p.oracle, texts, cfg.chapter_pattern),
                                           profile_name);
  }
  return std::make_unique<HttpBackend>(p.http, profile_name);
}

}  // namespace nvx

#endif  // NVX_CONFIG_HPP_
