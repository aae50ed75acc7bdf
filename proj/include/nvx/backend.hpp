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


// Chat-completion abstraction and the memorizing oracle.
//
// The oracle replays a planted corpus. A conversation is anchored by the
// longest suffix of its first user message that occurs in a corpus document;
// the reply continues from the anchor plus the words already emitted by prior
// (non-refusal) assistant turns. One token is one word.
//
// Corruption of the word at (document, position) depends only on
// (seed, document, position), so every conversation that emits that word
// sees the same substitution. Refusal and empty-response draws are keyed by a
// fingerprint of the conversation and the number of times that exact
// conversation has been seen, so a retried request gets a fresh draw.

#ifndef NVX_BACKEND_HPP_
#define NVX_BACKEND_HPP_

#include <cstdint>
#include <cstdio>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nvx/error.hpp"
#include "nvx/normalize.hpp"
#include "nvx/rng.hpp"

namespace nvx {

struct GenConfig {
  double temperature = 0.0;
  int max_tokens = 1000;
  std::optional<double> frequency_penalty;
  std::optional<double> presence_penalty;
};

enum class Role { kUser, kAssistant };

inline std::string_view role_name(Role r) { return r == Role::kUser ? "user" : "assistant"; }

struct Turn {
  Role role = Role::kUser;
  std::string text;
};

struct Conversation {
  std::vector<Turn> turns;

  Conversation& user(std::string text) {
    turns.push_back({Role::kUser, std::move(text)});
    return *this;
  }
  Conversation& assistant(std::string text) {
    turns.push_back({Role::kAssistant, std::move(text)});
    return *this;
  }

  bool empty() const noexcept { return turns.empty(); }

  // Roles alternate starting with user, and the last turn is a user turn.
  bool ready() const noexcept {
    if (turns.empty() || turns.back().role != Role::kUser) return false;
    for (std::size_t k = 0; k < turns.size(); ++k) {
      if (turns[k].role != (k % 2 == 0 ? Role::kUser : Role::kAssistant)) return false;
    }
    return true;
  }
};

struct Usage {
  uint64_t input_tokens = 0;
  uint64_t output_tokens = 0;

  Usage& operator+=(const Usage& o) {
    input_tokens += o.input_tokens;
    output_tokens += o.output_tokens;
    return *this;
  }
  friend bool operator==(const Usage&, const Usage&) = default;
};

enum class ResponseStatus { kOk, kEmpty, kHttpError };

struct BackendResponse {
  std::string text;
  Usage usage;
  ResponseStatus status = ResponseStatus::kOk;
  int http_code = 0;  // set with kHttpError; 0 means the transport failed

  static BackendResponse ok(std::string text, Usage usage) {
    return {std::move(text), usage, ResponseStatus::kOk, 0};
  }
  static BackendResponse empty(Usage usage) { return {{}, usage, ResponseStatus::kEmpty, 0}; }
  static BackendResponse http_error(int code) { return {{}, {}, ResponseStatus::kHttpError, code}; }
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual BackendResponse complete(const Conversation& conv, const GenConfig& cfg) = 0;
  virtual std::string id() const = 0;
};

inline constexpr std::string_view kOracleRefusal =
    "I'm sorry, but I can't continue reproducing this copyrighted text.";

struct OraclePolicy {
  std::vector<WordSequence> corpus;
  double corruption_rate = 0.0;
  std::optional<std::size_t> refusal_after;  // prior assistant turns
  double refusal_rate = 0.0;
  std::optional<std::string> refuse_instruction;  // refuse prompts containing this verbatim
  bool refuse_at_document_end = false;
  bool emits_stop_phrase = true;
  double empty_response_rate = 0.0;
  std::size_t min_anchor_words = 5;
  uint64_t seed = 0;
};

namespace detail {

inline uint64_t fnv1a(uint64_t h, std::string_view s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline uint64_t fingerprint(const Conversation& conv) {
  uint64_t h = 0xCBF29CE484222325ULL;
  for (const auto& t : conv.turns) {
    h = fnv1a(h, role_name(t.role));
    h = fnv1a(h, std::string_view("\x1f", 1));
    h = fnv1a(h, t.text);
    h = fnv1a(h, std::string_view("\x1e", 1));
  }
  return h;
}

struct Anchor {
  std::size_t doc = 0;
  std::size_t pos = 0;  // continuation starts here
  std::size_t len = 0;  // words of the prompt suffix matched
};

inline std::optional<Anchor> find_anchor(const std::vector<WordSequence>& corpus,
                                         const WordSequence& prompt, std::size_t min_len) {
  if (prompt.empty()) return std::nullopt;
  Anchor best;
  const std::size_t last = prompt.size() - 1;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const auto& doc = corpus[d].words;
    for (std::size_t e = 1; e <= doc.size(); ++e) {
      std::size_t len = 0;
      while (len < e && len <= last && doc[e - 1 - len] == prompt.words[last - len]) ++len;
      if (len > best.len) best = {d, e, len};
    }
  }
  if (best.len == 0 || best.len < std::min(min_len, prompt.size())) return std::nullopt;
  return best;
}

}  // namespace detail

/// Nonce substituted for a corrupted word; never a word of a normalized text
/// made of letters.
inline std::string oracle_nonce(uint64_t seed, std::size_t doc, std::size_t pos) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "#%016llx",
                static_cast<unsigned long long>(mix64(mix64(seed, doc), pos ^ 0xA5A5ULL)));
  return buf;
}

inline bool oracle_corrupts(const OraclePolicy& policy, std::size_t doc, std::size_t pos) {
  if (policy.corruption_rate <= 0.0) return false;
  Rng rng(mix64(mix64(policy.seed, doc), pos));
  return rng.chance(policy.corruption_rate);
}

class OracleBackend : public Backend {
 public:
  explicit OracleBackend(OraclePolicy policy, std::string id = "oracle")
      : policy_(std::move(policy)), id_(std::move(id)) {
    if (policy_.corpus.empty()) throw NoCorpusError();
  }

  std::string id() const override { return id_; }
  const OraclePolicy& policy() const noexcept { return policy_; }

  BackendResponse complete(const Conversation& conv, const GenConfig& cfg) override {
    if (!conv.ready()) throw Error("conversation must alternate roles and end with a user turn");
    Usage usage;
    std::size_t assistant_turns = 0;
    std::size_t emitted = 0;
    for (const auto& t : conv.turns) {
      const auto words = tokenize(t.text).size();
      usage.input_tokens += words;
      if (t.role == Role::kAssistant) {
        ++assistant_turns;
        if (t.text != kOracleRefusal) emitted += words;
      }
    }

    const uint64_t print = detail::fingerprint(conv);
    uint64_t attempt = 0;
    std::optional<detail::Anchor> anchor;
    {
      std::lock_guard lock(mu_);
      attempt = seen_[print]++;
      const auto& first = conv.turns.front().text;
      auto it = anchors_.find(first);
      if (it == anchors_.end()) {
        it = anchors_.emplace(first, detail::find_anchor(policy_.corpus, normalized_words(first),
                                                         policy_.min_anchor_words))
                 .first;
      }
      anchor = it->second;
    }
    Rng draw(mix64(mix64(policy_.seed ^ 0x5EEDULL, print), attempt));
    const double refusal_draw = draw.uniform();
    const double empty_draw = draw.uniform();

    auto refuse = [&] {
      usage.output_tokens = tokenize(kOracleRefusal).size();
      return BackendResponse::ok(std::string(kOracleRefusal), usage);
    };
    if (policy_.refusal_after && assistant_turns >= *policy_.refusal_after) return refuse();
    if (policy_.refuse_instruction &&
        conv.turns.front().text.find(*policy_.refuse_instruction) != std::string::npos) {
      return refuse();
    }
    if (refusal_draw < policy_.refusal_rate) return refuse();
    if (empty_draw < policy_.empty_response_rate) return BackendResponse::empty(usage);

    if (!anchor) {
      static constexpr std::string_view kLost = "I am not sure which text this is.";
      usage.output_tokens = tokenize(kLost).size();
      return BackendResponse::ok(std::string(kLost), usage);
    }
    const auto& doc = policy_.corpus[anchor->doc].words;
    const std::size_t start = std::min(doc.size(), anchor->pos + emitted);
    if (start >= doc.size()) {
      if (policy_.refuse_at_document_end) return refuse();
      if (policy_.emits_stop_phrase) {
        usage.output_tokens = 2;
        return BackendResponse::ok("THE END", usage);
      }
      return BackendResponse::empty(usage);
    }
    const std::size_t window = static_cast<std::size_t>(std::max(cfg.max_tokens, 1));
    const std::size_t end = std::min(doc.size(), start + window);
    std::string text;
    for (std::size_t k = start; k < end; ++k) {
      if (k > start) text.push_back(' ');
      text += oracle_corrupts(policy_, anchor->doc, k) ? oracle_nonce(policy_.seed, anchor->doc, k)
                                                      : doc[k];
    }
    usage.output_tokens = end - start;
    if (end == doc.size() && policy_.emits_stop_phrase && !policy_.refuse_at_document_end) {
      text += " THE END";
      usage.output_tokens += 2;
    }
    return BackendResponse::ok(std::move(text), usage);
  }

 private:
  OraclePolicy policy_;
  std::string id_;
  std::mutex mu_;
  std::map<uint64_t, uint64_t> seen_;
  std::map<std::string, std::optional<detail::Anchor>> anchors_;
};

}  // namespace nvx

#endif  // NVX_BACKEND_HPP_
