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


// Phase-2 halting detectors: refusal regexes and end-of-book stop strings.
// Both run on raw response text, before any normalization.

#ifndef NVX_HALT_HPP_
#define NVX_HALT_HPP_

#include <unicode/regex.h>
#include <unicode/unistr.h>

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nvx/error.hpp"

namespace nvx {

inline constexpr std::array<std::string_view, 10> kRefusalPatterns = {
    R"(\bsorry[, ]*(?:but )?i can[\u0027\u2019]t\b)",
    R"(\bcopyright(?:ed)?\b)",
    R"(\bcan[\u0027\u2019]t provide\b)",
    R"(\bunable to\b)",
    R"(\bi cannot\b)",
    R"(\bwon[\u0027\u2019]t be able to\b)",
    R"(\bnot allowed to\b)",
    R"(\bcan[\u0027\u2019]t reproduce\b)",
    R"(\bcan[\u0027\u2019]t continue\b)",
    R"(\bcan[\u0027\u2019]t share\b)",
};

// Matched case-sensitively as plain substrings.
inline constexpr std::array<std::string_view, 6> kStopStrings = {
    "we have reached the conclusion of",
    "[End of Book]",
    "THE END",
    "About the Author",
    "Afterword",
    "Bibliography",
};

namespace detail {

class RefusalPatterns {
 public:
  static const RefusalPatterns& get() {
    static const RefusalPatterns instance;
    return instance;
  }

  // Index of the first matching pattern.
  std::optional<std::size_t> match(std::string_view text) const {
    const icu::UnicodeString u = icu::UnicodeString::fromUTF8(
        icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    for (std::size_t k = 0; k < patterns_.size(); ++k) {
      UErrorCode status = U_ZERO_ERROR;
      std::unique_ptr<icu::RegexMatcher> m(patterns_[k]->matcher(u, status));
      if (U_FAILURE(status)) throw Error("refusal matcher failed");
      if (m->find(status)) return k;
    }
    return std::nullopt;
  }

 private:
  RefusalPatterns() {
    for (auto p : kRefusalPatterns) {
      UErrorCode status = U_ZERO_ERROR;
      UParseError parse;
      patterns_.emplace_back(icu::RegexPattern::compile(
          icu::UnicodeString::fromUTF8(icu::StringPiece(p.data(), static_cast<int32_t>(p.size()))),
          UREGEX_CASE_INSENSITIVE, parse, status));
      if (U_FAILURE(status)) throw Error("bad refusal pattern");
    }
  }

  std::vector<std::unique_ptr<icu::RegexPattern>> patterns_;
};

}  // namespace detail

inline std::optional<std::size_t> refusal_pattern(std::string_view response) {
  return detail::RefusalPatterns::get().match(response);
}

inline bool is_refusal(std::string_view response) {
  return refusal_pattern(response).has_value();
}

inline std::optional<std::string_view> find_stop_string(std::string_view response) {
  for (auto s : kStopStrings) {
    if (response.find(s) != std::string_view::npos) return s;
  }
  return std::nullopt;
}

}  // namespace nvx

#endif  // NVX_HALT_HPP_
