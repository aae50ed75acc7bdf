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

// Text normalization and whitespace tokenization.
//
// Reference documents and generations go through the same map before any
// matching, in this order:
//
//   1. Unicode NFKC.
//   2. Punctuation remap: curly and angle quotes to ASCII, en dash and
//      horizontal bar to em dash, U+2026 to "...".
//   3. Spaced dots (". . .") collapse to "...", and "..." directly followed
//      by a letter or digit gets one space inserted after it.
//   4. Single-underscore emphasis "_x_" is replaced by "x".
//   5. Simple per-code-point lowercasing.
//
// The five steps are repeated until the string stops changing, so the
// result is a fixed point of Normalize. For ordinary prose a single pass is
// already stable and the repetition costs one extra comparison.

#ifndef NVX_NORMALIZE_HPP_
#define NVX_NORMALIZE_HPP_

#include <unicode/normalizer2.h>
#include <unicode/regex.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "nvx/error.hpp"

namespace nvx {

struct NormalizedText {
  std::string content;

  friend bool operator==(const NormalizedText&, const NormalizedText&) = default;
};

struct WordSequence {
  std::vector<std::string> words;

  std::size_t size() const noexcept { return words.size(); }
  bool empty() const noexcept { return words.empty(); }
  const std::string& operator[](std::size_t k) const { return words[k]; }

  friend bool operator==(const WordSequence&, const WordSequence&) = default;
};

namespace detail {

inline char32_t remap_punctuation(char32_t c) noexcept {
  switch (c) {
    case U'‘':  // left single quotation mark
    case U'’':  // right single quotation mark
    case U'‚':  // single low-9
    case U'‛':  // single high-reversed-9
    case U'‹':
    case U'›':
      return U'\'';
    case U'“':
    case U'”':
    case U'„':
    case U'‟':
    case U'«':
    case U'»':
      return U'"';
    case U'–':  // en dash
    case U'―':  // horizontal bar
      return U'—';
    default:
      return c;
  }
}

inline void check(UErrorCode status, const char* what) {
  if (U_FAILURE(status)) {
    throw Error(std::string(what) + ": " + u_errorName(status));
  }
}

// Compiled ICU patterns are not thread-safe as matchers, but RegexPattern
// itself is immutable and can hand out fresh matchers to any thread.
class NormalizePatterns {
 public:
  static const NormalizePatterns& get() {
    static const NormalizePatterns instance;
    return instance;
  }

  const icu::RegexPattern& spaced_dots() const { return *spaced_dots_; }
  const icu::RegexPattern& tight_ellipsis() const { return *tight_ellipsis_; }
  const icu::RegexPattern& underscore() const { return *underscore_; }

 private:
  NormalizePatterns() {
    spaced_dots_ = compile(u"\\.(?:[ \\t]+\\.){2,}");
    tight_ellipsis_ = compile(u"\\.\\.\\.(?=[\\p{L}\\p{N}])");
    underscore_ = compile(u"_([^_]+)_");
  }

  static std::unique_ptr<icu::RegexPattern> compile(const char16_t* src) {
    UErrorCode status = U_ZERO_ERROR;
    UParseError parse{};
    std::unique_ptr<icu::RegexPattern> p(
        icu::RegexPattern::compile(icu::UnicodeString(src), 0u, parse, status));
    check(status, "regex compile");
    return p;
  }

  std::unique_ptr<icu::RegexPattern> spaced_dots_;
  std::unique_ptr<icu::RegexPattern> tight_ellipsis_;
  std::unique_ptr<icu::RegexPattern> underscore_;
};

inline icu::UnicodeString replace_all(const icu::RegexPattern& pattern,
                                      const icu::UnicodeString& input,
                                      const icu::UnicodeString& replacement) {
  UErrorCode status = U_ZERO_ERROR;
  std::unique_ptr<icu::RegexMatcher> m(pattern.matcher(input, status));
  check(status, "regex matcher");
  icu::UnicodeString out = m->replaceAll(replacement, status);
  check(status, "regex replace");
  return out;
}

inline icu::UnicodeString normalize_once(const icu::UnicodeString& in) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfkc = icu::Normalizer2::getNFKCInstance(status);
  check(status, "NFKC instance");
  icu::UnicodeString text = nfkc->normalize(in, status);
  check(status, "NFKC");

  icu::UnicodeString remapped;
  for (int32_t k = 0; k < text.length();) {
    const UChar32 c = text.char32At(k);
    k += U16_LENGTH(c);
    const auto r = remap_punctuation(static_cast<char32_t>(c));
    if (r == U'…') {
      remapped.append(u"...");
    } else {
      remapped.append(static_cast<UChar32>(r));
    }
  }
  text = std::move(remapped);

  const auto& pats = NormalizePatterns::get();
  text = replace_all(pats.spaced_dots(), text, u"...");
  text = replace_all(pats.tight_ellipsis(), text, u"... ");

  // Removing one pair can expose another ("__a__" -> "_a_"), so repeat.
  for (;;) {
    icu::UnicodeString next = replace_all(pats.underscore(), text, u"$1");
    if (next == text) break;
    text = std::move(next);
  }

  icu::UnicodeString lowered;
  for (int32_t k = 0; k < text.length();) {
    const UChar32 c = text.char32At(k);
    k += U16_LENGTH(c);
    lowered.append(u_tolower(c));
  }
  return lowered;
}

}  // namespace detail

/// Deterministic normalization of raw UTF-8 text. Malformed UTF-8 sequences
/// are replaced by U+FFFD.
inline NormalizedText normalize(std::string_view raw) {
  icu::UnicodeString text = icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
  constexpr int kMaxPasses = 8;
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    icu::UnicodeString next = detail::normalize_once(text);
    if (next == text) break;
    text = std::move(next);
  }
  NormalizedText out;
  text.toUTF8String(out.content);
  return out;
}

/// Splits on runs of Unicode White_Space code points; empty tokens dropped.
inline WordSequence tokenize(std::string_view text) {
  WordSequence seq;
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto n = static_cast<int32_t>(text.size());
  int32_t word_start = -1;
  int32_t k = 0;
  while (k < n) {
    const int32_t at = k;
    UChar32 c;
    U8_NEXT(s, k, n, c);
    const bool space = c >= 0 && u_isUWhiteSpace(c);
    if (space) {
      if (word_start >= 0) {
        seq.words.emplace_back(text.substr(word_start, at - word_start));
        word_start = -1;
      }
    } else if (word_start < 0) {
      word_start = at;
    }
  }
  if (word_start >= 0) seq.words.emplace_back(text.substr(word_start));
  return seq;
}

inline WordSequence tokenize(const NormalizedText& text) {
  return tokenize(std::string_view(text.content));
}

/// normalize + tokenize, the form every matcher input takes.
inline WordSequence normalized_words(std::string_view raw) {
  return tokenize(normalize(raw));
}

inline std::string join_words(const WordSequence& seq,
                              std::size_t first = 0,
                              std::size_t last = std::string::npos) {
  last = std::min(last, seq.size());
  std::string out;
  for (std::size_t k = first; k < last; ++k) {
    if (k > first) out.push_back(' ');
    out += seq.words[k];
  }
  return out;
}

}  // namespace nvx

#endif  // NVX_NORMALIZE_HPP_
