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

// Seeded text generators shared by the test suites.

#ifndef NVX_TESTS_SUPPORT_TEXT_GEN_HPP_
#define NVX_TESTS_SUPPORT_TEXT_GEN_HPP_

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace nvx::testing_support {

inline std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

// Fragments chosen to exercise every normalization step: quotes, dashes,
// ellipses, spaced dots, underscores, compatibility forms and case pairs.
inline std::string random_unicode_text(std::mt19937_64& rng, std::size_t pieces) {
  static const std::array<std::string_view, 48> kAtoms = {
      "a", "B", "z", "Q", " ", " ", "  ", "\t", "\n", "_", "_", "__", ".", ". ",
      ". . .", "...", "…", "“", "”", "‘", "’", "«", "»", "–", "―", "—", "ﬁ",
      "Ａ", "ｂ", "①", "½", "É", "é", "ß", "İ", "Σ", "ς", "Ω", "Ω", "ǅ", "Ꭰ",
      "ꭰ", "ｶ", "ﾞ", "7", "x_y", "_w_", " "};
  std::string out;
  for (std::size_t k = 0; k < pieces; ++k) out += kAtoms[pick(rng, kAtoms.size())];
  return out;
}

inline const std::vector<std::string>& common_words() {
  static const std::vector<std::string> kWords = {
      "the", "of", "and", "to", "a", "in", "was", "he", "that", "it", "his",
      "her", "with", "as", "had", "for", "she", "at", "on", "not", "but", "by",
      "be", "from", "they", "which", "you", "this", "my", "all", "were",
      "have", "one", "there", "their", "so", "said", "would", "an", "no",
      "when", "been", "who", "them", "could", "more", "into", "night", "door",
      "house", "river", "letter", "window", "garden", "stranger", "morning",
      "silence", "lantern", "winter", "voice", "road", "ship", "castle",
      "journey", "mother", "father", "child", "friend", "heart", "eyes",
      "hand", "light", "dark", "cold", "long", "old", "young", "small",
      "great", "quiet", "slowly", "suddenly", "again", "never", "always",
      "walked", "looked", "turned", "heard", "found", "knew", "thought",
      "felt", "saw", "came", "went", "stood", "waited", "smiled", "wept"};
  return kWords;
}

// English-like prose with Zipf-ish word frequencies, sentence punctuation
// and capitalized sentence starts. Exactly `words` whitespace tokens.
inline std::string prose(std::mt19937_64& rng, std::size_t words) {
  const auto& vocab = common_words();
  std::string out;
  bool sentence_start = true;
  for (std::size_t k = 0; k < words; ++k) {
    // Squaring a uniform draw skews toward the frequent head of the list.
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    std::string w = vocab[static_cast<std::size_t>(u * u * vocab.size()) % vocab.size()];
    if (sentence_start) w[0] = static_cast<char>(w[0] - 'a' + 'A');
    sentence_start = false;
    if (k + 1 == words || pick(rng, 12) == 0) {
      w += ".";
      sentence_start = true;
    } else if (pick(rng, 9) == 0) {
      w += ",";
    }
    if (k > 0) out += (pick(rng, 40) == 0) ? "\n" : " ";
    out += w;
  }
  return out;
}

// Pseudo-words that never repeat within a document: the k-th word spells k
// in a consonant-vowel syllable alphabet, salted per document.
inline std::string syllable_word(std::uint64_t k) {
  static constexpr std::string_view kSyl[] = {
      "ka", "lo", "mi", "ne", "ru", "sa", "te", "vo", "zi", "ba", "do", "fe",
      "gu", "ha", "ji", "po"};
  std::string w;
  do {
    w += kSyl[k % 16];
    k /= 16;
  } while (k > 0);
  return w;
}

inline std::string unique_prose(std::size_t words, std::uint64_t salt = 0) {
  std::string out;
  for (std::size_t k = 0; k < words; ++k) {
    if (k > 0) out += ' ';
    out += syllable_word(salt * 1'000'003ULL + k + 256);
    if (k % 13 == 12) out += '.';
  }
  return out;
}

}  // namespace nvx::testing_support

#endif  // NVX_TESTS_SUPPORT_TEXT_GEN_HPP_
