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

// Best-of-N instruction perturbations.
//
// Every perturbation is a pure function of (spec, text): a single Rng seeded
// with spec.seed is threaded through the steps of the chain, and each step
// consumes draws in text order. Text is processed as code points.
//
// The candidate pool is a fixed catalog of parameterized entries, identity
// included. sample_spec walks the pool in epochs of catalog size; each epoch
// is an independently seeded permutation, so every entry (identity among
// them) appears exactly once per epoch and each single draw is uniform.

#ifndef NVX_PERTURB_HPP_
#define NVX_PERTURB_HPP_

#include <unicode/uchar.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <ranges>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nvx/detail/utf.hpp"
#include "nvx/rng.hpp"

namespace nvx {

enum class PerturbKind {
  kIdentity,
  kCapitalization,
  kSpacing,
  kWordOrderShuffle,
  kCharSubstitution,
  kPunctuationEdits,
  kWordScramble,
  kRandomCapitalization,
  kAsciiNoise,
  kComposite,
};

inline std::string_view kind_name(PerturbKind k) {
  switch (k) {
    case PerturbKind::kIdentity: return "identity";
    case PerturbKind::kCapitalization: return "capitalization";
    case PerturbKind::kSpacing: return "spacing";
    case PerturbKind::kWordOrderShuffle: return "word_order_shuffle";
    case PerturbKind::kCharSubstitution: return "char_substitution";
    case PerturbKind::kPunctuationEdits: return "punctuation_edits";
    case PerturbKind::kWordScramble: return "word_scramble";
    case PerturbKind::kRandomCapitalization: return "random_capitalization";
    case PerturbKind::kAsciiNoise: return "ascii_noise";
    case PerturbKind::kComposite: return "composite";
  }
  return "unknown";
}

/// One primitive perturbation. `p_add`/`p_rm` are used by spacing and
/// punctuation edits; `p` by the single-probability kinds.
struct PerturbStep {
  PerturbKind kind = PerturbKind::kIdentity;
  double p = 0.0;
  double p_add = 0.0;
  double p_rm = 0.0;

  friend bool operator==(const PerturbStep&, const PerturbStep&) = default;
};

struct PerturbationSpec {
  PerturbKind kind = PerturbKind::kIdentity;
  std::vector<PerturbStep> chain;  // one step unless kind is composite
  double sigma = 0.6;
  uint64_t seed = 0;

  friend bool operator==(const PerturbationSpec&, const PerturbationSpec&) = default;
};

inline std::string describe(const PerturbationSpec& spec) {
  auto step_text = [](const PerturbStep& s) {
    std::string out(kind_name(s.kind));
    auto num = [](double v) {
      std::string t = std::to_string(v);
      while (t.size() > 1 && t.back() == '0') t.pop_back();
      if (t.back() == '.') t.pop_back();
      return t;
    };
    switch (s.kind) {
      case PerturbKind::kCapitalization:
      case PerturbKind::kWordOrderShuffle:
      case PerturbKind::kCharSubstitution:
        out += "(p=" + num(s.p) + ")";
        break;
      case PerturbKind::kSpacing:
      case PerturbKind::kPunctuationEdits:
        out += "(p_add=" + num(s.p_add) + ",p_rm=" + num(s.p_rm) + ")";
        break;
      default:
        break;
    }
    return out;
  };
  std::string out;
  for (const auto& s : spec.chain) {
    if (!out.empty()) out += "->";
    out += step_text(s);
  }
  return out.empty() ? std::string("identity") : out;
}

namespace detail {

struct GlyphRow {
  char32_t letter;
  std::u32string_view glyphs;
};

inline constexpr GlyphRow kGlyphRows[] = {
#include "nvx/glyph_map.inc"
};

inline std::u32string_view glyphs_for(char32_t lower) {
  for (const auto& row : kGlyphRows) {
    if (row.letter == lower) return row.glyphs;
  }
  return {};
}

inline constexpr std::u32string_view kPunctuationMarks = U".,!?;:";

inline bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }
inline bool is_alpha(char32_t c) { return u_isalpha(static_cast<UChar32>(c)); }

inline char32_t flip_case(char32_t c) {
  const auto u = static_cast<UChar32>(c);
  if (u_isupper(u)) return static_cast<char32_t>(u_tolower(u));
  if (u_islower(u)) return static_cast<char32_t>(u_toupper(u));
  return c;
}

inline std::u32string flip_cases(std::u32string_view s, double p, Rng& rng) {
  std::u32string out(s);
  for (auto& c : out) {
    if (is_alpha(c) && rng.chance(p)) c = flip_case(c);
  }
  return out;
}

inline std::u32string spacing(std::u32string_view s, double p_add, double p_rm, Rng& rng) {
  std::u32string out;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const char32_t c = s[k];
    if (c == U' ') {
      if (!rng.chance(p_rm)) out.push_back(c);
      continue;
    }
    out.push_back(c);
    if (is_space(c)) continue;
    const bool next_is_space = k + 1 < s.size() && is_space(s[k + 1]);
    if (rng.chance(p_add) && !next_is_space) out.push_back(U' ');
  }
  return out;
}

inline std::vector<std::u32string> split_tokens(std::u32string_view s) {
  std::vector<std::u32string> tokens;
  std::u32string cur;
  for (char32_t c : s) {
    if (is_space(c)) {
      if (!cur.empty()) tokens.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

// Sentences end at '.', '!' or '?' (terminator kept with the sentence). A
// shuffled sentence keeps its leading whitespace and is re-joined with
// single spaces; an untouched sentence is copied verbatim.
inline std::u32string word_order_shuffle(std::u32string_view s, double p, Rng& rng) {
  std::u32string out;
  std::size_t start = 0;
  while (start < s.size()) {
    std::size_t end = start;
    while (end < s.size() && s[end] != U'.' && s[end] != U'!' && s[end] != U'?') ++end;
    if (end < s.size()) ++end;
    const std::u32string_view sentence = s.substr(start, end - start);
    auto tokens = split_tokens(sentence);
    if (tokens.size() > 1 && rng.chance(p)) {
      rng.shuffle(std::span<std::u32string>(tokens));
      std::size_t lead = 0;
      while (lead < sentence.size() && is_space(sentence[lead])) ++lead;
      out.append(sentence.substr(0, lead));
      for (std::size_t k = 0; k < tokens.size(); ++k) {
        if (k > 0) out.push_back(U' ');
        out += tokens[k];
      }
    } else {
      out.append(sentence);
    }
    start = end;
  }
  return out;
}

inline std::u32string substitute_glyphs(std::u32string_view s, double p, Rng& rng) {
  std::u32string out;
  out.reserve(s.size());
  for (char32_t c : s) {
    if (!is_alpha(c)) {
      out.push_back(c);
      continue;
    }
    const bool hit = rng.chance(p);
    const auto lower = static_cast<char32_t>(u_tolower(static_cast<UChar32>(c)));
    const auto glyphs = glyphs_for(lower);
    if (!hit || glyphs.empty()) {
      out.push_back(c);
      continue;
    }
    char32_t g = glyphs[static_cast<std::size_t>(rng.below(glyphs.size()))];
    if (u_isupper(static_cast<UChar32>(c))) {
      g = static_cast<char32_t>(u_toupper(static_cast<UChar32>(g)));
    }
    out.push_back(g);
  }
  return out;
}

inline std::u32string punctuation_edits(std::u32string_view s, double p_add, double p_rm,
                                        Rng& rng) {
  std::u32string out;
  for (char32_t c : s) {
    if (kPunctuationMarks.find(c) != std::u32string_view::npos) {
      if (!rng.chance(p_rm)) out.push_back(c);
      continue;
    }
    out.push_back(c);
    if (is_alpha(c) && rng.chance(p_add)) {
      out.push_back(kPunctuationMarks[static_cast<std::size_t>(rng.below(kPunctuationMarks.size()))]);
    }
  }
  return out;
}

// Whitespace is left exactly in place; only token interiors move.
inline std::u32string word_scramble(std::u32string_view s, double p, Rng& rng) {
  std::u32string out(s);
  std::size_t k = 0;
  while (k < out.size()) {
    if (is_space(out[k])) {
      ++k;
      continue;
    }
    std::size_t end = k;
    while (end < out.size() && !is_space(out[end])) ++end;
    if (end - k > 3 && rng.chance(p)) {
      rng.shuffle(std::span<char32_t>(out.data() + k + 1, end - k - 2));
    }
    k = end;
  }
  return out;
}

inline std::u32string ascii_noise(std::u32string_view s, double p, Rng& rng) {
  std::u32string out(s);
  for (auto& c : out) {
    if (c < 32 || c > 126 || !rng.chance(p)) continue;
    const bool up = rng.below(2) == 1;
    const char32_t moved = up ? c + 1 : c - 1;
    if (moved >= 32 && moved <= 126) c = moved;
  }
  return out;
}

inline std::u32string apply_step(const PerturbStep& step, double sigma,
                                 std::u32string_view s, Rng& rng) {
  switch (step.kind) {
    case PerturbKind::kIdentity:
    case PerturbKind::kComposite:
      return std::u32string(s);
    case PerturbKind::kCapitalization:
      return flip_cases(s, step.p, rng);
    case PerturbKind::kSpacing:
      return spacing(s, step.p_add, step.p_rm, rng);
    case PerturbKind::kWordOrderShuffle:
      return word_order_shuffle(s, step.p, rng);
    case PerturbKind::kCharSubstitution:
      return substitute_glyphs(s, step.p, rng);
    case PerturbKind::kPunctuationEdits:
      return punctuation_edits(s, step.p_add, step.p_rm, rng);
    case PerturbKind::kWordScramble:
      return word_scramble(s, std::sqrt(sigma), rng);
    case PerturbKind::kRandomCapitalization:
      return flip_cases(s, std::sqrt(sigma), rng);
    case PerturbKind::kAsciiNoise:
      return ascii_noise(s, sigma * sigma * sigma, rng);
  }
  return std::u32string(s);
}

}  // namespace detail

inline std::string apply(const PerturbationSpec& spec, std::string_view instruction) {
  if (spec.kind == PerturbKind::kIdentity) return std::string(instruction);
  Rng rng(spec.seed);
  std::u32string text = detail::to_u32(instruction);
  for (const auto& step : spec.chain) text = detail::apply_step(step, spec.sigma, text, rng);
  return detail::to_utf8(text);
}

/// The parameterized pool: every listed parameter value of every kind plus
/// two fixed-order composites.
inline const std::vector<PerturbationSpec>& perturbation_catalog() {
  static const std::vector<PerturbationSpec> catalog = [] {
    using K = PerturbKind;
    std::vector<PerturbationSpec> c;
    auto single = [&c](PerturbStep s) { c.push_back(PerturbationSpec{s.kind, {s}}); };
    single({K::kIdentity});
    const double cap_ps[] = {0.2, 0.5};
    const std::pair<double, double> add_rm[] = {{0.05, 0.05}, {0.1, 0.1}};
    for (double p : cap_ps) single({K::kCapitalization, p});
    for (auto [a, r] : add_rm) single({K::kSpacing, 0.0, a, r});
    single({K::kWordOrderShuffle, 0.3});
    for (double p : {0.1, 0.05}) single({K::kCharSubstitution, p});
    for (auto [a, r] : add_rm) single({K::kPunctuationEdits, 0.0, a, r});
    single({K::kWordScramble});
    single({K::kRandomCapitalization});
    single({K::kAsciiNoise});
    for (double p : cap_ps) {
      for (auto [a, r] : add_rm) {
        c.push_back(PerturbationSpec{
            K::kComposite, {{K::kCapitalization, p}, {K::kSpacing, 0.0, a, r}}});
      }
    }
    c.push_back(PerturbationSpec{
        K::kComposite,
        {{K::kWordScramble}, {K::kRandomCapitalization}, {K::kAsciiNoise}}});
    return c;
  }();
  return catalog;
}

inline PerturbationSpec sample_spec(uint64_t pool_seed, uint64_t index) {
  const auto& catalog = perturbation_catalog();
  const uint64_t size = catalog.size();
  const uint64_t epoch = index / size;
  std::vector<uint32_t> order(size);
  for (uint32_t k = 0; k < size; ++k) order[k] = k;
  Rng perm(mix64(pool_seed, epoch));
  perm.shuffle(std::span<uint32_t>(order));
  PerturbationSpec spec = catalog[order[index % size]];
  spec.seed = mix64(mix64(pool_seed) + index);
  return spec;
}

/// Lazy, replayable stream of perturbed instructions for indices 0, 1, 2, ...
inline auto candidate_stream(std::string instruction, uint64_t pool_seed) {
  return std::views::iota(uint64_t{0}) |
         std::views::transform([instruction = std::move(instruction), pool_seed](uint64_t n) {
           return nvx::apply(sample_spec(pool_seed, n), instruction);
         });
}

}  // namespace nvx

#endif  // NVX_PERTURB_HPP_
