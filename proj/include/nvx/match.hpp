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

// Long-span near-verbatim block matching between a reference document B and
// a generation G, both given as word sequences.
//
//   identify  greedy longest-common-substring recursion -> verbatim blocks
//   merge     stitch consecutive blocks whose gaps are small and aligned
//   filter    keep blocks whose matched length reaches a threshold
//
// form_near_verbatim_blocks runs identify, merge, filter, merge, filter.
// A merged block spans the gaps it absorbed, but its matched_len counts only
// the verbatim words of its parts.

#ifndef NVX_MATCH_HPP_
#define NVX_MATCH_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nvx/detail/suffix_automaton.hpp"
#include "nvx/error.hpp"
#include "nvx/normalize.hpp"

namespace nvx {

/// A verbatim triple: B[book_start, +len) == G[gen_start, +len).
struct BaseBlock {
  std::size_t book_start = 0;
  std::size_t gen_start = 0;
  std::size_t len = 0;

  friend bool operator==(const BaseBlock&, const BaseBlock&) = default;
};

struct MatchBlock {
  std::size_t book_start = 0;
  std::size_t gen_start = 0;
  std::size_t matched_len = 0;
  std::size_t book_span = 0;
  std::size_t gen_span = 0;
  std::vector<BaseBlock> parts;  // verbatim constituents, in order

  static MatchBlock verbatim(std::size_t i, std::size_t j, std::size_t m) {
    return MatchBlock{i, j, m, m, m, {BaseBlock{i, j, m}}};
  }

  std::size_t book_end() const noexcept { return book_start + book_span; }
  std::size_t gen_end() const noexcept { return gen_start + gen_span; }
  bool is_base() const noexcept { return parts.size() == 1; }

  friend bool operator==(const MatchBlock&, const MatchBlock&) = default;
};

struct BlockSet {
  std::vector<MatchBlock> blocks;
  std::size_t book_len = 0;
  std::size_t gen_len = 0;

  std::size_t size() const noexcept { return blocks.size(); }
  bool empty() const noexcept { return blocks.empty(); }

  std::size_t matched() const noexcept {
    std::size_t m = 0;
    for (const auto& b : blocks) m += b.matched_len;
    return m;
  }
  std::size_t max_block() const noexcept {
    std::size_t best = 0;
    for (const auto& b : blocks) best = std::max(best, b.matched_len);
    return best;
  }

  friend bool operator==(const BlockSet&, const BlockSet&) = default;
};

struct MergeConfig {
  std::size_t tau_gap = 0;
  std::size_t tau_align = 0;
  std::size_t min_len = 0;

  friend bool operator==(const MergeConfig&, const MergeConfig&) = default;
};

struct PipelineConfig {
  MergeConfig pass1{2, 1, 20};
  MergeConfig pass2{10, 3, 100};

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

struct ExtractionMetrics {
  std::size_t book_len = 0;
  std::size_t gen_len = 0;
  std::size_t matched = 0;
  double nv_recall = 0.0;
  std::size_t missing = 0;
  // Not meaningful for a union over several generations.
  std::optional<std::size_t> additional;

  friend bool operator==(const ExtractionMetrics&,
                         const ExtractionMetrics&) = default;
};

namespace detail {

struct Interned {
  std::vector<uint32_t> book;
  std::vector<uint32_t> gen;
};

inline Interned intern(const WordSequence& b, const WordSequence& g) {
  std::unordered_map<std::string_view, uint32_t> ids;
  ids.reserve(b.size() / 4 + g.size() / 4 + 16);
  auto id_of = [&ids](std::string_view w) {
    auto [it, inserted] = ids.try_emplace(w, static_cast<uint32_t>(ids.size()));
    return it->second;
  };
  Interned out;
  out.book.reserve(b.size());
  out.gen.reserve(g.size());
  for (const auto& w : b.words) out.book.push_back(id_of(w));
  for (const auto& w : g.words) out.gen.push_back(id_of(w));
  return out;
}

struct Match {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t len = 0;
};

// Keeps the lexicographically smallest (a, b) among the longest candidates.
inline void offer(Match& best, std::size_t a, std::size_t b, std::size_t len) {
  if (len > best.len ||
      (len == best.len && len > 0 && (a < best.a || (a == best.a && b < best.b)))) {
    best = Match{a, b, len};
  }
}

inline Match longest_match_dp(std::span<const uint32_t> a,
                              std::span<const uint32_t> b) {
  Match best;
  std::vector<uint32_t> prev(b.size() + 1, 0);
  std::vector<uint32_t> cur(b.size() + 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      cur[j + 1] = a[i] == b[j] ? prev[j] + 1 : 0;
      // Ends visited in (i, j) order, so the first strict maximum has the
      // smallest start pair for its length.
      if (cur[j + 1] > best.len) {
        best = Match{i + 1 - cur[j + 1], j + 1 - cur[j + 1], cur[j + 1]};
      }
    }
    std::swap(prev, cur);
  }
  return best;
}

// Streams `probe` through an automaton built on `indexed`. For each probe end
// position the longest match ending there is known; the indexed-side start is
// recovered from the state's first occurrence, which is the smallest start for
// that exact string.
inline Match longest_match_sam(std::span<const uint32_t> indexed,
                               std::span<const uint32_t> probe,
                               bool indexed_is_a) {
  const SuffixAutomaton sam(indexed);
  Match best;
  int32_t v = 0;
  std::size_t l = 0;
  for (std::size_t e = 0; e < probe.size(); ++e) {
    const uint32_t c = probe[e];
    int32_t nxt = sam.next(v, c);
    while (v != 0 && nxt < 0) {
      v = sam.state(v).link;
      l = static_cast<std::size_t>(sam.state(v).len);
      nxt = sam.next(v, c);
    }
    if (nxt >= 0) {
      v = nxt;
      ++l;
    } else {
      l = 0;
    }
    if (l == 0 || l < best.len) continue;
    const std::size_t probe_start = e + 1 - l;
    const std::size_t indexed_start =
        static_cast<std::size_t>(sam.state(v).first_end) + 1 - l;
    if (indexed_is_a) {
      offer(best, indexed_start, probe_start, l);
    } else {
      offer(best, probe_start, indexed_start, l);
    }
  }
  return best;
}

/// Longest common contiguous run of `a` and `b`; ties go to the smallest
/// start in `a`, then the smallest start in `b`. Offsets are local.
inline Match longest_match(std::span<const uint32_t> a,
                           std::span<const uint32_t> b) {
  if (a.empty() || b.empty()) return {};
  constexpr std::size_t kDpCells = 4096;
  if (a.size() * b.size() <= kDpCells) return longest_match_dp(a, b);
  if (a.size() <= b.size()) return longest_match_sam(a, b, true);
  return longest_match_sam(b, a, false);
}

}  // namespace detail

/// Greedy longest-first recursive block identification on interned symbols.
/// Exposed so property tests can drive it with small alphabets directly.
inline std::vector<BaseBlock> identify_symbol_blocks(std::span<const uint32_t> book,
                                                     std::span<const uint32_t> gen) {
  struct Region {
    std::size_t alo, ahi, blo, bhi;
  };
  std::vector<BaseBlock> found;
  std::vector<Region> stack{{0, book.size(), 0, gen.size()}};
  while (!stack.empty()) {
    const Region r = stack.back();
    stack.pop_back();
    if (r.alo >= r.ahi || r.blo >= r.bhi) continue;
    const auto m = detail::longest_match(book.subspan(r.alo, r.ahi - r.alo),
                                         gen.subspan(r.blo, r.bhi - r.blo));
    if (m.len == 0) continue;
    const std::size_t i = r.alo + m.a;
    const std::size_t j = r.blo + m.b;
    found.push_back(BaseBlock{i, j, m.len});
    stack.push_back(Region{r.alo, i, r.blo, j});
    stack.push_back(Region{i + m.len, r.ahi, j + m.len, r.bhi});
  }
  std::sort(found.begin(), found.end(),
            [](const BaseBlock& x, const BaseBlock& y) { return x.book_start < y.book_start; });
  return found;
}

/// Length in words of the longest run that appears verbatim in both T and R.
inline std::size_t longest_common_span(const WordSequence& t, const WordSequence& r) {
  if (t.empty() || r.empty()) return 0;
  const auto ids = detail::intern(t, r);
  return detail::longest_match(ids.book, ids.gen).len;
}

/// Phase-1 similarity: longest common span divided by |T|.
inline double phase1_similarity(const WordSequence& t, const WordSequence& r) {
  if (t.empty()) throw EmptyTargetError();
  return static_cast<double>(longest_common_span(t, r)) /
         static_cast<double>(t.size());
}

inline BlockSet identify_blocks(const WordSequence& book, const WordSequence& gen) {
  BlockSet out;
  out.book_len = book.size();
  out.gen_len = gen.size();
  const auto ids = detail::intern(book, gen);
  for (const auto& b : identify_symbol_blocks(ids.book, ids.gen)) {
    out.blocks.push_back(MatchBlock::verbatim(b.book_start, b.gen_start, b.len));
  }
  return out;
}

/// Throws NonMonotoneError unless blocks are strictly ordered and disjoint in
/// both texts and lie inside them.
inline void check_monotone(const BlockSet& bs) {
  for (std::size_t k = 0; k < bs.blocks.size(); ++k) {
    const auto& b = bs.blocks[k];
    if (b.book_end() > bs.book_len || b.gen_end() > bs.gen_len) {
      throw NonMonotoneError("block " + std::to_string(k) + " exceeds text bounds");
    }
    if (k == 0) continue;
    const auto& a = bs.blocks[k - 1];
    if (b.book_start < a.book_end() || b.gen_start < a.gen_end()) {
      throw NonMonotoneError("blocks " + std::to_string(k - 1) + " and " +
                             std::to_string(k) + " overlap or are out of order");
    }
  }
}

namespace detail {

inline std::size_t abs_diff(std::size_t x, std::size_t y) { return x > y ? x - y : y - x; }

inline bool mergeable(const MatchBlock& left, const MatchBlock& right,
                      const MergeConfig& cfg) {
  const std::size_t gap_b = right.book_start - left.book_end();
  const std::size_t gap_g = right.gen_start - left.gen_end();
  return std::max(gap_b, gap_g) <= cfg.tau_gap && abs_diff(gap_b, gap_g) <= cfg.tau_align;
}

inline void absorb(MatchBlock& left, const MatchBlock& right) {
  left.matched_len += right.matched_len;
  left.book_span = right.book_end() - left.book_start;
  left.gen_span = right.gen_end() - left.gen_start;
  left.parts.insert(left.parts.end(), right.parts.begin(), right.parts.end());
}

}  // namespace detail

/// One left-to-right pass; a freshly merged block may keep absorbing its
/// successors. Gaps are measured from the end of the (merged) span.
inline BlockSet merge_blocks(const BlockSet& bs, const MergeConfig& cfg) {
  check_monotone(bs);
  BlockSet out;
  out.book_len = bs.book_len;
  out.gen_len = bs.gen_len;
  for (const auto& b : bs.blocks) {
    if (!out.blocks.empty() && detail::mergeable(out.blocks.back(), b, cfg)) {
      detail::absorb(out.blocks.back(), b);
    } else {
      out.blocks.push_back(b);
    }
  }
  return out;
}

/// Keeps blocks with matched_len >= min_len, order preserved.
inline BlockSet filter_blocks(const BlockSet& bs, std::size_t min_len) {
  BlockSet out;
  out.book_len = bs.book_len;
  out.gen_len = bs.gen_len;
  std::copy_if(bs.blocks.begin(), bs.blocks.end(), std::back_inserter(out.blocks),
               [min_len](const MatchBlock& b) { return b.matched_len >= min_len; });
  return out;
}

inline BlockSet merge_and_filter(const BlockSet& base, const PipelineConfig& cfg) {
  auto s = merge_blocks(base, cfg.pass1);
  s = filter_blocks(s, cfg.pass1.min_len);
  s = merge_blocks(s, cfg.pass2);
  return filter_blocks(s, cfg.pass2.min_len);
}

inline BlockSet form_near_verbatim_blocks(const WordSequence& book,
                                          const WordSequence& gen,
                                          const PipelineConfig& cfg = {}) {
  return merge_and_filter(identify_blocks(book, gen), cfg);
}

inline ExtractionMetrics compute_metrics(std::size_t book_len, std::size_t gen_len,
                                         const BlockSet& final_blocks) {
  if (book_len == 0) throw EmptyReferenceError();
  ExtractionMetrics m;
  m.book_len = book_len;
  m.gen_len = gen_len;
  m.matched = final_blocks.matched();
  m.nv_recall = static_cast<double>(m.matched) / static_cast<double>(book_len);
  m.missing = book_len - m.matched;
  m.additional = gen_len - m.matched;
  return m;
}

inline ExtractionMetrics compute_metrics(const WordSequence& book, const WordSequence& gen,
                                         const BlockSet& final_blocks) {
  return compute_metrics(book.size(), gen.size(), final_blocks);
}

/// Book words covered by the verbatim parts of any run's blocks, each word
/// counted once.
inline ExtractionMetrics union_recall(std::size_t book_len,
                                      std::span<const BlockSet> per_run) {
  if (book_len == 0) throw EmptyReferenceError();
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (const auto& bs : per_run) {
    for (const auto& b : bs.blocks) {
      for (const auto& p : b.parts) spans.emplace_back(p.book_start, p.book_start + p.len);
    }
  }
  std::sort(spans.begin(), spans.end());
  std::size_t covered = 0;
  std::size_t reach = 0;
  for (const auto& [lo, hi] : spans) {
    const std::size_t from = std::max(lo, reach);
    if (hi > from) covered += hi - from;
    reach = std::max(reach, hi);
  }
  covered = std::min(covered, book_len);
  ExtractionMetrics m;
  m.book_len = book_len;
  m.matched = covered;
  m.nv_recall = static_cast<double>(covered) / static_cast<double>(book_len);
  m.missing = book_len - covered;
  m.additional = std::nullopt;
  return m;
}

inline ExtractionMetrics union_recall(const WordSequence& book,
                                      std::span<const BlockSet> per_run) {
  return union_recall(book.size(), per_run);
}

}  // namespace nvx

#endif  // NVX_MATCH_HPP_
