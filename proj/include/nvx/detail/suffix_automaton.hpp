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

#ifndef NVX_DETAIL_SUFFIX_AUTOMATON_HPP_
#define NVX_DETAIL_SUFFIX_AUTOMATON_HPP_

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace nvx::detail {

// Suffix automaton over a sequence of integer symbols. Transitions live in a
// per-state linked edge list (needed when cloning) and are looked up through
// one open-addressing table keyed by (state, symbol).
class SuffixAutomaton {
 public:
  struct State {
    int32_t len = 0;
    int32_t link = -1;
    int32_t first_end = -1;  // end index of the first occurrence
    int32_t edges = -1;
  };

  explicit SuffixAutomaton(std::span<const uint32_t> text) {
    const std::size_t n = text.size();
    states_.reserve(2 * n + 2);
    edges_.reserve(3 * n + 4);
    std::size_t cap = 16;
    while (cap < 2 * (3 * n + 4)) cap <<= 1;
    slots_.assign(cap, Slot{});
    mask_ = cap - 1;
    states_.push_back(State{});
    for (std::size_t k = 0; k < n; ++k) extend(text[k]);
  }

  const State& state(int32_t s) const { return states_[s]; }

  // -1 when absent.
  int32_t next(int32_t s, uint32_t symbol) const {
    const int32_t e = find_edge(s, symbol);
    return e < 0 ? -1 : edges_[e].target;
  }

 private:
  struct Edge {
    uint32_t symbol;
    int32_t target;
    int32_t next;
  };
  struct Slot {
    uint64_t key = kEmpty;
    int32_t edge = -1;
  };
  static constexpr uint64_t kEmpty = std::numeric_limits<uint64_t>::max();

  static uint64_t key_of(int32_t s, uint32_t symbol) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(s)) << 32) | symbol;
  }
  std::size_t home(uint64_t key) const {
    return static_cast<std::size_t>((key * 0x9E3779B97F4A7C15ULL) >> 17) & mask_;
  }

  int32_t find_edge(int32_t s, uint32_t symbol) const {
    const uint64_t key = key_of(s, symbol);
    for (std::size_t h = home(key);; h = (h + 1) & mask_) {
      const Slot& slot = slots_[h];
      if (slot.key == key) return slot.edge;
      if (slot.key == kEmpty) return -1;
    }
  }

  void add_edge(int32_t s, uint32_t symbol, int32_t target) {
    const auto e = static_cast<int32_t>(edges_.size());
    edges_.push_back(Edge{symbol, target, states_[s].edges});
    states_[s].edges = e;
    const uint64_t key = key_of(s, symbol);
    std::size_t h = home(key);
    while (slots_[h].key != kEmpty) h = (h + 1) & mask_;
    slots_[h] = Slot{key, e};
  }

  void extend(uint32_t c) {
    const auto cur = static_cast<int32_t>(states_.size());
    states_.push_back(State{states_[last_].len + 1, -1, states_[last_].len, -1});
    int32_t p = last_;
    while (p != -1 && find_edge(p, c) < 0) {
      add_edge(p, c, cur);
      p = states_[p].link;
    }
    if (p == -1) {
      states_[cur].link = 0;
    } else {
      const int32_t q = edges_[find_edge(p, c)].target;
      if (states_[p].len + 1 == states_[q].len) {
        states_[cur].link = q;
      } else {
        const auto clone = static_cast<int32_t>(states_.size());
        states_.push_back(
            State{states_[p].len + 1, states_[q].link, states_[q].first_end, -1});
        for (int32_t e = states_[q].edges; e >= 0; e = edges_[e].next) {
          add_edge(clone, edges_[e].symbol, edges_[e].target);
        }
        while (p != -1) {
          const int32_t e = find_edge(p, c);
          if (e < 0 || edges_[e].target != q) break;
          edges_[e].target = clone;
          p = states_[p].link;
        }
        states_[q].link = clone;
        states_[cur].link = clone;
      }
    }
    last_ = cur;
  }

  std::vector<State> states_;
  std::vector<Edge> edges_;
  std::vector<Slot> slots_;
  std::size_t mask_ = 0;
  int32_t last_ = 0;
};

}  // namespace nvx::detail

#endif  // NVX_DETAIL_SUFFIX_AUTOMATON_HPP_
