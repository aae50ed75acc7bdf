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


// Diff rendering, cost estimation and run summaries.
//
// Money is carried as integer nano-dollars. Rates are dollars per million
// tokens, so one token at rate r costs r * 1000 nano-dollars; rates are
// rounded to 0.001 $/M on conversion.

#ifndef NVX_REPORT_HPP_
#define NVX_REPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nvx/backend.hpp"
#include "nvx/match.hpp"
#include "nvx/normalize.hpp"
#include "nvx/orchestrate.hpp"

namespace nvx {

enum class DiffKind { kVerbatim, kMissing, kAdditional };

inline std::string_view diff_kind_name(DiffKind k) {
  switch (k) {
    case DiffKind::kVerbatim: return "verbatim";
    case DiffKind::kMissing: return "missing";
    case DiffKind::kAdditional: return "additional";
  }
  return "unknown";
}

/// A run of words from the book (verbatim, missing) or the generation
/// (verbatim, additional). `start` indexes the side the words come from;
/// verbatim segments index the book.
struct DiffSegment {
  DiffKind kind = DiffKind::kVerbatim;
  std::size_t start = 0;
  std::vector<std::string> words;

  friend bool operator==(const DiffSegment&, const DiffSegment&) = default;
};

namespace detail {

inline void push_segment(std::vector<DiffSegment>& out, DiffKind kind, const WordSequence& from,
                         std::size_t lo, std::size_t hi) {
  if (hi <= lo) return;
  DiffSegment s{kind, lo, {}};
  s.words.assign(from.words.begin() + static_cast<std::ptrdiff_t>(lo),
                 from.words.begin() + static_cast<std::ptrdiff_t>(hi));
  out.push_back(std::move(s));
}

}  // namespace detail

/// Segments in book order. Each gap, including the gaps inside a merged
/// block, becomes a missing segment followed by an additional segment.
inline std::vector<DiffSegment> diff_segments(const WordSequence& book, const WordSequence& gen,
                                              const BlockSet& blocks) {
  std::vector<DiffSegment> out;
  std::size_t b = 0;
  std::size_t g = 0;
  for (const auto& block : blocks.blocks) {
    for (const auto& part : block.parts) {
      detail::push_segment(out, DiffKind::kMissing, book, b, part.book_start);
      detail::push_segment(out, DiffKind::kAdditional, gen, g, part.gen_start);
      detail::push_segment(out, DiffKind::kVerbatim, book, part.book_start,
                           part.book_start + part.len);
      b = part.book_start + part.len;
      g = part.gen_start + part.len;
    }
  }
  detail::push_segment(out, DiffKind::kMissing, book, b, book.size());
  detail::push_segment(out, DiffKind::kAdditional, gen, g, gen.size());
  return out;
}

inline std::string html_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

/// Standalone HTML: verbatim text plain, book-only text struck through in
/// red, generation-only text underlined in blue.
inline std::string render_diff(const WordSequence& book, const WordSequence& gen,
                               const BlockSet& blocks, std::string_view title = "diff") {
  const auto segments = diff_segments(book, gen, blocks);
  const auto m = compute_metrics(book, gen, blocks);
  std::string html;
  html += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>";
  html += html_escape(title);
  html += "</title>\n<style>\n"
          "body{font-family:Georgia,serif;max-width:52em;margin:2em auto;line-height:1.6}\n"
          ".v{color:#000}\n"
          ".m{color:#c62828;text-decoration:line-through}\n"
          ".a{color:#1565c0;text-decoration:underline}\n"
          ".stats{font-family:monospace;color:#444}\n"
          "</style>\n</head>\n<body>\n<h1>";
  html += html_escape(title);
  html += "</h1>\n<p class=\"stats\">";
  char stats[160];
  std::snprintf(stats, sizeof stats, "matched=%zu nv_recall=%.3f missing=%zu additional=%zu",
                m.matched, m.nv_recall, m.missing, *m.additional);
  html += stats;
  html += "</p>\n<p>";
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const auto& s = segments[k];
    static constexpr const char* kClass[] = {"v", "m", "a"};
    static constexpr const char* kTag[] = {"span", "del", "ins"};
    const auto i = static_cast<std::size_t>(s.kind);
    if (k > 0) html.push_back(' ');
    html += "<";
    html += kTag[i];
    html += " class=\"";
    html += kClass[i];
    html += "\">";
    for (std::size_t w = 0; w < s.words.size(); ++w) {
      if (w > 0) html.push_back(' ');
      html += html_escape(s.words[w]);
    }
    html += "</";
    html += kTag[i];
    html += ">";
  }
  html += "</p>\n</body>\n</html>\n";
  return html;
}

using Nanos = int64_t;

struct PriceTable {
  double input = 0.0;         // $ per million input tokens
  double cached_input = 0.0;  // $ per million cached input tokens
  double output = 0.0;        // $ per million output tokens

  friend bool operator==(const PriceTable&, const PriceTable&) = default;
};

struct CostEstimate {
  Nanos low = 0;
  Nanos high = 0;
  uint64_t cached_tokens = 0;

  friend bool operator==(const CostEstimate&, const CostEstimate&) = default;
};

inline Nanos nanos_per_token(double dollars_per_million) {
  if (dollars_per_million < 0) throw ConfigError("prices must be non-negative");
  return static_cast<Nanos>(std::llround(dollars_per_million * 1000.0));
}

/// `high` assumes nothing is cached. `low` treats min(previous, current)
/// prompt tokens of each request after the first as cached.
inline CostEstimate estimate_cost(const std::vector<Usage>& turns, const PriceTable& price,
                                  bool cache_heuristic = true) {
  const Nanos in = nanos_per_token(price.input);
  const Nanos cached = nanos_per_token(price.cached_input);
  const Nanos out = nanos_per_token(price.output);
  CostEstimate c;
  for (std::size_t k = 0; k < turns.size(); ++k) {
    const auto& u = turns[k];
    const Nanos base = static_cast<Nanos>(u.input_tokens) * in +
                       static_cast<Nanos>(u.output_tokens) * out;
    c.high += base;
    uint64_t hit = 0;
    if (cache_heuristic && k > 0) hit = std::min(turns[k - 1].input_tokens, u.input_tokens);
    c.cached_tokens += hit;
    c.low += base - static_cast<Nanos>(hit) * (in - cached);
  }
  return c;
}

inline std::string format_usd(Nanos n, int decimals = 2) {
  const double dollars = static_cast<double>(n) / 1e9;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, dollars);
  return buf;
}

/// Per-request usage of the continuation loop.
inline std::vector<Usage> phase2_usage(const RunRecord& r) {
  std::vector<Usage> out;
  for (const auto& e : r.transcript) {
    if (e.phase == 2) out.push_back(e.response.usage);
  }
  return out;
}

struct RunSummary {
  std::string run_id;
  std::string book;
  std::string backend;
  std::size_t attempts = 0;  // Phase-1 queries
  std::size_t turns = 0;
  std::size_t book_len = 0;
  std::size_t gen_len = 0;
  std::size_t matched = 0;
  double nv_recall = 0.0;
  std::size_t missing = 0;
  std::optional<std::size_t> additional;
  std::size_t max_block = 0;
  std::string halt;
  std::optional<CostEstimate> cost;
};

inline RunSummary summarize_run(const RunRecord& r, const std::optional<PriceTable>& price = {}) {
  RunSummary s;
  s.run_id = r.run_id;
  s.book = r.book_id;
  s.backend = r.backend_id;
  s.attempts = r.phase1.attempts;
  s.turns = r.turns;
  s.book_len = r.metrics.book_len;
  s.gen_len = r.metrics.gen_len;
  s.matched = r.metrics.matched;
  s.nv_recall = r.metrics.nv_recall;
  s.missing = r.metrics.missing;
  s.additional = r.metrics.additional;
  s.max_block = r.blocks.max_block();
  s.halt = r.halt.str();
  if (price) s.cost = estimate_cost(phase2_usage(r), *price);
  return s;
}

inline constexpr std::string_view kSummaryHeader =
    "run_id\tbook\tbackend\tN\tturns\t|B|\t|G|\tm\tnv_recall\tmissing\tadditional\tmax_block\thalt"
    "\tcost_low\tcost_high";

inline std::string summary_row(const RunSummary& s) {
  char recall[32];
  std::snprintf(recall, sizeof recall, "%.3f", s.nv_recall);
  std::string row;
  bool first = true;
  auto cell = [&](const std::string& v) {
    if (!first) row.push_back('\t');
    first = false;
    row += v;
  };
  cell(s.run_id);
  cell(s.book);
  cell(s.backend);
  cell(std::to_string(s.attempts));
  cell(std::to_string(s.turns));
  cell(std::to_string(s.book_len));
  cell(std::to_string(s.gen_len));
  cell(std::to_string(s.matched));
  cell(recall);
  cell(std::to_string(s.missing));
  cell(s.additional ? std::to_string(*s.additional) : "-");
  cell(std::to_string(s.max_block));
  cell(s.halt);
  cell(s.cost ? format_usd(s.cost->low) : "-");
  cell(s.cost ? format_usd(s.cost->high) : "-");
  return row;
}

/// Tab-separated table, one row per record.
inline std::string summarize_runs(const std::vector<RunRecord>& records,
                                  const std::optional<PriceTable>& price = {}) {
  std::string out(kSummaryHeader);
  out.push_back('\n');
  for (const auto& r : records) {
    out += summary_row(summarize_run(r, price));
    out.push_back('\n');
  }
  return out;
}

}  // namespace nvx

#endif  // NVX_REPORT_HPP_
