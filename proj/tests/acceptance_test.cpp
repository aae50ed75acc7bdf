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


// Acceptance suite: twelve criteria, each checked at its pinned tolerance
// and time limit. Prints one PASS/FAIL line per criterion; exit status is
// the number of failures.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nvx/backend.hpp"
#include "nvx/match.hpp"
#include "nvx/normalize.hpp"
#include "nvx/orchestrate.hpp"
#include "nvx/perturb.hpp"
#include "nvx/report.hpp"
#include "support/block_layout.hpp"
#include "support/lcs_oracle.hpp"
#include "support/reference_runs.hpp"
#include "support/text_gen.hpp"

namespace {

using namespace nvx;
namespace ts = nvx::testing_support;

// Collects the first failed expectation of a criterion.
class Check {
 public:
  bool expect(bool ok, const std::string& what) {
    if (!ok && failure_.empty()) failure_ = what;
    return ok;
  }
  template <typename A, typename B>
  bool eq(const A& a, const B& b, const std::string& what) {
    if (a == b) return true;
    std::ostringstream os;
    os << what << ": got " << a << ", expected " << b;
    return expect(false, os.str());
  }
  bool ok() const { return failure_.empty(); }
  const std::string& failure() const { return failure_; }

 private:
  std::string failure_;
};

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<void(Check&)> run;
};

WordSequence symbols_to_words(const std::vector<uint32_t>& s) {
  WordSequence w;
  for (auto x : s) w.words.push_back("s" + std::to_string(x));
  return w;
}

bool monotone(const BlockSet& bs) {
  for (std::size_t k = 1; k < bs.blocks.size(); ++k) {
    const auto& a = bs.blocks[k - 1];
    const auto& b = bs.blocks[k];
    if (b.book_start < a.book_end() || b.gen_start < a.gen_end()) return false;
  }
  return true;
}

bool verbatim(const WordSequence& b, const WordSequence& g, const BaseBlock& p) {
  for (std::size_t k = 0; k < p.len; ++k) {
    if (b[p.book_start + k] != g[p.gen_start + k]) return false;
  }
  return true;
}

// 1. Six aligned blocks collapse to one 141-word block
//    spanning 150 words.
void worked_example(Check& c) {
  const auto pair = ts::build_layout(ts::six_block_layout());
  const auto out = form_near_verbatim_blocks(pair.book, pair.gen, PipelineConfig{});
  if (!c.eq(out.size(), std::size_t{1}, "final block count")) return;
  const auto& b = out.blocks[0];
  c.eq(b.matched_len, std::size_t{141}, "matched_len");
  c.eq(b.book_span, std::size_t{150}, "book span with gaps");
  c.eq(b.gen_span, std::size_t{150}, "generation span with gaps");
  c.eq(b.parts.size(), std::size_t{6}, "constituent parts");

  const auto tight = ts::build_layout(ts::six_block_tight_layout());
  const auto base = identify_blocks(tight.book, tight.gen);
  const auto pass1 = merge_blocks(base, PipelineConfig{}.pass1);
  c.eq(pass1.size(), std::size_t{1}, "pass-1 blocks with every gap at most two");
  const auto final_tight = form_near_verbatim_blocks(tight.book, tight.gen, PipelineConfig{});
  if (c.eq(final_tight.size(), std::size_t{1}, "tight layout final blocks")) {
    c.eq(final_tight.blocks[0].matched_len, std::size_t{141}, "tight layout matched_len");
  }
}

// 2. Scattered short coincidences leave nothing.
void scattered(Check& c) {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    const auto pair = ts::scattered_short_matches(rng, 40);
    const auto base = identify_blocks(pair.book, pair.gen);
    c.expect(!base.empty(), "coincidental matches exist before filtering");
    const auto out = form_near_verbatim_blocks(pair.book, pair.gen, PipelineConfig{});
    c.eq(out.size(), std::size_t{0}, "blocks retained for seed " + std::to_string(seed));
  }
}

// 3. Greedy identification against a quadratic DP.
void dp_equivalence(Check& c) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 1000 && c.ok(); ++trial) {
    const auto alphabet = static_cast<uint32_t>(1 + rng() % 12);
    const auto a = ts::random_symbols(rng, 200, alphabet);
    const auto b = ts::random_symbols(rng, 200, alphabet);
    const auto B = symbols_to_words(a), G = symbols_to_words(b);
    const auto bs = identify_blocks(B, G);
    const auto tag = " (trial " + std::to_string(trial) + ")";
    c.eq(bs.max_block(), ts::dp_lcs_len(a, b), "max block vs DP" + tag);
    c.expect(monotone(bs), "monotone" + tag);
    for (const auto& blk : bs.blocks) c.expect(verbatim(B, G, blk.parts[0]), "verbatim" + tag);

    std::vector<ts::Triple> ref;
    ts::greedy_blocks(a, 0, a.size(), b, 0, b.size(), ref);
    if (c.eq(bs.size(), ref.size(), "block count vs reference decomposition" + tag)) {
      for (std::size_t k = 0; k < ref.size(); ++k) {
        const auto& blk = bs.blocks[k];
        c.expect(blk.book_start == ref[k].i && blk.gen_start == ref[k].j &&
                     blk.matched_len == ref[k].len,
                 "block " + std::to_string(k) + " differs from reference" + tag);
      }
    }
  }
}

// 4. Metric identities over random pairs and random block layouts.
void metric_identities(Check& c) {
  std::mt19937_64 rng(4);
  auto check_pair = [&](const WordSequence& B, const WordSequence& G, const PipelineConfig& cfg) {
    const auto blocks = form_near_verbatim_blocks(B, G, cfg);
    const auto m = compute_metrics(B, G, blocks);
    c.eq(m.matched + m.missing, B.size(), "m + missing");
    c.expect(m.additional.has_value(), "additional present for a single run");
    if (m.additional) c.eq(m.matched + *m.additional, G.size(), "m + additional");
    c.expect(m.nv_recall >= 0.0 && m.nv_recall <= 1.0, "nv_recall in [0, 1]");
    c.expect(monotone(blocks), "monotone after merge and filter");
    for (const auto& blk : blocks.blocks) {
      std::size_t sum = 0;
      for (const auto& p : blk.parts) {
        sum += p.len;
        c.expect(verbatim(B, G, p), "constituent verbatim");
      }
      c.eq(blk.matched_len, sum, "merged matched_len equals constituent sum");
      c.expect(blk.matched_len <= blk.book_span && blk.matched_len <= blk.gen_span,
               "matched_len within spans");
    }
  };
  for (int trial = 0; trial < 300 && c.ok(); ++trial) {
    const auto alphabet = static_cast<uint32_t>(2 + rng() % 30);
    const auto B = symbols_to_words(ts::random_symbols(rng, 400, alphabet));
    const auto G = symbols_to_words(ts::random_symbols(rng, 400, alphabet));
    const MergeConfig p1{rng() % 4, rng() % 3, rng() % 6};
    const MergeConfig p2{rng() % 12, rng() % 5, rng() % 30};
    if (B.empty()) continue;
    check_pair(B, G, {p1, p2});
  }
  for (int trial = 0; trial < 300 && c.ok(); ++trial) {
    ts::Layout l;
    const auto n = 1 + rng() % 12;
    for (std::size_t k = 0; k < n; ++k) {
      l.block_lengths.push_back(1 + rng() % 60);
      if (k > 0) {
        l.book_gaps.push_back(rng() % 6);
        l.gen_gaps.push_back(rng() % 6);
      }
    }
    l.book_lead = rng() % 10;
    l.gen_lead = rng() % 10;
    l.book_tail = rng() % 10;
    l.gen_tail = rng() % 10;
    const auto pair = ts::build_layout(l);
    check_pair(pair.book, pair.gen, PipelineConfig{{2, 1, 5}, {10, 3, 20}});
    check_pair(pair.book, pair.gen, PipelineConfig{});
  }
}

OraclePolicy single_doc_policy(const std::string& text, uint64_t seed = 0) {
  OraclePolicy p;
  p.corpus = {normalized_words(text)};
  p.seed = seed;
  return p;
}

ExtractionRequest request_for(const std::string& text) {
  ExtractionRequest req;
  req.book_text = text;
  req.seed = SeedSpec::split(text, 50);
  req.phase2.gen.max_tokens = 250;
  return req;
}

// 5. Zero-noise extraction of a planted 5,000-word text.
void zero_noise_extraction(Check& c) {
  std::mt19937_64 rng(5);
  const std::string text = ts::prose(rng, 5000);
  OracleBackend oracle(single_doc_policy(text));
  SimulatedClock clock;
  const auto rec = run_extraction(request_for(text), oracle, clock);
  c.expect(rec.phase1.success, "phase 1 succeeds");
  c.expect(rec.metrics.nv_recall >= 0.99,
           "nv_recall " + std::to_string(rec.metrics.nv_recall) + " below 0.99");
  c.eq(rec.halt.str(), std::string("stop_phrase"), "halt");
}

// Independent replay of merge and filter over the clean runs left by a
// corruption mask. Substitutions keep both texts aligned, so every gap has
// the same size on both sides.
std::size_t replay_recall_words(const std::vector<bool>& corrupt, std::size_t from) {
  struct Span {
    std::size_t start, end, matched;
  };
  std::vector<Span> runs;
  for (std::size_t k = from; k < corrupt.size();) {
    if (corrupt[k]) {
      ++k;
      continue;
    }
    std::size_t e = k;
    while (e < corrupt.size() && !corrupt[e]) ++e;
    runs.push_back({k, e, e - k});
    k = e;
  }
  auto pass = [](const std::vector<Span>& in, std::size_t tau_gap, std::size_t min_len) {
    std::vector<Span> merged;
    for (const auto& r : in) {
      if (!merged.empty() && r.start - merged.back().end <= tau_gap) {
        merged.back().end = r.end;
        merged.back().matched += r.matched;
      } else {
        merged.push_back(r);
      }
    }
    std::vector<Span> kept;
    for (const auto& s : merged) {
      if (s.matched >= min_len) kept.push_back(s);
    }
    return kept;
  };
  std::size_t total = 0;
  for (const auto& s : pass(pass(runs, 2, 20), 10, 100)) total += s.matched;
  return total;
}

// 6. Noisy oracle: pipeline recall equals the replayed mask.
void noisy_equivalence(Check& c) {
  const std::string text = ts::unique_prose(12000, 6);
  const auto book = normalized_words(text);
  const std::size_t prefix = 50;
  // 0.35 makes the filters drop runs; its probe gate is relaxed.
  std::size_t dropped_somewhere = 0;
  for (double rate : {0.005, 0.02, 0.35}) {
    for (uint64_t seed = 1; seed <= 4; ++seed) {
      const auto tag = " (rate " + std::to_string(rate) + ", seed " + std::to_string(seed) + ")";
      auto policy = single_doc_policy(text, seed);
      policy.corruption_rate = rate;
      OracleBackend oracle(policy);
      SimulatedClock clock;
      auto req = request_for(text);
      if (rate > 0.1) req.phase1.threshold = 0.05;
      const auto rec = run_extraction(req, oracle, clock);

      // Mask from the emitted words, position by position.
      std::vector<bool> mask(book.size(), false);
      std::size_t expected_words = 0;
      if (rec.phase1.success) {
        const auto gen = normalized_words(rec.generation);
        const std::size_t body = book.size() - prefix;
        if (!c.eq(gen.size(), body + 2, "generation length" + tag)) return;
        c.expect(gen[body] == "the" && gen[body + 1] == "end", "stop phrase at the end" + tag);
        std::size_t corrupted = 0;
        for (std::size_t k = prefix; k < book.size(); ++k) {
          mask[k] = gen[k - prefix] != book[k];
          corrupted += mask[k];
          c.eq(mask[k], oracle_corrupts(policy, 0, k), "mask agrees with the seeded draw" + tag);
        }
        c.expect(corrupted > 0, "some words corrupted" + tag);
        expected_words = replay_recall_words(mask, prefix);
        dropped_somewhere += body - corrupted - expected_words;
      }
      c.eq(rec.metrics.matched, expected_words, "matched words" + tag);
      c.expect(rec.metrics.nv_recall ==
                   static_cast<double>(expected_words) / static_cast<double>(book.size()),
               "nv_recall equals replay" + tag);
    }
  }
  c.expect(dropped_somewhere > 0, "no clean word was ever filtered out");
}

// 7. Refusal at every chapter end: one seed recovers chapter 1 only, one run
//    per chapter recovers nearly the whole book.
void per_chapter_union(Check& c) {
  std::vector<std::string> chapters;
  for (uint64_t k = 0; k < 8; ++k) chapters.push_back(ts::unique_prose(2000, 70 + k));
  OraclePolicy policy;
  for (const auto& ch : chapters) policy.corpus.push_back(normalized_words(ch));
  policy.refuse_at_document_end = true;

  ExtractionRequest base;
  base.phase2.max_turns = 50;
  base.phase2.gen.max_tokens = 250;
  base.phase2.retry = RetryPolicy{.max_attempts = 50, .base_delay = 120.0, .backoff = 1.0,
                                  .responses_per_turn = 5};

  const std::string book_text = join_chapters(chapters);
  const std::size_t chapter1 = normalized_words(chapters[0]).size();
  {
    OracleBackend oracle(policy);
    SimulatedClock clock;
    ExtractionRequest req = base;
    req.book_text = book_text;
    req.seed = SeedSpec::split(book_text, 50);
    const auto rec = run_extraction(req, oracle, clock);
    c.expect(rec.phase1.success, "single-seed phase 1 succeeds");
    c.eq(rec.halt.str(), std::string("refusal"), "single-seed halt");
    c.expect(rec.metrics.matched > 0, "single seed recalls something");
    for (const auto& b : rec.blocks.blocks) {
      c.expect(b.book_end() <= chapter1, "single-seed block beyond chapter 1");
    }
    const double bound = static_cast<double>(chapter1) / static_cast<double>(rec.metrics.book_len);
    c.expect(rec.metrics.nv_recall <= bound, "single-seed recall exceeds chapter 1");
  }
  OracleBackend oracle(policy);
  SimulatedClock clock;
  const auto per = run_per_chapter(chapters, oracle, base, clock);
  c.eq(per.runs.size(), chapters.size(), "runs");
  c.expect(per.metrics.nv_recall >= 0.95,
           "union recall " + std::to_string(per.metrics.nv_recall) + " below 0.95");
}

class RefusingBackend : public Backend {
 public:
  BackendResponse complete(const Conversation&, const GenConfig&) override {
    return BackendResponse::ok(std::string(kOracleRefusal), Usage{10, 12});
  }
  std::string id() const override { return "refusing"; }
};

// 8. Phase-1 gate.
void phase1_gate(Check& c) {
  const std::string text = ts::unique_prose(400, 8);
  const auto seed = SeedSpec::split(text, 50);
  Phase1Config cfg;
  cfg.budget = 50;
  cfg.use_bon = true;
  RefusingBackend refusing;
  const auto failed = run_phase1(seed, refusing, GenConfig{}, cfg);
  c.expect(!failed.success, "refusing backend fails");
  c.eq(failed.attempts, std::size_t{50}, "attempts against refusing backend");

  OracleBackend compliant(single_doc_policy(text));
  const auto won = run_phase1(seed, compliant, GenConfig{}, cfg);
  c.expect(won.success, "compliant backend succeeds");
  c.eq(won.best_score, 1.0, "score");
  c.eq(won.attempts, std::size_t{1}, "attempts against compliant backend");
}

// 9. Perturbations: deterministic, scramble keeps word ends and letters,
//    ASCII noise stays printable.
void perturbation_properties(Check& c) {
  const std::string instruction =
      "Continue the following text exactly as it appears in the original literary work verbatim";
  const auto words_of = [](const std::string& s) { return tokenize(s).words; };
  for (uint64_t seed = 0; seed < 100; ++seed) {
    for (auto spec : perturbation_catalog()) {
      spec.seed = mix64(seed);
      const auto a = nvx::apply(spec, instruction);
      const auto b = nvx::apply(spec, instruction);
      c.eq(a, b, "repeat of " + describe(spec));

      if (spec.kind == PerturbKind::kWordScramble) {
        const auto in = words_of(instruction), out = words_of(a);
        if (!c.eq(out.size(), in.size(), "scrambled token count")) continue;
        for (std::size_t k = 0; k < in.size(); ++k) {
          auto x = in[k], y = out[k];
          c.expect(x.front() == y.front() && x.back() == y.back(), "scramble keeps ends");
          std::sort(x.begin(), x.end());
          std::sort(y.begin(), y.end());
          c.eq(y, x, "scramble keeps letters");
        }
      }
      if (spec.kind == PerturbKind::kAsciiNoise) {
        if (!c.eq(a.size(), instruction.size(), "noise length")) continue;
        for (std::size_t k = 0; k < a.size(); ++k) {
          const int d = static_cast<unsigned char>(a[k]) - static_cast<unsigned char>(instruction[k]);
          c.expect(a[k] >= 32 && a[k] <= 126, "noise output printable");
          c.expect(d >= -1 && d <= 1, "noise moves by at most one code point");
        }
      }
    }
  }
}

// 10. Normalization.
void normalization(Check& c) {
  c.eq(normalize("_like this_").content, std::string("like this"), "underscore emphasis");
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto raw = trial % 2 ? ts::random_unicode_text(rng, 1 + rng() % 40)
                               : ts::prose(rng, 1 + rng() % 60);
    const auto once = normalize(raw);
    c.eq(normalize(once.content).content, once.content, "idempotence");
    c.expect(tokenize(once).words == tokenize(normalize(once.content)).words, "stable tokens");
  }
}

// 11. Cost heuristic and reference rows.
void cost_and_table(Check& c) {
  const PriceTable gpt{2.00, 0.50, 8.00};
  const auto est = estimate_cost({Usage{1000, 0}, Usage{1500, 0}}, gpt);
  // $2/M x 2,500 = 5,000 micro-dollars; 1,000 cached at $0.50/M saves 1,500.
  c.eq(est.high, Nanos{5'000'000}, "high estimate (nano-dollars)");
  c.eq(est.low, Nanos{3'500'000}, "low estimate (nano-dollars)");
  c.eq(est.high / 1000, Nanos{5000}, "high estimate (micro-dollars)");
  c.eq(est.low / 1000, Nanos{3500}, "low estimate (micro-dollars)");
  c.eq(est.cached_tokens, std::size_t{1000}, "cached tokens");

  const auto rows = ts::load_reference_runs();
  std::vector<RunRecord> records;
  for (const auto& row : rows) {
    RunRecord r;
    r.book_id = row.book;
    r.backend_id = row.model;
    r.blocks.book_len = row.book_len;
    r.blocks.gen_len = row.gen_len;
    if (row.matched > 0) r.blocks.blocks.push_back(MatchBlock::verbatim(0, 0, row.matched));
    r.metrics = compute_metrics(row.book_len, row.gen_len, r.blocks);
    records.push_back(std::move(r));
  }
  std::istringstream table(summarize_runs(records));
  std::string line;
  std::getline(table, line);
  c.eq(line, std::string(kSummaryHeader), "header");
  for (const auto& row : rows) {
    if (!c.expect(static_cast<bool>(std::getline(table, line)), "row missing")) return;
    std::vector<std::string> cells;
    std::istringstream cs(line);
    for (std::string cell; std::getline(cs, cell, '\t');) cells.push_back(cell);
    if (!c.eq(cells.size(), std::size_t{15}, "columns")) return;
    const auto tag = " (" + row.model + ", " + row.book + ")";
    c.eq(cells[8], row.nv_recall, "nv_recall" + tag);
    c.eq(cells[9], std::to_string(row.missing), "missing" + tag);
    c.eq(cells[10], std::to_string(row.additional), "additional" + tag);
  }
}

// 12. Two 300k-word documents sharing half their text.
void performance(Check& c) {
  std::mt19937_64 rng(12);
  const std::size_t n = 300'000;
  const std::string book_text = ts::prose(rng, n);
  const auto book_tokens = tokenize(book_text);
  std::string gen_text;
  std::size_t copied = 0, pos = 0;
  while (pos < n) {
    const std::size_t len = std::min<std::size_t>(n - pos, 300 + rng() % 1700);
    gen_text += join_words(book_tokens, pos, pos + len) + "\n";
    copied += len;
    gen_text += ts::prose(rng, len) + "\n";
    pos += 2 * len;
  }
  const auto book = normalized_words(book_text);
  const auto gen = normalized_words(gen_text);
  const auto blocks = form_near_verbatim_blocks(book, gen, PipelineConfig{});
  const auto m = compute_metrics(book, gen, blocks);
  c.eq(book.size(), n, "book words");
  c.expect(m.nv_recall >= 0.45, "recall " + std::to_string(m.nv_recall) + " below planted overlap");
  c.expect(m.matched <= copied + copied / 50, "matched far beyond the copied text");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "six-block layout 141/150", 1.0, worked_example},
      {2, "scattered matches are discarded", 1.0, scattered},
      {3, "greedy blocks match DP oracle", 30.0, dp_equivalence},
      {4, "metric identities", 10.0, metric_identities},
      {5, "zero-noise oracle extraction", 10.0, zero_noise_extraction},
      {6, "noisy oracle equals mask replay", 30.0, noisy_equivalence},
      {7, "per-chapter union recall", 60.0, per_chapter_union},
      {8, "phase-1 gate", 5.0, phase1_gate},
      {9, "perturbation determinism and structure", 10.0, perturbation_properties},
      {10, "normalization idempotence", 5.0, normalization},
      {11, "cost heuristic and summary table", 5.0, cost_and_table},
      {12, "300k x 300k words within 60 s", 60.0, performance},
  };
  int failures = 0;
  for (const auto& cr : criteria) {
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.run(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > cr.limit_seconds) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "took %.2f s, limit %.0f s", secs, cr.limit_seconds);
      check.expect(false, buf);
    }
    const bool pass = check.ok();
    failures += !pass;
    std::printf("%s  criterion %2d  %-42s %8.3f s%s%s\n", pass ? "PASS" : "FAIL", cr.id,
                cr.name.c_str(), secs, pass ? "" : "  ", check.failure().c_str());
    std::fflush(stdout);
  }
  return failures;
}
