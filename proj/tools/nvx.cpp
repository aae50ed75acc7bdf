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


#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "nvx/config.hpp"
#include "nvx/match.hpp"
#include "nvx/normalize.hpp"
#include "nvx/orchestrate.hpp"
#include "nvx/perturb.hpp"
#include "nvx/report.hpp"
#include "nvx/run_store.hpp"

#ifndef NVX_VERSION
#define NVX_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

nvx::AppConfig config_or_default(const std::string& path) {
  return path.empty() ? nvx::default_config() : nvx::load_config(path);
}

std::string recall_line(const nvx::ExtractionMetrics& m, std::size_t blocks) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "nv_recall=%.3f matched=%zu book_len=%zu gen_len=%zu missing=%zu blocks=%zu",
                m.nv_recall, m.matched, m.book_len, m.gen_len, m.missing, blocks);
  std::string out = buf;
  if (m.additional) out += " additional=" + std::to_string(*m.additional);
  return out;
}

int cmd_normalize(const std::string& in, const std::string& out) {
  const auto text = nvx::normalize(nvx::read_file(in));
  if (out == "-") {
    std::cout << text.content;
  } else {
    nvx::write_file(out, text.content);
  }
  return kOk;
}

int cmd_match(const std::string& book_path, const std::string& gen_path,
              const std::string& config_path, const std::string& out_path) {
  const auto cfg = config_or_default(config_path);
  const auto book = nvx::normalized_words(nvx::read_file(book_path));
  const auto gen = nvx::normalized_words(nvx::read_file(gen_path));
  const auto blocks = nvx::form_near_verbatim_blocks(book, gen, cfg.pipeline);
  const auto metrics = nvx::compute_metrics(book, gen, blocks);
  if (!out_path.empty()) {
    nvx::Json j = {{"metrics", metrics}, {"blocks", blocks}};
    nvx::write_file(out_path, j.dump(2) + "\n");
  }
  std::cout << recall_line(metrics, blocks.size()) << "\n";
  return kOk;
}

int cmd_perturb(const std::string& instruction, uint64_t seed, std::size_t count) {
  for (std::size_t n = 0; n < count; ++n) {
    const auto spec = nvx::sample_spec(seed, n);
    std::cout << n << "\t" << nvx::describe(spec) << "\t" << nvx::apply(spec, instruction) << "\n";
  }
  return kOk;
}

struct ExtractArgs {
  std::string book;
  std::string backend;
  std::string config;
  std::string run_id;
  std::string runs_dir;
  bool bon = false;
  bool per_chapter = false;
  std::optional<uint64_t> pool_seed;
};

int cmd_extract(const ExtractArgs& a) {
  const auto cfg = config_or_default(a.config);
  const auto pit = cfg.profiles.find(a.backend);
  if (pit == cfg.profiles.end()) throw nvx::ConfigError("unknown backend profile: " + a.backend);
  const auto& profile = pit->second;
  const std::string book_text = nvx::read_file(a.book);
  auto backend = nvx::make_backend(cfg, a.backend, book_text);

  nvx::SimulatedClock simulated;
  nvx::SystemClock system;
  nvx::Clock& clock = profile.kind == "oracle" ? static_cast<nvx::Clock&>(simulated) : system;

  nvx::ExtractionRequest req;
  req.book_id = fs::path(a.book).stem().string();
  req.run_id = a.run_id.empty() ? req.book_id + "-" + a.backend : a.run_id;
  req.book_text = book_text;
  req.phase1 = cfg.phase1;
  req.phase1.use_bon = req.phase1.use_bon || a.bon;
  if (a.pool_seed) req.phase1.pool_seed = *a.pool_seed;
  req.phase2 = profile.phase2;
  req.pipeline = cfg.pipeline;
  const fs::path runs = a.runs_dir.empty() ? fs::path(cfg.runs_dir) : fs::path(a.runs_dir);

  if (a.per_chapter) {
    const auto chapters = nvx::split_chapters(book_text, cfg.chapter_pattern);
    if (chapters.empty()) throw nvx::EmptyReferenceError();
    req.seed.instruction = cfg.seed.instruction;
    req.phase2.max_turns = cfg.per_chapter.max_turns;
    req.phase2.retry = cfg.per_chapter.retry;
    const auto result =
        nvx::run_per_chapter(chapters, *backend, req, clock, cfg.seed.target_words);
    for (const auto& r : result.runs) {
      nvx::save_run(r, runs / r.run_id);
      std::cout << r.run_id << "\t" << r.halt.str() << "\t" << recall_line(r.metrics, r.blocks.size())
                << "\n";
    }
    std::cout << "union " << recall_line(result.metrics, 0) << " chapters=" << chapters.size()
              << "\n";
    return kOk;
  }

  req.seed = nvx::SeedSpec::split(book_text, cfg.seed.prefix_words, cfg.seed.target_words);
  req.seed.instruction = cfg.seed.instruction;
  const auto rec = nvx::run_extraction(req, *backend, clock);
  nvx::save_run(rec, runs / rec.run_id);
  std::cout << rec.run_id << "\t" << rec.halt.str() << "\t" << recall_line(rec.metrics, rec.blocks.size())
            << "\n";
  if (!rec.phase1.success) {
    std::cerr << "nvx: phase 1 failed after " << rec.phase1.attempts
              << " attempts (best score " << rec.phase1.best_score << ")\n";
    return kFailure;
  }
  return kOk;
}

int cmd_report(const std::vector<std::string>& dirs, const std::string& out_dir,
               const std::string& book_path, const std::string& config_path) {
  const auto cfg = config_or_default(config_path);
  std::optional<nvx::WordSequence> book;
  std::string book_text;
  if (!book_path.empty()) {
    book_text = nvx::read_file(book_path);
    book = nvx::normalized_words(book_text);
  }
  fs::create_directories(out_dir);
  std::string table(nvx::kSummaryHeader);
  table.push_back('\n');
  nvx::Nanos low = 0, high = 0;
  bool priced = false;
  for (const auto& d : dirs) {
    auto rec = nvx::load_run(d);
    if (book) rec = nvx::rescore(rec, book_text);
    std::optional<nvx::PriceTable> price;
    if (const auto it = cfg.profiles.find(rec.backend_id); it != cfg.profiles.end()) {
      price = it->second.price;
    }
    const auto summary = nvx::summarize_run(rec, price);
    table += nvx::summary_row(summary) + "\n";
    if (summary.cost) {
      priced = true;
      low += summary.cost->low;
      high += summary.cost->high;
    }
    if (book) {
      const auto gen = nvx::normalized_words(rec.generation);
      nvx::write_file(fs::path(out_dir) / (rec.run_id + ".html"),
                      nvx::render_diff(*book, gen, rec.blocks, rec.run_id));
    }
  }
  nvx::write_file(fs::path(out_dir) / "metrics.tsv", table);
  std::string cost = "runs\t" + std::to_string(dirs.size()) + "\n";
  cost += priced ? "cost_low\t" + nvx::format_usd(low) + "\ncost_high\t" + nvx::format_usd(high) + "\n"
                 : "cost_low\t-\ncost_high\t-\n";
  nvx::write_file(fs::path(out_dir) / "cost.tsv", cost);
  std::cout << table;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nvx: near-verbatim extraction measurement"};
  app.set_version_flag("--version", NVX_VERSION);
  app.require_subcommand(1);

  std::string in, out, book, gen, config, match_out, instruction;
  uint64_t seed = 0;
  std::size_t count = 1;

  auto* normalize = app.add_subcommand("normalize", "Normalize a text file");
  normalize->add_option("input", in, "Input text file")->required()->check(CLI::ExistingFile);
  normalize->add_option("output", out, "Output file, or - for stdout")->required();

  auto* match = app.add_subcommand("match", "Score a generation against a reference text");
  match->add_option("book", book, "Reference text")->required()->check(CLI::ExistingFile);
  match->add_option("generation", gen, "Generated text")->required()->check(CLI::ExistingFile);
  match->add_option("--config", config, "Config file");
  match->add_option("--out", match_out, "Write metrics and blocks as JSON");

  auto* perturb = app.add_subcommand("perturb", "Print sampled instruction perturbations");
  perturb->add_option("instruction", instruction, "Instruction text")->required();
  perturb->add_option("--seed", seed, "Pool seed");
  perturb->add_option("--count", count, "Number of candidates")->check(CLI::PositiveNumber);

  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "Run a two-phase extraction");
  extract->add_option("--book", ex.book, "Reference text")->required()->check(CLI::ExistingFile);
  extract->add_option("--backend", ex.backend, "Backend profile name")->required();
  extract->add_option("--config", ex.config, "Config file");
  extract->add_option("--run-id", ex.run_id, "Run identifier");
  extract->add_option("--runs-dir", ex.runs_dir, "Directory for run records");
  extract->add_option("--pool-seed", ex.pool_seed, "Perturbation pool seed");
  extract->add_flag("--bon", ex.bon, "Perturb the instruction until the probe passes");
  extract->add_flag("--per-chapter", ex.per_chapter, "One run per chapter, union recall");

  std::vector<std::string> dirs;
  std::string report_out = "report", report_book;
  auto* report = app.add_subcommand("report", "Summarize stored runs");
  report->add_option("runs", dirs, "Run directories")->required()->check(CLI::ExistingDirectory);
  report->add_option("--out", report_out, "Output directory");
  report->add_option("--book", report_book, "Reference text; enables diff pages")
      ->check(CLI::ExistingFile);
  report->add_option("--config", config, "Config file");

  bool dump = false;
  auto* cfg = app.add_subcommand("config", "Inspect configuration");
  cfg->add_flag("--dump", dump, "Print the effective configuration");
  cfg->add_option("--config", config, "Config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*normalize) return cmd_normalize(in, out);
    if (*match) return cmd_match(book, gen, config, match_out);
    if (*perturb) return cmd_perturb(instruction, seed, count);
    if (*extract) return cmd_extract(ex);
    if (*report) return cmd_report(dirs, report_out, report_book, config);
    if (*cfg) {
      if (!dump) {
        std::cerr << "nvx config: nothing to do (try --dump)\n";
        return kUsage;
      }
      std::cout << nvx::Json(config_or_default(config)).dump(2) << "\n";
      return kOk;
    }
  } catch (const nvx::ConfigError& e) {
    std::cerr << "nvx: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "nvx: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
