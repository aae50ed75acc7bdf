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


// Run directory layout:
//
//   run.meta            run descriptor (configs, probe outcome, halt, usage)
//   transcript.ndjson   one JSON object per request/response, prompts included
//   generation.txt      concatenated accepted responses
//   blocks.json         final near-verbatim blocks
//   metrics.json        extraction metrics
//
// Files are written to a temporary name and renamed into place.

#ifndef NVX_RUN_STORE_HPP_
#define NVX_RUN_STORE_HPP_

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "nvx/json_io.hpp"
#include "nvx/orchestrate.hpp"

namespace nvx {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& path, std::string_view content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

inline Json run_meta(const RunRecord& r) {
  const auto& p1 = r.phase1;
  return {{"run_id", r.run_id},
          {"book_id", r.book_id},
          {"backend_id", r.backend_id},
          {"gen", r.gen},
          {"phase1_config", r.phase1_config},
          {"phase2_config", r.phase2_config},
          {"pipeline", r.pipeline},
          {"phase1",
           {{"success", p1.success},
            {"best_score", p1.best_score},
            {"attempts", p1.attempts},
            {"bon_attempts", p1.bon_attempts},
            {"winning_instruction", p1.winning_instruction},
            {"winning_prompt", p1.winning_prompt},
            {"winning_response", p1.winning_response},
            {"winning_usage", p1.winning_usage},
            {"usage", p1.usage}}},
          {"halt", r.halt.str()},
          {"turns", r.turns},
          {"usage", r.usage},
          {"started_at", r.started_at},
          {"finished_at", r.finished_at}};
}

inline void save_run(const RunRecord& r, const fs::path& dir) {
  fs::create_directories(dir);
  write_file(dir / "run.meta", run_meta(r).dump(2) + "\n");
  std::string ndjson;
  for (const auto& e : r.transcript) ndjson += Json(e).dump() + "\n";
  write_file(dir / "transcript.ndjson", ndjson);
  write_file(dir / "generation.txt", r.generation);
  write_file(dir / "blocks.json", Json(r.blocks).dump(2) + "\n");
  write_file(dir / "metrics.json", Json(r.metrics).dump(2) + "\n");
}

inline Json parse_json_file(const fs::path& path) {
  const auto text = read_file(path);
  auto j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw IoError("malformed JSON in " + path.string());
  return j;
}

inline RunRecord load_run(const fs::path& dir) {
  const Json meta = parse_json_file(dir / "run.meta");
  RunRecord r;
  try {
    r.run_id = meta.at("run_id").get<std::string>();
    r.book_id = meta.at("book_id").get<std::string>();
    r.backend_id = meta.at("backend_id").get<std::string>();
    r.gen = meta.at("gen").get<GenConfig>();
    r.phase1_config = meta.at("phase1_config").get<Phase1Config>();
    r.phase2_config = meta.at("phase2_config").get<Phase2Config>();
    r.pipeline = meta.at("pipeline").get<PipelineConfig>();
    const auto& p1 = meta.at("phase1");
    r.phase1.success = p1.at("success").get<bool>();
    r.phase1.best_score = p1.at("best_score").get<double>();
    r.phase1.attempts = p1.at("attempts").get<std::size_t>();
    r.phase1.bon_attempts = p1.at("bon_attempts").get<std::size_t>();
    r.phase1.winning_instruction = p1.at("winning_instruction").get<std::string>();
    r.phase1.winning_prompt = p1.at("winning_prompt").get<std::string>();
    r.phase1.winning_response = p1.at("winning_response").get<std::string>();
    r.phase1.winning_usage = p1.at("winning_usage").get<Usage>();
    r.phase1.usage = p1.at("usage").get<Usage>();
    r.halt = HaltReason::parse(meta.at("halt").get<std::string>());
    r.turns = meta.at("turns").get<std::size_t>();
    r.usage = meta.at("usage").get<Usage>();
    r.started_at = meta.at("started_at").get<double>();
    r.finished_at = meta.at("finished_at").get<double>();

    std::istringstream lines(read_file(dir / "transcript.ndjson"));
    for (std::string line; std::getline(lines, line);) {
      if (!line.empty()) r.transcript.push_back(Json::parse(line).get<TranscriptEntry>());
    }
    r.generation = read_file(dir / "generation.txt");
    r.blocks = parse_json_file(dir / "blocks.json").get<BlockSet>();
    r.metrics = parse_json_file(dir / "metrics.json").get<ExtractionMetrics>();
  } catch (const Json::exception& e) {
    throw IoError("malformed run directory " + dir.string() + ": " + e.what());
  }
  return r;
}

/// Recomputes generation, blocks and metrics of a stored record from its
/// transcript and the reference text.
inline RunRecord rescore(const RunRecord& stored, std::string_view book_text) {
  RunRecord r = stored;
  score_run(r, normalized_words(book_text));
  return r;
}

}  // namespace nvx

#endif  // NVX_RUN_STORE_HPP_
