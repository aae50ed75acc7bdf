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


#include "nvx/config.hpp"

#include <gtest/gtest.h>

#include <filesystem>

namespace nvx {
namespace {

namespace fs = std::filesystem;

TEST(Config, DefaultsRoundTrip) {
  const AppConfig c = default_config();
  const Json j = c;
  EXPECT_EQ(Json(config_from_json(j)), j);
  EXPECT_EQ(Json(config_from_json(Json::object())), j);
}

TEST(Config, DefaultProfiles) {
  const auto c = default_config();
  EXPECT_EQ(c.profiles.at("claude-3.7-sonnet").phase2.max_turns, 600u);
  EXPECT_EQ(c.profiles.at("claude-3.7-sonnet").phase2.gen.max_tokens, 250);
  EXPECT_EQ(c.profiles.at("gpt-4.1").phase2.max_turns, 200u);
  EXPECT_EQ(c.profiles.at("gpt-4.1").price, (PriceTable{2.00, 0.50, 8.00}));
  const auto& gemini = c.profiles.at("gemini-2.5-pro");
  EXPECT_EQ(gemini.phase2.gen.max_tokens, 2000);
  EXPECT_EQ(gemini.phase2.gen.frequency_penalty, 2.0);
  EXPECT_EQ(gemini.phase2.gen.presence_penalty, 0.1);
  EXPECT_TRUE(gemini.phase2.extra_instruction.has_value());
  EXPECT_EQ(c.profiles.at("grok-3").phase2.max_turns, 300u);
  EXPECT_EQ(c.phase1.threshold, 0.6);
  EXPECT_EQ(c.phase1.max_tokens, 1000);
  EXPECT_EQ(c.seed.prefix_words, 50u);
  EXPECT_EQ(c.pipeline.pass2.min_len, 100u);
}

TEST(Config, PartialProfileOverrideKeepsOtherFields) {
  const auto c = config_from_json(
      Json::parse(R"({"profiles": {"gpt-4.1": {"http": {"model": "gpt-x"}}}})"));
  const auto& p = c.profiles.at("gpt-4.1");
  EXPECT_EQ(p.http.model, "gpt-x");
  EXPECT_EQ(p.http.base_url, "https://api.openai.com");
  EXPECT_EQ(p.phase2.max_turns, 200u);
}

TEST(Config, NewProfile) {
  const auto c = config_from_json(Json::parse(
      R"({"profiles": {"mine": {"kind": "oracle", "oracle": {"corruption_rate": 0.1}}}})"));
  EXPECT_EQ(c.profiles.at("mine").kind, "oracle");
  EXPECT_EQ(c.profiles.at("mine").oracle.corruption_rate, 0.1);
  EXPECT_TRUE(c.profiles.contains("gpt-4.1"));
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(config_from_json(Json::parse(R"({"pipline": {}})")), ConfigError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"seed": {"prefix": 3}})")), ConfigError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"seed": {"prefix_words": "x"}})")), ConfigError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"profiles": {"a": {"kind": "ftp"}}})")),
               ConfigError);
  EXPECT_THROW(
      config_from_json(Json::parse(R"({"profiles": {"a": {"kind": "oracle", "oracle": {"refusal_rate": 2}}}})")),
      ConfigError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"chapter_pattern": "("})")), ConfigError);
}

TEST(Config, LoadNamesMissingFile) {
  const auto path = fs::temp_directory_path() / "nvx_no_such_config.json";
  fs::remove(path);
  try {
    load_config(path);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(path.string()), std::string::npos);
  }
}

TEST(Config, LoadMalformedJson) {
  const auto path = fs::temp_directory_path() / "nvx_bad_config.json";
  write_file(path, "{ not json");
  EXPECT_THROW(load_config(path), ConfigError);
  write_file(path, "// comment\n{\"runs_dir\": \"elsewhere\"}");
  EXPECT_EQ(load_config(path).runs_dir, "elsewhere");
  fs::remove(path);
}

TEST(Chapters, SplitsOnHeadingLines) {
  const std::string text = "Preface words.\nChapter 1\none two\n\nCHAPTER II\nthree four\n";
  const auto ch = split_chapters(text, default_config().chapter_pattern);
  ASSERT_EQ(ch.size(), 3u);
  EXPECT_EQ(normalized_words(ch[1]).words, (std::vector<std::string>{"chapter", "1", "one", "two"}));
  EXPECT_EQ(normalized_words(ch[2]).words,
            (std::vector<std::string>{"chapter", "ii", "three", "four"}));
  EXPECT_EQ(join_words(tokenize(join_chapters(ch)), 0, 2), "Preface words.");
}

TEST(Chapters, NoHeadingIsOneChapter) {
  EXPECT_EQ(split_chapters("just text here", "^chapter$").size(), 1u);
  EXPECT_TRUE(split_chapters("  \n ", "^chapter$").empty());
}

TEST(Chapters, MidLineWordIsNotAHeading) {
  const auto ch = split_chapters("See the chapter on birds.\nMore.", default_config().chapter_pattern);
  EXPECT_EQ(ch.size(), 1u);
}

TEST(MakeBackend, OracleUsesBookWhenNoCorpus) {
  const auto c = default_config();
  auto b = make_backend(c, "oracle", "alpha beta gamma delta epsilon zeta eta theta");
  EXPECT_EQ(b->id(), "oracle");
  const auto r = b->complete(Conversation().user("Go\n\nalpha beta gamma delta epsilon"), {});
  EXPECT_EQ(r.text.substr(0, 10), "zeta eta t");
  EXPECT_THROW(make_backend(c, "nope", "x"), ConfigError);
  EXPECT_EQ(make_backend(c, "gpt-4.1", "x")->id(), "gpt-4.1");
}

TEST(MakeBackend, SplitChaptersMakesOneDocumentEach) {
  auto c = default_config();
  c.profiles["oracle"].oracle.split_chapters = true;
  const auto policy = oracle_policy(c.profiles["oracle"].oracle,
                                    {"Chapter 1\na b c\nChapter 2\nd e f"}, c.chapter_pattern);
  EXPECT_EQ(policy.corpus.size(), 2u);
}

}  // namespace
}  // namespace nvx
