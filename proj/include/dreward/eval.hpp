// Copyright 2026 The dreward Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dreward/annotation.hpp"
#include "dreward/config.hpp"
#include "dreward/judge.hpp"
#include "dreward/reward.hpp"
#include "dreward/tokenizer.hpp"

namespace dreward {

enum class ParserMode { Judge, Canonical, PreParsed };

std::optional<ParserMode> parse_parser_mode(std::string_view text);
std::string_view to_string(ParserMode mode);

/// One generated caption to score. `token_count` carries the policy's own
/// token count when the caller has it; otherwise the fallback tokenizer
/// counts.
struct CaptionInput {
  std::string video_id;
  std::string caption;
  std::optional<std::size_t> token_count;
};

/// Reads `{"video_id", "caption", "token_count"?}` lines.
std::vector<CaptionInput> load_captions(const std::filesystem::path& path);

struct EvalConfig {
  std::filesystem::path annotations;
  std::filesystem::path captions;  // optional in pre-parsed mode
  std::filesystem::path parsed;    // required in pre-parsed mode
  ParserMode parser = ParserMode::Canonical;
  Settings settings;
  std::filesystem::path out_dir;  // empty: nothing is written

  /// Replaces the HTTP transport (and the credential lookup) in judge mode.
  std::shared_ptr<JudgeTransport> judge_transport;
  std::shared_ptr<const Tokenizer> tokenizer = default_tokenizer();

  std::vector<std::string> validate() const;
};

enum class VideoStatus { Scored, NoDialogue, Failed };

std::string_view to_string(VideoStatus status);

struct SentenceDetail {
  int index = 0;
  std::string gt_speaker;
  std::string predicted_speaker;
  bool match = false;
  double intersection = 0.0;
  double union_ = 0.0;
  std::string provenance;
};

/// Per-video scoring outcome. Metric fields are meaningful only when
/// status == Scored.
struct VideoRecord {
  std::string video_id;
  Language language = Language::English;
  VideoStatus status = VideoStatus::Scored;
  std::string error;

  std::size_t sentences = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;

  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
  std::size_t reference_tokens = 0;
  double error_rate = 0.0;  // unclamped
  double content_reward = 0.0;

  double intersection = 0.0;
  double union_ = 0.0;
  double iou = 0.0;

  bool repetitive = false;
  std::size_t token_count = 0;
  std::vector<std::string> warnings;
  std::vector<SentenceDetail> detail;

  std::size_t edits() const noexcept { return substitutions + insertions + deletions; }
};

/// Corpus aggregates in percent. Fields are NaN when no video qualifies.
struct Aggregate {
  std::string language;  // "en", "zh" or "all"
  std::size_t videos = 0;
  std::size_t scored = 0;
  std::size_t no_dialogue = 0;
  std::size_t failed = 0;
  double acc_video_mean = 0.0;
  double acc_pooled = 0.0;
  double err_pooled = 0.0;      // Σ edits / Σ reference tokens
  double err_video_mean = 0.0;
  double iou_pooled = 0.0;      // Σ I / Σ U over every scored sentence
  double iou_video_mean = 0.0;
  double rep = 0.0;             // over every caption that was not a failure
};

struct EvalReport {
  std::vector<VideoRecord> videos;  // sorted by video_id
  std::vector<Aggregate> aggregates;
  std::string parser_mode;
  std::string judge_endpoint;
  std::string judge_model;

  std::size_t failures() const;
};

/// Aggregates over the records whose language passes `subset`.
Aggregate aggregate(std::span<const VideoRecord> records, LanguageFilter subset);

/// Loads inputs, parses and scores every caption, aggregates, and (when
/// out_dir is set) writes report.jsonl, report.txt and parsed.jsonl.
/// Throws when inputs fail to load, a caption has no annotation, or no video
/// could be scored.
EvalReport run_eval(const EvalConfig& cfg);

/// Same pipeline, persisting only the parses (parsed.jsonl). Returns them in
/// video_id order; failures are reported through `failures`.
std::vector<ParsedCaption> run_parse(const EvalConfig& cfg, std::vector<VideoRecord>* failures = nullptr);

struct RewardRecord {
  std::string video_id;
  VideoStatus status = VideoStatus::Scored;
  std::string error;
  RewardBreakdown breakdown;
};

/// One RewardBreakdown per caption at curriculum step `step`. Writes (or
/// appends to) rewards.jsonl when out_dir is set.
std::vector<RewardRecord> run_reward_scoring(const EvalConfig& cfg, std::size_t step,
                                             bool append = false);

/// Reads candidate captions (`{"input_id", "candidates": [a, b]}` or one
/// `{"input_id", "caption"}` line per candidate), mines preference pairs and
/// writes `{"input_id", "win", "lose"}` lines to `output`. Returns the count.
/// Throws when an input id does not have exactly two candidates.
std::size_t run_dpo_mining(const std::filesystem::path& samples, const std::filesystem::path& output,
                           const Settings& settings = {},
                           const Tokenizer& tokenizer = *default_tokenizer());

nlohmann::json to_json(const VideoRecord& r);
nlohmann::json to_json(const Aggregate& a);
nlohmann::json to_json(const RewardRecord& r);

/// Fixed-width table: one row per aggregate, Table-2 style columns.
std::string format_report_table(const EvalReport& report);

}  // namespace dreward
