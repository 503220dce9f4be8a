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


#include "dreward/reward.hpp"

#include <cmath>
#include <unordered_map>

#include "dreward/error.hpp"

namespace dreward {

std::vector<std::string> RewardConfig::validate() const {
  std::vector<std::string> out;
  auto check = [&](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) out.push_back(std::string(name) + ": must be >= 0");
  };
  check(lambda_speaker, "lambda_speaker");
  check(lambda_content, "lambda_content");
  check(lambda_time, "lambda_time");
  return out;
}

RewardBreakdown total_reward(const ComponentRewards& scores, std::size_t token_count,
                             std::size_t step, const RewardConfig& cfg) {
  RewardBreakdown b;
  b.r_speaker = scores.speaker;
  b.r_content = scores.content;
  b.r_time = scores.time;
  b.step = step;
  b.token_count = token_count;
  if (token_count > cfg.l_max) {
    b.length_gated = true;
    b.r_total = 0.0;
    return b;
  }
  b.r_total = cfg.lambda_speaker * scores.speaker + cfg.lambda_content * scores.content;
  if (step >= cfg.k_warmup) {
    b.time_term_active = true;
    b.r_total += cfg.lambda_time * scores.time;
  }
  return b;
}

std::vector<std::string> RepetitionConfig::validate() const {
  std::vector<std::string> out;
  if (min_ngram < 1) out.emplace_back("min_ngram: must be >= 1");
  if (min_consecutive < 2) out.emplace_back("min_consecutive: must be >= 2");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    out.emplace_back("tail_fraction: must be in (0, 1]");
  }
  if (tail_min_span < 1) out.emplace_back("tail_min_span: must be >= 1");
  if (tail_min_repeats < 2) out.emplace_back("tail_min_repeats: must be >= 2");
  return out;
}

namespace {

std::vector<int> intern(std::span<const std::string> tokens) {
  std::unordered_map<std::string_view, int> index;
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) {
    ids.push_back(index.try_emplace(t, static_cast<int>(index.size())).first->second);
  }
  return ids;
}

std::string join(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::optional<RepetitionEvidence> consecutive_ngram(std::span<const std::string> tokens,
                                                    const std::vector<int>& ids,
                                                    const RepetitionConfig& cfg) {
  const std::size_t len = ids.size();
  for (std::size_t n = cfg.min_ngram; n * cfg.min_consecutive <= len; ++n) {
    // `run` counts consecutive positions with ids[i] == ids[i + n]; a run of
    // (copies - 1) * n positions means `copies` back-to-back occurrences.
    const std::size_t needed = (cfg.min_consecutive - 1) * n;
    std::size_t run = 0;
    for (std::size_t i = 0; i + n < len; ++i) {
      run = ids[i] == ids[i + n] ? run + 1 : 0;
      if (run < needed) continue;
      const std::size_t start = i + 1 - run;
      std::size_t end = i + 1;
      while (end + n < len && ids[end] == ids[end + n]) ++end;
      const std::size_t copies = (end - start) / n + 1;
      return RepetitionEvidence{RepetitionRule::ConsecutiveNgram,
                                join(tokens.subspan(start, n)), copies, n, start};
    }
  }
  return std::nullopt;
}

std::optional<RepetitionEvidence> repeating_tail(std::span<const std::string> tokens,
                                                 const std::vector<int>& ids,
                                                 const RepetitionConfig& cfg) {
  const std::size_t len = ids.size();
  if (len == 0) return std::nullopt;
  const auto tail =
      static_cast<std::size_t>(std::ceil(cfg.tail_fraction * static_cast<double>(len)));
  for (std::size_t n = cfg.tail_min_span; n * cfg.tail_min_repeats <= len; ++n) {
    // Periodic suffix: every i in [start + n, len) has ids[i] == ids[i - n].
    std::size_t i = len;
    while (i > n && ids[i - 1] == ids[i - 1 - n]) --i;
    const std::size_t start = i - n;
    const std::size_t covered = len - start;
    if (covered >= tail && covered >= cfg.tail_min_repeats * n) {
      return RepetitionEvidence{RepetitionRule::RepeatingTail, join(tokens.subspan(start, n)),
                                covered / n, n, start};
    }
  }
  return std::nullopt;
}

}  // namespace

RepetitionVerdict detect_repetition(std::span<const std::string> tokens,
                                    const RepetitionConfig& cfg) {
  const std::vector<int> ids = intern(tokens);
  if (auto e = consecutive_ngram(tokens, ids, cfg)) return {std::move(e)};
  if (auto e = repeating_tail(tokens, ids, cfg)) return {std::move(e)};
  return {};
}

RepetitionVerdict detect_repetition(std::string_view caption, const Tokenizer& tokenizer,
                                    const RepetitionConfig& cfg) {
  const std::vector<std::string> tokens = tokenizer.tokenize(caption);
  return detect_repetition(std::span<const std::string>(tokens), cfg);
}

double repetition_rate(std::span<const std::string> captions, const Tokenizer& tokenizer,
                       const RepetitionConfig& cfg) {
  if (captions.empty()) throw Error("repetition rate of an empty caption list");
  std::size_t flagged = 0;
  for (const auto& c : captions) {
    if (detect_repetition(c, tokenizer, cfg).repetitive()) ++flagged;
  }
  return static_cast<double>(flagged) / static_cast<double>(captions.size());
}

std::vector<DpoPair> mine_dpo_pairs(std::span<const DpoSample> samples, const Tokenizer& tokenizer,
                                    const RepetitionConfig& cfg,
                                    std::optional<std::size_t> l_max) {
  std::vector<DpoPair> out;
  for (const auto& s : samples) {
    const bool rep_a = detect_repetition(s.caption_a, tokenizer, cfg).repetitive();
    const bool rep_b = detect_repetition(s.caption_b, tokenizer, cfg).repetitive();
    if (rep_a == rep_b) continue;
    const std::string& win = rep_a ? s.caption_b : s.caption_a;
    const std::string& lose = rep_a ? s.caption_a : s.caption_b;
    if (l_max && tokenizer.count(win) > *l_max) continue;
    out.push_back({s.input_id, win, lose});
  }
  return out;
}

}  // namespace dreward
