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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dreward/tokenizer.hpp"

namespace dreward {

/// Weights and gates of the curriculum-gated total reward.
struct RewardConfig {
  double lambda_speaker = 0.9;
  double lambda_content = 0.1;
  double lambda_time = 0.1;
  std::size_t l_max = 3072;     // tokens; longer captions score 0
  std::size_t k_warmup = 500;   // first step at which the time term applies

  std::vector<std::string> validate() const;
};

struct ComponentRewards {
  double speaker = 0.0;
  double content = 0.0;
  double time = 0.0;
};

struct RewardBreakdown {
  double r_speaker = 0.0;
  double r_content = 0.0;
  double r_time = 0.0;
  double r_total = 0.0;
  bool length_gated = false;
  bool time_term_active = false;
  std::size_t step = 0;
  std::size_t token_count = 0;
};

///   0                                   if l > l_max
///   λ1·speaker + λ2·content             else if k < K_warmup
///   λ1·speaker + λ2·content + λ3·time   otherwise
RewardBreakdown total_reward(const ComponentRewards& scores, std::size_t token_count,
                             std::size_t step, const RewardConfig& cfg = {});

// Repetition ----------------------------------------------------------------

/// Detector thresholds. A caption is repetitive when either
///  (a) an n-gram with n >= min_ngram occurs min_consecutive times back to
///      back, or
///  (b) the last tail_fraction of tokens lies inside a periodic run whose
///      period is >= tail_min_span and which holds >= tail_min_repeats
///      full copies.
struct RepetitionConfig {
  std::size_t min_ngram = 10;
  std::size_t min_consecutive = 3;
  double tail_fraction = 0.25;
  std::size_t tail_min_span = 5;
  std::size_t tail_min_repeats = 4;

  std::vector<std::string> validate() const;
};

enum class RepetitionRule { ConsecutiveNgram, RepeatingTail };

struct RepetitionEvidence {
  RepetitionRule rule = RepetitionRule::ConsecutiveNgram;
  std::string span;               // the repeated unit, tokens joined by spaces
  std::size_t repeat_count = 0;   // full consecutive copies
  std::size_t span_length = 0;    // tokens in the unit
  std::size_t start_token = 0;    // offset of the first copy
};

struct RepetitionVerdict {
  std::optional<RepetitionEvidence> evidence;

  bool repetitive() const noexcept { return evidence.has_value(); }
};

RepetitionVerdict detect_repetition(std::string_view caption, const Tokenizer& tokenizer,
                                    const RepetitionConfig& cfg = {});

/// Same check over an already tokenized caption.
RepetitionVerdict detect_repetition(std::span<const std::string> tokens,
                                    const RepetitionConfig& cfg = {});

/// Fraction of captions flagged by detect_repetition. Throws on an empty list.
double repetition_rate(std::span<const std::string> captions, const Tokenizer& tokenizer,
                       const RepetitionConfig& cfg = {});

// Preference pairs ------------------------------------------------------------

struct DpoSample {
  std::string input_id;
  std::string caption_a;
  std::string caption_b;
};

struct DpoPair {
  std::string input_id;
  std::string win;
  std::string lose;

  friend bool operator==(const DpoPair&, const DpoPair&) = default;
};

/// Keeps inputs where exactly one candidate is repetitive and the other is
/// complete: not repetitive and, when `l_max` is set, no longer than l_max
/// tokens. The complete caption wins. Input order is preserved.
std::vector<DpoPair> mine_dpo_pairs(std::span<const DpoSample> samples, const Tokenizer& tokenizer,
                                    const RepetitionConfig& cfg = {},
                                    std::optional<std::size_t> l_max = std::nullopt);

}  // namespace dreward
