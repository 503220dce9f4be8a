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

#include <span>
#include <vector>

namespace dreward::rl {

/// Floor for the group standard deviation; groups below it get zero
/// advantages.
inline constexpr double kAdvantageStdFloor = 1e-6;

/// Default PPO-style clip range. Not a tuned value.
inline constexpr double kDefaultClipEpsilon = 0.2;

/// One prompt's G sampled outputs. Log-probabilities are whole-sequence sums.
struct RolloutGroup {
  std::vector<double> rewards;
  std::vector<double> logprob_current;
  std::vector<double> logprob_old;

  std::size_t size() const noexcept { return rewards.size(); }
};

/// (r_g - mean) / std with the population standard deviation. Returns all
/// zeros when std < kAdvantageStdFloor. Throws dreward::Error for G < 2 or
/// non-finite rewards.
std::vector<double> group_advantages(std::span<const double> rewards);

/// Clipped surrogate without a KL term:
///   -(1/G) Σ min(ρ_g A_g, clip(ρ_g, 1-ε, 1+ε) A_g),  ρ_g = exp(lp_cur - lp_old).
double grpo_loss(const RolloutGroup& group, std::span<const double> advantages,
                 double epsilon = kDefaultClipEpsilon);

/// d grpo_loss / d logprob_current_g. Where the clipped branch is selected
/// and ρ lies outside the clip range the gradient is zero.
std::vector<double> grpo_loss_gradient(const RolloutGroup& group,
                                       std::span<const double> advantages,
                                       double epsilon = kDefaultClipEpsilon);

struct DpoBatchItem {
  double logp_policy_win = 0.0;
  double logp_policy_lose = 0.0;
  double logp_ref_win = 0.0;
  double logp_ref_lose = 0.0;
  double beta = 0.1;
};

/// log(1 + e^x) without overflow.
double softplus(double x);

/// (logp_policy_win - logp_ref_win) - (logp_policy_lose - logp_ref_lose).
double dpo_margin(const DpoBatchItem& item);

/// -log σ(β·Δ) evaluated as softplus(-β·Δ).
double dpo_loss(const DpoBatchItem& item);

struct DpoGradient {
  double policy_win = 0.0;
  double policy_lose = 0.0;
  double ref_win = 0.0;
  double ref_lose = 0.0;
};

DpoGradient dpo_loss_gradient(const DpoBatchItem& item);

/// Mean loss over a batch. Throws on an empty batch.
double dpo_batch_loss(std::span<const DpoBatchItem> batch);

}  // namespace dreward::rl
