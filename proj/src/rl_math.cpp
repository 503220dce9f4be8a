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


#include "dreward/rl_math.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dreward/error.hpp"

namespace dreward::rl {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(std::string(what) + ": non-finite value");
  }
}

void check_group(const RolloutGroup& group, std::span<const double> advantages, double epsilon) {
  const std::size_t g = group.size();
  if (g < 2) throw Error("rollout group needs at least 2 outputs");
  if (group.logprob_current.size() != g || group.logprob_old.size() != g ||
      advantages.size() != g) {
    throw Error("rollout group: rewards, log-probabilities and advantages differ in length");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error("clip epsilon must lie in (0, 1)");
  require_finite(group.logprob_current, "logprob_current");
  require_finite(group.logprob_old, "logprob_old");
  require_finite(advantages, "advantages");
}

void check_item(const DpoBatchItem& item) {
  if (!(item.beta > 0.0) || !std::isfinite(item.beta)) throw Error("DPO beta must be > 0");
  const double v[] = {item.logp_policy_win, item.logp_policy_lose, item.logp_ref_win,
                      item.logp_ref_lose};
  require_finite(v, "DPO log-probability");
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

std::vector<double> group_advantages(std::span<const double> rewards) {
  const std::size_t g = rewards.size();
  if (g < 2) throw Error("group advantages need at least 2 rewards");
  require_finite(rewards, "rewards");
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(g);
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double sd = std::sqrt(var / static_cast<double>(g));

  std::vector<double> out(g, 0.0);
  if (sd < kAdvantageStdFloor) return out;
  for (std::size_t i = 0; i < g; ++i) out[i] = (rewards[i] - mean) / sd;
  return out;
}

double grpo_loss(const RolloutGroup& group, std::span<const double> advantages, double epsilon) {
  check_group(group, advantages, epsilon);
  double sum = 0.0;
  for (std::size_t g = 0; g < group.size(); ++g) {
    const double ratio = std::exp(group.logprob_current[g] - group.logprob_old[g]);
    const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
    sum += std::min(ratio * advantages[g], clipped * advantages[g]);
  }
  return -sum / static_cast<double>(group.size());
}

std::vector<double> grpo_loss_gradient(const RolloutGroup& group,
                                       std::span<const double> advantages, double epsilon) {
  check_group(group, advantages, epsilon);
  const auto g_count = static_cast<double>(group.size());
  std::vector<double> grad(group.size(), 0.0);
  for (std::size_t g = 0; g < group.size(); ++g) {
    const double ratio = std::exp(group.logprob_current[g] - group.logprob_old[g]);
    const double adv = advantages[g];
    const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
    const bool inside = ratio == clipped;
    // min() picks the unclipped term whenever it is not larger.
    const bool unclipped_selected = ratio * adv <= clipped * adv;
    if (unclipped_selected || inside) grad[g] = -adv * ratio / g_count;
  }
  return grad;
}

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double dpo_margin(const DpoBatchItem& item) {
  return (item.logp_policy_win - item.logp_ref_win) - (item.logp_policy_lose - item.logp_ref_lose);
}

double dpo_loss(const DpoBatchItem& item) {
  check_item(item);
  return softplus(-item.beta * dpo_margin(item));
}

DpoGradient dpo_loss_gradient(const DpoBatchItem& item) {
  check_item(item);
  // d softplus(-βΔ)/dΔ = -β σ(-βΔ)
  const double d_margin = -item.beta * sigmoid(-item.beta * dpo_margin(item));
  return {d_margin, -d_margin, -d_margin, d_margin};
}

double dpo_batch_loss(std::span<const DpoBatchItem> batch) {
  if (batch.empty()) throw Error("empty DPO batch");
  double sum = 0.0;
  for (const auto& item : batch) sum += dpo_loss(item);
  return sum / static_cast<double>(batch.size());
}

}  // namespace dreward::rl
