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


#include <doctest.h>

#include <cmath>
#include <random>

#include "dreward/error.hpp"
#include "dreward/rl_math.hpp"
#include "oracles.hpp"

using namespace dreward;
using namespace dreward::rl;

TEST_CASE("group advantages") {
  std::vector<double> r{0, 1};
  CHECK(group_advantages(r) == std::vector<double>{-1, 1});
  r = {3, 3, 3, 3};
  CHECK(group_advantages(r) == std::vector<double>{0, 0, 0, 0});
  r = {1, 2, 3};
  const auto a = group_advantages(r);
  CHECK(a[0] == doctest::Approx(-std::sqrt(1.5)).epsilon(1e-14));
  CHECK(a[1] == 0.0);
  CHECK(a[2] == doctest::Approx(std::sqrt(1.5)).epsilon(1e-14));
  r = {1};
  CHECK_THROWS_AS(group_advantages(r), Error);
  r = {1, std::nan("")};
  CHECK_THROWS_AS(group_advantages(r), Error);
}

TEST_CASE("advantages are shift and scale invariant") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n(0, 1);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> r(8);
    for (auto& x : r) x = n(rng);
    std::vector<double> t = r;
    for (auto& x : t) x = 3.5 * x - 7.0;
    const auto a = group_advantages(r), b = group_advantages(t);
    for (std::size_t g = 0; g < r.size(); ++g) CHECK(a[g] == doctest::Approx(b[g]).epsilon(1e-9));
  }
}

TEST_CASE("clipped surrogate examples") {
  RolloutGroup g{{0, 1}, {std::log(1.5), std::log(1.5)}, {0, 0}};
  std::vector<double> adv{-1, 1};
  CHECK(grpo_loss(g, adv) == doctest::Approx(0.15).epsilon(1e-14));

  std::vector<double> zero{0, 0};
  CHECK(grpo_loss(g, zero) == 0.0);

  RolloutGroup on{{1, 2, 3}, {-1.0, -2.0, -0.5}, {-1.0, -2.0, -0.5}};
  CHECK(std::abs(grpo_loss(on, group_advantages(on.rewards))) < 1e-15);

  RolloutGroup bad{{0, 1}, {0, INFINITY}, {0, 0}};
  CHECK_THROWS_AS(grpo_loss(bad, adv), Error);
}

TEST_CASE("clipped surrogate gradient matches finite differences") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n(0, 1);
  std::uniform_real_distribution<double> lr(-0.5, 0.5);
  for (int trial = 0; trial < 200; ++trial) {
    RolloutGroup g;
    for (int i = 0; i < 6; ++i) {
      g.rewards.push_back(n(rng));
      g.logprob_old.push_back(-5.0 + n(rng));
      double d;
      do {
        d = lr(rng);
        // stay off the non-differentiable clip edges
      } while (std::abs(std::exp(d) - 0.8) < 1e-3 || std::abs(std::exp(d) - 1.2) < 1e-3);
      g.logprob_current.push_back(g.logprob_old.back() + d);
    }
    const auto adv = group_advantages(g.rewards);
    const auto grad = grpo_loss_gradient(g, adv);
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto f = [&](double x) {
        RolloutGroup h = g;
        h.logprob_current[i] = x;
        return grpo_loss(h, adv);
      };
      const double fd = dreward::oracle::central_difference(f, g.logprob_current[i], 1e-6);
      CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-4).scale(1e-8));
    }
  }
}

TEST_CASE("DPO loss") {
  CHECK(dpo_loss({0, 0, 0, 0, 0.1}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  const DpoBatchItem ten{10, 0, 0, 0, 0.1};
  CHECK(dpo_margin(ten) == 10.0);
  CHECK(dpo_loss(ten) == doctest::Approx(std::log1p(std::exp(-1.0))).epsilon(1e-14));
  CHECK(dpo_loss(ten) == doctest::Approx(-std::log(1.0 / (1.0 + std::exp(-1.0)))).epsilon(1e-14));
  CHECK(dpo_loss({1e6, 0, 0, 0, 0.1}) < 1e-300);
  CHECK(std::isfinite(dpo_loss({-1e6, 0, 0, 0, 0.1})));
  CHECK(softplus(-800.0) >= 0.0);
  CHECK(softplus(800.0) == 800.0);
  CHECK_THROWS_AS(dpo_loss({NAN, 0, 0, 0, 0.1}), Error);
}

TEST_CASE("DPO gradient matches finite differences") {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> n(-10, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const DpoBatchItem item{n(rng), n(rng), n(rng), n(rng), 0.05 + (trial % 5) * 0.1};
    const auto g = dpo_loss_gradient(item);
    auto along = [&](double DpoBatchItem::*field) {
      return dreward::oracle::central_difference(
          [&](double x) {
            DpoBatchItem c = item;
            c.*field = x;
            return dpo_loss(c);
          },
          item.*field);
    };
    CHECK(g.policy_win == doctest::Approx(along(&DpoBatchItem::logp_policy_win)).epsilon(1e-4));
    CHECK(g.policy_lose == doctest::Approx(along(&DpoBatchItem::logp_policy_lose)).epsilon(1e-4));
    CHECK(g.ref_win == doctest::Approx(along(&DpoBatchItem::logp_ref_win)).epsilon(1e-4));
    CHECK(g.ref_lose == doctest::Approx(along(&DpoBatchItem::logp_ref_lose)).epsilon(1e-4));
  }
}

TEST_CASE("DPO batch loss is the mean") {
  std::vector<DpoBatchItem> b{{0, 0, 0, 0, 0.1}, {10, 0, 0, 0, 0.1}};
  CHECK(dpo_batch_loss(b) == doctest::Approx((std::log(2.0) + std::log1p(std::exp(-1.0))) / 2));
  CHECK_THROWS_AS(dpo_batch_loss({}), Error);
}
