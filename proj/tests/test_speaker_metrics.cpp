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

#include <algorithm>
#include <numeric>

#include "dreward/error.hpp"
#include "dreward/speaker_metrics.hpp"
#include "test_support.hpp"

using namespace dreward;

namespace {

ParsedCaption predict(const VideoAnnotation& a, std::vector<std::string> speakers) {
  ParsedCaption p{a.video_id, {}, "", 0};
  for (std::size_t i = 0; i < a.sentences.size(); ++i) {
    p.assignments.push_back({a.sentences[i].index, speakers[i], "", {}});
  }
  return p;
}

VideoAnnotation sample(std::size_t n) {
  std::vector<std::tuple<std::string, std::string, double, double>> s;
  for (std::size_t i = 0; i < n; ++i) {
    s.emplace_back("line " + std::to_string(i), i % 2 ? "Nick" : "Judy", i * 2.0, i * 2.0 + 1);
  }
  return dreward::testing::make_annotation("v", Language::English, {"Judy", "Nick"}, s);
}

}  // namespace

TEST_CASE("speaker accuracy examples") {
  const auto a3 = sample(3);
  CHECK(speaker_reward(a3, predict(a3, {"Judy", "Nick", "Judy"})).accuracy == 1.0);
  const auto s = speaker_reward(a3, predict(a3, {"Judy", "Nick", "Unknown"}));
  CHECK(s.correct == 2);
  CHECK(s.accuracy == doctest::Approx(2.0 / 3.0));
  CHECK_FALSE(s.per_sentence[2].match);

  const auto a4 = sample(4);
  CHECK(speaker_reward(a4, predict(a4, {"Unknown", "Unknown", "Unknown", "Unknown"})).accuracy == 0.0);
}

TEST_CASE("speaker accuracy errors") {
  VideoAnnotation empty;
  empty.video_id = "e";
  CHECK_THROWS_AS(speaker_reward(empty, ParsedCaption{}), EmptyAnnotationError);
  const auto a = sample(2);
  auto p = predict(a, {"Judy", "Nick"});
  p.assignments.pop_back();
  CHECK_THROWS_AS(speaker_reward(a, p), Error);
}

TEST_CASE("matching is on canonical ids") {
  const auto a = sample(1);
  CHECK(speaker_reward(a, predict(a, {" Judy "})).accuracy == 1.0);
  CHECK(speaker_reward(a, predict(a, {"judy"})).accuracy == 0.0);
}

TEST_CASE("accuracy is invariant under sentence permutation and consistent relabelling") {
  dreward::testing::AnnotationGenerator gen(21);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = gen.next("v");
    std::vector<std::string> preds;
    for (const auto& s : a.sentences) {
      preds.push_back(gen.coin() ? s.speaker_id : a.characters[gen.uniform(0, a.characters.size() - 1)].id);
    }
    const double base = speaker_reward(a, predict(a, preds)).accuracy;

    // Permute the (sentence, prediction) pairs; indices and times follow.
    std::vector<std::size_t> order(a.sentences.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), gen.rng());
    VideoAnnotation b = a;
    std::vector<std::string> preds_b;
    for (std::size_t i = 0; i < order.size(); ++i) {
      b.sentences[i].speaker_id = a.sentences[order[i]].speaker_id;
      preds_b.push_back(preds[order[i]]);
    }
    CHECK(speaker_reward(b, predict(b, preds_b)).accuracy == doctest::Approx(base).epsilon(1e-15));

    // Rename every character consistently on both sides.
    VideoAnnotation c = a;
    auto rename = [](const std::string& id) { return id == "Unknown" ? id : "x_" + id; };
    for (auto& ch : c.characters) ch.id = rename(ch.id);
    for (auto& s : c.sentences) s.speaker_id = rename(s.speaker_id);
    std::vector<std::string> preds_c;
    for (const auto& p : preds) preds_c.push_back(rename(p));
    CHECK(speaker_reward(c, predict(c, preds_c)).accuracy == base);
  }
}
