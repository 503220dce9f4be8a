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
#include <cstdlib>

#include "dreward/caption_parser.hpp"
#include "dreward/config.hpp"
#include "dreward/error.hpp"
#include "dreward/eval.hpp"
#include "dreward/io.hpp"
#include "test_support.hpp"

using namespace dreward;
using dreward::testing::TempDir;
using nlohmann::json;

namespace {

struct Corpus {
  std::vector<VideoAnnotation> annotations;
  std::vector<std::string> captions;
};

Corpus oracle_corpus(std::uint64_t seed, int n) {
  dreward::testing::AnnotationGenerator gen(seed);
  Corpus c;
  for (int i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "vid_%04d", i);
    c.annotations.push_back(gen.next(id));
    c.captions.push_back(render_canonical(c.annotations.back()));
  }
  return c;
}

void write_corpus(const TempDir& dir, const Corpus& c) {
  save_annotations(dir / "ann.jsonl", c.annotations);
  std::vector<json> lines;
  for (std::size_t i = 0; i < c.captions.size(); ++i) {
    lines.push_back({{"video_id", c.annotations[i].video_id}, {"caption", c.captions[i]}});
  }
  write_jsonl(dir / "captions.jsonl", lines);
}

EvalConfig config_for(const TempDir& dir, std::size_t workers = 1) {
  EvalConfig cfg;
  cfg.annotations = dir / "ann.jsonl";
  cfg.captions = dir / "captions.jsonl";
  cfg.parser = ParserMode::Canonical;
  cfg.settings.workers = workers;
  return cfg;
}

const Aggregate& all_of(const EvalReport& r) { return r.aggregates.back(); }

std::string perfect_reply_for(const std::vector<VideoAnnotation>& anns, const std::string& body) {
  const std::string caption = dreward::testing::caption_from_body(body);
  for (const auto& a : anns) {
    if (render_canonical(a) == caption) return dreward::testing::perfect_judge_reply(a);
  }
  return "[]";
}

}  // namespace

TEST_CASE("oracle captions score perfectly") {
  TempDir dir("eval_oracle");
  write_corpus(dir, oracle_corpus(1, 40));
  auto cfg = config_for(dir);
  cfg.out_dir = dir / "out";
  const auto report = run_eval(cfg);
  REQUIRE(report.aggregates.size() == 3);
  for (const auto& a : report.aggregates) {
    CAPTURE(a.language);
    CHECK(a.acc_video_mean == 100.0);
    CHECK(a.acc_pooled == 100.0);
    CHECK(a.err_pooled == 0.0);
    CHECK(a.iou_pooled == 100.0);
    CHECK(a.rep == 0.0);
  }
  CHECK(std::filesystem::exists(dir / "out" / "report.jsonl"));
  CHECK(std::filesystem::exists(dir / "out" / "report.txt"));
  CHECK(load_parsed(dir / "out" / "parsed.jsonl").size() == 40);
}

TEST_CASE("replacing every speaker with Unknown only moves accuracy") {
  TempDir dir("eval_unknown");
  Corpus c = oracle_corpus(2, 30);
  write_corpus(dir, c);
  const auto base = all_of(run_eval(config_for(dir)));
  for (auto& a : c.annotations) {
    VideoAnnotation anon = a;
    for (auto& s : anon.sentences) s.speaker_id = "Unknown";
    c.captions[&a - &c.annotations[0]] = render_canonical(anon);
  }
  write_corpus(dir, c);
  const auto r = all_of(run_eval(config_for(dir)));
  CHECK(r.acc_video_mean == 0.0);
  CHECK(r.err_pooled == base.err_pooled);
  CHECK(r.iou_pooled == base.iou_pooled);
}

TEST_CASE("judge failures are excluded from aggregates and reported") {
  TempDir dir("eval_fail");
  const Corpus c = oracle_corpus(3, 10);
  write_corpus(dir, c);
  const std::string doomed = render_canonical(c.annotations[4]);
  auto fake = std::make_shared<dreward::testing::FakeTransport>([&](const std::string& body, int) {
    if (dreward::testing::caption_from_body(body) == doomed) {
      throw TransportError(JudgeErrorKind::Timeout, "read timed out");
    }
    return HttpResponse{200, dreward::testing::chat_completion(perfect_reply_for(c.annotations, body))};
  });
  auto cfg = config_for(dir, 4);
  cfg.parser = ParserMode::Judge;
  cfg.judge_transport = fake;
  cfg.out_dir = dir / "out";
  const auto report = run_eval(cfg);
  CHECK(report.failures() == 1);
  const auto& all = all_of(report);
  CHECK(all.videos == 10);
  CHECK(all.failed == 1);
  CHECK(all.scored == 9);
  CHECK(all.acc_video_mean == 100.0);
  CHECK(all.iou_pooled == 100.0);
  const auto& failed = report.videos[4];
  CHECK(failed.video_id == c.annotations[4].video_id);
  CHECK(failed.status == VideoStatus::Failed);
  CHECK(failed.error.find("timeout") != std::string::npos);
  CHECK(failed.error.find(failed.video_id) != std::string::npos);
  CHECK(dreward::testing::read_file(dir / "out" / "report.txt").find("failed videos") != std::string::npos);
  CHECK(report.judge_model == "gemini-2.5-flash");
}

TEST_CASE("pre-parsed mode reproduces canonical results") {
  TempDir dir("eval_preparsed");
  write_corpus(dir, oracle_corpus(4, 20));
  auto cfg = config_for(dir);
  cfg.out_dir = dir / "a";
  run_eval(cfg);
  EvalConfig pre;
  pre.annotations = dir / "ann.jsonl";
  pre.parsed = dir / "a" / "parsed.jsonl";
  pre.parser = ParserMode::PreParsed;
  pre.out_dir = dir / "b";
  run_eval(pre);
  // Video and aggregate lines agree; only the meta line names the parser.
  auto strip_meta = [](std::string s) { return s.substr(0, s.rfind("{\"judge_endpoint\"")); };
  CHECK(strip_meta(dreward::testing::read_file(dir / "a" / "report.jsonl")) ==
        strip_meta(dreward::testing::read_file(dir / "b" / "report.jsonl")));
}

TEST_CASE("determinism and parallel equals serial") {
  TempDir dir("eval_det");
  write_corpus(dir, oracle_corpus(5, 60));
  std::vector<std::string> outputs;
  for (std::size_t workers : {1u, 1u, 8u}) {
    auto cfg = config_for(dir, workers);
    cfg.out_dir = dir / ("out" + std::to_string(outputs.size()));
    run_eval(cfg);
    outputs.push_back(dreward::testing::read_file(cfg.out_dir / "report.jsonl") +
                      dreward::testing::read_file(cfg.out_dir / "report.txt") +
                      dreward::testing::read_file(cfg.out_dir / "parsed.jsonl"));
  }
  CHECK(outputs[0] == outputs[1]);
  CHECK(outputs[0] == outputs[2]);
}

TEST_CASE("aggregates can be recomputed from the persisted report") {
  TempDir dir("eval_closure");
  Corpus c = oracle_corpus(6, 40);
  dreward::testing::AnnotationGenerator gen(66);
  // Degrade some captions so the numbers are not trivial.
  for (std::size_t i = 0; i < c.annotations.size(); ++i) {
    VideoAnnotation noisy = c.annotations[i];
    for (auto& s : noisy.sentences) {
      if (gen.coin()) s.speaker_id = "Unknown";
      if (gen.coin()) s.interval = {s.interval.start + 0.5, s.interval.end + 1.5};
      if (gen.uniform(0, 3) == 0) {
        s.transcript = noisy.language == Language::English ? gen.english_sentence() : gen.chinese_sentence();
      }
    }
    c.captions[i] = render_canonical(noisy);
  }
  write_corpus(dir, c);
  auto cfg = config_for(dir, 3);
  cfg.out_dir = dir / "out";
  run_eval(cfg);

  std::vector<json> videos, aggs;
  for_each_jsonl(dir / "out" / "report.jsonl", [&](const json& j, std::size_t) {
    if (j["type"] == "video") videos.push_back(j);
    if (j["type"] == "aggregate") aggs.push_back(j);
  });
  for (const auto& agg : aggs) {
    const std::string lang = agg["language"];
    double acc = 0, err = 0, iou = 0, inter = 0, uni = 0;
    double correct = 0, total = 0, edits = 0, ref = 0, rep = 0, n = 0, seen = 0;
    for (const auto& v : videos) {
      if (lang != "all" && v["language"] != lang) continue;
      ++seen;
      if (v["repetitive"].get<bool>()) ++rep;
      if (v["status"] != "scored") continue;
      ++n;
      acc += v["accuracy"].get<double>();
      err += v["error_rate"].get<double>();
      iou += v["iou"].get<double>();
      edits += v["substitutions"].get<double>() + v["insertions"].get<double>() + v["deletions"].get<double>();
      ref += v["reference_tokens"].get<double>();
      for (const auto& d : v["detail"]) {
        correct += d["match"].get<bool>();
        ++total;
        inter += d["intersection"].get<double>();
        uni += d["union"].get<double>();
      }
    }
    CAPTURE(lang);
    CHECK(agg["acc_pct"].get<double>() == doctest::Approx(100 * acc / n).epsilon(1e-9));
    CHECK(agg["acc_pooled_pct"].get<double>() == doctest::Approx(100 * correct / total).epsilon(1e-9));
    CHECK(agg["err_pct"].get<double>() == doctest::Approx(100 * edits / ref).epsilon(1e-9));
    CHECK(agg["err_video_mean_pct"].get<double>() == doctest::Approx(100 * err / n).epsilon(1e-9));
    CHECK(agg["iou_pct"].get<double>() == doctest::Approx(100 * inter / uni).epsilon(1e-9));
    CHECK(agg["iou_video_mean_pct"].get<double>() == doctest::Approx(100 * iou / n).epsilon(1e-9));
    CHECK(agg["rep_pct"].get<double>() == doctest::Approx(100 * rep / seen).epsilon(1e-9));
  }
}

TEST_CASE("videos without dialogue are skipped and counted") {
  TempDir dir("eval_empty");
  Corpus c = oracle_corpus(7, 3);
  VideoAnnotation silent;
  silent.video_id = "silent";
  c.annotations.push_back(silent);
  c.captions.push_back("A quiet street at night.");
  write_corpus(dir, c);
  const auto r = run_eval(config_for(dir));
  CHECK(all_of(r).no_dialogue == 1);
  CHECK(all_of(r).scored == 3);
  CHECK(all_of(r).acc_video_mean == 100.0);
}

TEST_CASE("eval errors") {
  TempDir dir("eval_err");
  Corpus c = oracle_corpus(8, 2);
  write_corpus(dir, c);
  SUBCASE("nothing scorable") {
    auto fake = std::make_shared<dreward::testing::FakeTransport>([](const std::string&, int) -> HttpResponse {
      throw TransportError(JudgeErrorKind::Network, "down");
    });
    auto cfg = config_for(dir);
    cfg.parser = ParserMode::Judge;
    cfg.judge_transport = fake;
    CHECK_THROWS_AS(run_eval(cfg), Error);
  }
  SUBCASE("unknown video id") {
    write_jsonl(dir / "captions.jsonl", std::vector<json>{{{"video_id", "ghost"}, {"caption", "x"}}});
    CHECK_THROWS_AS(run_eval(config_for(dir)), Error);
  }
  SUBCASE("pre-parsed without a parsed path") {
    auto cfg = config_for(dir);
    cfg.parser = ParserMode::PreParsed;
    CHECK_THROWS_AS(run_eval(cfg), ValidationError);
  }
  SUBCASE("language filter") {
    auto cfg = config_for(dir);
    cfg.settings.lang = c.annotations[0].language == Language::English ? LanguageFilter::Chinese
                                                                       : LanguageFilter::English;
    const bool mixed = c.annotations[0].language != c.annotations[1].language;
    if (mixed) {
      CHECK(run_eval(cfg).videos.size() == 1);
    } else {
      CHECK_THROWS_AS(run_eval(cfg), Error);
    }
  }
}

TEST_CASE("reward scoring") {
  TempDir dir("rewards");
  Corpus c = oracle_corpus(9, 6);
  // One over-length caption: a long narration prefix pushes it past l_max.
  std::string padding;
  for (int i = 0; i < 4000; ++i) padding += "word ";
  c.captions[2] = padding + "\n" + c.captions[2];
  write_corpus(dir, c);
  auto cfg = config_for(dir);
  cfg.out_dir = dir / "out";
  auto at0 = run_reward_scoring(cfg, 0);
  for (std::size_t i = 0; i < at0.size(); ++i) {
    CAPTURE(i);
    CHECK(at0[i].breakdown.r_total == doctest::Approx(i == 2 ? 0.0 : 1.0).epsilon(1e-15));
  }
  CHECK(at0[2].breakdown.length_gated);
  auto at500 = run_reward_scoring(cfg, 500, true);
  CHECK(at500[0].breakdown.r_total == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(at500[2].breakdown.r_total == 0.0);
  std::size_t lines = 0;
  for_each_jsonl(cfg.out_dir / "rewards.jsonl", [&](const json&, std::size_t) { ++lines; });
  CHECK(lines == 12);

  // A caller-supplied token count takes precedence over the tokenizer.
  write_jsonl(dir / "captions.jsonl",
              std::vector<json>{{{"video_id", c.annotations[0].video_id},
                                 {"caption", render_canonical(c.annotations[0])},
                                 {"token_count", 5000}}});
  CHECK(run_reward_scoring(config_for(dir), 700)[0].breakdown.r_total == 0.0);
}

TEST_CASE("DPO mining from JSONL") {
  TempDir dir("mine");
  const std::string clean = "A rabbit officer writes a ticket while a fox watches from the car.";
  std::string loop;
  for (int i = 0; i < 5; ++i) loop += "the fox says hello to the rabbit and the rabbit says hello back. ";
  SUBCASE("pairs with both input shapes") {
    write_jsonl(dir / "s.jsonl",
                std::vector<json>{{{"input_id", "a"}, {"candidates", {clean, loop}}},
                                  {{"input_id", "b"}, {"caption", loop}},
                                  {{"input_id", "b"}, {"caption", clean}},
                                  {{"input_id", "c"}, {"candidates", {clean, clean}}}});
    CHECK(run_dpo_mining(dir / "s.jsonl", dir / "out" / "dpo_pairs.jsonl") == 2);
    std::vector<json> pairs;
    for_each_jsonl(dir / "out" / "dpo_pairs.jsonl", [&](const json& j, std::size_t) { pairs.push_back(j); });
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0]["input_id"] == "a");
    CHECK(pairs[1]["input_id"] == "b");
    CHECK(pairs[1]["win"] == clean);
    CHECK(pairs[1]["lose"] == loop);
  }
  SUBCASE("all clean") {
    write_jsonl(dir / "s.jsonl", std::vector<json>{{{"input_id", "a"}, {"candidates", {clean, clean}}}});
    CHECK(run_dpo_mining(dir / "s.jsonl", dir / "p.jsonl") == 0);
  }
  SUBCASE("three candidates is an error naming the input") {
    write_jsonl(dir / "s.jsonl", std::vector<json>{{{"input_id", "trip"}, {"candidates", {clean, clean, loop}}}});
    try {
      run_dpo_mining(dir / "s.jsonl", dir / "p.jsonl");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("trip") != std::string::npos);
    }
  }
}

TEST_CASE("TOML settings") {
  TempDir dir("toml");
  dreward::testing::write_file(dir / "c.toml", R"(
[reward]
lambda_speaker = 0.5
l_max = 100
k_warmup = 10

[repetition]
min_ngram = 8

[judge]
model = "judge-x"
timeout_s = 2.5
max_in_flight = 2

[eval]
workers = 3
lang = "zh"
)");
  const Settings s = load_settings(dir / "c.toml");
  CHECK(s.reward.lambda_speaker == 0.5);
  CHECK(s.reward.lambda_content == 0.1);
  CHECK(s.reward.l_max == 100);
  CHECK(s.reward.k_warmup == 10);
  CHECK(s.repetition.min_ngram == 8);
  CHECK(s.judge.model == "judge-x");
  CHECK(s.judge.timeout == std::chrono::milliseconds(2500));
  CHECK(s.judge.max_in_flight == 2);
  CHECK(s.workers == 3);
  CHECK(s.lang == LanguageFilter::Chinese);

  dreward::testing::write_file(dir / "bad1.toml", "[reward]\nlamda_speaker = 1.0\n");
  CHECK_THROWS_AS(load_settings(dir / "bad1.toml"), Error);
  dreward::testing::write_file(dir / "bad2.toml", "[rewards]\n");
  CHECK_THROWS_AS(load_settings(dir / "bad2.toml"), Error);
  dreward::testing::write_file(dir / "bad3.toml", "[eval]\nworkers = 0\n");
  CHECK_THROWS_AS(load_settings(dir / "bad3.toml"), ValidationError);
  dreward::testing::write_file(dir / "bad4.toml", "[judge\n");
  CHECK_THROWS_AS(load_settings(dir / "bad4.toml"), Error);

  Settings env;
  ::setenv("JUDGE_ENDPOINT", "http://localhost:9/x", 1);
  apply_environment(env);
  ::unsetenv("JUDGE_ENDPOINT");
  CHECK(env.judge.endpoint == "http://localhost:9/x");
}
