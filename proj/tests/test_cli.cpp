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

#include <cstdlib>
#include <sstream>

#include "dreward/caption_parser.hpp"
#include "dreward/cli.hpp"
#include "dreward/io.hpp"
#include "test_support.hpp"

using namespace dreward;
using dreward::testing::TempDir;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

void write_small_corpus(const TempDir& dir) {
  dreward::testing::AnnotationGenerator gen(101);
  std::vector<VideoAnnotation> anns;
  std::vector<json> caps;
  for (int i = 0; i < 5; ++i) {
    anns.push_back(gen.next("clip_" + std::to_string(i)));
    caps.push_back({{"video_id", anns.back().video_id}, {"caption", render_canonical(anns.back())}});
  }
  save_annotations(dir / "ann.jsonl", anns);
  write_jsonl(dir / "cap.jsonl", caps);
}

}  // namespace

TEST_CASE("cli eval writes the report and prints the table") {
  TempDir dir("cli_eval");
  write_small_corpus(dir);
  const auto r = run({"eval", "--annotations", (dir / "ann.jsonl").string(), "--captions",
                      (dir / "cap.jsonl").string(), "--parser", "canonical", "--out",
                      (dir / "out").string(), "--workers", "2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("Acc%") != std::string::npos);
  CHECK(r.out.find("100.0") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "out" / "report.jsonl"));
}

TEST_CASE("cli usage errors exit with 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"eval"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"eval", "--annotations", "/nonexistent.jsonl", "--captions", "/x"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("cli validate") {
  TempDir dir("cli_validate");
  write_small_corpus(dir);
  auto r = run({"validate", "--annotations", (dir / "ann.jsonl").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("5 annotation(s) OK") != std::string::npos);
  dreward::testing::write_file(dir / "broken.jsonl", "{\"video_id\": \n");
  r = run({"validate", "--annotations", (dir / "broken.jsonl").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find(":1:") != std::string::npos);
}

TEST_CASE("cli parse, then eval pre-parsed") {
  TempDir dir("cli_parse");
  write_small_corpus(dir);
  auto r = run({"parse", "--parser", "canonical", "--annotations", (dir / "ann.jsonl").string(),
                "--captions", (dir / "cap.jsonl").string(), "--out", (dir / "p").string()});
  CHECK(r.code == 0);
  r = run({"eval", "--parser", "pre-parsed", "--annotations", (dir / "ann.jsonl").string(),
           "--parsed", (dir / "p" / "parsed.jsonl").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("pre-parsed") != std::string::npos);
}

TEST_CASE("cli score-rewards and mine-dpo") {
  TempDir dir("cli_score");
  write_small_corpus(dir);
  auto r = run({"score-rewards", "--annotations", (dir / "ann.jsonl").string(), "--captions",
                (dir / "cap.jsonl").string(), "--out", (dir / "o").string(), "--step", "600"});
  CHECK(r.code == 0);
  CHECK(r.out.find("scored 5 of 5") != std::string::npos);
  std::vector<json> lines;
  for_each_jsonl(dir / "o" / "rewards.jsonl", [&](const json& j, std::size_t) { lines.push_back(j); });
  REQUIRE(lines.size() == 5);
  CHECK(lines[0]["r_total"].get<double>() == doctest::Approx(1.1));

  write_jsonl(dir / "s.jsonl", std::vector<json>{{{"input_id", "x"}, {"candidates", {"a b c", "d e f"}}}});
  r = run({"mine-dpo", "--samples", (dir / "s.jsonl").string(), "--out", (dir / "o").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("retained 0") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "o" / "dpo_pairs.jsonl"));
}

TEST_CASE("cli flags override the config file") {
  TempDir dir("cli_prec");
  write_small_corpus(dir);
  dreward::testing::write_file(dir / "c.toml", "[reward]\nk_warmup = 10\n[eval]\nlang = \"en\"\n");
  auto r = run({"score-rewards", "--annotations", (dir / "ann.jsonl").string(), "--captions",
                (dir / "cap.jsonl").string(), "--out", (dir / "o").string(), "--step", "20",
                "--config", (dir / "c.toml").string(), "--lang", "all"});
  CHECK(r.code == 0);
  std::vector<json> lines;
  for_each_jsonl(dir / "o" / "rewards.jsonl", [&](const json& j, std::size_t) { lines.push_back(j); });
  CHECK(lines.size() == 5);  // --lang all beat the file's en
  CHECK(lines[0]["time_term_active"] == true);  // k_warmup from the file applied
}

TEST_CASE("judge mode without credentials fails cleanly") {
  TempDir dir("cli_judge");
  write_small_corpus(dir);
  ::unsetenv("JUDGE_API_KEY");
  const auto r = run({"eval", "--parser", "judge", "--annotations", (dir / "ann.jsonl").string(),
                      "--captions", (dir / "cap.jsonl").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("JUDGE_API_KEY") != std::string::npos);
}
