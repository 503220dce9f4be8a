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


#include "dreward/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "dreward/annotation.hpp"
#include "dreward/config.hpp"
#include "dreward/error.hpp"
#include "dreward/eval.hpp"
#include "dreward/io.hpp"

namespace dreward::cli {

namespace {

struct CommonFlags {
  std::string config;
  std::string out;
  std::size_t workers = 0;  // 0: keep config value
  std::string lang;
  std::string judge_endpoint;
  std::string judge_model;
};

struct InputFlags {
  std::string annotations;
  std::string captions;
  std::string parsed;
  std::string parser = "canonical";
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_out_required) {
  cmd->add_option("--config", f.config, "TOML config file")->check(CLI::ExistingFile);
  auto* out = cmd->add_option("--out", f.out, "Output directory");
  if (with_out_required) out->required();
  cmd->add_option("--workers", f.workers, "Parallel workers")->check(CLI::PositiveNumber);
  cmd->add_option("--lang", f.lang, "Language filter")->check(CLI::IsMember({"en", "zh", "all"}));
  cmd->add_option("--judge-endpoint", f.judge_endpoint, "Judge chat-completion URL");
  cmd->add_option("--judge-model", f.judge_model, "Judge model id");
}

void add_inputs(CLI::App* cmd, InputFlags& f, std::vector<std::string> modes) {
  cmd->add_option("--annotations", f.annotations, "Ground-truth JSONL")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--captions", f.captions, "Caption JSONL")->check(CLI::ExistingFile);
  cmd->add_option("--parsed", f.parsed, "ParsedCaption JSONL (pre-parsed mode)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--parser", f.parser, "Caption parser")
      ->check(CLI::IsMember(std::move(modes)))
      ->capture_default_str();
}

// Flags > environment > config file > defaults.
Settings resolve_settings(const CommonFlags& f) {
  Settings s = f.config.empty() ? Settings{} : load_settings(f.config);
  apply_environment(s);
  if (f.workers > 0) s.workers = f.workers;
  if (!f.lang.empty()) s.lang = *parse_language_filter(f.lang);
  if (!f.judge_endpoint.empty()) s.judge.endpoint = f.judge_endpoint;
  if (!f.judge_model.empty()) s.judge.model = f.judge_model;
  return s;
}

EvalConfig make_eval_config(const CommonFlags& c, const InputFlags& in) {
  EvalConfig cfg;
  cfg.annotations = in.annotations;
  cfg.captions = in.captions;
  cfg.parsed = in.parsed;
  cfg.parser = *parse_parser_mode(in.parser);
  cfg.settings = resolve_settings(c);
  cfg.out_dir = c.out;
  return cfg;
}

std::vector<char*> make_argv(std::vector<std::string>& storage) {
  std::vector<char*> argv;
  argv.reserve(storage.size() + 1);
  for (auto& s : storage) argv.push_back(s.data());
  argv.push_back(nullptr);
  return argv;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dialogue-centric caption rewards and evaluation", "dreward"};
  app.require_subcommand(1);

  CommonFlags eval_common, parse_common, score_common, mine_common;
  InputFlags eval_in, parse_in, score_in;

  auto* eval = app.add_subcommand("eval", "Score captions and write a corpus report");
  add_inputs(eval, eval_in, {"judge", "canonical", "pre-parsed"});
  add_common(eval, eval_common, false);

  auto* parse = app.add_subcommand("parse", "Parse captions and persist ParsedCaption JSONL");
  parse_in.parser = "judge";
  add_inputs(parse, parse_in, {"judge", "canonical"});
  add_common(parse, parse_common, true);

  std::size_t step = 0;
  bool append = false;
  auto* score = app.add_subcommand("score-rewards", "Per-caption rewards at a curriculum step");
  add_inputs(score, score_in, {"judge", "canonical", "pre-parsed"});
  add_common(score, score_common, true);
  score->add_option("--step", step, "Training step k")->required();
  score->add_flag("--append", append, "Append to an existing rewards.jsonl");

  std::string samples;
  auto* mine = app.add_subcommand("mine-dpo", "Mine complete-vs-repetitive preference pairs");
  mine->add_option("--samples", samples, "Candidate JSONL")->required()->check(CLI::ExistingFile);
  add_common(mine, mine_common, true);

  std::string validate_annotations, validate_parsed_path;
  auto* validate = app.add_subcommand("validate", "Check annotation and parsed JSONL files");
  validate->add_option("--annotations", validate_annotations)->check(CLI::ExistingFile);
  validate->add_option("--parsed", validate_parsed_path)->check(CLI::ExistingFile);

  std::vector<std::string> storage{"dreward"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv = make_argv(storage);
  try {
    app.parse(static_cast<int>(storage.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (eval->parsed()) {
      const EvalReport report = run_eval(make_eval_config(eval_common, eval_in));
      out << format_report_table(report);
      return 0;
    }
    if (parse->parsed()) {
      std::vector<VideoRecord> failures;
      const auto parses = run_parse(make_eval_config(parse_common, parse_in), &failures);
      out << "parsed " << parses.size() << " caption(s)\n";
      for (const auto& f : failures) err << "failed " << f.video_id << ": " << f.error << "\n";
      return failures.empty() ? 0 : 1;
    }
    if (score->parsed()) {
      const auto records = run_reward_scoring(make_eval_config(score_common, score_in), step, append);
      std::size_t scored = 0;
      for (const auto& r : records) scored += r.status == VideoStatus::Scored;
      out << "scored " << scored << " of " << records.size() << " caption(s) at step " << step << "\n";
      return 0;
    }
    if (mine->parsed()) {
      const Settings s = resolve_settings(mine_common);
      const std::size_t kept =
          run_dpo_mining(samples, std::filesystem::path(mine_common.out) / "dpo_pairs.jsonl", s);
      out << "retained " << kept << " pair(s)\n";
      return 0;
    }
    if (validate->parsed()) {
      if (validate_annotations.empty() && validate_parsed_path.empty()) {
        err << "error: validate needs --annotations and/or --parsed\n";
        return 2;
      }
      std::vector<VideoAnnotation> anns;
      if (!validate_annotations.empty()) {
        anns = load_annotations(validate_annotations);
        out << validate_annotations << ": " << anns.size() << " annotation(s) OK\n";
      }
      if (!validate_parsed_path.empty()) {
        const auto parsed = load_parsed(validate_parsed_path);
        std::size_t bad = 0;
        for (const auto& p : parsed) {
          const auto it = std::find_if(anns.begin(), anns.end(),
                                       [&](const auto& a) { return a.video_id == p.video_id; });
          if (it == anns.end()) continue;
          for (const auto& v : validate_parsed(p, *it)) {
            err << p.video_id << ": " << v << "\n";
            ++bad;
          }
        }
        out << validate_parsed_path << ": " << parsed.size() << " parsed caption(s), " << bad
            << " cross-check violation(s)\n";
        return bad == 0 ? 0 : 1;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace dreward::cli
