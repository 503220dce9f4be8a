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


#include "dreward/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <thread>

#include "dreward/caption_parser.hpp"
#include "dreward/error.hpp"
#include "dreward/io.hpp"
#include "dreward/speaker_metrics.hpp"
#include "dreward/temporal_metrics.hpp"
#include "dreward/text_metrics.hpp"

namespace dreward {

std::optional<ParserMode> parse_parser_mode(std::string_view text) {
  if (text == "judge") return ParserMode::Judge;
  if (text == "canonical") return ParserMode::Canonical;
  if (text == "pre-parsed") return ParserMode::PreParsed;
  return std::nullopt;
}

std::string_view to_string(ParserMode mode) {
  switch (mode) {
    case ParserMode::Judge: return "judge";
    case ParserMode::Canonical: return "canonical";
    case ParserMode::PreParsed: break;
  }
  return "pre-parsed";
}

std::string_view to_string(VideoStatus status) {
  switch (status) {
    case VideoStatus::Scored: return "scored";
    case VideoStatus::NoDialogue: return "no_dialogue";
    case VideoStatus::Failed: break;
  }
  return "failed";
}

std::vector<CaptionInput> load_captions(const std::filesystem::path& path) {
  std::vector<CaptionInput> out;
  for_each_jsonl(path, [&](const json& j, std::size_t) {
    if (!j.is_object()) throw Error("record is not a JSON object");
    CaptionInput c;
    if (!j.contains("video_id") || !j["video_id"].is_string()) {
      throw Error("missing string field \"video_id\"");
    }
    if (!j.contains("caption") || !j["caption"].is_string()) {
      throw Error("missing string field \"caption\"");
    }
    c.video_id = j["video_id"].get<std::string>();
    c.caption = j["caption"].get<std::string>();
    if (j.contains("token_count") && !j["token_count"].is_null()) {
      const json& t = j["token_count"];
      if (!t.is_number_integer() || t.get<long long>() < 0) {
        throw Error("field \"token_count\" must be a non-negative integer");
      }
      c.token_count = t.get<std::size_t>();
    }
    out.push_back(std::move(c));
  });
  return out;
}

std::vector<std::string> EvalConfig::validate() const {
  std::vector<std::string> out;
  if (annotations.empty()) out.emplace_back("annotations: path required");
  if (parser == ParserMode::PreParsed) {
    if (parsed.empty()) out.emplace_back("parsed: pre-parsed mode requires a ParsedCaption JSONL path");
  } else if (captions.empty()) {
    out.emplace_back("captions: path required");
  }
  if (settings.workers < 1) out.emplace_back("workers: must be >= 1");
  if (!tokenizer) out.emplace_back("tokenizer: missing");
  for (auto& p : settings.reward.validate()) out.push_back(std::move(p));
  for (auto& p : settings.repetition.validate()) out.push_back(std::move(p));
  if (parser == ParserMode::Judge) {
    for (auto& p : settings.judge.validate()) out.push_back(std::move(p));
  }
  return out;
}

std::size_t EvalReport::failures() const {
  return static_cast<std::size_t>(std::count_if(videos.begin(), videos.end(), [](const auto& v) {
    return v.status == VideoStatus::Failed;
  }));
}

namespace {

struct WorkItem {
  const VideoAnnotation* annotation = nullptr;
  std::string caption;
  std::optional<std::size_t> token_count;
  std::optional<ParsedCaption> preparsed;
};

struct Workload {
  std::vector<VideoAnnotation> annotations;
  std::vector<WorkItem> items;  // sorted by video_id
};

Workload prepare(const EvalConfig& cfg) {
  if (auto problems = cfg.validate(); !problems.empty()) {
    throw ValidationError("eval config", std::move(problems));
  }
  Workload w;
  w.annotations = load_annotations(cfg.annotations);
  std::map<std::string, const VideoAnnotation*> by_id;
  for (const auto& a : w.annotations) {
    if (!by_id.emplace(a.video_id, &a).second) {
      throw Error("duplicate annotation for video \"" + a.video_id + "\"");
    }
  }
  auto lookup = [&](const std::string& id) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw Error("no annotation for video \"" + id + "\"");
    return it->second;
  };

  std::map<std::string, WorkItem> items;
  if (cfg.parser == ParserMode::PreParsed) {
    for (auto& p : load_parsed(cfg.parsed)) {
      WorkItem item;
      item.annotation = lookup(p.video_id);
      item.caption = p.raw_caption;
      item.token_count = p.token_count;
      const std::string id = p.video_id;
      item.preparsed = std::move(p);
      if (!items.emplace(id, std::move(item)).second) {
        throw Error("duplicate parsed caption for video \"" + id + "\"");
      }
    }
    if (!cfg.captions.empty()) {
      for (auto& c : load_captions(cfg.captions)) {
        const auto it = items.find(c.video_id);
        if (it == items.end()) continue;
        it->second.caption = std::move(c.caption);
        if (c.token_count) it->second.token_count = c.token_count;
      }
    }
  } else {
    for (auto& c : load_captions(cfg.captions)) {
      WorkItem item;
      item.annotation = lookup(c.video_id);
      item.caption = std::move(c.caption);
      item.token_count = c.token_count;
      if (!items.emplace(c.video_id, std::move(item)).second) {
        throw Error("duplicate caption for video \"" + c.video_id + "\"");
      }
    }
  }
  for (auto& [id, item] : items) {
    if (accepts(cfg.settings.lang, item.annotation->language)) w.items.push_back(std::move(item));
  }
  return w;
}

template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

std::unique_ptr<JudgeClient> make_judge(const EvalConfig& cfg) {
  if (cfg.parser != ParserMode::Judge) return nullptr;
  if (cfg.judge_transport) {
    const char* key = std::getenv("JUDGE_API_KEY");
    return std::make_unique<JudgeClient>(cfg.settings.judge, cfg.judge_transport,
                                         key != nullptr ? key : "");
  }
  return JudgeClient::from_environment(cfg.settings.judge);
}

struct ParseOutcome {
  ParsedCaption parsed;
  std::vector<std::string> warnings;
};

ParseOutcome parse_item(const WorkItem& item, const EvalConfig& cfg, JudgeClient* judge) {
  const VideoAnnotation& ann = *item.annotation;
  ParseOutcome out;
  switch (cfg.parser) {
    case ParserMode::Canonical:
      out.parsed = parse_canonical(item.caption, ann, *cfg.tokenizer);
      break;
    case ParserMode::Judge:
      if (ann.size() == 0) {
        out.parsed.video_id = ann.video_id;
        out.parsed.raw_caption = item.caption;
        out.parsed.token_count = cfg.tokenizer->count(item.caption);
      } else {
        JudgeResult r = judge->call(JudgeRequest::from_annotation(ann, item.caption), *cfg.tokenizer);
        out.parsed = std::move(r.parsed);
        out.warnings = std::move(r.warnings);
      }
      break;
    case ParserMode::PreParsed:
      out.parsed = *item.preparsed;
      break;
  }
  if (item.token_count) out.parsed.token_count = *item.token_count;
  if (auto v = validate_parsed(out.parsed, ann); !v.empty()) {
    throw ValidationError("parsed caption for \"" + ann.video_id + "\"", std::move(v));
  }
  return out;
}

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Known: return "known";
    case Provenance::ProjectedFromStart: return "projected_from_start";
    case Provenance::ProjectedFromEnd: return "projected_from_end";
    case Provenance::BilateralUnknown: break;
  }
  return "bilateral_unknown";
}

VideoRecord score_item(const WorkItem& item, const ParsedCaption& parsed) {
  const VideoAnnotation& ann = *item.annotation;
  VideoRecord r;
  r.video_id = ann.video_id;
  r.language = ann.language;
  r.sentences = ann.size();
  r.token_count = parsed.token_count;
  if (ann.size() == 0) {
    r.status = VideoStatus::NoDialogue;
    return r;
  }
  const SpeakerScore sp = speaker_reward(ann, parsed);
  const ContentScore ct = content_score(ann, parsed);
  const TemporalScore tm = temporal_reward(ann, parsed);
  r.correct = sp.correct;
  r.accuracy = sp.accuracy;
  r.substitutions = ct.alignment.substitutions;
  r.insertions = ct.alignment.insertions;
  r.deletions = ct.alignment.deletions;
  r.reference_tokens = ct.alignment.reference_length;
  r.error_rate = ct.error_rate;
  r.content_reward = ct.reward;
  r.intersection = tm.total_intersection;
  r.union_ = tm.total_union;
  r.iou = tm.global_iou;
  for (std::size_t i = 0; i < ann.size(); ++i) {
    const auto& s = sp.per_sentence[i];
    const auto& t = tm.per_sentence[i];
    r.detail.push_back({s.index, s.gt_id, s.predicted_id, s.match, t.intersection, t.union_,
                        std::string(provenance_name(t.provenance))});
  }
  return r;
}

struct ItemResult {
  VideoRecord record;
  std::optional<ParsedCaption> parsed;
};

std::vector<ItemResult> process(const Workload& w, const EvalConfig& cfg) {
  std::unique_ptr<JudgeClient> judge = make_judge(cfg);
  std::vector<ItemResult> results(w.items.size());
  parallel_for(w.items.size(), cfg.settings.workers, [&](std::size_t i) {
    const WorkItem& item = w.items[i];
    ItemResult& out = results[i];
    const bool repetitive =
        detect_repetition(item.caption, *cfg.tokenizer, cfg.settings.repetition).repetitive();
    try {
      ParseOutcome p = parse_item(item, cfg, judge.get());
      out.record = score_item(item, p.parsed);
      out.record.warnings = std::move(p.warnings);
      out.parsed = std::move(p.parsed);
    } catch (const std::exception& e) {
      out.record = VideoRecord{};
      out.record.video_id = item.annotation->video_id;
      out.record.language = item.annotation->language;
      out.record.sentences = item.annotation->size();
      out.record.status = VideoStatus::Failed;
      out.record.error = e.what();
      out.record.token_count =
          item.token_count.value_or(cfg.tokenizer->count(item.caption));
    }
    out.record.repetitive = repetitive;
  });
  return results;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fixed(double v, int decimals) {
  if (std::isnan(v)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

json meta_json(const EvalReport& report) {
  return {{"type", "meta"},
          {"parser", report.parser_mode},
          {"judge_endpoint", report.judge_endpoint.empty() ? json(nullptr) : json(report.judge_endpoint)},
          {"judge_model", report.judge_model.empty() ? json(nullptr) : json(report.judge_model)}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

}  // namespace

Aggregate aggregate(std::span<const VideoRecord> records, LanguageFilter subset) {
  Aggregate a;
  a.language = std::string(to_string(subset));
  double acc_sum = 0.0, err_sum = 0.0, iou_sum = 0.0, inter = 0.0, uni = 0.0;
  std::size_t correct = 0, sentences = 0, edits = 0, ref_tokens = 0, rep = 0, rep_total = 0;
  for (const auto& r : records) {
    if (!accepts(subset, r.language)) continue;
    ++a.videos;
    if (r.status == VideoStatus::Failed) {
      ++a.failed;
      continue;
    }
    ++rep_total;
    if (r.repetitive) ++rep;
    if (r.status == VideoStatus::NoDialogue) {
      ++a.no_dialogue;
      continue;
    }
    ++a.scored;
    acc_sum += r.accuracy;
    err_sum += r.error_rate;
    iou_sum += r.iou;
    correct += r.correct;
    sentences += r.sentences;
    edits += r.edits();
    ref_tokens += r.reference_tokens;
    inter += r.intersection;
    uni += r.union_;
  }
  const auto n = static_cast<double>(a.scored);
  a.acc_video_mean = a.scored ? 100.0 * acc_sum / n : kNaN;
  a.acc_pooled = sentences ? 100.0 * static_cast<double>(correct) / static_cast<double>(sentences) : kNaN;
  a.err_video_mean = a.scored ? 100.0 * err_sum / n : kNaN;
  a.err_pooled = ref_tokens ? 100.0 * static_cast<double>(edits) / static_cast<double>(ref_tokens) : kNaN;
  a.iou_video_mean = a.scored ? 100.0 * iou_sum / n : kNaN;
  a.iou_pooled = a.scored ? (uni > 0.0 ? 100.0 * inter / uni : 0.0) : kNaN;
  a.rep = rep_total ? 100.0 * static_cast<double>(rep) / static_cast<double>(rep_total) : kNaN;
  return a;
}

json to_json(const VideoRecord& r) {
  json detail = json::array();
  for (const auto& d : r.detail) {
    detail.push_back({{"index", d.index},
                      {"gt_speaker", d.gt_speaker},
                      {"predicted_speaker", d.predicted_speaker},
                      {"match", d.match},
                      {"intersection", d.intersection},
                      {"union", d.union_},
                      {"provenance", d.provenance}});
  }
  json j = {{"type", "video"},
            {"video_id", r.video_id},
            {"language", std::string(language_code(r.language))},
            {"status", std::string(to_string(r.status))},
            {"sentences", r.sentences},
            {"token_count", r.token_count},
            {"repetitive", r.repetitive}};
  if (r.status == VideoStatus::Failed) j["error"] = r.error;
  if (r.status == VideoStatus::Scored) {
    j["correct"] = r.correct;
    j["accuracy"] = r.accuracy;
    j["substitutions"] = r.substitutions;
    j["insertions"] = r.insertions;
    j["deletions"] = r.deletions;
    j["reference_tokens"] = r.reference_tokens;
    j["error_rate"] = r.error_rate;
    j["content_reward"] = r.content_reward;
    j["intersection"] = r.intersection;
    j["union"] = r.union_;
    j["iou"] = r.iou;
    j["detail"] = detail;
  }
  if (!r.warnings.empty()) j["warnings"] = r.warnings;
  return j;
}

json to_json(const Aggregate& a) {
  return {{"type", "aggregate"},
          {"language", a.language},
          {"videos", a.videos},
          {"scored", a.scored},
          {"no_dialogue", a.no_dialogue},
          {"failed", a.failed},
          {"acc_pct", a.acc_video_mean},
          {"acc_pooled_pct", a.acc_pooled},
          {"err_pct", a.err_pooled},
          {"err_video_mean_pct", a.err_video_mean},
          {"iou_pct", a.iou_pooled},
          {"iou_video_mean_pct", a.iou_video_mean},
          {"rep_pct", a.rep}};
}

json to_json(const RewardRecord& r) {
  json j = {{"video_id", r.video_id},
            {"status", std::string(to_string(r.status))},
            {"step", r.breakdown.step},
            {"token_count", r.breakdown.token_count}};
  if (r.status == VideoStatus::Scored) {
    j["r_speaker"] = r.breakdown.r_speaker;
    j["r_content"] = r.breakdown.r_content;
    j["r_time"] = r.breakdown.r_time;
    j["r_total"] = r.breakdown.r_total;
    j["length_gated"] = r.breakdown.length_gated;
    j["time_term_active"] = r.breakdown.time_term_active;
  }
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

std::string format_report_table(const EvalReport& report) {
  std::string out;
  char line[256];
  out += "parser: " + report.parser_mode + "\n";
  out += "judge:  " + (report.judge_model.empty() ? std::string("-") : report.judge_model) + "\n\n";
  std::snprintf(line, sizeof line, "%-4s %7s %7s %7s %7s | %7s %7s | %9s %9s | %7s %7s | %6s\n",
                "lang", "videos", "scored", "empty", "failed", "Acc%", "(pool)", "WER/CER%",
                "(v-mean)", "IoU%", "(v-mean)", "Rep%");
  out += line;
  for (const auto& a : report.aggregates) {
    std::snprintf(line, sizeof line, "%-4s %7zu %7zu %7zu %7zu | %7s %7s | %9s %9s | %7s %7s | %6s\n",
                  a.language.c_str(), a.videos, a.scored, a.no_dialogue, a.failed,
                  fixed(a.acc_video_mean, 1).c_str(), fixed(a.acc_pooled, 1).c_str(),
                  fixed(a.err_pooled, 2).c_str(), fixed(a.err_video_mean, 2).c_str(),
                  fixed(a.iou_pooled, 1).c_str(), fixed(a.iou_video_mean, 1).c_str(),
                  fixed(a.rep, 1).c_str());
    out += line;
  }
  if (report.failures() > 0) {
    out += "\nfailed videos:\n";
    for (const auto& v : report.videos) {
      if (v.status == VideoStatus::Failed) out += "  " + v.video_id + ": " + v.error + "\n";
    }
  }
  return out;
}

EvalReport run_eval(const EvalConfig& cfg) {
  const Workload w = prepare(cfg);
  std::vector<ItemResult> results = process(w, cfg);

  EvalReport report;
  report.parser_mode = std::string(to_string(cfg.parser));
  if (cfg.parser == ParserMode::Judge) {
    report.judge_endpoint = cfg.settings.judge.endpoint;
    report.judge_model = cfg.settings.judge.model;
  }
  std::vector<ParsedCaption> parses;
  for (auto& r : results) {
    report.videos.push_back(std::move(r.record));
    if (r.parsed) parses.push_back(std::move(*r.parsed));
  }
  const bool any_scored = std::any_of(report.videos.begin(), report.videos.end(), [](const auto& v) {
    return v.status == VideoStatus::Scored;
  });
  if (!any_scored) throw Error("no video could be scored");

  bool has_en = false, has_zh = false;
  for (const auto& v : report.videos) {
    (v.language == Language::English ? has_en : has_zh) = true;
  }
  if (has_en) report.aggregates.push_back(aggregate(report.videos, LanguageFilter::English));
  if (has_zh) report.aggregates.push_back(aggregate(report.videos, LanguageFilter::Chinese));
  report.aggregates.push_back(aggregate(report.videos, LanguageFilter::All));

  if (!cfg.out_dir.empty()) {
    std::vector<json> lines;
    for (const auto& v : report.videos) lines.push_back(to_json(v));
    for (const auto& a : report.aggregates) lines.push_back(to_json(a));
    lines.push_back(meta_json(report));
    write_jsonl(cfg.out_dir / "report.jsonl", lines);
    write_text(cfg.out_dir / "report.txt", format_report_table(report));
    save_parsed(cfg.out_dir / "parsed.jsonl", parses);
  }
  return report;
}

std::vector<ParsedCaption> run_parse(const EvalConfig& cfg, std::vector<VideoRecord>* failures) {
  const Workload w = prepare(cfg);
  std::unique_ptr<JudgeClient> judge = make_judge(cfg);
  std::vector<std::optional<ParsedCaption>> parsed(w.items.size());
  std::vector<std::optional<VideoRecord>> failed(w.items.size());
  parallel_for(w.items.size(), cfg.settings.workers, [&](std::size_t i) {
    try {
      parsed[i] = parse_item(w.items[i], cfg, judge.get()).parsed;
    } catch (const std::exception& e) {
      VideoRecord r;
      r.video_id = w.items[i].annotation->video_id;
      r.language = w.items[i].annotation->language;
      r.status = VideoStatus::Failed;
      r.error = e.what();
      failed[i] = std::move(r);
    }
  });
  std::vector<ParsedCaption> out;
  for (std::size_t i = 0; i < w.items.size(); ++i) {
    if (parsed[i]) out.push_back(std::move(*parsed[i]));
    if (failed[i] && failures != nullptr) failures->push_back(std::move(*failed[i]));
  }
  if (!cfg.out_dir.empty()) save_parsed(cfg.out_dir / "parsed.jsonl", out);
  return out;
}

std::vector<RewardRecord> run_reward_scoring(const EvalConfig& cfg, std::size_t step, bool append) {
  const Workload w = prepare(cfg);
  std::vector<ItemResult> results = process(w, cfg);
  std::vector<RewardRecord> out;
  out.reserve(results.size());
  for (const auto& r : results) {
    RewardRecord rec;
    rec.video_id = r.record.video_id;
    rec.status = r.record.status;
    rec.error = r.record.error;
    rec.breakdown.step = step;
    rec.breakdown.token_count = r.record.token_count;
    if (r.record.status == VideoStatus::Scored) {
      rec.breakdown = total_reward({r.record.accuracy, r.record.content_reward, r.record.iou},
                                   r.record.token_count, step, cfg.settings.reward);
    }
    out.push_back(std::move(rec));
  }
  if (!cfg.out_dir.empty()) {
    std::vector<json> lines;
    for (const auto& r : out) lines.push_back(to_json(r));
    write_jsonl(cfg.out_dir / "rewards.jsonl", lines, append);
  }
  return out;
}

std::size_t run_dpo_mining(const std::filesystem::path& samples, const std::filesystem::path& output,
                           const Settings& settings, const Tokenizer& tokenizer) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::string>> candidates;
  for_each_jsonl(samples, [&](const json& j, std::size_t) {
    if (!j.is_object() || !j.contains("input_id") || !j["input_id"].is_string()) {
      throw Error("missing string field \"input_id\"");
    }
    const std::string id = j["input_id"].get<std::string>();
    auto [it, inserted] = candidates.try_emplace(id);
    if (inserted) order.push_back(id);
    if (j.contains("candidates")) {
      if (!j["candidates"].is_array()) throw Error("field \"candidates\" must be an array");
      for (const auto& c : j["candidates"]) {
        if (!c.is_string()) throw Error("candidates must be strings");
        it->second.push_back(c.get<std::string>());
      }
    } else if (j.contains("caption") && j["caption"].is_string()) {
      it->second.push_back(j["caption"].get<std::string>());
    } else {
      throw Error("record needs \"candidates\" or \"caption\"");
    }
  });

  std::vector<DpoSample> batch;
  batch.reserve(order.size());
  for (const auto& id : order) {
    auto& c = candidates[id];
    if (c.size() != 2) {
      throw Error("input \"" + id + "\" has " + std::to_string(c.size()) +
                  " candidates; exactly 2 are required");
    }
    batch.push_back({id, std::move(c[0]), std::move(c[1])});
  }
  const std::vector<DpoPair> pairs =
      mine_dpo_pairs(batch, tokenizer, settings.repetition, settings.reward.l_max);
  std::vector<json> lines;
  lines.reserve(pairs.size());
  for (const auto& p : pairs) lines.push_back({{"input_id", p.input_id}, {"win", p.win}, {"lose", p.lose}});
  write_jsonl(output, lines);
  return pairs.size();
}

}  // namespace dreward
