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


#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "dreward/judge.hpp"

#include <httplib.h>

#include <cstdlib>
#include <map>
#include <json.hpp>
#include <regex>
#include <set>
#include <sstream>

#include "dreward/unicode.hpp"

namespace dreward {

using json = nlohmann::json;

JudgeRequest JudgeRequest::from_annotation(const VideoAnnotation& annotation, std::string caption) {
  JudgeRequest req;
  req.request_id = annotation.video_id;
  req.caption = std::move(caption);
  req.language = annotation.language;
  for (const auto& s : annotation.sentences) req.references.push_back({s.index, s.transcript});
  for (const auto& c : annotation.characters) {
    if (canonical_id(c.id) != kUnknownSpeaker) req.candidates.push_back(c);
  }
  req.candidates.push_back({std::string(kUnknownSpeaker), ""});
  return req;
}

std::vector<std::string> JudgeRequest::validate() const {
  std::vector<std::string> out;
  if (references.empty()) out.emplace_back("references: empty");
  std::size_t unknowns = 0;
  for (const auto& c : candidates) {
    if (canonical_id(c.id) == kUnknownSpeaker) ++unknowns;
  }
  if (unknowns != 1) out.emplace_back("candidates: must contain \"Unknown\" exactly once");
  return out;
}

std::vector<std::string> JudgeBackend::validate() const {
  std::vector<std::string> out;
  if (endpoint.empty()) out.emplace_back("judge.endpoint: empty");
  if (model.empty()) out.emplace_back("judge.model: empty");
  if (timeout.count() <= 0) out.emplace_back("judge.timeout: must be positive");
  if (max_retries < 0) out.emplace_back("judge.max_retries: must be >= 0");
  if (max_in_flight < 1) out.emplace_back("judge.max_in_flight: must be >= 1");
  return out;
}

std::string_view to_string(JudgeErrorKind kind) {
  switch (kind) {
    case JudgeErrorKind::Timeout: return "timeout";
    case JudgeErrorKind::Network: return "network";
    case JudgeErrorKind::HttpStatus: return "http-status";
    case JudgeErrorKind::Schema: return "schema";
    case JudgeErrorKind::Credentials: return "credentials";
  }
  return "unknown";
}

// Prompt ----------------------------------------------------------------------

namespace {

struct PromptText {
  const char* intro;
  const char* fields;
  const char* rules_header;
  const char* rule_none;
  const char* rule_point;
  const char* rule_block;
  const char* rule_no_invent;
  const char* candidates_header;
  const char* unknown_note;
  const char* references_header;
  const char* caption_header;
  const char* output_header;
  const char* output_only;
};

constexpr PromptText kEnglish{
    "You are given a generated caption of a video and the reference list of sentences "
    "spoken in that video. For every reference sentence, find where the caption reports it "
    "and extract who says it, what the caption says was said, and when.",
    "Fields for each reference sentence:\n"
    "- \"speaker\": who says it, copied verbatim from the candidate list. Use \"Unknown\" "
    "when the caption does not name the speaker or names someone who is not on the list.\n"
    "- \"transcript\": the words the caption attributes to this sentence, copied verbatim "
    "from the caption. Use \"\" when the caption does not contain the sentence. Transcripts "
    "must follow the order in which the speech appears in the caption.\n"
    "- \"start\" and \"end\": timestamps in MM:SS copied from the caption, or \"Unk\".",
    "Timestamp rules:",
    "No time is given for the sentence: \"start\": \"Unk\", \"end\": \"Unk\".",
    "A single time point is given (for example \"At 00:01, Judy says ...\"): it is the "
    "start. Output \"start\": \"00:01\", \"end\": \"Unk\".",
    "One time range covers several reference sentences (for example \"00:01-00:05, Judy "
    "says 'A. B.'\"): the first of those sentences gets the range start and \"end\": "
    "\"Unk\"; the last gets \"start\": \"Unk\" and the range end; any sentence in between "
    "gets \"Unk\" for both.",
    "Never invent a timestamp that does not appear in the caption.",
    "Candidate speakers:",
    "(speaker not named or not resolvable)",
    "Reference sentences:",
    "Caption:",
    "Output a JSON array with exactly one object per reference sentence, in index order:",
    "Output only the JSON array."};

constexpr PromptText kChinese{
    "下面给出一段视频的生成描述，以及该视频中实际说出的参考句子列表。请为每个参考句子在描述中找到对应的"
    "内容，并提取说话人、描述中给出的说话内容以及时间。",
    "每个参考句子需要输出的字段：\n"
    "- \"speaker\"：说话人，必须从候选列表中原样复制。如果描述没有指明说话人，或指明的人不在列表中，"
    "使用 \"Unknown\"。\n"
    "- \"transcript\"：描述中归属于该句的原文，逐字复制。如果描述中没有该句，使用 \"\"。各句内容必须"
    "保持其在描述中出现的先后顺序。\n"
    "- \"start\" 和 \"end\"：从描述中复制的 MM:SS 时间戳，或 \"Unk\"。",
    "时间戳规则：",
    "描述没有给出该句的时间：\"start\": \"Unk\", \"end\": \"Unk\"。",
    "只给出一个时间点（例如 \"00:01，Judy 说……\"）：该时间为开始时间。输出 \"start\": "
    "\"00:01\", \"end\": \"Unk\"。",
    "一个时间段覆盖多个参考句子（例如 \"00:01-00:05，Judy 说‘A。B。’\"）：其中第一句取该时间段的开始时间，"
    "\"end\" 为 \"Unk\"；最后一句的 \"start\" 为 \"Unk\"，取该时间段的结束时间；中间的句子两端均为 "
    "\"Unk\"。",
    "不要编造描述中没有出现的时间戳。",
    "候选说话人：",
    "（未指明或无法确定的说话人）",
    "参考句子：",
    "描述：",
    "按序号顺序输出一个 JSON 数组，每个参考句子对应一个对象：",
    "只输出该 JSON 数组。"};

}  // namespace

std::string build_extraction_prompt(const JudgeRequest& req) {
  const PromptText& t = req.language == Language::Chinese ? kChinese : kEnglish;
  std::ostringstream p;
  p << t.intro << "\n\n" << t.fields << "\n\n" << t.rules_header << "\n";
  int rule = 1;
  p << rule++ << ". " << t.rule_none << "\n";
  if (req.rules.lone_timestamp_is_start) p << rule++ << ". " << t.rule_point << "\n";
  if (req.rules.block_inheritance) p << rule++ << ". " << t.rule_block << "\n";
  p << rule++ << ". " << t.rule_no_invent << "\n\n";

  p << t.candidates_header << "\n";
  for (const auto& c : req.candidates) {
    p << "- " << json(c.id).dump();
    if (canonical_id(c.id) == kUnknownSpeaker) {
      p << " " << t.unknown_note;
    } else if (!c.description.empty()) {
      p << ": " << c.description;
    }
    p << "\n";
  }
  p << "\n" << t.references_header << "\n";
  for (const auto& r : req.references) p << r.index << ". " << json(r.transcript).dump() << "\n";
  p << "\n" << t.caption_header << "\n<<<\n" << req.caption << "\n>>>\n\n";
  p << t.output_header << "\n"
    << R"([{"index": 1, "speaker": "<candidate>", "transcript": "<text>", "start": "MM:SS" or "Unk", "end": "MM:SS" or "Unk"}, ...])"
    << "\n"
    << t.output_only << "\n";
  return p.str();
}

std::string build_repair_message(const std::vector<std::string>& problems) {
  std::string msg = "Your previous reply could not be used:\n";
  for (const auto& p : problems) msg += "- " + p + "\n";
  msg +=
      "Reply again with only the corrected JSON array: one object per reference index, "
      "speakers copied verbatim from the candidate list, timestamps as MM:SS or \"Unk\".";
  return msg;
}

// Validation ------------------------------------------------------------------

namespace {

std::string_view strip_to_array(std::string_view content) {
  const auto open = content.find('[');
  const auto close = content.rfind(']');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    return {};
  }
  return content.substr(open, close - open + 1);
}

enum class BoundParse { Ok, Unknown, Invalid };

BoundParse parse_bound(const json& v, std::optional<double>& out) {
  out.reset();
  if (!v.is_string()) return BoundParse::Invalid;
  const std::string s = unicode::trim(v.get<std::string>());
  if (unicode::to_lower(s) == "unk") return BoundParse::Unknown;
  out = parse_timestamp(s);
  return out ? BoundParse::Ok : BoundParse::Invalid;
}

}  // namespace

ValidatedResponse validate_judge_response(std::string_view content, const JudgeRequest& req) {
  ValidatedResponse v;
  std::set<std::string> candidate_ids;
  for (const auto& c : req.candidates) candidate_ids.insert(canonical_id(c.id));
  std::map<int, std::size_t> slot;  // reference index -> position
  for (std::size_t i = 0; i < req.references.size(); ++i) {
    slot[req.references[i].index] = i;
    SentenceAssignment a;
    a.sentence_index = req.references[i].index;
    v.assignments.push_back(std::move(a));
  }

  json doc;
  const std::string_view array_text = strip_to_array(content);
  try {
    doc = json::parse(array_text);
  } catch (const json::exception&) {
    v.problems.emplace_back("the reply is not a JSON array");
    return v;
  }
  if (!doc.is_array()) {
    v.problems.emplace_back("the reply is not a JSON array");
    return v;
  }

  std::set<int> seen;
  for (std::size_t k = 0; k < doc.size(); ++k) {
    const json& e = doc[k];
    const std::string where = "element " + std::to_string(k);
    if (!e.is_object() || !e.contains("index") || !e["index"].is_number_integer()) {
      v.problems.push_back(where + ": missing integer \"index\"");
      continue;
    }
    const int index = e["index"].get<int>();
    const auto it = slot.find(index);
    if (it == slot.end()) {
      v.problems.push_back(where + ": index " + std::to_string(index) +
                           " is not a reference index");
      continue;
    }
    if (!seen.insert(index).second) {
      v.problems.push_back("index " + std::to_string(index) + " appears more than once");
      continue;
    }
    SentenceAssignment& a = v.assignments[it->second];
    const std::string tag = "index " + std::to_string(index);

    if (e.contains("speaker") && e["speaker"].is_string()) {
      const std::string id = canonical_id(e["speaker"].get<std::string>());
      if (candidate_ids.contains(id)) {
        a.predicted_speaker_id = id;
      } else {
        v.problems.push_back(tag + ": speaker " + json(id).dump() +
                             " is not in the candidate list");
        v.warnings.push_back(tag + ": speaker " + json(id).dump() + " mapped to \"Unknown\"");
      }
    } else {
      v.problems.push_back(tag + ": missing string \"speaker\"");
    }

    if (e.contains("transcript") && e["transcript"].is_string()) {
      a.hypothesis_transcript = e["transcript"].get<std::string>();
    } else {
      v.problems.push_back(tag + ": missing string \"transcript\"");
    }

    std::optional<double> start;
    std::optional<double> end;
    const bool start_ok = e.contains("start") && parse_bound(e["start"], start) != BoundParse::Invalid;
    const bool end_ok = e.contains("end") && parse_bound(e["end"], end) != BoundParse::Invalid;
    if (!start_ok) v.problems.push_back(tag + ": \"start\" must be \"MM:SS\" or \"Unk\"");
    if (!end_ok) v.problems.push_back(tag + ": \"end\" must be \"MM:SS\" or \"Unk\"");
    if (start && end && *start > *end) {
      v.problems.push_back(tag + ": start is after end");
      start.reset();
      end.reset();
    }
    a.predicted_interval = {start, end};
  }
  for (const auto& r : req.references) {
    if (!seen.contains(r.index)) {
      v.problems.push_back("index " + std::to_string(r.index) + " is missing");
    }
  }
  return v;
}

// Transport ---------------------------------------------------------------------

HttpResponse HttpJudgeTransport::post(const std::string& url,
                                      const std::vector<std::pair<std::string, std::string>>& headers,
                                      const std::string& body, std::chrono::milliseconds timeout) {
  static const std::regex url_re(R"(^(https?)://([^/:]+)(?::(\d+))?(/.*)?$)", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(url, m, url_re)) {
    throw TransportError(JudgeErrorKind::Network, "unsupported endpoint URL: " + url);
  }
  std::string origin = unicode::to_lower(m[1].str()) + "://" + m[2].str();
  if (m[3].matched) origin += ":" + m[3].str();
  const std::string path = m[4].matched ? m[4].str() : "/";

  httplib::Client client(origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  auto res = client.Post(path, h, body, "application/json");
  if (!res) {
    const auto err = res.error();
    const bool timed_out = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read;
    throw TransportError(timed_out ? JudgeErrorKind::Timeout : JudgeErrorKind::Network,
                         "POST " + url + " failed: " + httplib::to_string(err));
  }
  return {res->status, res->body};
}

// Client --------------------------------------------------------------------------

JudgeClient::JudgeClient(JudgeBackend backend, std::shared_ptr<JudgeTransport> transport,
                         std::string api_key, JudgeOptions options)
    : backend_(std::move(backend)),
      transport_(std::move(transport)),
      api_key_(std::move(api_key)),
      options_(options),
      in_flight_(std::max(1, backend_.max_in_flight)) {
  if (auto problems = backend_.validate(); !problems.empty()) {
    throw ValidationError("judge backend", std::move(problems));
  }
  if (!transport_) throw Error("judge client needs a transport");
}

std::unique_ptr<JudgeClient> JudgeClient::from_environment(JudgeBackend backend,
                                                           JudgeOptions options) {
  const char* key = std::getenv("JUDGE_API_KEY");
  if (key == nullptr || *key == '\0') {
    throw JudgeError(JudgeErrorKind::Credentials, "-", "JUDGE_API_KEY is not set");
  }
  return std::make_unique<JudgeClient>(std::move(backend), std::make_shared<HttpJudgeTransport>(),
                                       key, options);
}

HttpResponse JudgeClient::send(const std::string& body) {
  std::vector<std::pair<std::string, std::string>> headers;
  if (!api_key_.empty()) headers.emplace_back("Authorization", "Bearer " + api_key_);
  in_flight_.acquire();
  struct Release {
    std::counting_semaphore<4096>& s;
    ~Release() { s.release(); }
  } release{in_flight_};
  return transport_->post(backend_.endpoint, headers, body, backend_.timeout);
}

namespace {

// choices[0].message.content of an OpenAI-style chat completion.
std::optional<std::string> completion_content(const std::string& body) {
  try {
    const json doc = json::parse(body);
    const json& content = doc.at("choices").at(0).at("message").at("content");
    if (content.is_string()) return content.get<std::string>();
  } catch (const json::exception&) {
  }
  return std::nullopt;
}

}  // namespace

JudgeResult JudgeClient::call(const JudgeRequest& req, const Tokenizer& tokenizer) {
  if (auto problems = req.validate(); !problems.empty()) {
    throw ValidationError("judge request " + req.request_id, std::move(problems));
  }
  const char* system_prompt =
      "You extract structured speech information from video captions. Reply with JSON only.";
  json messages = json::array({{{"role", "system"}, {"content", system_prompt}},
                               {{"role", "user"}, {"content", build_extraction_prompt(req)}}});

  JudgeResult result;
  result.request_id = req.request_id;
  result.parsed.video_id = req.request_id;
  result.parsed.raw_caption = req.caption;
  result.parsed.token_count = tokenizer.count(req.caption);

  std::optional<ValidatedResponse> last_reply;
  std::optional<TransportError> last_error;
  const int max_attempts = 1 + backend_.max_retries;
  while (result.attempts < max_attempts) {
    ++result.attempts;
    const json body = {{"model", backend_.model},
                       {"temperature", backend_.temperature},
                       {"messages", messages}};
    HttpResponse resp;
    try {
      resp = send(body.dump());
    } catch (const TransportError& e) {
      last_error = e;
      continue;
    }
    if (resp.status < 200 || resp.status >= 300) {
      last_error = TransportError(JudgeErrorKind::HttpStatus,
                                  "judge returned HTTP " + std::to_string(resp.status));
      continue;
    }
    const std::optional<std::string> content = completion_content(resp.body);
    ValidatedResponse v = validate_judge_response(content.value_or(""), req);
    if (!content) v.problems = {"response is not a chat completion with string content"};
    if (v.problems.empty()) {
      result.parsed.assignments = std::move(v.assignments);
      result.warnings = std::move(v.warnings);
      return result;
    }
    if (content) {
      messages.push_back({{"role", "assistant"}, {"content", *content}});
      messages.push_back({{"role", "user"}, {"content", build_repair_message(v.problems)}});
    }
    last_reply = std::move(v);
  }

  if (last_reply) {
    if (!options_.degrade_on_schema_failure) {
      std::string detail;
      for (const auto& p : last_reply->problems) detail += (detail.empty() ? "" : "; ") + p;
      throw JudgeError(JudgeErrorKind::Schema, req.request_id,
                       "judge output invalid after " + std::to_string(result.attempts) +
                           " attempt(s): " + detail);
    }
    result.degraded = true;
    result.parsed.assignments = std::move(last_reply->assignments);
    result.warnings = std::move(last_reply->warnings);
    for (const auto& p : last_reply->problems) result.warnings.push_back("unrepaired: " + p);
    return result;
  }
  const JudgeErrorKind kind = last_error ? last_error->kind() : JudgeErrorKind::Network;
  throw JudgeError(kind, req.request_id,
                   std::string(last_error ? last_error->what() : "no attempt made") + " (after " +
                       std::to_string(result.attempts) + " attempt(s))");
}

}  // namespace dreward
