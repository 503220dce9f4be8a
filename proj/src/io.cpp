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


#include "dreward/io.hpp"

#include <fstream>

#include "dreward/error.hpp"

namespace dreward {

void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const json&, std::size_t)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path.string(), 0, "cannot open file");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw LoadError(path.string(), line_no, std::string("malformed JSON: ") + e.what());
    }
    try {
      fn(record, line_no);
    } catch (const ValidationError&) {
      throw;
    } catch (const LoadError&) {
      throw;
    } catch (const std::exception& e) {
      throw LoadError(path.string(), line_no, e.what());
    }
  }
}

void write_jsonl(const std::filesystem::path& path, std::span<const json> records, bool append) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, append ? std::ios::binary | std::ios::app : std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& r : records) out << r.dump() << '\n';
  if (!out) throw Error("write failed for " + path.string());
}

namespace {

const json& field(const json& j, const char* name) {
  if (!j.is_object()) throw Error("record is not a JSON object");
  const auto it = j.find(name);
  if (it == j.end()) throw Error(std::string("missing field \"") + name + "\"");
  return *it;
}

std::string string_field(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_string()) throw Error(std::string("field \"") + name + "\" must be a string");
  return v.get<std::string>();
}

double number_field(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_number()) throw Error(std::string("field \"") + name + "\" must be a number");
  return v.get<double>();
}

std::optional<double> nullable_number(const json& j, const char* name) {
  const auto it = j.find(name);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw Error(std::string("field \"") + name + "\" must be a number or null");
  return it->get<double>();
}

int int_field(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_number_integer()) throw Error(std::string("field \"") + name + "\" must be an integer");
  return v.get<int>();
}

const json& array_field(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_array()) throw Error(std::string("field \"") + name + "\" must be an array");
  return v;
}

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json to_json(const VideoAnnotation& a) {
  json chars = json::array();
  for (const auto& c : a.characters) chars.push_back({{"id", c.id}, {"description", c.description}});
  json sents = json::array();
  for (const auto& s : a.sentences) {
    sents.push_back({{"index", s.index},
                     {"transcript", s.transcript},
                     {"speaker_id", s.speaker_id},
                     {"start_s", s.interval.start},
                     {"end_s", s.interval.end}});
  }
  return {{"video_id", a.video_id},
          {"language", std::string(language_code(a.language))},
          {"duration_s", nullable(a.duration)},
          {"characters", chars},
          {"sentences", sents}};
}

json to_json(const ParsedCaption& p) {
  json sents = json::array();
  for (const auto& a : p.assignments) {
    sents.push_back({{"index", a.sentence_index},
                     {"predicted_speaker_id", a.predicted_speaker_id},
                     {"hypothesis_transcript", a.hypothesis_transcript},
                     {"start_s", nullable(a.predicted_interval.start)},
                     {"end_s", nullable(a.predicted_interval.end)}});
  }
  return {{"video_id", p.video_id},
          {"raw_caption", p.raw_caption},
          {"token_count", p.token_count},
          {"sentences", sents}};
}

VideoAnnotation annotation_from_json(const json& j) {
  VideoAnnotation a;
  a.video_id = string_field(j, "video_id");
  const std::string lang = string_field(j, "language");
  const auto parsed_lang = parse_language(lang);
  if (!parsed_lang) throw Error("field \"language\" must be \"en\" or \"zh\", got \"" + lang + "\"");
  a.language = *parsed_lang;
  a.duration = nullable_number(j, "duration_s");
  for (const auto& c : array_field(j, "characters")) {
    Character ch;
    ch.id = string_field(c, "id");
    if (c.contains("description") && !c["description"].is_null()) {
      ch.description = string_field(c, "description");
    }
    a.characters.push_back(std::move(ch));
  }
  for (const auto& s : array_field(j, "sentences")) {
    SpokenSentence sent;
    sent.index = int_field(s, "index");
    sent.transcript = string_field(s, "transcript");
    sent.speaker_id = string_field(s, "speaker_id");
    sent.interval = {number_field(s, "start_s"), number_field(s, "end_s")};
    a.sentences.push_back(std::move(sent));
  }
  return a;
}

ParsedCaption parsed_from_json(const json& j) {
  ParsedCaption p;
  p.video_id = string_field(j, "video_id");
  if (j.contains("raw_caption")) p.raw_caption = string_field(j, "raw_caption");
  if (j.contains("token_count")) {
    const json& t = j["token_count"];
    if (!t.is_number_unsigned() && !(t.is_number_integer() && t.get<long long>() >= 0)) {
      throw Error("field \"token_count\" must be a non-negative integer");
    }
    p.token_count = t.get<std::size_t>();
  }
  for (const auto& s : array_field(j, "sentences")) {
    SentenceAssignment a;
    a.sentence_index = int_field(s, "index");
    a.predicted_speaker_id = string_field(s, "predicted_speaker_id");
    a.hypothesis_transcript = string_field(s, "hypothesis_transcript");
    a.predicted_interval = {nullable_number(s, "start_s"), nullable_number(s, "end_s")};
    p.assignments.push_back(std::move(a));
  }
  return p;
}

std::vector<VideoAnnotation> load_annotations(const std::filesystem::path& path) {
  std::vector<VideoAnnotation> out;
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    VideoAnnotation a = annotation_from_json(j);
    if (auto v = validate_annotation(a); !v.empty()) {
      throw ValidationError(path.string() + ":" + std::to_string(line) + " (" + a.video_id + ")",
                            std::move(v));
    }
    out.push_back(std::move(a));
  });
  return out;
}

std::vector<ParsedCaption> load_parsed(const std::filesystem::path& path) {
  std::vector<ParsedCaption> out;
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    ParsedCaption p = parsed_from_json(j);
    if (auto v = validate_parsed(p); !v.empty()) {
      throw ValidationError(path.string() + ":" + std::to_string(line) + " (" + p.video_id + ")",
                            std::move(v));
    }
    out.push_back(std::move(p));
  });
  return out;
}

void save_annotations(const std::filesystem::path& path, std::span<const VideoAnnotation> items) {
  std::vector<json> records;
  records.reserve(items.size());
  for (const auto& a : items) records.push_back(to_json(a));
  write_jsonl(path, records);
}

void save_parsed(const std::filesystem::path& path, std::span<const ParsedCaption> items) {
  std::vector<json> records;
  records.reserve(items.size());
  for (const auto& p : items) records.push_back(to_json(p));
  write_jsonl(path, records);
}

}  // namespace dreward
