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


#include "dreward/annotation.hpp"

#include <cmath>
#include <cstdio>
#include <regex>
#include <set>

#include "dreward/error.hpp"
#include "dreward/text_metrics.hpp"
#include "dreward/unicode.hpp"

namespace dreward {

std::string_view language_code(Language lang) {
  return lang == Language::Chinese ? "zh" : "en";
}

std::optional<Language> parse_language(std::string_view code) {
  if (code == "en") return Language::English;
  if (code == "zh") return Language::Chinese;
  return std::nullopt;
}

TimeInterval TimeInterval::checked(double start, double end) {
  TimeInterval t{start, end};
  if (!t.valid()) {
    throw Error("invalid time interval [" + std::to_string(start) + ", " +
                std::to_string(end) + "]");
  }
  return t;
}

bool TimeInterval::valid() const noexcept {
  return std::isfinite(start) && std::isfinite(end) && start >= 0.0 && start <= end;
}

IntervalKind MaybeUnknownInterval::kind() const noexcept {
  if (start && end) return IntervalKind::Known;
  if (start) return IntervalKind::StartOnly;
  if (end) return IntervalKind::EndOnly;
  return IntervalKind::BothUnknown;
}

bool MaybeUnknownInterval::valid() const noexcept {
  auto ok = [](const std::optional<double>& t) { return !t || (std::isfinite(*t) && *t >= 0.0); };
  if (!ok(start) || !ok(end)) return false;
  return !(start && end) || *start <= *end;
}

bool VideoAnnotation::has_character(std::string_view id) const {
  const std::string key = canonical_id(id);
  for (const auto& c : characters) {
    if (canonical_id(c.id) == key) return true;
  }
  return false;
}

const SentenceAssignment* ParsedCaption::find(int index) const {
  for (const auto& a : assignments) {
    if (a.sentence_index == index) return &a;
  }
  return nullptr;
}

std::string canonical_id(std::string_view id) { return unicode::nfc(unicode::trim(id)); }

namespace {

std::string sentence_tag(std::size_t pos, const SpokenSentence& s) {
  return "sentence " + std::to_string(s.index) + " (sentences[" + std::to_string(pos) + "])";
}

}  // namespace

std::vector<std::string> validate_annotation(const VideoAnnotation& a) {
  std::vector<std::string> out;
  if (a.video_id.empty()) out.emplace_back("video_id: empty");
  if (a.duration && !(std::isfinite(*a.duration) && *a.duration >= 0.0)) {
    out.emplace_back("duration: must be a non-negative number");
  }

  std::set<std::string> ids;
  for (std::size_t i = 0; i < a.characters.size(); ++i) {
    const std::string id = canonical_id(a.characters[i].id);
    const std::string tag = "characters[" + std::to_string(i) + "]";
    if (id.empty()) {
      out.push_back(tag + ".id: empty");
      continue;
    }
    if (id == kUnknownSpeaker) out.push_back(tag + ".id: \"Unknown\" is reserved");
    if (!ids.insert(id).second) out.push_back(tag + ".id: duplicate id \"" + id + "\"");
  }

  for (std::size_t i = 0; i < a.sentences.size(); ++i) {
    const auto& s = a.sentences[i];
    const std::string tag = sentence_tag(i, s);
    if (s.index != static_cast<int>(i) + 1) {
      out.push_back(tag + ".index: expected " + std::to_string(i + 1));
    }
    if (normalize_text(s.transcript, a.language).empty()) {
      out.push_back(tag + ".transcript: empty after normalization");
    }
    if (!ids.contains(canonical_id(s.speaker_id))) {
      out.push_back(tag + ".speaker_id: \"" + s.speaker_id + "\" not in characters");
    }
    if (!s.interval.valid()) {
      out.push_back(tag + ".interval: requires 0 <= start <= end");
    }
    if (i > 0) {
      const auto& prev = a.sentences[i - 1];
      const bool ordered = prev.interval.start < s.interval.start ||
                           (prev.interval.start == s.interval.start && prev.index < s.index);
      if (!ordered) out.push_back(tag + ".interval.start: sentences not sorted by start time");
    }
  }
  return out;
}

std::vector<std::string> validate_parsed(const ParsedCaption& p) {
  std::vector<std::string> out;
  if (p.video_id.empty()) out.emplace_back("video_id: empty");
  std::set<int> seen;
  for (std::size_t i = 0; i < p.assignments.size(); ++i) {
    const auto& a = p.assignments[i];
    const std::string tag = "assignments[" + std::to_string(i) + "] (index " +
                            std::to_string(a.sentence_index) + ")";
    if (a.sentence_index < 1) out.push_back(tag + ".index: must be >= 1");
    if (!seen.insert(a.sentence_index).second) out.push_back(tag + ".index: duplicate");
    if (canonical_id(a.predicted_speaker_id).empty()) {
      out.push_back(tag + ".predicted_speaker_id: empty");
    }
    if (!a.predicted_interval.valid()) {
      out.push_back(tag + ".interval: requires 0 <= start <= end for known boundaries");
    }
  }
  return out;
}

std::vector<std::string> validate_parsed(const ParsedCaption& p, const VideoAnnotation& a) {
  std::vector<std::string> out = validate_parsed(p);
  if (p.video_id != a.video_id) {
    out.push_back("video_id: \"" + p.video_id + "\" does not match annotation \"" +
                  a.video_id + "\"");
  }
  for (const auto& s : a.sentences) {
    if (p.find(s.index) == nullptr) {
      out.push_back("assignments: missing sentence index " + std::to_string(s.index));
    }
  }
  for (const auto& asg : p.assignments) {
    if (asg.sentence_index < 1 || static_cast<std::size_t>(asg.sentence_index) > a.size()) {
      out.push_back("assignments: index " + std::to_string(asg.sentence_index) +
                    " has no reference sentence");
    }
    const std::string id = canonical_id(asg.predicted_speaker_id);
    if (id != kUnknownSpeaker && !a.has_character(id)) {
      out.push_back("assignments (index " + std::to_string(asg.sentence_index) +
                    ").predicted_speaker_id: \"" + asg.predicted_speaker_id +
                    "\" is neither a character id nor \"Unknown\"");
    }
  }
  return out;
}

std::optional<double> parse_timestamp(std::string_view text) {
  static const std::regex re(R"(^\s*(?:(\d+):)?(\d+):(\d{2}(?:\.\d+)?)\s*$)");
  std::cmatch m;
  if (!std::regex_match(text.data(), text.data() + text.size(), m, re)) return std::nullopt;
  const double hours = m[1].matched ? std::stod(m[1].str()) : 0.0;
  const double minutes = std::stod(m[2].str());
  const double seconds = std::stod(m[3].str());
  if (seconds >= 60.0) return std::nullopt;
  if (m[1].matched && minutes >= 60.0) return std::nullopt;
  return hours * 3600.0 + minutes * 60.0 + seconds;
}

std::string format_timestamp(double seconds) {
  if (!std::isfinite(seconds) || seconds < 0.0) throw Error("cannot format timestamp");
  const auto millis = static_cast<long long>(std::llround(seconds * 1000.0));
  const long long minutes = millis / 60000;
  const long long rem = millis % 60000;
  char buf[64];
  if (rem % 1000 == 0) {
    std::snprintf(buf, sizeof buf, "%02lld:%02lld", minutes, rem / 1000);
    return buf;
  }
  std::snprintf(buf, sizeof buf, "%02lld:%02lld.%03lld", minutes, rem / 1000, rem % 1000);
  std::string out = buf;
  while (out.back() == '0') out.pop_back();
  return out;
}

}  // namespace dreward
