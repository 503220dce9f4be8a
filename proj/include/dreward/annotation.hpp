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


#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dreward {

enum class Language { English, Chinese };

std::string_view language_code(Language lang);  // "en" / "zh"
std::optional<Language> parse_language(std::string_view code);

/// Reserved speaker id for unattributed or unresolvable speech. Never part of
/// a ground-truth character set.
inline constexpr std::string_view kUnknownSpeaker = "Unknown";

/// Closed interval in seconds. Plain aggregate so malformed input can be
/// represented and reported; use `checked` where a valid interval is required.
struct TimeInterval {
  double start = 0.0;
  double end = 0.0;

  /// Throws dreward::Error unless 0 <= start <= end and both are finite.
  static TimeInterval checked(double start, double end);

  bool valid() const noexcept;
  double duration() const noexcept { return end - start; }

  friend bool operator==(const TimeInterval&, const TimeInterval&) = default;
};

enum class IntervalKind { Known, StartOnly, EndOnly, BothUnknown };

/// Predicted interval whose boundaries may be missing ("Unk").
struct MaybeUnknownInterval {
  std::optional<double> start;
  std::optional<double> end;

  static MaybeUnknownInterval unknown() { return {}; }
  static MaybeUnknownInterval known(double s, double e) { return {s, e}; }

  IntervalKind kind() const noexcept;
  bool valid() const noexcept;

  friend bool operator==(const MaybeUnknownInterval&, const MaybeUnknownInterval&) = default;
};

struct Character {
  std::string id;
  std::string description;

  friend bool operator==(const Character&, const Character&) = default;
};

struct SpokenSentence {
  int index = 0;  // 1-based
  std::string transcript;
  std::string speaker_id;
  TimeInterval interval;

  friend bool operator==(const SpokenSentence&, const SpokenSentence&) = default;
};

struct VideoAnnotation {
  std::string video_id;
  Language language = Language::English;
  std::vector<Character> characters;
  std::vector<SpokenSentence> sentences;
  std::optional<double> duration;

  std::size_t size() const noexcept { return sentences.size(); }
  bool has_character(std::string_view id) const;

  friend bool operator==(const VideoAnnotation&, const VideoAnnotation&) = default;
};

/// Parser output for one reference sentence.
struct SentenceAssignment {
  int sentence_index = 0;
  std::string predicted_speaker_id{kUnknownSpeaker};
  std::string hypothesis_transcript;
  MaybeUnknownInterval predicted_interval;

  friend bool operator==(const SentenceAssignment&, const SentenceAssignment&) = default;
};

struct ParsedCaption {
  std::string video_id;
  std::vector<SentenceAssignment> assignments;  // ordered by sentence_index
  std::string raw_caption;
  std::size_t token_count = 0;

  /// Returns the assignment for `index` or nullptr.
  const SentenceAssignment* find(int index) const;

  friend bool operator==(const ParsedCaption&, const ParsedCaption&) = default;
};

/// Canonical form used for speaker identity: NFC after trimming white space.
std::string canonical_id(std::string_view id);

/// Empty iff every annotation invariant holds. Messages name the field and
/// the offending sentence index.
std::vector<std::string> validate_annotation(const VideoAnnotation& a);

/// Structural checks on a parsed caption alone: unique 1-based indices,
/// consistent known intervals, non-empty speaker ids.
std::vector<std::string> validate_parsed(const ParsedCaption& p);

/// Full check against the reference: exactly one assignment per sentence
/// index and every speaker drawn from the character ids or "Unknown".
std::vector<std::string> validate_parsed(const ParsedCaption& p, const VideoAnnotation& a);

/// "MM:SS", "H:MM:SS", optionally with fractional seconds. Returns nullopt
/// for anything else, including "Unk".
std::optional<double> parse_timestamp(std::string_view text);

/// Inverse of parse_timestamp at millisecond precision: "MM:SS" for whole
/// seconds, "MM:SS.fff" (trailing zeros trimmed) otherwise.
std::string format_timestamp(double seconds);

}  // namespace dreward
