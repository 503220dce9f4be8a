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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dreward/annotation.hpp"
#include "dreward/error.hpp"

namespace dreward {

enum class TokenUnit { Word, Character };

struct TokenSequence {
  std::vector<std::string> tokens;
  TokenUnit unit = TokenUnit::Word;

  std::size_t size() const noexcept { return tokens.size(); }
};

TokenUnit scoring_unit(Language lang);

/// Scoring normalization.
///
/// English: NFC, lowercase, Unicode punctuation (P*) removed, white space
/// collapsed to single spaces and trimmed.
///
/// Chinese: NFC, punctuation removed, no case change. White space is dropped
/// except between two non-CJK characters, where it collapses to one space so
/// embedded Latin words keep their boundaries.
std::string normalize_text(std::string_view text, Language lang);

/// Joins transcripts with a single space. Callers pass them in chronological
/// order; normalization happens downstream.
std::string concat_transcripts(std::span<const std::string> transcripts);

/// Splits already-normalized text. English splits on spaces. Chinese emits
/// one token per CJK character and one token per maximal run of other
/// non-space characters (Latin words, digit strings).
TokenSequence tokenize(std::string_view normalized, Language lang);

/// normalize_text followed by tokenize.
TokenSequence scoring_tokens(std::string_view text, Language lang);

class EmptyReferenceError : public Error {
 public:
  using Error::Error;
};

/// Counts from one minimal-cost Levenshtein alignment.
struct AlignmentResult {
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
  std::size_t reference_length = 0;
  std::size_t hypothesis_length = 0;

  std::size_t errors() const noexcept { return substitutions + insertions + deletions; }

  /// An empty reference has no defined error rate; callers decide.
  bool empty_reference() const noexcept { return reference_length == 0; }

  /// (S + I + D) / reference_length. May exceed 1. Throws
  /// EmptyReferenceError when the reference is empty.
  double error_rate() const;
};

/// Unit-cost Levenshtein alignment. On equal cost the backtrace prefers a
/// diagonal step (match or substitution), then an insertion, then a deletion.
AlignmentResult edit_distance_align(const TokenSequence& ref, const TokenSequence& hyp);

struct ContentScore {
  AlignmentResult alignment;
  double error_rate = 0.0;  // unclamped WER or CER
  double reward = 0.0;      // max(0, 1 - error_rate)
};

/// Scores the chronological concatenation of hypothesis transcripts against
/// the concatenated references, using words for English and characters for
/// Chinese. Throws EmptyAnnotationError when the video has no sentences.
ContentScore content_score(const VideoAnnotation& annotation, const ParsedCaption& parsed);

double content_reward(const VideoAnnotation& annotation, const ParsedCaption& parsed);

}  // namespace dreward
