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

#include "dreward/annotation.hpp"
#include "dreward/tokenizer.hpp"

namespace dreward {

/// One quoted speech block recognized in a caption line.
struct CaptionBlock {
  std::size_t line = 0;  // 1-based line number in the caption
  std::string speaker;   // as written
  std::optional<double> start;
  std::optional<double> end;
  std::string utterance;
};

/// Recognized line forms (see docs/caption_grammar.md):
///
///   [MM:SS-MM:SS] Name: "utterance"
///   [MM:SS] Name: "utterance"
///   MM:SS-MM:SS, Name says "utterance"
///   At MM:SS, Name says "utterance"
///
/// Any other line is narration and is skipped.
std::vector<CaptionBlock> scan_caption(std::string_view caption);

/// Splits an utterance after terminal punctuation (. ! ? followed by white
/// space or end of text; 。！？ anywhere). Fragments with no scorable content
/// are merged into their neighbour.
std::vector<std::string> split_sentences(std::string_view utterance, Language lang);

/// Maps a written speaker name onto a character id of `annotation`: exact
/// canonical match first, then case-insensitive. Returns "Unknown" otherwise.
std::string resolve_speaker(std::string_view name, const VideoAnnotation& annotation);

/// Deterministic offline parser for the canonical caption grammar.
///
/// Quoted blocks are split into sentence fragments. Reference sentences are
/// bound in order: each takes the best-matching run of consecutive fragments
/// from one block (normalized edit similarity; ties go to the earliest,
/// then shortest run) among the fragments not yet consumed. Skipped
/// fragments are appended to the previous hypothesis so no speech is lost
/// or reordered. A run that starts a block inherits the block start; a run
/// that ends it inherits the block end; other boundaries are unknown.
/// References left without fragments get "Unknown", an empty transcript and
/// [Unk, Unk].
ParsedCaption parse_canonical(std::string_view caption, const VideoAnnotation& annotation,
                              const Tokenizer& tokenizer = *default_tokenizer());

/// Renders one canonical line: `[MM:SS-MM:SS] speaker: "transcript"`.
std::string render_canonical_line(const TimeInterval& interval, std::string_view speaker,
                                  std::string_view transcript);

/// One canonical line per reference sentence, in order.
std::string render_canonical(const VideoAnnotation& annotation);

}  // namespace dreward
