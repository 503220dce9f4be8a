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
#include <string>
#include <vector>

#include "dreward/annotation.hpp"

namespace dreward {

struct SpeakerMatch {
  int index = 0;
  std::string gt_id;
  std::string predicted_id;
  bool match = false;
};

/// Speaker attribution accuracy for one video.
struct SpeakerScore {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy = 0.0;
  std::vector<SpeakerMatch> per_sentence;
};

/// Fraction of reference sentences whose predicted speaker equals the ground
/// truth (canonical id equality). "Unknown" never matches.
///
/// Throws EmptyAnnotationError for N = 0 and dreward::Error when the parse
/// lacks an assignment for some reference index.
SpeakerScore speaker_reward(const VideoAnnotation& annotation, const ParsedCaption& parsed);

}  // namespace dreward
