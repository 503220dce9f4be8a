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

#include <vector>

#include "dreward/annotation.hpp"

namespace dreward {

enum class Provenance { Known, ProjectedFromStart, ProjectedFromEnd, BilateralUnknown };

/// A predicted interval after unknown boundaries have been filled in.
/// For BilateralUnknown `resolved` is unused and the sentence scores
/// I = 0, U = |gt|.
struct ResolvedInterval {
  TimeInterval resolved;
  Provenance provenance = Provenance::Known;
};

/// Fills missing boundaries from the ground-truth duration of the same
/// sentence: [s, Unk] -> [s, s + |gt|]; [Unk, e] -> [max(0, e - |gt|), e].
/// Throws dreward::Error on an invalid known interval or ground truth.
ResolvedInterval resolve_interval(const MaybeUnknownInterval& pred, const TimeInterval& gt);

struct IouComponents {
  double intersection = 0.0;
  double union_ = 0.0;
};

IouComponents interval_iou_components(const TimeInterval& pred, const TimeInterval& gt);

struct SentenceIou {
  int index = 0;
  double intersection = 0.0;
  double union_ = 0.0;
  Provenance provenance = Provenance::Known;
};

struct TemporalScore {
  std::vector<SentenceIou> per_sentence;
  double total_intersection = 0.0;
  double total_union = 0.0;
  double global_iou = 0.0;
};

/// Global IoU: sum of intersections over sum of unions. Sentences with a
/// zero-length ground-truth interval contribute (0, 0); if the union sum is
/// zero the score is 0. Throws EmptyAnnotationError for N = 0.
TemporalScore temporal_reward(const VideoAnnotation& annotation, const ParsedCaption& parsed);

}  // namespace dreward
