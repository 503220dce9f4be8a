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


#include "dreward/temporal_metrics.hpp"

#include <algorithm>

#include "dreward/error.hpp"

namespace dreward {

ResolvedInterval resolve_interval(const MaybeUnknownInterval& pred, const TimeInterval& gt) {
  if (!gt.valid()) throw Error("invalid ground-truth interval");
  if (!pred.valid()) throw Error("invalid predicted interval");
  const double length = gt.duration();
  switch (pred.kind()) {
    case IntervalKind::Known:
      return {TimeInterval{*pred.start, *pred.end}, Provenance::Known};
    case IntervalKind::StartOnly:
      return {TimeInterval{*pred.start, *pred.start + length}, Provenance::ProjectedFromStart};
    case IntervalKind::EndOnly:
      return {TimeInterval{std::max(0.0, *pred.end - length), *pred.end},
              Provenance::ProjectedFromEnd};
    case IntervalKind::BothUnknown:
      break;
  }
  return {TimeInterval{}, Provenance::BilateralUnknown};
}

IouComponents interval_iou_components(const TimeInterval& pred, const TimeInterval& gt) {
  const double inter = std::max(0.0, std::min(pred.end, gt.end) - std::max(pred.start, gt.start));
  return {inter, pred.duration() + gt.duration() - inter};
}

TemporalScore temporal_reward(const VideoAnnotation& annotation, const ParsedCaption& parsed) {
  if (annotation.size() == 0) {
    throw EmptyAnnotationError("temporal reward undefined for video \"" + annotation.video_id +
                               "\" without sentences");
  }
  TemporalScore score;
  score.per_sentence.reserve(annotation.size());
  for (const auto& s : annotation.sentences) {
    const SentenceAssignment* a = parsed.find(s.index);
    if (a == nullptr) {
      throw Error("parsed caption for \"" + parsed.video_id + "\" has no assignment for sentence " +
                  std::to_string(s.index));
    }
    const ResolvedInterval r = resolve_interval(a->predicted_interval, s.interval);
    SentenceIou item{s.index, 0.0, 0.0, r.provenance};
    if (s.interval.duration() > 0.0) {
      if (r.provenance == Provenance::BilateralUnknown) {
        item.union_ = s.interval.duration();
      } else {
        const IouComponents c = interval_iou_components(r.resolved, s.interval);
        item.intersection = c.intersection;
        item.union_ = c.union_;
      }
    }
    score.total_intersection += item.intersection;
    score.total_union += item.union_;
    score.per_sentence.push_back(item);
  }
  score.global_iou =
      score.total_union > 0.0 ? score.total_intersection / score.total_union : 0.0;
  return score;
}

}  // namespace dreward
