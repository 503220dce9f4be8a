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


#include "dreward/speaker_metrics.hpp"

#include "dreward/error.hpp"

namespace dreward {

SpeakerScore speaker_reward(const VideoAnnotation& annotation, const ParsedCaption& parsed) {
  if (annotation.size() == 0) {
    throw EmptyAnnotationError("speaker reward undefined for video \"" + annotation.video_id +
                               "\" without sentences");
  }
  SpeakerScore score;
  score.total = annotation.size();
  score.per_sentence.reserve(score.total);
  for (const auto& s : annotation.sentences) {
    const SentenceAssignment* a = parsed.find(s.index);
    if (a == nullptr) {
      throw Error("parsed caption for \"" + parsed.video_id + "\" has no assignment for sentence " +
                  std::to_string(s.index));
    }
    const std::string predicted = canonical_id(a->predicted_speaker_id);
    const bool match = predicted != kUnknownSpeaker && predicted == canonical_id(s.speaker_id);
    if (match) ++score.correct;
    score.per_sentence.push_back({s.index, s.speaker_id, a->predicted_speaker_id, match});
  }
  score.accuracy = static_cast<double>(score.correct) / static_cast<double>(score.total);
  return score;
}

}  // namespace dreward
