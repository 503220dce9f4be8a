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


#include "dreward/text_metrics.hpp"

#include <algorithm>
#include <cstdint>
#include <unordered_map>

#include "dreward/unicode.hpp"

namespace dreward {

TokenUnit scoring_unit(Language lang) {
  return lang == Language::Chinese ? TokenUnit::Character : TokenUnit::Word;
}

namespace {

std::u32string strip_punctuation(std::u32string_view in) {
  std::u32string out;
  out.reserve(in.size());
  for (char32_t cp : in) {
    if (!unicode::is_punctuation(cp)) out.push_back(cp);
  }
  return out;
}

std::u32string collapse_whitespace(std::u32string_view in) {
  std::u32string out;
  bool pending_space = false;
  for (char32_t cp : in) {
    if (unicode::is_whitespace(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(cp);
  }
  return out;
}

// Drops every space that does not separate two non-CJK characters.
std::u32string drop_cjk_spaces(std::u32string_view in) {
  std::u32string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] != U' ') {
      out.push_back(in[i]);
      continue;
    }
    const bool keep = !out.empty() && i + 1 < in.size() && !unicode::is_cjk(out.back()) &&
                      !unicode::is_cjk(in[i + 1]);
    if (keep) out.push_back(U' ');
  }
  return out;
}

}  // namespace

std::string normalize_text(std::string_view text, Language lang) {
  std::string composed = unicode::nfc(text);
  if (lang == Language::English) composed = unicode::to_lower(composed);
  std::u32string cps = collapse_whitespace(strip_punctuation(unicode::decode(composed)));
  if (lang == Language::Chinese) cps = drop_cjk_spaces(cps);
  return unicode::encode(cps);
}

std::string concat_transcripts(std::span<const std::string> transcripts) {
  std::string out;
  for (std::size_t i = 0; i < transcripts.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += transcripts[i];
  }
  return out;
}

TokenSequence tokenize(std::string_view normalized, Language lang) {
  TokenSequence seq;
  seq.unit = scoring_unit(lang);
  const std::u32string cps = unicode::decode(normalized);
  std::u32string run;
  auto flush = [&] {
    if (!run.empty()) seq.tokens.push_back(unicode::encode(run));
    run.clear();
  };
  for (char32_t cp : cps) {
    if (unicode::is_whitespace(cp)) {
      flush();
    } else if (lang == Language::Chinese && unicode::is_cjk(cp)) {
      flush();
      seq.tokens.push_back(unicode::encode(cp));
    } else {
      run.push_back(cp);
    }
  }
  flush();
  return seq;
}

TokenSequence scoring_tokens(std::string_view text, Language lang) {
  return tokenize(normalize_text(text, lang), lang);
}

double AlignmentResult::error_rate() const {
  if (empty_reference()) throw EmptyReferenceError("error rate undefined for an empty reference");
  return static_cast<double>(errors()) / static_cast<double>(reference_length);
}

namespace {

enum Step : std::uint8_t { kDiagonal, kInsert, kDelete };

}  // namespace

AlignmentResult edit_distance_align(const TokenSequence& ref, const TokenSequence& hyp) {
  // Intern tokens so the inner loop compares integers.
  std::unordered_map<std::string_view, int> ids;
  auto intern = [&](const std::vector<std::string>& tokens) {
    std::vector<int> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
      out.push_back(ids.try_emplace(t, static_cast<int>(ids.size())).first->second);
    }
    return out;
  };
  const std::vector<int> r = intern(ref.tokens);
  const std::vector<int> h = intern(hyp.tokens);
  const std::size_t n = r.size();
  const std::size_t m = h.size();

  // Two rolling cost rows plus one backtrace byte per cell.
  std::vector<std::size_t> prev(m + 1);
  std::vector<std::size_t> cur(m + 1);
  std::vector<std::uint8_t> steps((n + 1) * (m + 1));
  auto step_at = [&](std::size_t i, std::size_t j) -> std::uint8_t& {
    return steps[i * (m + 1) + j];
  };
  for (std::size_t j = 0; j <= m; ++j) {
    prev[j] = j;
    step_at(0, j) = kInsert;
  }
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    step_at(i, 0) = kDelete;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = prev[j - 1] + (r[i - 1] == h[j - 1] ? 0 : 1);
      const std::size_t ins = cur[j - 1] + 1;
      const std::size_t del = prev[j] + 1;
      if (diag <= ins && diag <= del) {
        cur[j] = diag;
        step_at(i, j) = kDiagonal;
      } else if (ins <= del) {
        cur[j] = ins;
        step_at(i, j) = kInsert;
      } else {
        cur[j] = del;
        step_at(i, j) = kDelete;
      }
    }
    std::swap(prev, cur);
  }

  AlignmentResult result;
  result.reference_length = n;
  result.hypothesis_length = m;
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    switch (step_at(i, j)) {
      case kDiagonal:
        if (r[i - 1] != h[j - 1]) ++result.substitutions;
        --i;
        --j;
        break;
      case kInsert:
        ++result.insertions;
        --j;
        break;
      default:
        ++result.deletions;
        --i;
        break;
    }
  }
  return result;
}

ContentScore content_score(const VideoAnnotation& annotation, const ParsedCaption& parsed) {
  if (annotation.size() == 0) {
    throw EmptyAnnotationError("content reward undefined for video \"" + annotation.video_id +
                               "\" without sentences");
  }
  std::vector<std::string> refs;
  refs.reserve(annotation.size());
  for (const auto& s : annotation.sentences) refs.push_back(s.transcript);

  std::vector<const SentenceAssignment*> ordered;
  for (const auto& a : parsed.assignments) ordered.push_back(&a);
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto* x, const auto* y) {
    return x->sentence_index < y->sentence_index;
  });
  std::vector<std::string> hyps;
  for (const auto* a : ordered) {
    if (!a->hypothesis_transcript.empty()) hyps.push_back(a->hypothesis_transcript);
  }

  const Language lang = annotation.language;
  ContentScore score;
  score.alignment = edit_distance_align(scoring_tokens(concat_transcripts(refs), lang),
                                        scoring_tokens(concat_transcripts(hyps), lang));
  if (score.alignment.empty_reference()) {
    score.error_rate = score.alignment.hypothesis_length == 0 ? 0.0 : 1.0;
  } else {
    score.error_rate = score.alignment.error_rate();
  }
  score.reward = std::max(0.0, 1.0 - score.error_rate);
  return score;
}

double content_reward(const VideoAnnotation& annotation, const ParsedCaption& parsed) {
  return content_score(annotation, parsed).reward;
}

}  // namespace dreward
