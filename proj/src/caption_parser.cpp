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


#include "dreward/caption_parser.hpp"

#include <algorithm>
#include <regex>
#include <sstream>

#include "dreward/text_metrics.hpp"
#include "dreward/unicode.hpp"

namespace dreward {

namespace {

#define DREWARD_TS R"(\d+(?::\d{1,2}){1,2}(?:\.\d+)?)"

// [MM:SS-MM:SS] Name: "utterance"   (also [MM:SS] ...)
const std::regex& bracket_form() {
  static const std::regex re(
      R"(^\s*(?:[-*]\s+)?\[\s*()" DREWARD_TS R"()\s*(?:(?:-|–|~)\s*()" DREWARD_TS
      R"()\s*)?\]\s*(.+?)\s*(?::|：)\s*(?:"|“|「)(.*)(?:"|”|」)\s*$)");
  return re;
}

// MM:SS-MM:SS, Name says "utterance"   /   At MM:SS, Name says "utterance"
const std::regex& prose_form() {
  static const std::regex re(
      R"(^\s*(?:[-*]\s+)?(?:[Aa]t\s+)?()" DREWARD_TS R"()(?:\s*(?:-|–|~|to)\s*()" DREWARD_TS
      R"())?\s*,\s*(.+?)\s+says\s*[,:]?\s*(?:"|“|'|‘)(.*)(?:"|”|'|’)\s*[.,]?\s*$)");
  return re;
}

#undef DREWARD_TS

bool is_terminal_ascii(char32_t cp) { return cp == U'.' || cp == U'!' || cp == U'?'; }
bool is_terminal_cjk(char32_t cp) { return cp == U'。' || cp == U'！' || cp == U'？'; }
bool is_closer(char32_t cp) {
  return cp == U'"' || cp == U'\'' || cp == U'”' || cp == U'’' || cp == U'」' || cp == U')' ||
         cp == U'）';
}

}  // namespace

std::vector<CaptionBlock> scan_caption(std::string_view caption) {
  std::vector<CaptionBlock> blocks;
  std::istringstream in{std::string(caption)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::smatch m;
    if (!std::regex_match(line, m, bracket_form()) && !std::regex_match(line, m, prose_form())) {
      continue;
    }
    CaptionBlock b;
    b.line = line_no;
    b.start = parse_timestamp(m[1].str());
    if (!b.start) continue;
    if (m[2].matched) {
      b.end = parse_timestamp(m[2].str());
      if (!b.end) continue;
      if (*b.end < *b.start) b.end.reset();
    }
    b.speaker = unicode::trim(m[3].str());
    b.utterance = unicode::trim(m[4].str());
    blocks.push_back(std::move(b));
  }
  return blocks;
}

std::vector<std::string> split_sentences(std::string_view utterance, Language lang) {
  const std::u32string cps = unicode::decode(utterance);
  std::vector<std::string> pieces;
  std::u32string cur;
  auto flush = [&] {
    std::string piece = unicode::trim(unicode::encode(cur));
    if (!piece.empty()) pieces.push_back(std::move(piece));
    cur.clear();
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    cur.push_back(cps[i]);
    const bool ascii = is_terminal_ascii(cps[i]);
    if (!ascii && !is_terminal_cjk(cps[i])) continue;
    // absorb runs like "?!" and trailing closing quotes
    std::size_t j = i + 1;
    while (j < cps.size() &&
           (is_terminal_ascii(cps[j]) || is_terminal_cjk(cps[j]) || is_closer(cps[j]))) {
      cur.push_back(cps[j]);
      ++j;
    }
    const bool boundary = !ascii || is_terminal_cjk(cps[j - 1]) || j == cps.size() ||
                          unicode::is_whitespace(cps[j]);
    i = j - 1;
    if (boundary) flush();
  }
  flush();

  // Fold fragments without scorable text into a neighbour.
  std::vector<std::string> out;
  std::string carry;
  for (auto& p : pieces) {
    if (normalize_text(p, lang).empty()) {
      if (out.empty()) {
        carry += (carry.empty() ? "" : " ") + p;
      } else {
        out.back() += " " + p;
      }
      continue;
    }
    if (!carry.empty()) {
      p = carry + " " + p;
      carry.clear();
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::string resolve_speaker(std::string_view name, const VideoAnnotation& annotation) {
  const std::string key = canonical_id(name);
  if (key.empty() || key == kUnknownSpeaker) return std::string(kUnknownSpeaker);
  for (const auto& c : annotation.characters) {
    if (canonical_id(c.id) == key) return c.id;
  }
  const std::string folded = unicode::to_lower(key);
  for (const auto& c : annotation.characters) {
    if (unicode::to_lower(canonical_id(c.id)) == folded) return c.id;
  }
  return std::string(kUnknownSpeaker);
}

namespace {

struct Fragment {
  std::size_t block = 0;
  bool first_in_block = false;
  bool last_in_block = false;
  std::string text;
  std::vector<std::string> tokens;
};

double similarity(const TokenSequence& ref, const TokenSequence& hyp) {
  const std::size_t longest = std::max(ref.size(), hyp.size());
  if (longest == 0) return 1.0;
  const AlignmentResult a = edit_distance_align(ref, hyp);
  return 1.0 - static_cast<double>(a.errors()) / static_cast<double>(longest);
}

}  // namespace

ParsedCaption parse_canonical(std::string_view caption, const VideoAnnotation& annotation,
                              const Tokenizer& tokenizer) {
  const Language lang = annotation.language;
  const std::vector<CaptionBlock> blocks = scan_caption(caption);

  std::vector<Fragment> frags;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::vector<std::string> pieces = split_sentences(blocks[b].utterance, lang);
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      Fragment f;
      f.block = b;
      f.first_in_block = k == 0;
      f.last_in_block = k + 1 == pieces.size();
      f.text = pieces[k];
      f.tokens = scoring_tokens(f.text, lang).tokens;
      frags.push_back(std::move(f));
    }
  }

  ParsedCaption out;
  out.video_id = annotation.video_id;
  out.raw_caption = std::string(caption);
  out.token_count = tokenizer.count(caption);

  std::size_t cursor = 0;
  std::string pending;                    // skipped text before the first binding
  SentenceAssignment* last_bound = nullptr;
  auto append = [](std::string& dst, const std::string& text) {
    if (text.empty()) return;
    if (!dst.empty()) dst.push_back(' ');
    dst += text;
  };

  out.assignments.reserve(annotation.size());
  for (const auto& ref : annotation.sentences) {
    SentenceAssignment asg;
    asg.sentence_index = ref.index;
    out.assignments.push_back(std::move(asg));
  }

  for (std::size_t r = 0; r < annotation.size() && cursor < frags.size(); ++r) {
    const TokenSequence ref_tokens = scoring_tokens(annotation.sentences[r].transcript, lang);
    double best = -1.0;
    std::size_t best_begin = cursor;
    std::size_t best_end = cursor;
    for (std::size_t begin = cursor; begin < frags.size(); ++begin) {
      TokenSequence run{{}, ref_tokens.unit};
      for (std::size_t end = begin; end < frags.size() && frags[end].block == frags[begin].block;
           ++end) {
        run.tokens.insert(run.tokens.end(), frags[end].tokens.begin(), frags[end].tokens.end());
        const double sim = similarity(ref_tokens, run);
        if (sim > best) {
          best = sim;
          best_begin = begin;
          best_end = end;
        }
      }
    }

    std::string skipped;
    for (std::size_t k = cursor; k < best_begin; ++k) append(skipped, frags[k].text);
    if (last_bound != nullptr) {
      append(last_bound->hypothesis_transcript, skipped);
    } else {
      append(pending, skipped);
    }

    SentenceAssignment& asg = out.assignments[r];
    const CaptionBlock& block = blocks[frags[best_begin].block];
    asg.predicted_speaker_id = resolve_speaker(block.speaker, annotation);
    asg.hypothesis_transcript = std::move(pending);
    pending.clear();
    for (std::size_t k = best_begin; k <= best_end; ++k) {
      append(asg.hypothesis_transcript, frags[k].text);
    }
    if (frags[best_begin].first_in_block) asg.predicted_interval.start = block.start;
    if (frags[best_end].last_in_block) asg.predicted_interval.end = block.end;
    last_bound = &asg;
    cursor = best_end + 1;
  }

  if (last_bound != nullptr) {
    for (std::size_t k = cursor; k < frags.size(); ++k) {
      append(last_bound->hypothesis_transcript, frags[k].text);
    }
  }
  return out;
}

std::string render_canonical_line(const TimeInterval& interval, std::string_view speaker,
                                  std::string_view transcript) {
  std::string text(transcript);
  std::replace(text.begin(), text.end(), '\n', ' ');
  std::replace(text.begin(), text.end(), '\r', ' ');
  return "[" + format_timestamp(interval.start) + "-" + format_timestamp(interval.end) + "] " +
         std::string(speaker) + ": \"" + text + "\"";
}

std::string render_canonical(const VideoAnnotation& annotation) {
  std::string out;
  for (const auto& s : annotation.sentences) {
    out += render_canonical_line(s.interval, s.speaker_id, s.transcript);
    out.push_back('\n');
  }
  return out;
}

}  // namespace dreward
