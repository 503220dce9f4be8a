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


#include "dreward/tokenizer.hpp"

#include "dreward/unicode.hpp"

namespace dreward {

namespace {

std::vector<std::string> split(std::string_view text, bool split_cjk) {
  std::vector<std::string> out;
  std::u32string run;
  auto flush = [&] {
    if (!run.empty()) out.push_back(unicode::encode(run));
    run.clear();
  };
  for (char32_t cp : unicode::decode(text)) {
    if (unicode::is_whitespace(cp)) {
      flush();
    } else if (split_cjk && unicode::is_cjk(cp)) {
      flush();
      out.push_back(unicode::encode(cp));
    } else {
      run.push_back(cp);
    }
  }
  flush();
  return out;
}

}  // namespace

std::vector<std::string> WhitespaceTokenizer::tokenize(std::string_view text) const {
  return split(text, false);
}

std::vector<std::string> MixedScriptTokenizer::tokenize(std::string_view text) const {
  return split(text, true);
}

std::shared_ptr<const Tokenizer> default_tokenizer() {
  static const auto instance = std::make_shared<const MixedScriptTokenizer>();
  return instance;
}

}  // namespace dreward
