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

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace dreward {

/// Token source for the length gate and the repetition detector. Training
/// loops plug in the policy tokenizer; offline evaluation uses a fallback.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::vector<std::string> tokenize(std::string_view text) const = 0;
  virtual std::size_t count(std::string_view text) const { return tokenize(text).size(); }
};

/// Splits on Unicode white space.
class WhitespaceTokenizer : public Tokenizer {
 public:
  std::vector<std::string> tokenize(std::string_view text) const override;
};

/// Whitespace split, with every CJK character emitted as its own token.
/// Equivalent to WhitespaceTokenizer on text without CJK characters.
class MixedScriptTokenizer : public Tokenizer {
 public:
  std::vector<std::string> tokenize(std::string_view text) const override;
};

/// The offline fallback (MixedScriptTokenizer).
std::shared_ptr<const Tokenizer> default_tokenizer();

}  // namespace dreward
