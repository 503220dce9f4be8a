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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Thin UTF-8 helpers over ICU. Invalid byte sequences decode to U+FFFD.
namespace dreward::unicode {

std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view text);
std::string encode(char32_t cp);

/// Canonical composition (NFC).
std::string nfc(std::string_view utf8);

/// Full Unicode lowercase mapping in the root locale.
std::string to_lower(std::string_view utf8);

/// Trims Unicode white space at both ends.
std::string trim(std::string_view utf8);

bool is_punctuation(char32_t cp);  // general category P*
bool is_whitespace(char32_t cp);
/// Han, Hiragana, Katakana, Hangul and the CJK symbol blocks: scored one
/// character per token.
bool is_cjk(char32_t cp);

}  // namespace dreward::unicode
