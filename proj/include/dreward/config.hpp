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
#include <filesystem>
#include <optional>
#include <string_view>

#include "dreward/judge.hpp"
#include "dreward/reward.hpp"

namespace dreward {

enum class LanguageFilter { All, English, Chinese };

std::optional<LanguageFilter> parse_language_filter(std::string_view text);  // en | zh | all
std::string_view to_string(LanguageFilter filter);
bool accepts(LanguageFilter filter, Language lang);

/// Everything a TOML config file may set. Precedence when assembling a run:
/// command-line flags, then environment, then this file, then defaults.
struct Settings {
  RewardConfig reward;
  RepetitionConfig repetition;
  JudgeBackend judge;
  std::size_t workers = 1;
  LanguageFilter lang = LanguageFilter::All;
};

/// Reads [reward], [repetition], [judge] and [eval] tables; absent keys keep
/// their defaults. Throws dreward::Error on syntax errors, wrong value types,
/// unknown keys, or values failing validation.
Settings load_settings(const std::filesystem::path& path);

/// Applies JUDGE_ENDPOINT when set.
void apply_environment(Settings& settings);

}  // namespace dreward
