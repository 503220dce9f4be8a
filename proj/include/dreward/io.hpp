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
#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

#include "dreward/annotation.hpp"

namespace dreward {

using json = nlohmann::json;

/// Calls `fn(record, line_number)` for every non-blank line of a JSONL file.
/// Throws LoadError (with the 1-based line) on unreadable files, malformed
/// JSON, or when `fn` throws a schema error for that line.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const json&, std::size_t)>& fn);

/// Writes one compact JSON document per line; creates parent directories.
void write_jsonl(const std::filesystem::path& path, std::span<const json> records,
                 bool append = false);

json to_json(const VideoAnnotation& a);
json to_json(const ParsedCaption& p);

/// Schema decoding only; throws dreward::Error naming the bad field.
VideoAnnotation annotation_from_json(const json& j);
ParsedCaption parsed_from_json(const json& j);

/// Loads and validates. Malformed line -> LoadError; invariant violation ->
/// ValidationError listing every violation. Order is preserved.
std::vector<VideoAnnotation> load_annotations(const std::filesystem::path& path);
std::vector<ParsedCaption> load_parsed(const std::filesystem::path& path);

void save_annotations(const std::filesystem::path& path, std::span<const VideoAnnotation> items);
void save_parsed(const std::filesystem::path& path, std::span<const ParsedCaption> items);

}  // namespace dreward
