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

#include <chrono>
#include <memory>
#include <semaphore>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dreward/annotation.hpp"
#include "dreward/error.hpp"
#include "dreward/tokenizer.hpp"

namespace dreward {

struct ReferenceSentence {
  int index = 0;
  std::string transcript;
};

/// Which timestamp conventions the prompt spells out for the judge.
struct TimestampRules {
  bool lone_timestamp_is_start = true;  // "At 00:01, ..." -> [00:01, Unk]
  bool block_inheritance = true;        // one range over several sentences
};

struct JudgeRequest {
  std::string request_id;  // the video id
  std::string caption;
  std::vector<ReferenceSentence> references;
  /// Character ids with descriptions, plus "Unknown" exactly once (last).
  std::vector<Character> candidates;
  Language language = Language::English;
  TimestampRules rules;

  static JudgeRequest from_annotation(const VideoAnnotation& annotation, std::string caption);

  std::vector<std::string> validate() const;
};

/// Connection settings for an OpenAI-compatible chat-completion endpoint.
struct JudgeBackend {
  std::string endpoint = "https://generativelanguage.googleapis.com/v1beta/openai/chat/completions";
  std::string model = "gemini-2.5-flash";
  std::chrono::milliseconds timeout{60'000};
  int max_retries = 1;
  int max_in_flight = 4;
  double temperature = 0.0;

  std::vector<std::string> validate() const;
};

std::string build_extraction_prompt(const JudgeRequest& req);

/// Follow-up message sent after a response that failed validation.
std::string build_repair_message(const std::vector<std::string>& problems);

// Transport ------------------------------------------------------------------

struct HttpResponse {
  int status = 0;
  std::string body;
};

enum class JudgeErrorKind { Timeout, Network, HttpStatus, Schema, Credentials };

std::string_view to_string(JudgeErrorKind kind);

class JudgeError : public Error {
 public:
  JudgeError(JudgeErrorKind kind, std::string video_id, const std::string& what)
      : Error(std::string(to_string(kind)) + " [" + video_id + "]: " + what),
        kind_(kind),
        video_id_(std::move(video_id)) {}

  JudgeErrorKind kind() const noexcept { return kind_; }
  const std::string& video_id() const noexcept { return video_id_; }

 private:
  JudgeErrorKind kind_;
  std::string video_id_;
};

/// Raised by transports; the client attaches the video id.
class TransportError : public Error {
 public:
  TransportError(JudgeErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
  JudgeErrorKind kind() const noexcept { return kind_; }

 private:
  JudgeErrorKind kind_;
};

class JudgeTransport {
 public:
  virtual ~JudgeTransport() = default;
  /// POSTs a JSON body. Throws TransportError on timeout or connection
  /// failure; HTTP error statuses are returned, not thrown.
  virtual HttpResponse post(const std::string& url,
                            const std::vector<std::pair<std::string, std::string>>& headers,
                            const std::string& body, std::chrono::milliseconds timeout) = 0;
};

/// cpp-httplib backed transport (http and https).
class HttpJudgeTransport : public JudgeTransport {
 public:
  HttpResponse post(const std::string& url,
                    const std::vector<std::pair<std::string, std::string>>& headers,
                    const std::string& body, std::chrono::milliseconds timeout) override;
};

// Response validation ----------------------------------------------------------

struct ValidatedResponse {
  std::vector<std::string> problems;  // empty iff the response is schema-clean
  std::vector<SentenceAssignment> assignments;  // always one per reference, salvaged
  std::vector<std::string> warnings;
};

/// Checks a judge reply (a JSON array, optionally inside a ``` fence) and
/// salvages what it can: invalid or missing entries become
/// ("Unknown", "", [Unk, Unk]) and unknown speaker ids become "Unknown".
ValidatedResponse validate_judge_response(std::string_view content, const JudgeRequest& req);

// Client ------------------------------------------------------------------------

struct JudgeResult {
  std::string request_id;
  ParsedCaption parsed;
  std::vector<std::string> warnings;
  int attempts = 0;
  bool degraded = false;  // validation never passed; output was salvaged
};

struct JudgeOptions {
  /// When the judge keeps violating the schema, return salvaged assignments
  /// instead of raising JudgeErrorKind::Schema.
  bool degrade_on_schema_failure = true;
};

class JudgeClient {
 public:
  JudgeClient(JudgeBackend backend, std::shared_ptr<JudgeTransport> transport, std::string api_key,
              JudgeOptions options = {});

  /// Reads the key from JUDGE_API_KEY and uses HttpJudgeTransport.
  static std::unique_ptr<JudgeClient> from_environment(JudgeBackend backend,
                                                       JudgeOptions options = {});

  /// Thread-safe. At most backend.max_in_flight requests are outstanding at
  /// once across all callers. Each attempt that fails (transport error,
  /// non-2xx, schema violation) is retried up to backend.max_retries times;
  /// schema violations are re-asked with a repair message.
  JudgeResult call(const JudgeRequest& req, const Tokenizer& tokenizer = *default_tokenizer());

  const JudgeBackend& backend() const noexcept { return backend_; }

 private:
  HttpResponse send(const std::string& body);

  JudgeBackend backend_;
  std::shared_ptr<JudgeTransport> transport_;
  std::string api_key_;
  JudgeOptions options_;
  std::counting_semaphore<4096> in_flight_;
};

}  // namespace dreward
