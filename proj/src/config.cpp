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


#include "dreward/config.hpp"

#include <cstdlib>
#include <set>
#include <string>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "dreward/error.hpp"

namespace dreward {

std::optional<LanguageFilter> parse_language_filter(std::string_view text) {
  if (text == "all") return LanguageFilter::All;
  if (text == "en") return LanguageFilter::English;
  if (text == "zh") return LanguageFilter::Chinese;
  return std::nullopt;
}

std::string_view to_string(LanguageFilter filter) {
  switch (filter) {
    case LanguageFilter::English: return "en";
    case LanguageFilter::Chinese: return "zh";
    case LanguageFilter::All: break;
  }
  return "all";
}

bool accepts(LanguageFilter filter, Language lang) {
  switch (filter) {
    case LanguageFilter::English: return lang == Language::English;
    case LanguageFilter::Chinese: return lang == Language::Chinese;
    case LanguageFilter::All: break;
  }
  return true;
}

namespace {

class TableReader {
 public:
  TableReader(const toml::table& root, const char* name) : name_(name) {
    if (const toml::node* node = root.get(name)) {
      table_ = node->as_table();
      if (table_ == nullptr) throw Error(std::string("config: [") + name + "] must be a table");
      for (const auto& [key, value] : *table_) unseen_.insert(std::string(key.str()));
    }
  }

  void number(const char* key, double& out) {
    if (const toml::node* n = take(key)) {
      if (auto v = n->value<double>()) {
        out = *v;
        return;
      }
      fail(key, "a number");
    }
  }

  void count(const char* key, std::size_t& out) {
    if (const toml::node* n = take(key)) {
      if (auto v = n->value<int64_t>(); v && *v >= 0) {
        out = static_cast<std::size_t>(*v);
        return;
      }
      fail(key, "a non-negative integer");
    }
  }

  void integer(const char* key, int& out) {
    if (const toml::node* n = take(key)) {
      if (auto v = n->value<int64_t>()) {
        out = static_cast<int>(*v);
        return;
      }
      fail(key, "an integer");
    }
  }

  void text(const char* key, std::string& out) {
    if (const toml::node* n = take(key)) {
      if (auto v = n->value<std::string>()) {
        out = *v;
        return;
      }
      fail(key, "a string");
    }
  }

  void finish() const {
    if (!unseen_.empty()) {
      throw Error(std::string("config: unknown key [") + name_ + "]." + *unseen_.begin());
    }
  }

 private:
  const toml::node* take(const char* key) {
    if (table_ == nullptr) return nullptr;
    unseen_.erase(key);
    return table_->get(key);
  }

  [[noreturn]] void fail(const char* key, const char* expected) const {
    throw Error(std::string("config: [") + name_ + "]." + key + " must be " + expected);
  }

  const char* name_;
  const toml::table* table_ = nullptr;
  std::set<std::string> unseen_;
};

}  // namespace

Settings load_settings(const std::filesystem::path& path) {
  toml::table root;
  try {
    root = toml::parse_file(path.string());
  } catch (const toml::parse_error& e) {
    throw Error("config: " + path.string() + ": " + std::string(e.description()));
  }
  for (const auto& [key, value] : root) {
    const std::string k(key.str());
    if (k != "reward" && k != "repetition" && k != "judge" && k != "eval") {
      throw Error("config: unknown table [" + k + "]");
    }
  }

  Settings s;
  TableReader reward(root, "reward");
  reward.number("lambda_speaker", s.reward.lambda_speaker);
  reward.number("lambda_content", s.reward.lambda_content);
  reward.number("lambda_time", s.reward.lambda_time);
  reward.count("l_max", s.reward.l_max);
  reward.count("k_warmup", s.reward.k_warmup);
  reward.finish();

  TableReader rep(root, "repetition");
  rep.count("min_ngram", s.repetition.min_ngram);
  rep.count("min_consecutive", s.repetition.min_consecutive);
  rep.number("tail_fraction", s.repetition.tail_fraction);
  rep.count("tail_min_span", s.repetition.tail_min_span);
  rep.count("tail_min_repeats", s.repetition.tail_min_repeats);
  rep.finish();

  TableReader judge(root, "judge");
  judge.text("endpoint", s.judge.endpoint);
  judge.text("model", s.judge.model);
  double timeout_s = static_cast<double>(s.judge.timeout.count()) / 1000.0;
  judge.number("timeout_s", timeout_s);
  s.judge.timeout = std::chrono::milliseconds(static_cast<long long>(timeout_s * 1000.0));
  judge.integer("max_retries", s.judge.max_retries);
  judge.integer("max_in_flight", s.judge.max_in_flight);
  judge.number("temperature", s.judge.temperature);
  judge.finish();

  TableReader eval(root, "eval");
  eval.count("workers", s.workers);
  std::string lang(to_string(s.lang));
  eval.text("lang", lang);
  eval.finish();
  const auto filter = parse_language_filter(lang);
  if (!filter) throw Error("config: [eval].lang must be en, zh or all");
  s.lang = *filter;

  std::vector<std::string> problems = s.reward.validate();
  for (auto& p : s.repetition.validate()) problems.push_back(std::move(p));
  for (auto& p : s.judge.validate()) problems.push_back(std::move(p));
  if (s.workers < 1) problems.emplace_back("eval.workers: must be >= 1");
  if (!problems.empty()) throw ValidationError("config " + path.string(), std::move(problems));
  return s;
}

void apply_environment(Settings& settings) {
  if (const char* endpoint = std::getenv("JUDGE_ENDPOINT"); endpoint && *endpoint) {
    settings.judge.endpoint = endpoint;
  }
}

}  // namespace dreward
