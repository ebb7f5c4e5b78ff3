// Copyright 2026 The Elicit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stop_token>
#include <string>
#include <vector>

#include "elicit/chat_backend.hpp"
#include "elicit/error.hpp"
#include "elicit/taxonomy.hpp"

namespace elicit {

/// The persistence unit: one completed chat call.
struct GenerationRecord {
  std::string output_id;  // <model_id>/<iso_code>/<task_type>/<prompt_id>
  std::string prompt_id;
  std::string model_id;
  std::string language;  // iso code
  TaskType task_type = TaskType::kCreative;
  std::string rendered_prompt;
  std::string system_prompt;
  SamplingParams sampling;
  std::string response_text;
  std::string finish_reason;
  std::string request_timestamp;  // UTC, ISO 8601
  std::chrono::milliseconds latency{0};
  int attempt_count = 1;
};

std::string make_output_id(std::string_view model_id, std::string_view iso_code, TaskType task,
                           std::string_view prompt_id);

/// out_dir/<model>/<language>/<task_type>/<prompt_id>.json
std::filesystem::path record_path(const std::filesystem::path& out_dir,
                                  std::string_view output_id);

std::string record_to_json(const GenerationRecord& record);
GenerationRecord record_from_json(std::string_view text, const std::string& source);

/// Writes the record through a temp file and rename.
void write_record(const std::filesystem::path& out_dir, const GenerationRecord& record);

/// Every record under out_dir, sorted by output id. Throws ValidationError
/// when a file's output_id disagrees with its location.
std::vector<GenerationRecord> load_records(const std::filesystem::path& out_dir);

struct RetryPolicy {
  int max_retries = 5;
  std::chrono::milliseconds base_delay{1000};
  double factor = 2.0;
  std::chrono::milliseconds max_delay{60000};
  bool full_jitter = true;
};

/// Delay before retry number `retry` (0-based): min(max_delay,
/// base_delay * factor^retry), drawn uniformly from [0, that] with full jitter.
std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int retry,
                                        std::mt19937_64& rng);

/// 429, 408, any 5xx, and transport failures (status 0).
bool is_retryable_status(int status);

/// Non-retryable HTTP status (e.g. 401). No record is written.
class PermanentFailure : public OutputError {
 public:
  PermanentFailure(std::string output_id, int status, int attempts, const std::string& detail)
      : OutputError(std::move(output_id), "permanent failure (HTTP " + std::to_string(status) +
                                              "): " + detail),
        status_(status),
        attempts_(attempts) {}
  int status() const noexcept { return status_; }
  int attempts() const noexcept { return attempts_; }

 private:
  int status_;
  int attempts_;
};

/// Retryable failures persisted past max_retries.
class TransientFailure : public OutputError {
 public:
  TransientFailure(std::string output_id, int status, int attempts, const std::string& detail)
      : OutputError(std::move(output_id), "retries exhausted after " + std::to_string(attempts) +
                                              " attempts (last status " +
                                              std::to_string(status) + "): " + detail),
        status_(status),
        attempts_(attempts) {}
  int status() const noexcept { return status_; }
  int attempts() const noexcept { return attempts_; }

 private:
  int status_;
  int attempts_;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

/// Builds the chat request for one rendered prompt. The system message is
/// model.system_prompt_template rendered against `lang`; the key comes from
/// model.api_key_env_var. Throws ConfigError naming the variable when unset.
ChatRequest build_request(const PromptInstance& instance, const ModelConfig& model,
                          const LanguageConfig& lang, const EnvLookup& env = process_env);

struct ExecuteContext {
  Sleeper sleep;                        // defaults to std::this_thread::sleep_for
  std::mt19937_64* rng = nullptr;       // jitter source; a fixed-seed one if null
  std::function<void()> before_attempt; // e.g. rate limiting
};

/// Sends `request`, retrying retryable failures with backoff. Throws
/// PermanentFailure or TransientFailure; returns the record on 2xx.
GenerationRecord execute(ChatRequest request, ChatBackend& backend, const RetryPolicy& policy,
                         const ExecuteContext& context = {});

struct RunFailure {
  std::string output_id;
  int status = 0;
  int attempts = 0;
  bool permanent = false;
  std::string message;
};

struct RunManifest {
  std::vector<std::string> models;
  std::vector<std::string> languages;
  std::size_t expected_calls = 0;
  std::set<std::string> completed;
  std::vector<RunFailure> failures;  // sorted by output id
  std::size_t new_requests = 0;      // jobs dispatched in this run
  std::size_t skipped_existing = 0;  // already on disk at start
  bool interrupted = false;
};

std::string manifest_to_json(const RunManifest& manifest);

struct BatchOptions {
  int parallelism = 1;
  RetryPolicy retry;  // max_retries is taken from each ModelConfig
  std::uint64_t seed = 0;
  Sleeper sleep;
  EnvLookup env = process_env;
  /// Stop dispatching after this many new jobs.
  std::optional<std::size_t> max_new_requests;
  std::stop_token stop;
  std::function<void(const GenerationRecord&)> on_record;
};

/// Issues one request per (template, language, model) that has no record
/// file yet. `taxonomies` maps iso code to that language's templates.
/// Per-call failures land in the manifest; the batch keeps going.
RunManifest run_batch(const std::map<std::string, std::vector<PromptTemplate>>& taxonomies,
                      const std::vector<LanguageConfig>& languages,
                      const std::vector<ModelConfig>& models,
                      const std::filesystem::path& out_dir, ChatBackend& backend,
                      const BatchOptions& options = {});

}  // namespace elicit
