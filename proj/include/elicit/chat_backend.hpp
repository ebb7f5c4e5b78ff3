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

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "elicit/taxonomy.hpp"

namespace elicit {

struct SamplingParams {
  double temperature = 0.7;
  double top_p = 0.95;
  int max_output_tokens = 1024;

  bool operator==(const SamplingParams&) const = default;
};

/// One chat-completion call. The routing fields (output_id, language, ...)
/// stay local; only model, messages and sampling go on the wire.
struct ChatRequest {
  std::string output_id;
  std::string prompt_id;
  std::string model_id;
  std::string iso_code;
  TaskType task_type = TaskType::kCreative;
  std::string endpoint_url;
  std::string authorization;  // "Bearer <key>"
  std::string system_message;
  std::string user_message;
  SamplingParams sampling;
  int attempt = 1;  // set by execute() before each send

  /// OpenAI-style chat-completions body.
  std::string body() const;
};

/// Outcome of one HTTP exchange. status 0 means no HTTP response arrived
/// (connection failure or timeout).
struct ChatResponse {
  int status = 0;
  std::string response_text;
  std::string finish_reason;
  std::string error;
};

/// Transport for chat requests. Implementations must be safe to call from
/// several threads at once.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatResponse send(const ChatRequest& request) = 0;
};

/// HTTP(S) transport using the OpenAI chat-completions wire format.
class HttpChatBackend final : public ChatBackend {
 public:
  explicit HttpChatBackend(std::chrono::seconds timeout = std::chrono::seconds(120));
  ChatResponse send(const ChatRequest& request) override;

 private:
  std::chrono::seconds timeout_;
};

/// Parses a chat-completions response body into text and finish reason.
/// Returns false when the body does not have the expected shape.
bool parse_chat_completion(std::string_view body, std::string& text, std::string& finish_reason);

/// Offline backend serving canned responses keyed by output id.
///
/// Fixture file: {"<output_id>": {"response_text": "...", "status_schedule":
/// [429, 200], "finish_reason": "stop"}, ...}. Attempt k answers with
/// status_schedule[k-1]; the last status repeats past the end and an empty
/// schedule means 200. Status 0 simulates a timeout. Unknown ids get 404.
class MockChatBackend final : public ChatBackend {
 public:
  struct Fixture {
    std::string response_text;
    std::vector<int> status_schedule;
    std::string finish_reason = "stop";
  };

  struct Call {
    std::string output_id;
    int attempt = 0;
    int status = 0;
  };

  MockChatBackend() = default;
  explicit MockChatBackend(std::map<std::string, Fixture> fixtures);
  static std::map<std::string, Fixture> load_fixtures(const std::filesystem::path& path);

  ChatResponse send(const ChatRequest& request) override;

  /// Holds every request this long, to make overlap observable in tests.
  void set_latency(std::chrono::milliseconds latency) { latency_ = latency; }

  std::vector<Call> calls() const;
  std::size_t max_in_flight() const noexcept { return max_in_flight_.load(); }
  std::size_t fixture_count() const noexcept { return fixtures_.size(); }

 private:
  std::map<std::string, Fixture> fixtures_;
  std::chrono::milliseconds latency_{0};
  mutable std::mutex mutex_;
  std::vector<Call> calls_;
  std::atomic<std::size_t> in_flight_{0};
  std::atomic<std::size_t> max_in_flight_{0};
};

}  // namespace elicit
