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


#include "elicit/chat_backend.hpp"

#include <algorithm>
#include <thread>

#include "elicit/error.hpp"
#include "json_util.hpp"

namespace elicit {

using detail::json;

std::string ChatRequest::body() const {
  json doc = {
      {"model", model_id},
      {"messages",
       json::array({{{"role", "system"}, {"content", system_message}},
                    {{"role", "user"}, {"content", user_message}}})},
      {"temperature", sampling.temperature},
      {"top_p", sampling.top_p},
      {"max_tokens", sampling.max_output_tokens},
  };
  return doc.dump();
}

bool parse_chat_completion(std::string_view body, std::string& text, std::string& finish_reason) {
  const json doc = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (!doc.is_object() || !doc.contains("choices") || !doc["choices"].is_array() ||
      doc["choices"].empty()) {
    return false;
  }
  const json& choice = doc["choices"][0];
  if (!choice.is_object() || !choice.contains("message")) return false;
  const json& message = choice["message"];
  if (!message.is_object()) return false;
  // Safety-filtered completions come back with a null content field.
  if (message.contains("content") && message["content"].is_string()) {
    text = message["content"].get<std::string>();
  } else {
    text.clear();
  }
  finish_reason = choice.contains("finish_reason") && choice["finish_reason"].is_string()
                      ? choice["finish_reason"].get<std::string>()
                      : std::string();
  return true;
}

MockChatBackend::MockChatBackend(std::map<std::string, Fixture> fixtures)
    : fixtures_(std::move(fixtures)) {}

std::map<std::string, MockChatBackend::Fixture> MockChatBackend::load_fixtures(
    const std::filesystem::path& path) {
  const std::string source = path.string();
  const json doc = detail::parse_json_file(path);
  if (!doc.is_object()) throw ParseError(source, "top level", "expected an object");
  std::map<std::string, Fixture> fixtures;
  for (const auto& [id, entry] : doc.items()) {
    Fixture fixture;
    fixture.response_text = detail::require<std::string>(entry, "response_text", source, id);
    fixture.status_schedule =
        detail::optional_field<std::vector<int>>(entry, "status_schedule", {}, source, id);
    fixture.finish_reason =
        detail::optional_field<std::string>(entry, "finish_reason", "stop", source, id);
    fixtures.emplace(id, std::move(fixture));
  }
  return fixtures;
}

ChatResponse MockChatBackend::send(const ChatRequest& request) {
  const std::size_t now = ++in_flight_;
  std::size_t seen = max_in_flight_.load();
  while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
  }
  if (latency_.count() > 0) std::this_thread::sleep_for(latency_);

  ChatResponse response;
  auto it = fixtures_.find(request.output_id);
  if (it == fixtures_.end()) {
    response.status = 404;
    response.error = "no mock fixture for " + request.output_id;
  } else {
    const auto& schedule = it->second.status_schedule;
    if (schedule.empty()) {
      response.status = 200;
    } else {
      const auto index = std::min<std::size_t>(static_cast<std::size_t>(request.attempt - 1),
                                               schedule.size() - 1);
      response.status = schedule[index];
    }
    if (response.status >= 200 && response.status < 300) {
      response.response_text = it->second.response_text;
      response.finish_reason = it->second.finish_reason;
    } else {
      response.error = response.status == 0 ? "simulated timeout" : "simulated failure";
    }
  }

  {
    std::lock_guard lock(mutex_);
    calls_.push_back({request.output_id, request.attempt, response.status});
  }
  --in_flight_;
  return response;
}

std::vector<MockChatBackend::Call> MockChatBackend::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

}  // namespace elicit
