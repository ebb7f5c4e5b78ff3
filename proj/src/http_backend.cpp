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

#include "httplib.h"

namespace elicit {

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  const auto path_start =
      url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpChatBackend::HttpChatBackend(std::chrono::seconds timeout) : timeout_(timeout) {}

ChatResponse HttpChatBackend::send(const ChatRequest& request) {
  ChatResponse response;
  const ParsedUrl url = split_url(request.endpoint_url);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (url.origin.starts_with("https://")) {
    response.status = 0;
    response.error = "built without TLS support; cannot reach " + url.origin;
    return response;
  }
#endif
  httplib::Client client(url.origin);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);

  httplib::Headers headers;
  if (!request.authorization.empty()) headers.emplace("Authorization", request.authorization);

  auto result = client.Post(url.path, headers, request.body(), "application/json");
  if (!result) {
    response.status = 0;
    response.error = httplib::to_string(result.error());
    return response;
  }
  response.status = result->status;
  if (response.status < 200 || response.status >= 300) {
    response.error = result->body.substr(0, 512);
    return response;
  }
  if (!parse_chat_completion(result->body, response.response_text, response.finish_reason)) {
    // Treated like a dropped connection so the call is retried.
    response.status = 0;
    response.error = "malformed chat-completion response";
  }
  return response;
}

}  // namespace elicit
