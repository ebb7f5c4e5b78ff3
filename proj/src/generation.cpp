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


#include "elicit/generation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <mutex>
#include <thread>

#include "json_util.hpp"

namespace elicit {

namespace fs = std::filesystem;
using detail::json;

namespace {

std::string utc_timestamp(std::chrono::system_clock::time_point when) {
  const auto seconds = std::chrono::time_point_cast<std::chrono::seconds>(when);
  const auto millis =
      std::chrono::duration_cast<std::chrono::milliseconds>(when - seconds).count();
  const std::time_t t = std::chrono::system_clock::to_time_t(seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(millis));
  return out;
}

void default_sleep(std::chrono::milliseconds d) {
  if (d.count() > 0) std::this_thread::sleep_for(d);
}

// Spaces successive requests to one endpoint by at least the configured gap.
class EndpointRateLimiter {
 public:
  void configure(const std::string& endpoint, std::chrono::milliseconds interval) {
    auto& slot = slots_[endpoint];
    slot.interval = std::max(slot.interval, interval);
  }

  void acquire(const std::string& endpoint) {
    auto it = slots_.find(endpoint);
    if (it == slots_.end() || it->second.interval.count() == 0) return;
    Slot& slot = it->second;
    std::chrono::steady_clock::time_point when;
    {
      std::lock_guard lock(slot.mutex);
      const auto now = std::chrono::steady_clock::now();
      when = std::max(now, slot.next);
      slot.next = when + slot.interval;
    }
    std::this_thread::sleep_until(when);
  }

 private:
  struct Slot {
    std::mutex mutex;
    std::chrono::milliseconds interval{0};
    std::chrono::steady_clock::time_point next{};
  };
  std::map<std::string, Slot> slots_;
};

std::mt19937_64 job_rng(std::uint64_t seed, std::string_view output_id) {
  std::vector<std::uint32_t> material = {static_cast<std::uint32_t>(seed),
                                         static_cast<std::uint32_t>(seed >> 32)};
  for (unsigned char c : output_id) material.push_back(c);
  std::seed_seq seq(material.begin(), material.end());
  return std::mt19937_64(seq);
}

struct Job {
  ChatRequest request;
  const ModelConfig* model = nullptr;
};

}  // namespace

std::string make_output_id(std::string_view model_id, std::string_view iso_code, TaskType task,
                           std::string_view prompt_id) {
  std::string id;
  id.append(model_id).append("/").append(iso_code).append("/");
  id.append(to_string(task)).append("/").append(prompt_id);
  return id;
}

fs::path record_path(const fs::path& out_dir, std::string_view output_id) {
  fs::path path = out_dir / fs::path(std::string(output_id));
  path += ".json";
  return path;
}

std::string record_to_json(const GenerationRecord& record) {
  json doc = {
      {"output_id", record.output_id},
      {"prompt_id", record.prompt_id},
      {"model_id", record.model_id},
      {"language", record.language},
      {"task_type", std::string(to_string(record.task_type))},
      {"rendered_prompt", record.rendered_prompt},
      {"system_prompt", record.system_prompt},
      {"sampling",
       {{"temperature", record.sampling.temperature},
        {"top_p", record.sampling.top_p},
        {"max_output_tokens", record.sampling.max_output_tokens}}},
      {"response_text", record.response_text},
      {"finish_reason", record.finish_reason},
      {"request_timestamp", record.request_timestamp},
      {"latency_ms", record.latency.count()},
      {"attempt_count", record.attempt_count},
  };
  return doc.dump(2) + "\n";
}

GenerationRecord record_from_json(std::string_view text, const std::string& source) {
  const json doc = detail::parse_json(text, source);
  const std::string where = "record";
  GenerationRecord record;
  record.output_id = detail::require<std::string>(doc, "output_id", source, where);
  record.prompt_id = detail::require<std::string>(doc, "prompt_id", source, where);
  record.model_id = detail::require<std::string>(doc, "model_id", source, where);
  record.language = detail::require<std::string>(doc, "language", source, where);
  const auto type_name = detail::require<std::string>(doc, "task_type", source, where);
  const auto type = parse_task_type(type_name);
  if (!type) throw ParseError(source, where, "unknown task_type '" + type_name + "'");
  record.task_type = *type;
  record.rendered_prompt = detail::require<std::string>(doc, "rendered_prompt", source, where);
  record.system_prompt = detail::require<std::string>(doc, "system_prompt", source, where);
  const json sampling = detail::require<json>(doc, "sampling", source, where);
  record.sampling.temperature = detail::require<double>(sampling, "temperature", source, where);
  record.sampling.top_p = detail::require<double>(sampling, "top_p", source, where);
  record.sampling.max_output_tokens =
      detail::require<int>(sampling, "max_output_tokens", source, where);
  record.response_text = detail::require<std::string>(doc, "response_text", source, where);
  record.finish_reason =
      detail::optional_field<std::string>(doc, "finish_reason", "", source, where);
  record.request_timestamp =
      detail::optional_field<std::string>(doc, "request_timestamp", "", source, where);
  record.latency = std::chrono::milliseconds(
      detail::optional_field<long long>(doc, "latency_ms", 0, source, where));
  record.attempt_count = detail::require<int>(doc, "attempt_count", source, where);
  if (record.attempt_count < 1) throw ParseError(source, where, "attempt_count must be >= 1");
  if (record.output_id !=
      make_output_id(record.model_id, record.language, record.task_type, record.prompt_id)) {
    throw ValidationError(source + ": output_id '" + record.output_id +
                          "' disagrees with its model/language/task/prompt fields");
  }
  return record;
}

void write_record(const fs::path& out_dir, const GenerationRecord& record) {
  detail::write_file_atomic(record_path(out_dir, record.output_id), record_to_json(record));
}

std::vector<GenerationRecord> load_records(const fs::path& out_dir) {
  if (!fs::is_directory(out_dir)) throw ConfigError("outputs directory not found: " + out_dir.string());
  std::vector<GenerationRecord> records;
  for (const auto& entry : fs::recursive_directory_iterator(out_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    const fs::path rel = fs::relative(entry.path(), out_dir);
    if (std::distance(rel.begin(), rel.end()) != 4) continue;  // manifest.json and strays
    GenerationRecord record =
        record_from_json(detail::read_file(entry.path()), entry.path().string());
    fs::path expected = fs::path(record.output_id);
    expected += ".json";
    if (rel.generic_string() != expected.generic_string()) {
      throw ValidationError(entry.path().string() + ": output_id '" + record.output_id +
                            "' does not match file location");
    }
    records.push_back(std::move(record));
  }
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.output_id < b.output_id; });
  return records;
}

std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int retry,
                                        std::mt19937_64& rng) {
  const double base = static_cast<double>(policy.base_delay.count());
  const double cap = static_cast<double>(policy.max_delay.count());
  const double ceiling = std::min(cap, base * std::pow(policy.factor, std::max(retry, 0)));
  if (!policy.full_jitter) return std::chrono::milliseconds(std::llround(ceiling));
  std::uniform_real_distribution<double> dist(0.0, ceiling);
  return std::chrono::milliseconds(std::llround(dist(rng)));
}

bool is_retryable_status(int status) {
  return status == 0 || status == 408 || status == 429 || (status >= 500 && status <= 599);
}

std::optional<std::string> process_env(const std::string& name) {
  const char* value = std::getenv(name.c_str());
  if (value == nullptr || *value == '\0') return std::nullopt;
  return std::string(value);
}

ChatRequest build_request(const PromptInstance& instance, const ModelConfig& model,
                          const LanguageConfig& lang, const EnvLookup& env) {
  ChatRequest request;
  request.prompt_id = instance.template_id;
  request.model_id = model.model_id;
  request.iso_code = lang.iso_code;
  request.task_type = instance.task_type;
  request.output_id =
      make_output_id(model.model_id, lang.iso_code, instance.task_type, instance.template_id);
  request.endpoint_url = model.endpoint_url;
  request.system_message =
      render_text(model.system_prompt_template, lang, "system prompt of " + model.model_id);
  request.user_message = instance.rendered_text;
  request.sampling = {model.temperature, model.top_p, model.max_output_tokens};

  const auto key = env(model.api_key_env_var);
  if (!key) {
    throw ConfigError("environment variable " + model.api_key_env_var + " (API key for " +
                      model.model_id + ") is not set");
  }
  request.authorization = "Bearer " + *key;
  return request;
}

GenerationRecord execute(ChatRequest request, ChatBackend& backend, const RetryPolicy& policy,
                         const ExecuteContext& context) {
  std::mt19937_64 fallback_rng(0);
  std::mt19937_64& rng = context.rng != nullptr ? *context.rng : fallback_rng;
  const Sleeper& sleep = context.sleep ? context.sleep : Sleeper(default_sleep);

  for (int attempt = 1;; ++attempt) {
    request.attempt = attempt;
    if (context.before_attempt) context.before_attempt();
    const auto started_wall = std::chrono::system_clock::now();
    const auto started = std::chrono::steady_clock::now();
    ChatResponse response;
    try {
      response = backend.send(request);
    } catch (const std::exception& e) {
      response = ChatResponse{0, "", "", e.what()};
    }
    const auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);

    if (response.status >= 200 && response.status < 300) {
      GenerationRecord record;
      record.output_id = request.output_id;
      record.prompt_id = request.prompt_id;
      record.model_id = request.model_id;
      record.language = request.iso_code;
      record.task_type = request.task_type;
      record.rendered_prompt = request.user_message;
      record.system_prompt = request.system_message;
      record.sampling = request.sampling;
      record.response_text = std::move(response.response_text);
      record.finish_reason = std::move(response.finish_reason);
      record.request_timestamp = utc_timestamp(started_wall);
      record.latency = latency;
      record.attempt_count = attempt;
      return record;
    }
    if (!is_retryable_status(response.status)) {
      throw PermanentFailure(request.output_id, response.status, attempt, response.error);
    }
    if (attempt > policy.max_retries) {
      throw TransientFailure(request.output_id, response.status, attempt, response.error);
    }
    sleep(backoff_delay(policy, attempt - 1, rng));
  }
}

std::string manifest_to_json(const RunManifest& manifest) {
  json failures = json::array();
  for (const auto& f : manifest.failures) {
    failures.push_back({{"output_id", f.output_id},
                        {"status", f.status},
                        {"attempts", f.attempts},
                        {"permanent", f.permanent},
                        {"message", f.message}});
  }
  json doc = {
      {"models", manifest.models},
      {"languages", manifest.languages},
      {"expected_calls", manifest.expected_calls},
      {"completed", manifest.completed},
      {"failures", failures},
  };
  return doc.dump(2) + "\n";
}

RunManifest run_batch(const std::map<std::string, std::vector<PromptTemplate>>& taxonomies,
                      const std::vector<LanguageConfig>& languages,
                      const std::vector<ModelConfig>& models, const fs::path& out_dir,
                      ChatBackend& backend, const BatchOptions& options) {
  if (options.parallelism < 1) throw ArgumentError("parallelism must be >= 1");

  RunManifest manifest;
  for (const auto& model : models) manifest.models.push_back(model.model_id);
  for (const auto& lang : languages) manifest.languages.push_back(lang.iso_code);

  // Render everything up front so configuration errors surface before any call.
  std::vector<Job> jobs;
  EndpointRateLimiter limiter;
  for (const auto& model : models) {
    limiter.configure(model.endpoint_url, model.min_request_interval);
    for (const auto& lang : languages) {
      auto it = taxonomies.find(lang.iso_code);
      if (it == taxonomies.end()) {
        throw ConfigError("no taxonomy loaded for language " + lang.iso_code);
      }
      for (const auto& tmpl : it->second) {
        jobs.push_back({build_request(render_prompt(tmpl, lang), model, lang, options.env), &model});
      }
    }
  }
  std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
    return a.request.output_id < b.request.output_id;
  });
  for (std::size_t i = 1; i < jobs.size(); ++i) {
    if (jobs[i].request.output_id == jobs[i - 1].request.output_id) {
      throw ValidationError("duplicate output id " + jobs[i].request.output_id);
    }
  }
  manifest.expected_calls = jobs.size();

  std::vector<const Job*> pending;
  for (const auto& job : jobs) {
    if (fs::exists(record_path(out_dir, job.request.output_id))) {
      ++manifest.skipped_existing;
    } else {
      pending.push_back(&job);
    }
  }

  std::mutex mutex;  // guards manifest, next, on_record
  std::size_t next = 0;
  auto take = [&]() -> const Job* {
    std::lock_guard lock(mutex);
    if (next >= pending.size() || options.stop.stop_requested()) return nullptr;
    if (options.max_new_requests && manifest.new_requests >= *options.max_new_requests) {
      return nullptr;
    }
    ++manifest.new_requests;
    return pending[next++];
  };

  auto worker = [&] {
    while (const Job* job = take()) {
      RetryPolicy policy = options.retry;
      policy.max_retries = job->model->max_retries;
      std::mt19937_64 rng = job_rng(options.seed, job->request.output_id);
      ExecuteContext context;
      context.sleep = options.sleep;
      context.rng = &rng;
      const std::string& endpoint = job->request.endpoint_url;
      context.before_attempt = [&limiter, &endpoint] { limiter.acquire(endpoint); };
      try {
        GenerationRecord record = execute(job->request, backend, policy, context);
        write_record(out_dir, record);
        std::lock_guard lock(mutex);
        manifest.completed.insert(record.output_id);
        if (options.on_record) options.on_record(record);
      } catch (const PermanentFailure& e) {
        std::lock_guard lock(mutex);
        manifest.failures.push_back(
            {job->request.output_id, e.status(), e.attempts(), true, e.what()});
      } catch (const TransientFailure& e) {
        std::lock_guard lock(mutex);
        manifest.failures.push_back(
            {job->request.output_id, e.status(), e.attempts(), false, e.what()});
      } catch (const std::exception& e) {
        std::lock_guard lock(mutex);
        manifest.failures.push_back({job->request.output_id, 0, 0, false, e.what()});
      }
    }
  };

  {
    std::vector<std::jthread> threads;
    const auto count = std::min<std::size_t>(static_cast<std::size_t>(options.parallelism),
                                             std::max<std::size_t>(pending.size(), 1));
    for (std::size_t i = 0; i < count; ++i) threads.emplace_back(worker);
  }

  manifest.interrupted = next < pending.size();
  manifest.completed.clear();
  for (const auto& job : jobs) {
    if (fs::exists(record_path(out_dir, job.request.output_id))) {
      manifest.completed.insert(job.request.output_id);
    }
  }
  std::sort(manifest.failures.begin(), manifest.failures.end(),
            [](const auto& a, const auto& b) { return a.output_id < b.output_id; });
  fs::create_directories(out_dir);
  detail::write_file_atomic(out_dir / "manifest.json", manifest_to_json(manifest));
  return manifest;
}

}  // namespace elicit
