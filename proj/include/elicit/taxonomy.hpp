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

#include <array>
#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace elicit {

/// The six elicitation task categories.
enum class TaskType { kCreative, kFunctional, kStructured, kDialogue, kTopicSwitch, kConstrained };

inline constexpr std::array<TaskType, 6> kAllTaskTypes = {
    TaskType::kConstrained, TaskType::kCreative,   TaskType::kDialogue,
    TaskType::kFunctional,  TaskType::kStructured, TaskType::kTopicSwitch};

/// Wire name, e.g. "topic_switch".
std::string_view to_string(TaskType type);
std::optional<TaskType> parse_task_type(std::string_view name);

/// Two-letter id prefix that goes with a task type ("cg" for constrained).
std::string_view id_prefix(TaskType type);

struct PromptTemplate {
  std::string id;  // <prefix>_<NN>
  TaskType task_type = TaskType::kCreative;
  std::string subtask;
  std::string template_text;
  std::set<std::string> required_placeholders;
};

struct PromptInstance {
  std::string template_id;
  std::string iso_code;
  TaskType task_type = TaskType::kCreative;
  std::string rendered_text;
};

struct LanguageConfig {
  std::string name;
  std::string iso_code;
  std::string target_lid_label;
  std::string culture_name;
  std::string colonial_language;
  bool tonal_orthography = false;
  std::map<std::string, std::vector<std::string>> word_lists;
};

struct ModelConfig {
  std::string model_id;
  std::string endpoint_url;
  std::string api_key_env_var;
  double temperature = 0.7;
  double top_p = 0.95;
  int max_output_tokens = 1024;
  std::string system_prompt_template;
  int max_retries = 5;
  std::chrono::milliseconds min_request_interval{0};
};

struct ValidationReport {
  std::map<TaskType, int> task_type_counts;
  /// "<template id>: {<name>}" per offending placeholder.
  std::vector<std::string> unknown_placeholders;
  /// "<template id>: prefix <p> does not match task_type <t>".
  std::vector<std::string> prefix_mismatches;
  bool ok = false;
};

/// Placeholder names appearing as `{name}` in text, in order of first use.
std::vector<std::string> find_placeholders(std::string_view text);

/// True for language, language_culture, colonial_language and word_list_<k>.
bool is_known_placeholder(std::string_view name);

/// Reads a taxonomy file. Accepts either a bare array of
/// {id, task_type, subtask, template} objects or an object
/// {"schema_version": 1, "templates": [...]}.
/// Throws ParseError on malformed input and ValidationError on duplicate ids
/// or an empty template list.
std::vector<PromptTemplate> load_taxonomy(const std::filesystem::path& path);

ValidationReport validate_taxonomy(const std::vector<PromptTemplate>& templates);

/// Substitutes every placeholder from `lang`. Word lists are joined with ", ".
/// Throws ConfigError naming the placeholder and template id when a
/// placeholder cannot be resolved.
PromptInstance render_prompt(const PromptTemplate& tmpl, const LanguageConfig& lang);

/// Renders an arbitrary template string against `lang`; `context` names the
/// source in error messages.
std::string render_text(std::string_view text, const LanguageConfig& lang,
                        std::string_view context);

std::vector<LanguageConfig> load_languages(const std::filesystem::path& path);
std::vector<ModelConfig> load_models(const std::filesystem::path& path);

}  // namespace elicit
