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


#include "elicit/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "elicit/error.hpp"
#include "json_util.hpp"

namespace elicit {

using detail::json;

namespace {

struct TaskTypeInfo {
  TaskType type;
  std::string_view name;
  std::string_view prefix;
};

constexpr std::array<TaskTypeInfo, 6> kTaskTypeInfo = {{
    {TaskType::kCreative, "creative", "cw"},
    {TaskType::kFunctional, "functional", "ft"},
    {TaskType::kStructured, "structured", "sk"},
    {TaskType::kDialogue, "dialogue", "dl"},
    {TaskType::kTopicSwitch, "topic_switch", "ts"},
    {TaskType::kConstrained, "constrained", "cg"},
}};

const TaskTypeInfo& info(TaskType type) {
  for (const auto& entry : kTaskTypeInfo) {
    if (entry.type == type) return entry;
  }
  throw ArgumentError("invalid task type");
}

bool is_placeholder_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

bool is_template_id(std::string_view id) {
  if (id.size() < 5 || id[2] != '_') return false;
  if (!std::islower(static_cast<unsigned char>(id[0])) ||
      !std::islower(static_cast<unsigned char>(id[1]))) {
    return false;
  }
  return std::all_of(id.begin() + 3, id.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

// Accepts a bare array or {"schema_version": N, "<key>": [...]}.
const json& entries_of(const json& doc, const char* key, const std::string& source) {
  if (doc.is_array()) return doc;
  if (doc.is_object()) {
    int version = detail::require<int>(doc, "schema_version", source, "top level");
    if (version != 1) {
      throw ParseError(source, "top level",
                       "unsupported schema_version " + std::to_string(version));
    }
    if (!doc.contains(key) || !doc.at(key).is_array()) {
      throw ParseError(source, "top level", std::string("expected array '") + key + "'");
    }
    return doc.at(key);
  }
  throw ParseError(source, "top level", "expected an array or object");
}

bool is_blank(std::string_view text) {
  return std::all_of(text.begin(), text.end(),
                     [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace

std::string_view to_string(TaskType type) { return info(type).name; }

std::optional<TaskType> parse_task_type(std::string_view name) {
  for (const auto& entry : kTaskTypeInfo) {
    if (entry.name == name) return entry.type;
  }
  return std::nullopt;
}

std::string_view id_prefix(TaskType type) { return info(type).prefix; }

std::vector<std::string> find_placeholders(std::string_view text) {
  std::vector<std::string> names;
  std::size_t pos = 0;
  while ((pos = text.find('{', pos)) != std::string_view::npos) {
    std::size_t end = pos + 1;
    while (end < text.size() && is_placeholder_char(text[end])) ++end;
    if (end < text.size() && end > pos + 1 && text[end] == '}') {
      std::string name(text.substr(pos + 1, end - pos - 1));
      if (std::find(names.begin(), names.end(), name) == names.end()) {
        names.push_back(std::move(name));
      }
      pos = end + 1;
    } else {
      pos = pos + 1;
    }
  }
  return names;
}

bool is_known_placeholder(std::string_view name) {
  if (name == "language" || name == "language_culture" || name == "colonial_language") {
    return true;
  }
  constexpr std::string_view kWordList = "word_list_";
  if (!name.starts_with(kWordList) || name.size() == kWordList.size()) return false;
  return std::all_of(name.begin() + kWordList.size(), name.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

std::vector<PromptTemplate> load_taxonomy(const std::filesystem::path& path) {
  const std::string source = path.string();
  const std::string text = detail::read_file(path);
  if (is_blank(text)) throw ValidationError(source + ": no templates");

  const json doc = detail::parse_json(text, source);
  const json& entries = entries_of(doc, "templates", source);
  if (entries.empty()) throw ValidationError(source + ": no templates");

  std::vector<PromptTemplate> templates;
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const json& entry = entries[i];
    const std::string where = "templates[" + std::to_string(i) + "]";
    PromptTemplate tmpl;
    tmpl.id = detail::require<std::string>(entry, "id", source, where);
    if (!is_template_id(tmpl.id)) {
      throw ParseError(source, where, "malformed id '" + tmpl.id + "'");
    }
    auto type_name = detail::require<std::string>(entry, "task_type", source, where);
    auto type = parse_task_type(type_name);
    if (!type) throw ParseError(source, where, "unknown task_type '" + type_name + "'");
    tmpl.task_type = *type;
    tmpl.subtask = detail::optional_field<std::string>(entry, "subtask", "", source, where);
    tmpl.template_text = detail::require<std::string>(entry, "template", source, where);
    for (auto& name : find_placeholders(tmpl.template_text)) {
      tmpl.required_placeholders.insert(std::move(name));
    }

    auto [it, inserted] = seen.emplace(tmpl.id, i);
    if (!inserted) {
      throw ValidationError(source + ": duplicate id '" + tmpl.id + "' at templates[" +
                            std::to_string(it->second) + "] and " + where);
    }
    templates.push_back(std::move(tmpl));
  }
  return templates;
}

ValidationReport validate_taxonomy(const std::vector<PromptTemplate>& templates) {
  ValidationReport report;
  for (TaskType type : kAllTaskTypes) report.task_type_counts[type] = 0;
  for (const auto& tmpl : templates) {
    ++report.task_type_counts[tmpl.task_type];
    for (const auto& name : find_placeholders(tmpl.template_text)) {
      if (!is_known_placeholder(name)) {
        report.unknown_placeholders.push_back(tmpl.id + ": {" + name + "}");
      }
    }
    std::string_view prefix = std::string_view(tmpl.id).substr(0, tmpl.id.find('_'));
    if (prefix != id_prefix(tmpl.task_type)) {
      report.prefix_mismatches.push_back(tmpl.id + ": prefix " + std::string(prefix) +
                                         " does not match task_type " +
                                         std::string(to_string(tmpl.task_type)));
    }
  }
  report.ok = report.unknown_placeholders.empty() && report.prefix_mismatches.empty();
  return report;
}

std::string render_text(std::string_view text, const LanguageConfig& lang,
                        std::string_view context) {
  std::string out;
  out.reserve(text.size() + 64);
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t open = text.find('{', pos);
    if (open == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    out.append(text.substr(pos, open - pos));
    std::size_t end = open + 1;
    while (end < text.size() && is_placeholder_char(text[end])) ++end;
    if (end >= text.size() || end == open + 1 || text[end] != '}') {
      out.push_back('{');
      pos = open + 1;
      continue;
    }
    const std::string name(text.substr(open + 1, end - open - 1));
    std::string value;
    if (name == "language") {
      value = lang.name;
    } else if (name == "language_culture") {
      value = lang.culture_name;
    } else if (name == "colonial_language") {
      value = lang.colonial_language;
    } else if (auto it = lang.word_lists.find(name); it != lang.word_lists.end()) {
      value = join(it->second, ", ");
    }
    if (value.empty()) {
      throw ConfigError("unresolvable placeholder {" + name + "} in " + std::string(context) +
                        " for language " + lang.iso_code);
    }
    out += value;
    pos = end + 1;
  }
  return out;
}

PromptInstance render_prompt(const PromptTemplate& tmpl, const LanguageConfig& lang) {
  PromptInstance instance;
  instance.template_id = tmpl.id;
  instance.iso_code = lang.iso_code;
  instance.task_type = tmpl.task_type;
  instance.rendered_text = render_text(tmpl.template_text, lang, "template " + tmpl.id);
  return instance;
}

std::vector<LanguageConfig> load_languages(const std::filesystem::path& path) {
  const std::string source = path.string();
  const json doc = detail::parse_json_file(path);
  const json& entries = entries_of(doc, "languages", source);

  std::vector<LanguageConfig> languages;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const json& entry = entries[i];
    const std::string where = "languages[" + std::to_string(i) + "]";
    LanguageConfig lang;
    lang.name = detail::require<std::string>(entry, "name", source, where);
    lang.iso_code = detail::require<std::string>(entry, "iso_code", source, where);
    lang.target_lid_label = detail::require<std::string>(entry, "target_lid_label", source, where);
    lang.culture_name =
        detail::optional_field<std::string>(entry, "culture_name", lang.name, source, where);
    lang.colonial_language =
        detail::require<std::string>(entry, "colonial_language", source, where);
    lang.tonal_orthography =
        detail::optional_field<bool>(entry, "tonal_orthography", false, source, where);
    lang.word_lists = detail::optional_field<std::map<std::string, std::vector<std::string>>>(
        entry, "word_lists", {}, source, where);

    if (lang.iso_code.empty()) throw ValidationError(source + ": " + where + ": empty iso_code");
    if (lang.target_lid_label.empty()) {
      throw ValidationError(source + ": " + where + ": empty target_lid_label");
    }
    if (lang.colonial_language.empty()) {
      throw ValidationError(source + ": " + where + ": empty colonial_language");
    }
    for (const auto& [key, words] : lang.word_lists) {
      if (!is_known_placeholder(key) || !key.starts_with("word_list_")) {
        throw ValidationError(source + ": " + where + ": bad word list name '" + key + "'");
      }
      for (const auto& word : words) {
        if (!find_placeholders(word).empty()) {
          throw ValidationError(source + ": " + where + ": word list " + key +
                                " contains a placeholder");
        }
      }
    }
    for (const auto& other : languages) {
      if (other.iso_code == lang.iso_code) {
        throw ValidationError(source + ": duplicate iso_code '" + lang.iso_code + "'");
      }
    }
    languages.push_back(std::move(lang));
  }
  return languages;
}

std::vector<ModelConfig> load_models(const std::filesystem::path& path) {
  const std::string source = path.string();
  const json doc = detail::parse_json_file(path);
  const json& entries = entries_of(doc, "models", source);

  std::vector<ModelConfig> models;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const json& entry = entries[i];
    const std::string where = "models[" + std::to_string(i) + "]";
    if (entry.contains("api_key")) {
      throw ValidationError(source + ": " + where +
                            ": api keys must not be stored in config; use api_key_env_var");
    }
    ModelConfig model;
    model.model_id = detail::require<std::string>(entry, "model_id", source, where);
    model.endpoint_url = detail::require<std::string>(entry, "endpoint_url", source, where);
    model.api_key_env_var = detail::require<std::string>(entry, "api_key_env_var", source, where);
    model.temperature = detail::optional_field<double>(entry, "temperature", 0.7, source, where);
    model.top_p = detail::optional_field<double>(entry, "top_p", 0.95, source, where);
    model.max_output_tokens =
        detail::optional_field<int>(entry, "max_output_tokens", 1024, source, where);
    model.system_prompt_template =
        detail::require<std::string>(entry, "system_prompt_template", source, where);
    model.max_retries = detail::optional_field<int>(entry, "max_retries", 5, source, where);
    model.min_request_interval = std::chrono::milliseconds(
        detail::optional_field<long long>(entry, "min_request_interval_ms", 0, source, where));

    auto fail = [&](const std::string& what) {
      throw ValidationError(source + ": " + where + " (" + model.model_id + "): " + what);
    };
    if (model.model_id.empty() || model.model_id.find('/') != std::string::npos) {
      fail("model_id must be nonempty and contain no '/'");
    }
    if (!(model.temperature >= 0.0)) fail("temperature must be >= 0");
    if (!(model.top_p > 0.0 && model.top_p <= 1.0)) fail("top_p must be in (0, 1]");
    if (model.max_output_tokens <= 0) fail("max_output_tokens must be > 0");
    if (model.max_retries < 0) fail("max_retries must be >= 0");
    if (model.min_request_interval.count() < 0) fail("min_request_interval_ms must be >= 0");
    for (const auto& other : models) {
      if (other.model_id == model.model_id) fail("duplicate model_id");
    }
    models.push_back(std::move(model));
  }
  return models;
}

}  // namespace elicit
