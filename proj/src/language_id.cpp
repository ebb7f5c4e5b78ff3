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


#include "elicit/language_id.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "elicit/error.hpp"
#include "json_util.hpp"

namespace elicit {

using detail::json;

namespace {

constexpr std::size_t kMinSentenceChars = 3;

std::vector<double> softmax(const std::vector<double>& scores) {
  std::vector<double> out(scores.size());
  if (scores.empty()) return out;
  const double peak = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(scores[i] - peak);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

// First maximum wins; labels are sorted so this is the lexicographic tie-break.
std::size_t argmax(const std::vector<double>& scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

}  // namespace

const TrigramProfile& LanguageProfileSet::profile(std::string_view label) const {
  auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label) {
    throw ArgumentError("no profile for label '" + std::string(label) + "'");
  }
  return profiles_[static_cast<std::size_t>(it - labels_.begin())];
}

std::vector<double> LanguageProfileSet::scores(const TrigramProfile& text_profile) const {
  std::vector<double> out(labels_.size());
  const double text_norm = text_profile.norm();
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    out[i] = cosine(text_profile, text_norm, profiles_[i], norms_[i]);
  }
  return out;
}

void LanguageProfileSet::add(std::string label, TrigramProfile profile) {
  if (profile.empty()) throw ValidationError("empty profile for label '" + label + "'");
  auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it != labels_.end() && *it == label) {
    throw ValidationError("duplicate label '" + label + "'");
  }
  const auto index = it - labels_.begin();
  norms_.insert(norms_.begin() + index, profile.norm());
  profiles_.insert(profiles_.begin() + index, std::move(profile));
  labels_.insert(it, std::move(label));
}

LanguageProfileSet train_profiles(const std::map<std::string, std::vector<std::string>>& seeds) {
  LanguageProfileSet set;
  for (const auto& [label, documents] : seeds) {
    TrigramProfile merged;
    for (const auto& doc : documents) merged.merge(trigram_profile(doc));
    if (merged.empty()) {
      throw ValidationError("empty seed corpus for label '" + label + "'");
    }
    set.add(label, std::move(merged));
  }
  return set;
}

LanguageProfileSet load_seed_profiles(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ConfigError("seed directory not found: " + dir.string());
  std::map<std::string, std::vector<std::string>> seeds;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    if (!in) throw Error("cannot open " + entry.path().string());
    auto& docs = seeds[entry.path().stem().string()];
    for (std::string line; std::getline(in, line);) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) docs.push_back(std::move(line));
    }
  }
  if (seeds.empty()) throw ConfigError("no seed corpora (*.txt) in " + dir.string());
  return train_profiles(seeds);
}

std::vector<double> label_distribution(std::string_view text, const LanguageProfileSet& profiles) {
  if (profiles.empty()) throw ArgumentError("classify: empty profile set");
  const TrigramProfile profile = trigram_profile(text);
  if (profile.empty()) return {};
  return softmax(profiles.scores(profile));
}

LidPrediction classify(std::string_view text, const LanguageProfileSet& profiles) {
  if (profiles.empty()) throw ArgumentError("classify: empty profile set");
  const TrigramProfile profile = trigram_profile(text);
  if (profile.empty()) return {std::string(kUndetermined), 0.0};
  const std::vector<double> scores = profiles.scores(profile);
  const std::size_t best = argmax(scores);
  return {profiles.labels()[best], softmax(scores)[best]};
}

double code_switch_rate(const std::vector<LidPrediction>& sentences, std::string_view target) {
  if (sentences.empty()) return 0.0;
  const auto off_target = std::count_if(sentences.begin(), sentences.end(),
                                        [&](const LidPrediction& p) { return p.label != target; });
  return static_cast<double>(off_target) / static_cast<double>(sentences.size());
}

BuiltinLidBackend::BuiltinLidBackend(LanguageProfileSet profiles) : profiles_(std::move(profiles)) {
  if (profiles_.empty()) throw ArgumentError("builtin LID backend needs at least one profile");
}

FidelityResult BuiltinLidBackend::assess(std::string_view /*output_id*/, std::string_view text,
                                         std::string_view target) const {
  FidelityResult result;
  const TrigramProfile doc_profile = trigram_profile(text);
  if (doc_profile.empty()) {
    result.document_prediction = {std::string(kUndetermined), 0.0};
    return result;
  }
  const std::vector<double> scores = profiles_.scores(doc_profile);
  const std::vector<double> mass = softmax(scores);
  const std::size_t best = argmax(scores);
  result.document_prediction = {profiles_.labels()[best], mass[best]};
  result.is_target = result.document_prediction.label == target;
  const auto& labels = profiles_.labels();
  if (auto it = std::lower_bound(labels.begin(), labels.end(), target);
      it != labels.end() && *it == target) {
    result.target_confidence = mass[static_cast<std::size_t>(it - labels.begin())];
  }

  for (const auto& sentence : segment_sentences(text)) {
    if (code_point_count(normalize_for_profile(sentence)) < kMinSentenceChars) {
      result.sentence_predictions.push_back(result.document_prediction);
    } else {
      result.sentence_predictions.push_back(classify(sentence, profiles_));
    }
  }
  result.code_switch_rate = code_switch_rate(result.sentence_predictions, target);
  return result;
}

std::map<std::string, PredictionBundle> load_external_predictions(
    const std::filesystem::path& path) {
  const std::string source = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + source);

  auto check_conf = [&](double conf, const std::string& where) {
    if (!(conf >= 0.0 && conf <= 1.0)) {
      throw ParseError(source, where, "confidence outside [0, 1]");
    }
  };

  std::map<std::string, PredictionBundle> out;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no);
    json row;
    try {
      row = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(source, where, e.what());
    }
    if (!row.is_object()) throw ParseError(source, where, "expected a JSON object");
    auto id = detail::require<std::string>(row, "output_id", source, where);
    PredictionBundle bundle;
    bundle.document.label = detail::require<std::string>(row, "doc_label", source, where);
    bundle.document.confidence = detail::require<double>(row, "doc_conf", source, where);
    check_conf(bundle.document.confidence, where);
    auto labels = detail::optional_field<std::vector<std::string>>(row, "sentence_labels", {},
                                                                   source, where);
    auto confs =
        detail::optional_field<std::vector<double>>(row, "sentence_confs", {}, source, where);
    if (labels.size() != confs.size()) {
      throw ParseError(source, where, "sentence_labels and sentence_confs differ in length");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
      check_conf(confs[i], where);
      bundle.sentences.push_back({std::move(labels[i]), confs[i]});
    }
    if (row.contains("target_conf")) {
      bundle.target_confidence = detail::require<double>(row, "target_conf", source, where);
      check_conf(*bundle.target_confidence, where);
    }
    if (!out.emplace(id, std::move(bundle)).second) {
      throw ValidationError(source + ": " + where + ": duplicate output_id '" + id + "'");
    }
  }
  return out;
}

ExternalLidBackend::ExternalLidBackend(std::map<std::string, PredictionBundle> predictions,
                                       std::string source_name)
    : predictions_(std::move(predictions)), source_name_(std::move(source_name)) {}

FidelityResult ExternalLidBackend::assess(std::string_view output_id, std::string_view /*text*/,
                                          std::string_view target) const {
  auto it = predictions_.find(std::string(output_id));
  if (it == predictions_.end()) {
    throw OutputError(std::string(output_id), "no external LID prediction");
  }
  const PredictionBundle& bundle = it->second;
  FidelityResult result;
  result.document_prediction = bundle.document;
  result.is_target = bundle.document.label == target;
  if (bundle.target_confidence) {
    result.target_confidence = *bundle.target_confidence;
  } else if (result.is_target) {
    result.target_confidence = bundle.document.confidence;
  }
  result.sentence_predictions = bundle.sentences;
  result.code_switch_rate = code_switch_rate(result.sentence_predictions, target);
  return result;
}

FidelityResult assess_fidelity(std::string_view output_id, std::string_view text,
                               std::string_view target, const LidBackend& backend) {
  try {
    return backend.assess(output_id, text, target);
  } catch (const OutputError&) {
    throw;
  } catch (const std::exception& e) {
    throw OutputError(std::string(output_id), std::string("LID backend failure: ") + e.what());
  }
}

}  // namespace elicit
