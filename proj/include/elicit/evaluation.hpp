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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "elicit/generation.hpp"
#include "elicit/language_id.hpp"
#include "elicit/taxonomy.hpp"
#include "elicit/text_analysis.hpp"

namespace elicit {

inline constexpr int kDefaultValidityThreshold = 20;
inline constexpr double kMemorizationThreshold = 0.15;

/// Weights of the composite quality score; must be nonnegative and sum to 1.
struct QualityWeights {
  double lang_conf = 0.5;
  double code_switch = 0.5;
};

/// w_conf * lang_conf + w_cs * (1 - code_switch). Throws ArgumentError for
/// negative weights or weights not summing to 1 (within 1e-9).
double composite_quality(double lang_conf, double code_switch, const QualityWeights& weights = {});

/// "0.5*lang_conf + 0.5*(1-code_switch)"
std::string describe_quality_formula(const QualityWeights& weights);

struct EvaluationRecord {
  std::string output_id;
  std::string model_id;
  std::string language;
  TaskType task_type = TaskType::kCreative;
  std::size_t word_count = 0;
  bool is_valid = false;
  DiversityStats diversity;
  FidelityResult fidelity;
  double repetition_4gram = 0.0;
  double repetition_sentence = 0.0;
  std::optional<DiacriticStats> diacritics;  // tonal-orthography languages only
  double quality = 0.0;

  bool usable() const noexcept { return is_valid && fidelity.is_target; }
};

struct EvaluationOptions {
  int validity_threshold = kDefaultValidityThreshold;  // inclusive
  QualityWeights weights;
};

EvaluationRecord evaluate_output(const GenerationRecord& record, const LanguageConfig& lang,
                                 const LidBackend& backend, const EvaluationOptions& options = {});

/// One (model, language, task_type) cell. Percentages are in [0, 100].
struct ConditionSummary {
  std::string model_id;
  std::string language;
  TaskType task_type = TaskType::kCreative;
  std::size_t n_outputs = 0;
  double valid_pct = 0.0;
  double avg_words = 0.0;
  double doc_fidelity_pct = 0.0;
  double avg_ttr = 0.0;
  double avg_hapax = 0.0;
  double avg_vocab = 0.0;
  double avg_code_switch = 0.0;
  double avg_lang_conf = 0.0;
  double avg_quality = 0.0;
  double avg_repetition_4gram = 0.0;
  double avg_repetition_sentence = 0.0;
  double usable_words_per_call = 0.0;
  std::optional<double> diacritic_presence_pct;
  std::optional<double> avg_diacritic_ratio;
};

/// One summary per occupied cell, sorted by (model, language, task_type).
/// Means run over every record in the cell. Independent of input order.
std::vector<ConditionSummary> aggregate(const std::vector<EvaluationRecord>& records);

enum class OverlapGranularity { kPerCondition, kPerOutput };

struct OverlapResult {
  std::string key;  // "<model>/<language>/<task_type>" or an output id
  double cosine = 0.0;
  bool memorization_suspect = false;  // cosine > 0.15
};

/// Trigram cosine between each group's merged generated text and the merged
/// reference profile. Throws ArgumentError when the reference is empty.
std::vector<OverlapResult> reference_overlap(const std::vector<GenerationRecord>& generated,
                                             const std::vector<std::string>& reference_corpus,
                                             OverlapGranularity granularity =
                                                 OverlapGranularity::kPerCondition);

struct UsableEntry {
  std::string output_id;
  std::string model_id;
  std::string language;
  TaskType task_type = TaskType::kCreative;
  std::string text;
  std::size_t word_count = 0;
  double quality = 0.0;
};

struct UsableCorpus {
  std::vector<UsableEntry> entries;  // sorted by output id
  std::size_t total_words = 0;
};

struct FilterOptions {
  std::optional<double> min_quality;
};

/// Keeps valid, target-language outputs. Throws ValidationError on duplicate
/// output ids and when a pair's ids disagree.
UsableCorpus filter_usable(
    const std::vector<std::pair<GenerationRecord, EvaluationRecord>>& records,
    const FilterOptions& options = {});

std::string evaluation_to_json(const EvaluationRecord& record);
EvaluationRecord evaluation_from_json(std::string_view line, const std::string& source,
                                      std::size_t line_no);

void write_evaluations(const std::filesystem::path& path,
                       const std::vector<EvaluationRecord>& records);
std::vector<EvaluationRecord> load_evaluations(const std::filesystem::path& path);

/// Reads a plain-text corpus, one sentence per line, skipping blank lines.
std::vector<std::string> load_lines(const std::filesystem::path& path);

}  // namespace elicit
