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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "elicit/text_analysis.hpp"

namespace elicit {

/// Label used when no prediction is possible (empty or whitespace-only text).
inline constexpr std::string_view kUndetermined = "und";

struct LidPrediction {
  std::string label;
  double confidence = 0.0;

  bool operator==(const LidPrediction&) const = default;
};

struct FidelityResult {
  LidPrediction document_prediction;
  bool is_target = false;
  double target_confidence = 0.0;
  std::vector<LidPrediction> sentence_predictions;
  double code_switch_rate = 0.0;
};

/// Reference trigram profiles, one per LID label. Immutable once trained.
class LanguageProfileSet {
 public:
  LanguageProfileSet() = default;

  /// Labels in lexicographic order.
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const TrigramProfile& profile(std::string_view label) const;
  bool empty() const noexcept { return labels_.empty(); }

  /// Cosine of `text_profile` against every label, in labels() order.
  std::vector<double> scores(const TrigramProfile& text_profile) const;

  /// Throws ValidationError on an empty profile or duplicate label.
  void add(std::string label, TrigramProfile profile);

 private:
  std::vector<std::string> labels_;
  std::vector<TrigramProfile> profiles_;
  std::vector<double> norms_;
};

/// Merges trigram profiles of each label's documents. Throws ValidationError
/// naming the label when a corpus has no nonempty document.
LanguageProfileSet train_profiles(const std::map<std::string, std::vector<std::string>>& seeds);

/// Reads `<dir>/<label>.txt` files (one sentence per line) and trains on them.
LanguageProfileSet load_seed_profiles(const std::filesystem::path& dir);

/// Nearest profile by trigram cosine. Confidence is the softmax (temperature 1)
/// of the cosine scores at the winning label. Ties go to the lexicographically
/// smaller label. Text with no trigrams yields {"und", 0}.
LidPrediction classify(std::string_view text, const LanguageProfileSet& profiles);

/// Softmax mass of every label, in profiles.labels() order; empty when the
/// text has no trigrams.
std::vector<double> label_distribution(std::string_view text, const LanguageProfileSet& profiles);

/// Document- and sentence-level predictions for one output.
class LidBackend {
 public:
  virtual ~LidBackend() = default;
  virtual std::string name() const = 0;
  /// Throws OutputError carrying `output_id` when the backend cannot score it.
  virtual FidelityResult assess(std::string_view output_id, std::string_view text,
                                std::string_view target) const = 0;
};

/// Built-in trigram-cosine classifier.
class BuiltinLidBackend final : public LidBackend {
 public:
  explicit BuiltinLidBackend(LanguageProfileSet profiles);
  std::string name() const override { return "builtin-trigram-cosine"; }
  FidelityResult assess(std::string_view output_id, std::string_view text,
                        std::string_view target) const override;
  const LanguageProfileSet& profiles() const noexcept { return profiles_; }

 private:
  LanguageProfileSet profiles_;
};

struct PredictionBundle {
  LidPrediction document;
  std::vector<LidPrediction> sentences;
  /// Optional explicit target-label mass from the producing model.
  std::optional<double> target_confidence;
};

/// One JSON object per line:
/// {output_id, doc_label, doc_conf, sentence_labels: [...], sentence_confs: [...]}
/// with an optional "target_conf". Blank lines are skipped. Throws ParseError
/// with the line number for malformed rows and ValidationError for duplicates.
std::map<std::string, PredictionBundle> load_external_predictions(
    const std::filesystem::path& path);

/// Replays precomputed predictions. Target confidence is `target_conf` when
/// present, else doc_conf when the document label is the target, else 0.
class ExternalLidBackend final : public LidBackend {
 public:
  explicit ExternalLidBackend(std::map<std::string, PredictionBundle> predictions,
                              std::string source_name = "external");
  std::string name() const override { return "external:" + source_name_; }
  FidelityResult assess(std::string_view output_id, std::string_view text,
                        std::string_view target) const override;

 private:
  std::map<std::string, PredictionBundle> predictions_;
  std::string source_name_;
};

/// Scores one output against `target` through `backend`.
FidelityResult assess_fidelity(std::string_view output_id, std::string_view text,
                               std::string_view target, const LidBackend& backend);

/// Fraction of sentence predictions whose label differs from `target`.
double code_switch_rate(const std::vector<LidPrediction>& sentences, std::string_view target);

}  // namespace elicit
