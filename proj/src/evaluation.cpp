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


#include "elicit/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "elicit/error.hpp"
#include "json_util.hpp"

namespace elicit {

using detail::json;

namespace {

std::string condition_key(std::string_view model, std::string_view language, TaskType task) {
  std::string key;
  key.append(model).append("/").append(language).append("/").append(to_string(task));
  return key;
}

std::string format_weight(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", w);
  return buf;
}

json prediction_labels(const std::vector<LidPrediction>& predictions) {
  json out = json::array();
  for (const auto& p : predictions) out.push_back(p.label);
  return out;
}

json prediction_confs(const std::vector<LidPrediction>& predictions) {
  json out = json::array();
  for (const auto& p : predictions) out.push_back(p.confidence);
  return out;
}

}  // namespace

double composite_quality(double lang_conf, double code_switch, const QualityWeights& weights) {
  if (weights.lang_conf < 0.0 || weights.code_switch < 0.0) {
    throw ArgumentError("quality weights must be nonnegative");
  }
  if (std::abs(weights.lang_conf + weights.code_switch - 1.0) > 1e-9) {
    throw ArgumentError("quality weights must sum to 1, got " +
                        format_weight(weights.lang_conf + weights.code_switch));
  }
  return weights.lang_conf * lang_conf + weights.code_switch * (1.0 - code_switch);
}

std::string describe_quality_formula(const QualityWeights& weights) {
  return format_weight(weights.lang_conf) + "*lang_conf + " + format_weight(weights.code_switch) +
         "*(1-code_switch)";
}

EvaluationRecord evaluate_output(const GenerationRecord& record, const LanguageConfig& lang,
                                 const LidBackend& backend, const EvaluationOptions& options) {
  EvaluationRecord eval;
  eval.output_id = record.output_id;
  eval.model_id = record.model_id;
  eval.language = record.language;
  eval.task_type = record.task_type;

  const TokenSequence tokens = tokenize(record.response_text);
  eval.word_count = tokens.size();
  eval.is_valid = eval.word_count >= static_cast<std::size_t>(std::max(options.validity_threshold, 0));
  eval.diversity = diversity(tokens);
  eval.repetition_4gram = ngram_repetition(tokens, 4);
  eval.repetition_sentence = sentence_repetition(segment_sentences(record.response_text));
  if (lang.tonal_orthography) eval.diacritics = diacritic_stats(record.response_text);
  eval.fidelity =
      assess_fidelity(record.output_id, record.response_text, lang.target_lid_label, backend);
  eval.quality = composite_quality(eval.fidelity.target_confidence, eval.fidelity.code_switch_rate,
                                   options.weights);
  return eval;
}

std::vector<ConditionSummary> aggregate(const std::vector<EvaluationRecord>& records) {
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<const EvaluationRecord*>>
      cells;
  for (const auto& r : records) {
    cells[{r.model_id, r.language, std::string(to_string(r.task_type))}].push_back(&r);
  }

  std::vector<ConditionSummary> out;
  for (auto& [key, members] : cells) {
    // Fixed summation order keeps the result bit-identical under permutation.
    std::sort(members.begin(), members.end(),
              [](const auto* a, const auto* b) { return a->output_id < b->output_id; });
    ConditionSummary s;
    s.model_id = std::get<0>(key);
    s.language = std::get<1>(key);
    s.task_type = members.front()->task_type;
    s.n_outputs = members.size();
    const double n = static_cast<double>(members.size());

    std::size_t valid = 0;
    std::size_t on_target = 0;
    std::size_t usable_words = 0;
    double words = 0, ttr = 0, hapax = 0, vocab = 0, cs = 0, conf = 0, quality = 0;
    double rep4 = 0, rep_sent = 0;
    std::size_t with_diacritic_stats = 0;
    std::size_t with_marks = 0;
    double diacritic_ratio = 0;
    for (const auto* r : members) {
      if (r->is_valid) ++valid;
      if (r->fidelity.is_target) ++on_target;
      if (r->usable()) usable_words += r->word_count;
      words += static_cast<double>(r->word_count);
      ttr += r->diversity.ttr;
      hapax += r->diversity.hapax_ratio;
      vocab += static_cast<double>(r->diversity.vocab_size);
      cs += r->fidelity.code_switch_rate;
      conf += r->fidelity.target_confidence;
      quality += r->quality;
      rep4 += r->repetition_4gram;
      rep_sent += r->repetition_sentence;
      if (r->diacritics) {
        ++with_diacritic_stats;
        if (r->diacritics->has_diacritics) ++with_marks;
        diacritic_ratio += r->diacritics->diacritic_ratio;
      }
    }
    s.valid_pct = 100.0 * static_cast<double>(valid) / n;
    s.doc_fidelity_pct = 100.0 * static_cast<double>(on_target) / n;
    s.avg_words = words / n;
    s.avg_ttr = ttr / n;
    s.avg_hapax = hapax / n;
    s.avg_vocab = vocab / n;
    s.avg_code_switch = cs / n;
    s.avg_lang_conf = conf / n;
    s.avg_quality = quality / n;
    s.avg_repetition_4gram = rep4 / n;
    s.avg_repetition_sentence = rep_sent / n;
    s.usable_words_per_call = static_cast<double>(usable_words) / n;
    if (with_diacritic_stats > 0) {
      const double m = static_cast<double>(with_diacritic_stats);
      s.diacritic_presence_pct = 100.0 * static_cast<double>(with_marks) / m;
      s.avg_diacritic_ratio = diacritic_ratio / m;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<OverlapResult> reference_overlap(const std::vector<GenerationRecord>& generated,
                                             const std::vector<std::string>& reference_corpus,
                                             OverlapGranularity granularity) {
  TrigramProfile reference;
  for (const auto& line : reference_corpus) reference.merge(trigram_profile(line));
  if (reference.empty()) throw ArgumentError("reference_overlap: empty reference corpus");
  const double reference_norm = reference.norm();

  std::vector<const GenerationRecord*> ordered;
  for (const auto& r : generated) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto* a, const auto* b) { return a->output_id < b->output_id; });

  std::map<std::string, TrigramProfile> groups;
  for (const auto* r : ordered) {
    const std::string key = granularity == OverlapGranularity::kPerOutput
                                ? r->output_id
                                : condition_key(r->model_id, r->language, r->task_type);
    groups[key].merge(trigram_profile(r->response_text));
  }

  std::vector<OverlapResult> out;
  for (const auto& [key, profile] : groups) {
    OverlapResult result;
    result.key = key;
    result.cosine = cosine(profile, profile.norm(), reference, reference_norm);
    result.memorization_suspect = result.cosine > kMemorizationThreshold;
    out.push_back(std::move(result));
  }
  return out;
}

UsableCorpus filter_usable(
    const std::vector<std::pair<GenerationRecord, EvaluationRecord>>& records,
    const FilterOptions& options) {
  std::set<std::string> seen;
  for (const auto& [gen, eval] : records) {
    if (gen.output_id != eval.output_id) {
      throw ValidationError("record/evaluation mismatch: " + gen.output_id + " vs " +
                            eval.output_id);
    }
    if (!seen.insert(gen.output_id).second) {
      throw ValidationError("duplicate output id " + gen.output_id + " (corrupted run directory)");
    }
  }

  UsableCorpus corpus;
  for (const auto& [gen, eval] : records) {
    if (!eval.usable()) continue;
    if (options.min_quality && eval.quality < *options.min_quality) continue;
    corpus.entries.push_back({gen.output_id, gen.model_id, gen.language, gen.task_type,
                              gen.response_text, eval.word_count, eval.quality});
    corpus.total_words += eval.word_count;
  }
  std::sort(corpus.entries.begin(), corpus.entries.end(),
            [](const auto& a, const auto& b) { return a.output_id < b.output_id; });
  return corpus;
}

std::string evaluation_to_json(const EvaluationRecord& r) {
  json diacritics = nullptr;
  if (r.diacritics) {
    diacritics = {{"alphabetic_count", r.diacritics->alphabetic_count},
                  {"combining_mark_count", r.diacritics->combining_mark_count},
                  {"diacritic_ratio", r.diacritics->diacritic_ratio},
                  {"has_diacritics", r.diacritics->has_diacritics},
                  {"tonal_vowel_fraction", r.diacritics->tonal_vowel_fraction}};
  }
  json doc = {
      {"output_id", r.output_id},
      {"model_id", r.model_id},
      {"language", r.language},
      {"task_type", std::string(to_string(r.task_type))},
      {"word_count", r.word_count},
      {"is_valid", r.is_valid},
      {"diversity",
       {{"total_tokens", r.diversity.total_tokens},
        {"vocab_size", r.diversity.vocab_size},
        {"ttr", r.diversity.ttr},
        {"hapax_count", r.diversity.hapax_count},
        {"hapax_ratio", r.diversity.hapax_ratio}}},
      {"fidelity",
       {{"doc_label", r.fidelity.document_prediction.label},
        {"doc_conf", r.fidelity.document_prediction.confidence},
        {"is_target", r.fidelity.is_target},
        {"target_conf", r.fidelity.target_confidence},
        {"sentence_labels", prediction_labels(r.fidelity.sentence_predictions)},
        {"sentence_confs", prediction_confs(r.fidelity.sentence_predictions)},
        {"code_switch_rate", r.fidelity.code_switch_rate}}},
      {"repetition_4gram", r.repetition_4gram},
      {"repetition_sentence", r.repetition_sentence},
      {"diacritics", diacritics},
      {"quality", r.quality},
  };
  return doc.dump();
}

EvaluationRecord evaluation_from_json(std::string_view line, const std::string& source,
                                      std::size_t line_no) {
  const std::string where = "line " + std::to_string(line_no);
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(source, where, e.what());
  }
  using detail::require;
  EvaluationRecord r;
  r.output_id = require<std::string>(doc, "output_id", source, where);
  r.model_id = require<std::string>(doc, "model_id", source, where);
  r.language = require<std::string>(doc, "language", source, where);
  const auto type_name = require<std::string>(doc, "task_type", source, where);
  const auto type = parse_task_type(type_name);
  if (!type) throw ParseError(source, where, "unknown task_type '" + type_name + "'");
  r.task_type = *type;
  r.word_count = require<std::size_t>(doc, "word_count", source, where);
  r.is_valid = require<bool>(doc, "is_valid", source, where);

  const json div = require<json>(doc, "diversity", source, where);
  r.diversity.total_tokens = require<std::size_t>(div, "total_tokens", source, where);
  r.diversity.vocab_size = require<std::size_t>(div, "vocab_size", source, where);
  r.diversity.ttr = require<double>(div, "ttr", source, where);
  r.diversity.hapax_count = require<std::size_t>(div, "hapax_count", source, where);
  r.diversity.hapax_ratio = require<double>(div, "hapax_ratio", source, where);

  const json fid = require<json>(doc, "fidelity", source, where);
  r.fidelity.document_prediction = {require<std::string>(fid, "doc_label", source, where),
                                    require<double>(fid, "doc_conf", source, where)};
  r.fidelity.is_target = require<bool>(fid, "is_target", source, where);
  r.fidelity.target_confidence = require<double>(fid, "target_conf", source, where);
  const auto labels = require<std::vector<std::string>>(fid, "sentence_labels", source, where);
  const auto confs = require<std::vector<double>>(fid, "sentence_confs", source, where);
  if (labels.size() != confs.size()) {
    throw ParseError(source, where, "sentence_labels and sentence_confs differ in length");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    r.fidelity.sentence_predictions.push_back({labels[i], confs[i]});
  }
  r.fidelity.code_switch_rate = require<double>(fid, "code_switch_rate", source, where);

  r.repetition_4gram = require<double>(doc, "repetition_4gram", source, where);
  r.repetition_sentence = require<double>(doc, "repetition_sentence", source, where);
  if (doc.contains("diacritics") && !doc["diacritics"].is_null()) {
    const json& d = doc["diacritics"];
    DiacriticStats stats;
    stats.alphabetic_count = require<std::size_t>(d, "alphabetic_count", source, where);
    stats.combining_mark_count = require<std::size_t>(d, "combining_mark_count", source, where);
    stats.diacritic_ratio = require<double>(d, "diacritic_ratio", source, where);
    stats.has_diacritics = require<bool>(d, "has_diacritics", source, where);
    stats.tonal_vowel_fraction = require<double>(d, "tonal_vowel_fraction", source, where);
    r.diacritics = stats;
  }
  r.quality = require<double>(doc, "quality", source, where);
  return r;
}

void write_evaluations(const std::filesystem::path& path,
                       const std::vector<EvaluationRecord>& records) {
  std::string out;
  for (const auto& r : records) out += evaluation_to_json(r) + "\n";
  detail::write_file_atomic(path, out);
}

std::vector<EvaluationRecord> load_evaluations(const std::filesystem::path& path) {
  const std::string source = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open evaluations file " + source);
  std::vector<EvaluationRecord> out;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(evaluation_from_json(line, source, line_no));
  }
  return out;
}

std::vector<std::string> load_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace elicit
