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


#include "elicit/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "elicit/error.hpp"
#include "elicit/evaluation.hpp"
#include "elicit/language_id.hpp"
#include "elicit/report.hpp"
#include "json_util.hpp"

namespace elicit {

namespace fs = std::filesystem;
using detail::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct GlobalOptions {
  std::string config_dir;
  std::uint64_t seed = 0;
  bool verbose = false;
};

struct GenerateOptions {
  std::string taxonomy = "taxonomy";
  std::string languages;
  std::string models = "all";
  std::string out_dir = "outputs";
  std::string mock;
  int parallelism = 0;
  std::size_t max_calls = 0;
  long long retry_base_ms = 1000;
};

struct EvaluateOptions {
  std::string outputs = "outputs";
  std::string results = "results";
  std::string lid;
  int threshold = kDefaultValidityThreshold;
  double quality_weight = 0.5;
  std::vector<std::string> references;
  std::string granularity = "per_condition";
};

struct FilterCliOptions {
  std::string outputs = "outputs";
  std::string results = "results";
  std::string out_dir = "corpus";
  std::string languages;
  double min_quality = -1.0;
};

struct ReportOptions {
  std::string results = "results";
  std::string kind;
  std::string format = "csv";
  std::string out;
};

/// Usage problems detected after parsing (unknown ids, bad selectors).
class UsageError : public Error {
 public:
  using Error::Error;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += sep;
    out += items[i];
  }
  return out;
}

// Flag > environment variable > built-in default.
fs::path config_dir(const GlobalOptions& global, const EnvLookup& env) {
  if (!global.config_dir.empty()) return global.config_dir;
  if (auto from_env = env("ELICIT_CONFIG")) return *from_env;
  return "config";
}

// Anything wrong with a config file is a configuration problem, not a runtime one.
template <typename F>
auto config_file(F&& load) -> decltype(load()) {
  try {
    return load();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

std::vector<LanguageConfig> languages_in(const fs::path& cfg) {
  return config_file([&] { return load_languages(cfg / "languages.json"); });
}

std::vector<ModelConfig> models_in(const fs::path& cfg) {
  return config_file([&] { return load_models(cfg / "models.json"); });
}

template <typename T>
std::vector<T> select(const std::vector<T>& all, const std::string& selector,
                      std::string T::*id_field, const char* what) {
  if (selector.empty() || selector == "all") return all;
  std::vector<T> out;
  for (const auto& id : split_list(selector)) {
    auto it = std::find_if(all.begin(), all.end(), [&](const T& t) { return t.*id_field == id; });
    if (it == all.end()) {
      std::vector<std::string> known;
      for (const auto& t : all) known.push_back(t.*id_field);
      throw UsageError(std::string("unknown ") + what + " '" + id + "' (known: " +
                       join(known, ", ") + ")");
    }
    out.push_back(*it);
  }
  return out;
}

std::unique_ptr<LidBackend> make_lid_backend(const std::string& arg) {
  const auto colon = arg.find(':');
  if (colon == std::string::npos) {
    throw UsageError("--lid expects builtin:<seeds-dir> or external:<predictions-file>");
  }
  const std::string kind = arg.substr(0, colon);
  const fs::path path = arg.substr(colon + 1);
  if (kind == "builtin") {
    return std::make_unique<BuiltinLidBackend>(load_seed_profiles(path));
  }
  if (kind == "external") {
    if (!fs::exists(path)) throw ConfigError("predictions file not found: " + path.string());
    return std::make_unique<ExternalLidBackend>(load_external_predictions(path),
                                                path.filename().string());
  }
  throw UsageError("unknown LID backend '" + kind + "'");
}

int cmd_generate(const GlobalOptions& global, const GenerateOptions& opts, std::ostream& out,
                 std::ostream& err, const EnvLookup& env) {
  const fs::path cfg = config_dir(global, env);
  const auto languages = select(languages_in(cfg), opts.languages,
                                &LanguageConfig::iso_code, "language");
  const auto models =
      select(models_in(cfg), opts.models, &ModelConfig::model_id, "model");

  const bool offline = env("NO_NETWORK").value_or("") == "1";
  if (offline && opts.mock.empty()) {
    throw UsageError("NO_NETWORK=1 is set; pass --mock <fixtures> to run offline");
  }

  std::map<std::string, std::vector<PromptTemplate>> taxonomies;
  for (const auto& lang : languages) {
    fs::path path = opts.taxonomy;
    if (fs::is_directory(path)) path /= lang.iso_code + ".json";
    taxonomies[lang.iso_code] = config_file([&] { return load_taxonomy(path); });
    const ValidationReport report = validate_taxonomy(taxonomies[lang.iso_code]);
    if (!report.ok) {
      for (const auto& e : report.unknown_placeholders) err << "unknown placeholder: " << e << "\n";
      for (const auto& e : report.prefix_mismatches) err << "prefix mismatch: " << e << "\n";
      throw ConfigError("taxonomy " + path.string() + " failed validation");
    }
  }

  std::unique_ptr<ChatBackend> backend;
  BatchOptions batch;
  batch.seed = global.seed;
  batch.retry.base_delay = std::chrono::milliseconds(opts.retry_base_ms);
  if (opts.mock.empty()) {
    backend = std::make_unique<HttpChatBackend>();
    batch.env = env;
  } else {
    backend = std::make_unique<MockChatBackend>(MockChatBackend::load_fixtures(opts.mock));
    // Keys are never sent to the mock; it only needs a placeholder.
    batch.env = [](const std::string&) { return std::optional<std::string>("mock"); };
  }
  int parallelism = opts.parallelism;
  if (parallelism <= 0) {
    parallelism = 1;
    if (auto p = env("ELICIT_PARALLELISM")) parallelism = std::max(1, std::atoi(p->c_str()));
  }
  batch.parallelism = parallelism;
  if (opts.max_calls > 0) batch.max_new_requests = opts.max_calls;
  if (global.verbose) {
    batch.on_record = [&out](const GenerationRecord& r) {
      out << "wrote " << r.output_id << " (" << r.attempt_count << " attempt"
          << (r.attempt_count == 1 ? "" : "s") << ")\n";
    };
  }

  const RunManifest manifest =
      run_batch(taxonomies, languages, models, opts.out_dir, *backend, batch);
  out << "expected: " << manifest.expected_calls << ", completed: " << manifest.completed.size()
      << ", failed: " << manifest.failures.size() << "\n";
  out << manifest.new_requests << " new requests, " << manifest.skipped_existing
      << " already present\n";
  for (const auto& f : manifest.failures) out << "failed: " << f.message << "\n";
  if (manifest.interrupted) out << "stopped early; rerun to resume\n";
  return kExitOk;
}

QualityWeights weights_from(double w_conf) {
  return QualityWeights{w_conf, 1.0 - w_conf};
}

int cmd_evaluate(const GlobalOptions& global, const EvaluateOptions& opts, std::ostream& out,
                 std::ostream& err, const EnvLookup& env) {
  const fs::path cfg = config_dir(global, env);
  const auto languages = languages_in(cfg);

  std::string lid_spec = opts.lid;
  if (lid_spec.empty()) lid_spec = env("ELICIT_LID").value_or("");
  if (lid_spec.empty()) throw UsageError("no LID backend; pass --lid builtin:<dir> or external:<file>");

  OverlapGranularity granularity;
  if (opts.granularity == "per_condition") {
    granularity = OverlapGranularity::kPerCondition;
  } else if (opts.granularity == "per_output") {
    granularity = OverlapGranularity::kPerOutput;
  } else {
    throw UsageError("--overlap-granularity must be per_condition or per_output");
  }
  std::map<std::string, fs::path> references;
  for (const auto& arg : opts.references) {
    const auto colon = arg.find(':');
    if (colon == std::string::npos) throw UsageError("--reference expects <iso>:<path>");
    references[arg.substr(0, colon)] = arg.substr(colon + 1);
  }

  const auto backend = make_lid_backend(lid_spec);
  const auto records = load_records(opts.outputs);
  if (records.empty()) {
    err << "no records in " << opts.outputs << "\n";
    return kExitFailure;
  }

  EvaluationOptions eval_options;
  eval_options.validity_threshold = opts.threshold;
  eval_options.weights = weights_from(opts.quality_weight);
  composite_quality(1.0, 0.0, eval_options.weights);  // validates weights up front

  std::vector<EvaluationRecord> evaluations;
  evaluations.reserve(records.size());
  for (const auto& record : records) {
    auto lang = std::find_if(languages.begin(), languages.end(),
                             [&](const auto& l) { return l.iso_code == record.language; });
    if (lang == languages.end()) {
      throw ConfigError(record.output_id + ": language '" + record.language +
                        "' not in " + (cfg / "languages.json").string());
    }
    evaluations.push_back(evaluate_output(record, *lang, *backend, eval_options));
  }

  SummaryDocument summary;
  summary.lid_backend = backend->name();
  summary.quality_formula = describe_quality_formula(eval_options.weights);
  summary.validity_threshold = opts.threshold;
  summary.conditions = aggregate(evaluations);

  const fs::path results = opts.results;
  fs::create_directories(results);
  write_evaluations(results / "evaluations.jsonl", evaluations);
  detail::write_file_atomic(results / "summary.json", summary_to_json(summary));
  detail::write_file_atomic(results / "summary.csv",
                            render_table(TableKind::kFullSummary, ReportFormat::kCsv, summary));

  if (!references.empty()) {
    std::vector<OverlapDocument> docs;
    for (const auto& [iso, path] : references) {
      std::vector<GenerationRecord> subset;
      for (const auto& r : records) {
        if (r.language == iso) subset.push_back(r);
      }
      OverlapDocument doc;
      doc.language = iso;
      doc.reference = path.filename().string();
      doc.granularity = opts.granularity;
      doc.results = reference_overlap(subset, load_lines(path), granularity);
      docs.push_back(std::move(doc));
    }
    detail::write_file_atomic(results / "overlap.json", overlap_to_json(docs));
  }

  out << render_console_summary(summary);
  out << summary.conditions.size() << " conditions, " << evaluations.size()
      << " outputs evaluated; wrote " << results.string() << "\n";
  return kExitOk;
}

int cmd_filter(const GlobalOptions& global, const FilterCliOptions& opts, std::ostream& out,
               std::ostream& err, const EnvLookup& env) {
  const fs::path cfg = config_dir(global, env);
  const auto languages = select(languages_in(cfg), opts.languages,
                                &LanguageConfig::iso_code, "language");
  const fs::path eval_path = fs::path(opts.results) / "evaluations.jsonl";
  if (!fs::exists(eval_path)) {
    err << "missing " << eval_path.string() << "; run `elicit evaluate` first\n";
    return kExitFailure;
  }
  const auto evaluations = load_evaluations(eval_path);
  const auto records = load_records(opts.outputs);
  std::map<std::string, const GenerationRecord*> by_id;
  for (const auto& r : records) by_id[r.output_id] = &r;

  std::vector<std::pair<GenerationRecord, EvaluationRecord>> pairs;
  for (const auto& e : evaluations) {
    auto it = by_id.find(e.output_id);
    if (it == by_id.end()) {
      throw ValidationError("evaluation for " + e.output_id + " has no record in " +
                            opts.outputs);
    }
    pairs.emplace_back(*it->second, e);
  }
  FilterOptions filter;
  if (opts.min_quality >= 0.0) filter.min_quality = opts.min_quality;
  const UsableCorpus corpus = filter_usable(pairs, filter);

  const fs::path out_dir = opts.out_dir;
  fs::create_directories(out_dir);
  for (const auto& lang : languages) {
    std::string text;
    std::string provenance;
    std::size_t words = 0;
    std::size_t count = 0;
    for (const auto& entry : corpus.entries) {
      if (entry.language != lang.iso_code) continue;
      const std::size_t offset = text.size();
      text += entry.text;
      json row = {{"output_id", entry.output_id},
                  {"model", entry.model_id},
                  {"task_type", std::string(to_string(entry.task_type))},
                  {"word_count", entry.word_count},
                  {"quality", entry.quality},
                  {"offset", offset},
                  {"length", entry.text.size()}};
      provenance += row.dump() + "\n";
      text += "\n\n";
      words += entry.word_count;
      ++count;
    }
    detail::write_file_atomic(out_dir / (lang.iso_code + ".txt"), text);
    detail::write_file_atomic(out_dir / (lang.iso_code + ".provenance.jsonl"), provenance);
    out << lang.iso_code << ": " << count << " usable outputs, " << words << " words\n";
  }
  return kExitOk;
}

int cmd_report(const ReportOptions& opts, std::ostream& out, std::ostream& err) {
  const auto kind = parse_table_kind(opts.kind);
  if (!kind) {
    err << "unknown table kind '" << opts.kind
        << "' (expected validity, fidelity, diversity, efficiency, full_summary, overlap)\n";
    return kExitUsage;
  }
  const auto format = parse_report_format(opts.format);
  if (!format) {
    err << "unknown format '" << opts.format << "' (expected csv, latex, json)\n";
    return kExitUsage;
  }
  const fs::path results = opts.results;
  const fs::path summary_path = results / "summary.json";
  if (!fs::exists(summary_path)) {
    err << "missing " << summary_path.string() << "; run `elicit evaluate` first\n";
    return kExitFailure;
  }
  const SummaryDocument summary =
      summary_from_json(detail::read_file(summary_path), summary_path.string());
  std::vector<OverlapDocument> overlap;
  if (*kind == TableKind::kOverlap) {
    const fs::path overlap_path = results / "overlap.json";
    if (!fs::exists(overlap_path)) {
      err << "missing " << overlap_path.string() << "; run evaluate with --reference\n";
      return kExitFailure;
    }
    overlap = overlap_from_json(detail::read_file(overlap_path), overlap_path.string());
  }
  const std::string table = render_table(*kind, *format, summary, &overlap);
  if (opts.out.empty()) {
    out << table;
  } else {
    detail::write_file_atomic(opts.out, table);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvLookup& env) {
  CLI::App app{"Elicitation corpus pipeline: generate, evaluate, filter, report", "elicit"};
  app.require_subcommand(1);
  GlobalOptions global;
  app.add_option("--config", global.config_dir,
                 "Directory holding languages.json and models.json (env ELICIT_CONFIG)");
  app.add_option("--seed", global.seed, "Seed for retry jitter");
  app.add_flag("-v,--verbose", global.verbose, "Print per-record progress");

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Run the prompt matrix against chat endpoints");
  generate->add_option("--taxonomy", gen.taxonomy,
                       "Taxonomy file, or a directory of <iso>.json files")
      ->capture_default_str();
  generate->add_option("--languages", gen.languages, "Comma-separated iso codes (default: all)");
  generate->add_option("--models", gen.models, "Comma-separated model ids or 'all'")
      ->capture_default_str();
  generate->add_option("--out", gen.out_dir, "Output directory")->capture_default_str();
  generate->add_option("--mock", gen.mock, "Serve responses from a mock fixtures file");
  generate->add_option("--parallelism", gen.parallelism,
                       "Concurrent requests (env ELICIT_PARALLELISM, default 1)");
  generate->add_option("--max-calls", gen.max_calls, "Stop after this many new requests");
  generate->add_option("--retry-base-ms", gen.retry_base_ms, "Initial retry backoff")
      ->capture_default_str();

  EvaluateOptions ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score outputs and aggregate per condition");
  evaluate->add_option("--outputs", ev.outputs, "Generation output directory")
      ->capture_default_str();
  evaluate->add_option("--results", ev.results, "Results directory")->capture_default_str();
  evaluate->add_option("--lid", ev.lid,
                       "builtin:<seeds-dir> or external:<predictions.jsonl> (env ELICIT_LID)");
  evaluate->add_option("--threshold", ev.threshold, "Minimum tokens for a valid output")
      ->capture_default_str();
  evaluate->add_option("--quality-weight", ev.quality_weight,
                       "Weight of language confidence in the quality score")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  evaluate->add_option("--reference", ev.references,
                       "<iso>:<file> reference corpus for overlap scoring (repeatable)");
  evaluate->add_option("--overlap-granularity", ev.granularity, "per_condition or per_output")
      ->capture_default_str();

  FilterCliOptions fl;
  auto* filter = app.add_subcommand("filter", "Export the usable corpus with provenance");
  filter->add_option("--outputs", fl.outputs, "Generation output directory")
      ->capture_default_str();
  filter->add_option("--results", fl.results, "Results directory")->capture_default_str();
  filter->add_option("--out", fl.out_dir, "Corpus directory")->capture_default_str();
  filter->add_option("--languages", fl.languages, "Comma-separated iso codes (default: all)");
  filter->add_option("--min-quality", fl.min_quality, "Drop outputs below this quality")
      ->check(CLI::Range(0.0, 1.0));

  ReportOptions rp;
  auto* report = app.add_subcommand("report", "Emit a results table");
  report->add_option("--results", rp.results, "Results directory")->capture_default_str();
  report->add_option("--kind", rp.kind,
                     "validity, fidelity, diversity, efficiency, full_summary or overlap")
      ->required();
  report->add_option("--format", rp.format, "csv, latex or json")->capture_default_str();
  report->add_option("--out", rp.out, "Write to a file instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (generate->parsed()) return cmd_generate(global, gen, out, err, env);
    if (evaluate->parsed()) return cmd_evaluate(global, ev, out, err, env);
    if (filter->parsed()) return cmd_filter(global, fl, out, err, env);
    if (report->parsed()) return cmd_report(rp, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace elicit
