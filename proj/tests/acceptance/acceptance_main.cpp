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


// Acceptance checks. Prints one PASS/FAIL line per criterion; exits non-zero
// if any fail. `--update-golden` rewrites tests/golden from the mock run.

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "elicit/cli.hpp"
#include "elicit/evaluation.hpp"
#include "elicit/generation.hpp"
#include "elicit/language_id.hpp"
#include "elicit/report.hpp"
#include "elicit/taxonomy.hpp"
#include "elicit/text_analysis.hpp"
#include "json.hpp"
#include "oracle/metric_check.hpp"
#include "support.hpp"

using namespace elicit;
using elicit::testing::FakeEnv;
using elicit::testing::read_text;
using elicit::testing::source_dir;
using elicit::testing::TempDir;
using elicit::testing::write_text;
using json = nlohmann::json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::uint64_t kSeed = 20260301;
constexpr double kTolerance = 1e-9;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 3) {
  std::ostringstream ss;
  ss.precision(precision);
  ss << std::fixed << v;
  return ss.str();
}

std::string sci(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

std::string src(const char* rel) { return (source_dir() / rel).string(); }

int cli(std::vector<std::string> args, std::string* err_text = nullptr) {
  std::ostringstream out;
  std::ostringstream err;
  args.insert(args.begin(), {"--config", src("config")});
  const int code = run_cli(args, out, err, FakeEnv{});
  if (err_text) *err_text = err.str();
  return code;
}

std::vector<std::string> evaluate_args(const fs::path& outputs, const fs::path& results) {
  return {"evaluate", "--outputs", outputs.string(), "--results", results.string(), "--lid",
          "builtin:" + src("seeds"), "--reference", "hau:" + src("references/hau_reference.txt")};
}

// The shipped fixture run, shared by the shape, resume and golden checks.
struct MockRun {
  TempDir dir{"elicit-accept"};
  fs::path outputs = dir / "outputs";
  fs::path results = dir / "results";
  int generate_code = -1;
  int evaluate_code = -1;
  std::string error;
  double seconds = 0.0;

  MockRun() {
    const auto start = Clock::now();
    generate_code = cli({"generate", "--taxonomy", src("taxonomy"), "--mock",
                         src("fixtures/mock_responses.json"), "--out", outputs.string(),
                         "--parallelism", "8"},
                        &error);
    if (generate_code == 0) evaluate_code = cli(evaluate_args(outputs, results), &error);
    seconds = seconds_since(start);
  }
};

MockRun& mock_run() {
  static MockRun run;
  return run;
}

Outcome metric_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(kSeed);
  std::vector<oracle::GeneratedText> texts;
  for (int i = 0; i < 100; ++i) texts.push_back(oracle::random_text(rng));
  std::size_t failures = 0;
  std::string first;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto problems = oracle::compare_with_oracle(texts[i], texts[(i + 1) % texts.size()]);
    if (!problems.empty()) {
      ++failures;
      if (first.empty()) first = "text " + std::to_string(i) + ": " + problems.front();
    }
  }
  const double secs = seconds_since(start);
  Outcome o;
  o.pass = failures == 0 && secs < 10.0;
  o.detail = std::to_string(texts.size() - failures) + "/100 texts agree, " + fmt(secs) + " s" +
             (first.empty() ? "" : "; " + first);
  return o;
}

std::string words(int n) {
  std::string text;
  for (int i = 0; i < n; ++i) text += (i ? " " : "") + std::string("kalma");
  return text + ".";
}

Outcome validity_boundary() {
  const auto languages = load_languages(source_dir() / "config" / "languages.json");
  const BuiltinLidBackend lid(load_seed_profiles(source_dir() / "seeds"));
  const auto hausa = *std::find_if(languages.begin(), languages.end(),
                                   [](const LanguageConfig& l) { return l.iso_code == "hau"; });
  auto valid = [&](int n) {
    GenerationRecord record;
    record.output_id = "m/hau/creative/cw_01";
    record.model_id = "m";
    record.language = "hau";
    record.response_text = words(n);
    const auto e = evaluate_output(record, hausa, lid);
    return std::make_pair(e.word_count, e.is_valid);
  };
  const auto [n19, v19] = valid(19);
  const auto [n20, v20] = valid(20);
  Outcome o;
  o.pass = n19 == 19 && n20 == 20 && !v19 && v20;
  o.detail = "19 tokens -> " + std::string(v19 ? "valid" : "invalid") + ", 20 tokens -> " +
             (v20 ? "valid" : "invalid");
  return o;
}

Outcome lid_accuracy() {
  const auto start = Clock::now();
  const fs::path heldout = source_dir() / "seeds" / "heldout";
  auto run_once = [&] {
    const auto profiles = load_seed_profiles(source_dir() / "seeds");
    std::vector<LidPrediction> predictions;
    std::vector<std::string> truth;
    for (const auto& entry : fs::directory_iterator(heldout)) {
      if (entry.path().extension() != ".txt") continue;
      for (const auto& line : load_lines(entry.path())) {
        if (tokenize(line).size() < 30) continue;
        predictions.push_back(classify(line, profiles));
        truth.push_back(entry.path().stem().string());
      }
    }
    return std::make_pair(predictions, truth);
  };
  const auto [first, truth] = run_once();
  const auto [second, truth2] = run_once();
  std::size_t correct = 0;
  std::set<std::string> labels;
  for (std::size_t i = 0; i < first.size(); ++i) {
    if (first[i].label == truth[i]) ++correct;
    labels.insert(truth[i]);
  }
  const double secs = seconds_since(start);
  const double accuracy = first.empty() ? 0.0 : static_cast<double>(correct) / first.size();
  const bool deterministic = first == second && truth == truth2;
  Outcome o;
  o.pass = labels.size() == 5 && accuracy >= 0.90 && deterministic && secs < 5.0;
  o.detail = std::to_string(correct) + "/" + std::to_string(first.size()) + " held-out (" +
             fmt(100.0 * accuracy, 1) + "%) over " + std::to_string(labels.size()) +
             " languages, " + (deterministic ? "deterministic" : "NOT deterministic") + ", " +
             fmt(secs) + " s";
  return o;
}

Outcome experiment_shape() {
  auto& run = mock_run();
  Outcome o;
  if (run.generate_code != 0 || run.evaluate_code != 0) {
    o.detail = "pipeline failed: " + run.error;
    return o;
  }
  const auto records = load_records(run.outputs);
  const auto summary = summary_from_json(read_text(run.results / "summary.json"), "summary.json");
  std::set<std::string> ids;
  for (const auto& r : records) ids.insert(r.output_id);
  o.pass = records.size() == 600 && ids.size() == 600 && summary.conditions.size() == 24 &&
           run.seconds < 30.0;
  o.detail = std::to_string(records.size()) + " records, " +
             std::to_string(summary.conditions.size()) + " condition summaries, " +
             fmt(run.seconds) + " s";
  return o;
}

// Appends "<output_id> <attempt>" per request; survives the process being killed.
class LoggingBackend final : public ChatBackend {
 public:
  LoggingBackend(ChatBackend& inner, const fs::path& log)
      : inner_(inner), fd_(::open(log.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644)) {}
  ~LoggingBackend() override {
    if (fd_ >= 0) ::close(fd_);
  }
  ChatResponse send(const ChatRequest& request) override {
    const std::string line = request.output_id + " " + std::to_string(request.attempt) + "\n";
    if (::write(fd_, line.data(), line.size()) < 0) std::abort();
    return inner_.send(request);
  }

 private:
  ChatBackend& inner_;
  int fd_;
};

std::map<std::string, json> record_set(const fs::path& dir) {
  std::map<std::string, json> out;
  for (const auto& r : load_records(dir)) {
    json doc = json::parse(record_to_json(r));
    doc.erase("request_timestamp");
    doc.erase("latency_ms");
    out[r.output_id] = std::move(doc);
  }
  return out;
}

Outcome resumability() {
  auto& run = mock_run();
  Outcome o;
  if (run.evaluate_code != 0) {
    o.detail = "baseline run failed";
    return o;
  }
  const auto languages = load_languages(source_dir() / "config" / "languages.json");
  const auto models = load_models(source_dir() / "config" / "models.json");
  std::map<std::string, std::vector<PromptTemplate>> taxonomies;
  for (const auto& lang : languages) {
    taxonomies[lang.iso_code] = load_taxonomy(source_dir() / "taxonomy" / (lang.iso_code + ".json"));
  }
  const auto fixtures = MockChatBackend::load_fixtures(source_dir() / "fixtures/mock_responses.json");
  const auto baseline_records = record_set(run.outputs);
  const std::string baseline_summary = read_text(run.results / "summary.json");

  BatchOptions base;
  base.seed = kSeed;
  base.retry.base_delay = std::chrono::milliseconds(0);
  base.sleep = [](std::chrono::milliseconds) {};
  base.env = FakeEnv{{{"GEMINI_API_KEY", "k"}, {"OPENAI_API_KEY", "k"}}};

  std::vector<std::string> notes;
  bool pass = true;
  for (const std::size_t kill_after : {std::size_t{1}, std::size_t{100}, std::size_t{599}}) {
    TempDir dir("elicit-resume");
    const fs::path outputs = dir / "outputs";
    const fs::path log = dir / "calls.log";
    std::cout.flush();
    const pid_t child = ::fork();
    if (child == 0) {
      MockChatBackend mock(fixtures);
      LoggingBackend backend(mock, log);
      BatchOptions options = base;
      std::size_t written = 0;
      options.on_record = [&](const GenerationRecord&) {
        if (++written == kill_after) ::kill(::getpid(), SIGKILL);
      };
      run_batch(taxonomies, languages, models, outputs, backend, options);
      ::_exit(3);
    }
    int status = 0;
    ::waitpid(child, &status, 0);
    const bool killed = WIFSIGNALED(status) && WTERMSIG(status) == SIGKILL;
    const std::size_t on_disk = load_records(outputs).size();
    std::set<std::string> before;
    for (const auto& r : load_records(outputs)) before.insert(r.output_id);

    std::ifstream first_log(log);
    std::size_t first_lines = 0;
    for (std::string l; std::getline(first_log, l);) ++first_lines;

    MockChatBackend mock(fixtures);
    LoggingBackend backend(mock, log);
    BatchOptions options = base;
    options.parallelism = 4;
    const auto manifest = run_batch(taxonomies, languages, models, outputs, backend, options);

    std::map<std::string, int> first_attempts;
    std::set<std::string> resumed_ids;
    std::ifstream in(log);
    std::size_t line_no = 0;
    for (std::string id; std::getline(in, id);) {
      const auto space = id.rfind(' ');
      const int attempt = std::stoi(id.substr(space + 1));
      id.resize(space);
      if (attempt == 1) ++first_attempts[id];
      if (line_no++ >= first_lines) resumed_ids.insert(id);
    }
    std::size_t duplicates = 0;
    for (const auto& [id, n] : first_attempts) duplicates += n > 1 ? n - 1 : 0;
    std::size_t repeated = 0;
    for (const auto& id : resumed_ids) repeated += before.count(id);

    TempDir results("elicit-resume-results");
    const int eval = cli(evaluate_args(outputs, results.path()));
    const bool same_records = record_set(outputs) == baseline_records;
    const bool same_summary = eval == 0 && read_text(results / "summary.json") == baseline_summary;
    const bool ok = killed && on_disk == kill_after && manifest.completed.size() == 600 &&
                    duplicates == 0 && repeated == 0 && same_records && same_summary;
    pass = pass && ok;
    notes.push_back("N=" + std::to_string(kill_after) + (ok ? " ok" : " FAILED") + " (" +
                    std::to_string(on_disk) + " on disk at kill, " +
                    std::to_string(manifest.new_requests) + " resumed, " +
                    std::to_string(duplicates + repeated) + " duplicate requests" +
                    (same_records ? "" : ", record set differs") +
                    (same_summary ? "" : ", summary differs") + ")");
  }
  o.pass = pass;
  for (std::size_t i = 0; i < notes.size(); ++i) o.detail += (i ? "; " : "") + notes[i];
  return o;
}

Outcome efficiency_identity() {
  std::mt19937_64 rng(kSeed);
  std::uniform_int_distribution<int> words_dist(20, 400);
  std::uniform_int_distribution<int> cell_size(1, 40);
  const char* task_names[] = {"creative", "functional", "structured",
                              "dialogue", "topic_switch", "constrained"};
  std::vector<EvaluationRecord> records;
  for (int cell = 0; cell < 24; ++cell) {
    const int n = cell_size(rng);
    for (int i = 0; i < n; ++i) {
      EvaluationRecord e;
      e.model_id = cell < 12 ? "model-a" : "model-b";
      e.language = (cell / 6) % 2 ? "fon" : "hau";
      e.task_type = *parse_task_type(task_names[cell % 6]);
      e.output_id = e.model_id + "/" + e.language + "/" + task_names[cell % 6] + "/x_" +
                    std::to_string(i);
      e.word_count = static_cast<std::size_t>(words_dist(rng));
      e.is_valid = true;
      e.fidelity.is_target = true;
      records.push_back(e);
    }
  }
  const auto summaries = aggregate(records);
  double worst = 0.0;
  bool full = true;
  for (const auto& s : summaries) {
    worst = std::max(worst, std::fabs(s.usable_words_per_call - s.avg_words));
    full = full && s.valid_pct == 100.0 && s.doc_fidelity_pct == 100.0;
  }
  Outcome o;
  o.pass = summaries.size() == 24 && full && worst <= kTolerance;
  o.detail = std::to_string(summaries.size()) + " cells, max |usable_words_per_call - avg_words| = " + sci(worst);
  return o;
}

Outcome memorization_flag() {
  // Reference "x" has the single trigram " x "; each one-letter output adds
  // one trigram, so the cell cosine is count(x) / |counts|.
  auto cell = [](const std::vector<int>& counts) {
    std::vector<GenerationRecord> records;
    const char letters[] = "xabcdefg";
    for (std::size_t k = 0; k < counts.size(); ++k) {
      for (int i = 0; i < counts[k]; ++i) {
        GenerationRecord r;
        r.model_id = "m";
        r.language = "hau";
        r.output_id = "m/hau/creative/cw_" + std::to_string(k) + "_" + std::to_string(i);
        r.response_text = std::string(1, letters[k]);
        records.push_back(r);
      }
    }
    return reference_overlap(records, {"x"}).at(0);
  };
  const auto exact = cell({3, 19, 5, 2, 1});
  const auto above = cell({3, 19, 5, 2});
  const auto below = cell({3, 19, 5, 2, 1, 1});
  Outcome o;
  o.pass = exact.cosine == 0.15 && !exact.memorization_suspect && above.cosine > 0.15 &&
           above.memorization_suspect && below.cosine < 0.15 && !below.memorization_suspect;
  o.detail = "cosine " + fmt(below.cosine, 6) + " -> " +
             (below.memorization_suspect ? "flagged" : "clear") + ", " + fmt(exact.cosine, 6) +
             " -> " + (exact.memorization_suspect ? "flagged" : "clear") + ", " +
             fmt(above.cosine, 6) + " -> " + (above.memorization_suspect ? "flagged" : "clear");
  return o;
}

Outcome quality_formula() {
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  std::size_t violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const double w = unit(rng);
    const double conf = unit(rng);
    const double cs = unit(rng);
    const QualityWeights weights{w, 1.0 - w};
    const double q = composite_quality(conf, cs, weights);
    worst = std::max(worst, std::fabs(q - (w * conf + (1.0 - w) * (1.0 - cs))));
    const double conf_up = conf + (1.0 - conf) * unit(rng);
    const double cs_up = cs + (1.0 - cs) * unit(rng);
    if (composite_quality(conf_up, cs, weights) < q) ++violations;
    if (composite_quality(conf, cs_up, weights) > q) ++violations;
  }
  Outcome o;
  o.pass = worst <= kTolerance && violations == 0;
  o.detail = "1000 points, max error " + sci(worst) + ", " +
             std::to_string(violations) + " monotonicity violations";
  return o;
}

Outcome golden_reports(bool update) {
  auto& run = mock_run();
  Outcome o;
  if (run.evaluate_code != 0) {
    o.detail = "mock run failed";
    return o;
  }
  const fs::path golden = source_dir() / "tests" / "golden";
  std::size_t matched = 0;
  std::size_t total = 0;
  std::vector<std::string> mismatches;
  for (const char* kind :
       {"validity", "fidelity", "diversity", "efficiency", "full_summary", "overlap"}) {
    for (const auto& [format, ext] : std::vector<std::pair<std::string, std::string>>{
             {"csv", "csv"}, {"latex", "tex"}, {"json", "json"}}) {
      ++total;
      const fs::path produced = run.dir / (std::string(kind) + "." + ext);
      const int code = cli({"report", "--results", run.results.string(), "--kind", kind,
                            "--format", format, "--out", produced.string()});
      const fs::path expected = golden / produced.filename();
      if (code == 0 && update) write_text(expected, read_text(produced));
      if (code == 0 && fs::exists(expected) && read_text(produced) == read_text(expected)) {
        ++matched;
      } else {
        mismatches.push_back(produced.filename().string());
      }
    }
  }
  o.pass = matched == total;
  o.detail = std::to_string(matched) + "/" + std::to_string(total) + " byte-identical" +
             (update ? " (golden files rewritten)" : "");
  for (const auto& m : mismatches) o.detail += "; differs: " + m;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  bool update = false;
  for (int i = 1; i < argc; ++i) update = update || std::string(argv[i]) == "--update-golden";

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"metric oracle equivalence", metric_oracle},
      {"validity boundary", validity_boundary},
      {"built-in LID held-out accuracy", lid_accuracy},
      {"experiment shape (600 records, 24 conditions)", experiment_shape},
      {"resumability", resumability},
      {"efficiency identity", efficiency_identity},
      {"memorization flag", memorization_flag},
      {"composite quality formula", quality_formula},
      {"golden reports", [update] { return golden_reports(update); }},
  };

  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome.detail = std::string("exception: ") + e.what();
    }
    if (!outcome.pass) ++failed;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << " " << name << ": " << outcome.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
