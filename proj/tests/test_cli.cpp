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


#include <sstream>

#include "elicit/cli.hpp"
#include "elicit/evaluation.hpp"
#include "elicit/generation.hpp"
#include "elicit/report.hpp"

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

using namespace elicit;
using elicit::testing::FakeEnv;
using elicit::testing::read_text;
using elicit::testing::source_dir;
using elicit::testing::TempDir;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args, const FakeEnv& env = {}) {
  std::ostringstream out;
  std::ostringstream err;
  std::vector<std::string> full = {"--config", (source_dir() / "config").string()};
  full.insert(full.end(), args.begin(), args.end());
  Result r;
  r.code = run_cli(full, out, err, env);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string src(const char* rel) { return (source_dir() / rel).string(); }

// One mock generation and evaluation shared by the read-only tests below.
struct Pipeline {
  TempDir dir{"elicit-cli"};
  fs::path outputs = dir / "outputs";
  fs::path results = dir / "results";
  Result generate;
  Result evaluate;

  Pipeline() {
    generate = run({"generate", "--taxonomy", src("taxonomy"), "--mock",
                    src("fixtures/mock_responses.json"), "--out", outputs.string(),
                    "--retry-base-ms", "0", "--parallelism", "4"});
    evaluate = run({"evaluate", "--outputs", outputs.string(), "--results", results.string(),
                    "--lid", "builtin:" + src("seeds"), "--reference",
                    "hau:" + src("references/hau_reference.txt")});
  }
};

Pipeline& pipeline() {
  static Pipeline p;
  return p;
}

int count(const std::string& s, const std::string& needle) {
  int n = 0;
  for (std::size_t pos = 0; (pos = s.find(needle, pos)) != std::string::npos; pos += needle.size()) {
    ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("cli: help and usage errors") {
  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("generate") != std::string::npos);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"report"}).code == 2);
}

TEST_CASE("cli: generate runs the full matrix and resumes") {
  auto& p = pipeline();
  REQUIRE(p.generate.code == 0);
  CHECK(p.generate.out.find("expected: 600, completed: 600, failed: 0") != std::string::npos);
  CHECK(p.generate.out.find("600 new requests") != std::string::npos);
  CHECK(load_records(p.outputs).size() == 600);
  const json manifest = json::parse(read_text(p.outputs / "manifest.json"));
  CHECK(manifest["expected_calls"] == 600);
  CHECK(manifest["completed"].size() == 600);

  const auto again = run({"generate", "--taxonomy", src("taxonomy"), "--mock",
                          src("fixtures/mock_responses.json"), "--out", p.outputs.string()});
  CHECK(again.code == 0);
  CHECK(again.out.find("0 new requests, 600 already present") != std::string::npos);
}

TEST_CASE("cli: generate stops early and resumes") {
  TempDir dir;
  const std::vector<std::string> base = {"generate", "--taxonomy", src("taxonomy"), "--mock",
                                         src("fixtures/mock_responses.json"), "--out",
                                         (dir / "o").string(), "--retry-base-ms", "0"};
  auto first = base;
  first.insert(first.end(), {"--max-calls", "100"});
  const auto a = run(first);
  CHECK(a.code == 0);
  CHECK(a.out.find("100 new requests") != std::string::npos);
  CHECK(a.out.find("stopped early") != std::string::npos);
  const auto b = run(base);
  CHECK(b.out.find("500 new requests, 100 already present") != std::string::npos);
}

TEST_CASE("cli: generate configuration errors") {
  TempDir dir;
  const auto unknown = run({"generate", "--taxonomy", src("taxonomy"), "--models", "gpt-5",
                            "--mock", src("fixtures/mock_responses.json"), "--out",
                            (dir / "o").string()});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("unknown model 'gpt-5'") != std::string::npos);
  CHECK(unknown.err.find("--help") != std::string::npos);

  const auto offline = run({"generate", "--taxonomy", src("taxonomy"), "--out",
                            (dir / "o").string()},
                           FakeEnv{{{"NO_NETWORK", "1"}}});
  CHECK(offline.code == 2);
  CHECK(offline.err.find("NO_NETWORK") != std::string::npos);

  const auto no_key = run({"generate", "--taxonomy", src("taxonomy"), "--languages", "hau",
                           "--models", "gpt-4o-mini", "--out", (dir / "o").string()});
  CHECK(no_key.code == 2);
  CHECK(no_key.err.find("OPENAI_API_KEY") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "o" / "gpt-4o-mini"));
}

TEST_CASE("cli: generate against a failing endpoint exits 0 with a failure list") {
  TempDir dir;
  fs::create_directories(dir / "cfg");
  std::ofstream(dir / "cfg" / "languages.json")
      << read_text(source_dir() / "config" / "languages.json");
  std::ofstream(dir / "cfg" / "models.json") << R"([{"model_id": "local",
      "endpoint_url": "http://127.0.0.1:1/v1/chat/completions", "api_key_env_var": "K",
      "system_prompt_template": "Speak {language}.", "max_retries": 0}])";
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli({"--config", (dir / "cfg").string(), "generate", "--taxonomy",
                            src("taxonomy"), "--languages", "hau", "--out",
                            (dir / "o").string(), "--max-calls", "2"},
                           out, err, FakeEnv{{{"K", "secret"}}});
  CHECK(code == 0);
  CHECK(count(out.str(), "\nfailed: ") == 2);
  CHECK(out.str().find("completed: 0, failed: 2") != std::string::npos);
}

TEST_CASE("cli: evaluate summarises every condition") {
  auto& p = pipeline();
  REQUIRE(p.evaluate.code == 0);
  const auto summary = summary_from_json(read_text(p.results / "summary.json"), "summary.json");
  CHECK(summary.conditions.size() == 24);
  CHECK(summary.lid_backend == "builtin-trigram-cosine");
  CHECK(load_evaluations(p.results / "evaluations.jsonl").size() == 600);
  CHECK(fs::exists(p.results / "summary.csv"));
  const json overlap = json::parse(read_text(p.results / "overlap.json"));
  CHECK(overlap.size() == 1);
}

TEST_CASE("cli: evaluate threshold changes validity") {
  auto& p = pipeline();
  TempDir dir;
  const auto r = run({"evaluate", "--outputs", p.outputs.string(), "--results",
                      (dir / "r").string(), "--lid", "builtin:" + src("seeds"), "--threshold",
                      "30"});
  REQUIRE(r.code == 0);
  const auto at20 = summary_from_json(read_text(p.results / "summary.json"), "a");
  const auto at30 = summary_from_json(read_text(dir / "r" / "summary.json"), "b");
  CHECK(at30.validity_threshold == 30);
  REQUIRE(at20.conditions.size() == at30.conditions.size());
  bool changed = false;
  for (std::size_t i = 0; i < at20.conditions.size(); ++i) {
    CHECK(at30.conditions[i].valid_pct <= at20.conditions[i].valid_pct);
    changed = changed || at30.conditions[i].valid_pct < at20.conditions[i].valid_pct;
  }
  CHECK(changed);
}

TEST_CASE("cli: evaluate errors") {
  TempDir dir;
  fs::create_directories(dir / "empty");
  const auto empty = run({"evaluate", "--outputs", (dir / "empty").string(), "--results",
                          (dir / "r").string(), "--lid", "builtin:" + src("seeds")});
  CHECK(empty.code == 1);
  CHECK(empty.err.find("no records") != std::string::npos);

  const auto no_lid =
      run({"evaluate", "--outputs", (dir / "empty").string(), "--results", (dir / "r").string()});
  CHECK(no_lid.code == 2);

  const auto missing = run({"evaluate", "--outputs", (dir / "empty").string(), "--lid",
                            "external:" + (dir / "none.jsonl").string()});
  CHECK(missing.code == 2);
}

TEST_CASE("cli: filter exports usable outputs with provenance") {
  auto& p = pipeline();
  TempDir dir;
  const auto r = run({"filter", "--outputs", p.outputs.string(), "--results",
                      p.results.string(), "--out", (dir / "corpus").string()});
  REQUIRE(r.code == 0);

  std::size_t expected_words = 0;
  std::size_t expected_entries = 0;
  for (const auto& e : load_evaluations(p.results / "evaluations.jsonl")) {
    if (e.language == "hau" && e.usable()) {
      expected_words += e.word_count;
      ++expected_entries;
    }
  }
  const auto text = read_text(dir / "corpus" / "hau.txt");
  std::size_t words = 0;
  std::size_t entries = 0;
  std::istringstream prov(read_text(dir / "corpus" / "hau.provenance.jsonl"));
  for (std::string line; std::getline(prov, line);) {
    const json row = json::parse(line);
    words += row["word_count"].get<std::size_t>();
    ++entries;
    const auto offset = row["offset"].get<std::size_t>();
    const auto length = row["length"].get<std::size_t>();
    REQUIRE(offset + length <= text.size());
    CHECK(tokenize(text.substr(offset, length)).size() == row["word_count"].get<std::size_t>());
  }
  CHECK(entries == expected_entries);
  CHECK(words == expected_words);
  CHECK(r.out.find("hau: " + std::to_string(expected_entries) + " usable outputs, " +
                   std::to_string(expected_words) + " words") != std::string::npos);

  const auto strict = run({"filter", "--outputs", p.outputs.string(), "--results",
                           p.results.string(), "--out", (dir / "strict").string(),
                           "--min-quality", "0.9"});
  CHECK(strict.code == 0);
  CHECK(read_text(dir / "strict" / "fon.txt").empty());
  CHECK(fs::exists(dir / "strict" / "fon.provenance.jsonl"));
  CHECK(strict.out.find("fon: 0 usable outputs, 0 words") != std::string::npos);

  const auto missing = run({"filter", "--outputs", p.outputs.string(), "--results",
                            (dir / "nowhere").string(), "--out", (dir / "x").string()});
  CHECK(missing.code == 1);
}

TEST_CASE("cli: report tables") {
  auto& p = pipeline();
  const auto eff = run({"report", "--results", p.results.string(), "--kind", "efficiency"});
  REQUIRE(eff.code == 0);
  CHECK(eff.out.rfind("model,language,task_type,n_outputs,usable_words_per_call\n", 0) == 0);
  CHECK(count(eff.out, "\n") == 25);

  const auto tex = run({"report", "--results", p.results.string(), "--kind", "full_summary",
                        "--format", "latex"});
  REQUIRE(tex.code == 0);
  CHECK(count(tex.out, " \\\\\n") == 25);  // header + 24 rows
  const auto again = run({"report", "--results", p.results.string(), "--kind", "full_summary",
                          "--format", "latex"});
  CHECK(again.out == tex.out);

  TempDir dir;
  const auto to_file = run({"report", "--results", p.results.string(), "--kind", "overlap",
                            "--format", "json", "--out", (dir / "o.json").string()});
  CHECK(to_file.code == 0);
  CHECK(json::parse(read_text(dir / "o.json"))["table"] == "overlap");

  const auto bad = run({"report", "--results", p.results.string(), "--kind", "table9"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("unknown table kind") != std::string::npos);
  const auto missing = run({"report", "--results", (dir / "none").string(), "--kind", "validity"});
  CHECK(missing.code == 1);
}

TEST_CASE("cli: config directory precedence") {
  TempDir dir;
  // The env var is ignored when --config is given (run() always passes it).
  const auto r = run({"report", "--results", (dir / "none").string(), "--kind", "validity"},
                     FakeEnv{{{"ELICIT_CONFIG", "/nonexistent"}}});
  CHECK(r.code == 1);
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli({"generate", "--taxonomy", src("taxonomy"), "--out",
                            (dir / "o").string(), "--mock", src("fixtures/mock_responses.json")},
                           out, err, FakeEnv{{{"ELICIT_CONFIG", (dir / "nocfg").string()}}});
  CHECK(code == 2);
  CHECK(err.str().find("nocfg") != std::string::npos);
}
