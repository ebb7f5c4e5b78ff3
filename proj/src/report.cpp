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


#include "elicit/report.hpp"

#include <array>
#include <cstdio>
#include <functional>

#include "elicit/error.hpp"
#include "json_util.hpp"

namespace elicit {

using detail::json;

namespace {

struct Column {
  std::string_view name;
  std::string_view latex_header;
  std::function<std::optional<double>(const ConditionSummary&)> value;
  int latex_decimals;
};

std::optional<double> count(std::size_t n) { return static_cast<double>(n); }

const std::vector<Column>& all_columns() {
  static const std::vector<Column> columns = {
      {"n_outputs", "N", [](const auto& s) { return count(s.n_outputs); }, 0},
      {"valid_pct", "Valid\\%", [](const auto& s) { return std::optional(s.valid_pct); }, 1},
      {"avg_words", "Words", [](const auto& s) { return std::optional(s.avg_words); }, 1},
      {"doc_fidelity_pct", "Fidelity\\%",
       [](const auto& s) { return std::optional(s.doc_fidelity_pct); }, 1},
      {"avg_ttr", "TTR", [](const auto& s) { return std::optional(s.avg_ttr); }, 3},
      {"avg_hapax", "Hapax", [](const auto& s) { return std::optional(s.avg_hapax); }, 3},
      {"avg_vocab", "Vocab", [](const auto& s) { return std::optional(s.avg_vocab); }, 1},
      {"avg_code_switch", "CS", [](const auto& s) { return std::optional(s.avg_code_switch); }, 3},
      {"avg_lang_conf", "LangConf", [](const auto& s) { return std::optional(s.avg_lang_conf); },
       3},
      {"avg_quality", "Quality", [](const auto& s) { return std::optional(s.avg_quality); }, 3},
      {"avg_repetition_4gram", "Rep4",
       [](const auto& s) { return std::optional(s.avg_repetition_4gram); }, 3},
      {"avg_repetition_sentence", "RepSent",
       [](const auto& s) { return std::optional(s.avg_repetition_sentence); }, 3},
      {"usable_words_per_call", "Words/call",
       [](const auto& s) { return std::optional(s.usable_words_per_call); }, 1},
      {"diacritic_presence_pct", "Diacritics\\%",
       [](const auto& s) { return s.diacritic_presence_pct; }, 1},
      {"avg_diacritic_ratio", "DiacRatio", [](const auto& s) { return s.avg_diacritic_ratio; },
       3},
  };
  return columns;
}

std::vector<const Column*> columns_for(TableKind kind) {
  std::vector<std::string_view> names;
  switch (kind) {
    case TableKind::kValidity:
      names = {"n_outputs", "valid_pct", "avg_words"};
      break;
    case TableKind::kFidelity:
      names = {"doc_fidelity_pct", "avg_code_switch", "avg_lang_conf"};
      break;
    case TableKind::kDiversity:
      names = {"avg_ttr", "avg_hapax", "avg_vocab", "avg_repetition_4gram",
               "avg_repetition_sentence", "diacritic_presence_pct", "avg_diacritic_ratio"};
      break;
    case TableKind::kEfficiency:
      names = {"n_outputs", "usable_words_per_call"};
      break;
    case TableKind::kFullSummary:
      for (const auto& c : all_columns()) names.push_back(c.name);
      break;
    case TableKind::kOverlap:
      break;
  }
  std::vector<const Column*> out;
  for (auto name : names) {
    for (const auto& c : all_columns()) {
      if (c.name == name) out.push_back(&c);
    }
  }
  return out;
}

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::string latex_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '_':
      case '%':
      case '&':
      case '#':
      case '$':
      case '{':
      case '}':
        out.push_back('\\');
        out.push_back(c);
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

constexpr int kCsvDecimals = 6;

std::string render_rows_csv(const SummaryDocument& summary, const std::vector<const Column*>& cols) {
  std::string out = "model,language,task_type";
  for (const auto* c : cols) out.append(",").append(c->name);
  out += "\n";
  for (const auto& s : summary.conditions) {
    out += csv_field(s.model_id) + "," + csv_field(s.language) + "," +
           std::string(to_string(s.task_type));
    for (const auto* c : cols) {
      out += ",";
      if (auto v = c->value(s)) out += fixed(*v, c->name == "n_outputs" ? 0 : kCsvDecimals);
    }
    out += "\n";
  }
  return out;
}

std::string render_rows_latex(TableKind kind, const SummaryDocument& summary,
                              const std::vector<const Column*>& cols) {
  std::string out;
  out += "% " + std::string(to_string(kind)) + " table\n";
  out += "% lid backend: " + summary.lid_backend + "\n";
  out += "% quality: " + summary.quality_formula + "\n";
  out += "% validity threshold: " + std::to_string(summary.validity_threshold) + " tokens\n";
  out += "\\begin{tabular}{lll";
  for (std::size_t i = 0; i < cols.size(); ++i) out += "r";
  out += "}\n\\hline\nModel & Lang & Task";
  for (const auto* c : cols) out.append(" & ").append(c->latex_header);
  out += " \\\\\n\\hline\n";
  for (const auto& s : summary.conditions) {
    out += latex_escape(s.model_id) + " & " + latex_escape(s.language) + " & " +
           latex_escape(to_string(s.task_type));
    for (const auto* c : cols) {
      out += " & ";
      if (auto v = c->value(s)) {
        out += fixed(*v, c->latex_decimals);
      } else {
        out += "--";
      }
    }
    out += " \\\\\n";
  }
  out += "\\hline\n\\end{tabular}\n";
  return out;
}

std::string render_rows_json(TableKind kind, const SummaryDocument& summary,
                             const std::vector<const Column*>& cols) {
  json rows = json::array();
  for (const auto& s : summary.conditions) {
    json row = {{"model", s.model_id},
                {"language", s.language},
                {"task_type", std::string(to_string(s.task_type))}};
    for (const auto* c : cols) {
      auto v = c->value(s);
      row[std::string(c->name)] = v ? json(*v) : json(nullptr);
    }
    rows.push_back(std::move(row));
  }
  json doc = {{"table", std::string(to_string(kind))},
              {"lid_backend", summary.lid_backend},
              {"quality_formula", summary.quality_formula},
              {"validity_threshold", summary.validity_threshold},
              {"rows", rows}};
  return doc.dump(2) + "\n";
}

std::string render_overlap(ReportFormat format, const std::vector<OverlapDocument>& docs) {
  switch (format) {
    case ReportFormat::kCsv: {
      std::string out = "language,key,cosine,memorization_suspect\n";
      for (const auto& d : docs) {
        for (const auto& r : d.results) {
          out += csv_field(d.language) + "," + csv_field(r.key) + "," +
                 fixed(r.cosine, kCsvDecimals) + "," + (r.memorization_suspect ? "1" : "0") + "\n";
        }
      }
      return out;
    }
    case ReportFormat::kLatex: {
      std::string out = "% overlap table\n";
      for (const auto& d : docs) {
        out += "% " + d.language + " reference: " + d.reference + ", flag when cosine > " +
               fixed(d.threshold, 2) + "\n";
      }
      out += "\\begin{tabular}{llrc}\n\\hline\nLang & Condition & Cosine & Flag \\\\\n\\hline\n";
      for (const auto& d : docs) {
        for (const auto& r : d.results) {
          out += latex_escape(d.language) + " & " + latex_escape(r.key) + " & " +
                 fixed(r.cosine, 4) + " & " + (r.memorization_suspect ? "yes" : "no") + " \\\\\n";
        }
      }
      out += "\\hline\n\\end{tabular}\n";
      return out;
    }
    case ReportFormat::kJson: {
      json doc = {{"table", "overlap"}, {"references", json::parse(overlap_to_json(docs))}};
      return doc.dump(2) + "\n";
    }
  }
  return {};
}

json condition_to_json(const ConditionSummary& s) {
  json row = {{"model", s.model_id}, {"language", s.language},
              {"task_type", std::string(to_string(s.task_type))}};
  for (const auto& c : all_columns()) {
    auto v = c.value(s);
    if (c.name == "n_outputs") {
      row["n_outputs"] = s.n_outputs;
    } else {
      row[std::string(c.name)] = v ? json(*v) : json(nullptr);
    }
  }
  return row;
}

std::optional<double> optional_number(const json& row, const char* key) {
  if (!row.contains(key) || row[key].is_null()) return std::nullopt;
  return row[key].get<double>();
}

}  // namespace

std::optional<TableKind> parse_table_kind(std::string_view name) {
  constexpr std::array<TableKind, 6> kinds = {TableKind::kValidity,   TableKind::kFidelity,
                                              TableKind::kDiversity,  TableKind::kEfficiency,
                                              TableKind::kFullSummary, TableKind::kOverlap};
  for (TableKind k : kinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::optional<ReportFormat> parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "latex") return ReportFormat::kLatex;
  if (name == "json") return ReportFormat::kJson;
  return std::nullopt;
}

std::string_view to_string(TableKind kind) {
  switch (kind) {
    case TableKind::kValidity: return "validity";
    case TableKind::kFidelity: return "fidelity";
    case TableKind::kDiversity: return "diversity";
    case TableKind::kEfficiency: return "efficiency";
    case TableKind::kFullSummary: return "full_summary";
    case TableKind::kOverlap: return "overlap";
  }
  return "unknown";
}

std::string summary_to_json(const SummaryDocument& doc) {
  json conditions = json::array();
  for (const auto& s : doc.conditions) conditions.push_back(condition_to_json(s));
  json out = {{"schema_version", 1},
              {"lid_backend", doc.lid_backend},
              {"quality_formula", doc.quality_formula},
              {"validity_threshold", doc.validity_threshold},
              {"conditions", conditions}};
  return out.dump(2) + "\n";
}

SummaryDocument summary_from_json(std::string_view text, const std::string& source) {
  using detail::require;
  const json doc = detail::parse_json(text, source);
  SummaryDocument out;
  out.lid_backend = require<std::string>(doc, "lid_backend", source, "top level");
  out.quality_formula = require<std::string>(doc, "quality_formula", source, "top level");
  out.validity_threshold = require<int>(doc, "validity_threshold", source, "top level");
  const json rows = require<json>(doc, "conditions", source, "top level");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const json& row = rows[i];
    const std::string where = "conditions[" + std::to_string(i) + "]";
    ConditionSummary s;
    s.model_id = require<std::string>(row, "model", source, where);
    s.language = require<std::string>(row, "language", source, where);
    const auto type_name = require<std::string>(row, "task_type", source, where);
    const auto type = parse_task_type(type_name);
    if (!type) throw ParseError(source, where, "unknown task_type '" + type_name + "'");
    s.task_type = *type;
    s.n_outputs = require<std::size_t>(row, "n_outputs", source, where);
    s.valid_pct = require<double>(row, "valid_pct", source, where);
    s.avg_words = require<double>(row, "avg_words", source, where);
    s.doc_fidelity_pct = require<double>(row, "doc_fidelity_pct", source, where);
    s.avg_ttr = require<double>(row, "avg_ttr", source, where);
    s.avg_hapax = require<double>(row, "avg_hapax", source, where);
    s.avg_vocab = require<double>(row, "avg_vocab", source, where);
    s.avg_code_switch = require<double>(row, "avg_code_switch", source, where);
    s.avg_lang_conf = require<double>(row, "avg_lang_conf", source, where);
    s.avg_quality = require<double>(row, "avg_quality", source, where);
    s.avg_repetition_4gram = require<double>(row, "avg_repetition_4gram", source, where);
    s.avg_repetition_sentence = require<double>(row, "avg_repetition_sentence", source, where);
    s.usable_words_per_call = require<double>(row, "usable_words_per_call", source, where);
    s.diacritic_presence_pct = optional_number(row, "diacritic_presence_pct");
    s.avg_diacritic_ratio = optional_number(row, "avg_diacritic_ratio");
    out.conditions.push_back(std::move(s));
  }
  return out;
}

std::string overlap_to_json(const std::vector<OverlapDocument>& docs) {
  json out = json::array();
  for (const auto& d : docs) {
    json results = json::array();
    for (const auto& r : d.results) {
      results.push_back({{"key", r.key},
                         {"cosine", r.cosine},
                         {"memorization_suspect", r.memorization_suspect}});
    }
    out.push_back({{"language", d.language},
                   {"reference", d.reference},
                   {"granularity", d.granularity},
                   {"threshold", d.threshold},
                   {"results", results}});
  }
  return out.dump(2) + "\n";
}

std::vector<OverlapDocument> overlap_from_json(std::string_view text, const std::string& source) {
  using detail::require;
  const json doc = detail::parse_json(text, source);
  if (!doc.is_array()) throw ParseError(source, "top level", "expected an array");
  std::vector<OverlapDocument> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string where = "[" + std::to_string(i) + "]";
    OverlapDocument d;
    d.language = require<std::string>(doc[i], "language", source, where);
    d.reference = require<std::string>(doc[i], "reference", source, where);
    d.granularity = require<std::string>(doc[i], "granularity", source, where);
    d.threshold = require<double>(doc[i], "threshold", source, where);
    for (const auto& r : require<json>(doc[i], "results", source, where)) {
      d.results.push_back({require<std::string>(r, "key", source, where),
                           require<double>(r, "cosine", source, where),
                           require<bool>(r, "memorization_suspect", source, where)});
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::string render_table(TableKind kind, ReportFormat format, const SummaryDocument& summary,
                         const std::vector<OverlapDocument>* overlap) {
  if (kind == TableKind::kOverlap) {
    if (overlap == nullptr) throw ArgumentError("overlap table needs overlap results");
    return render_overlap(format, *overlap);
  }
  const auto cols = columns_for(kind);
  switch (format) {
    case ReportFormat::kCsv: return render_rows_csv(summary, cols);
    case ReportFormat::kLatex: return render_rows_latex(kind, summary, cols);
    case ReportFormat::kJson: return render_rows_json(kind, summary, cols);
  }
  return {};
}

std::string render_console_summary(const SummaryDocument& summary) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-18s %-4s %-13s %4s %6s %7s %6s %6s %6s %6s %6s %7s %8s\n",
                "model", "lang", "task", "n", "valid%", "words", "fid%", "ttr", "cs", "conf",
                "qual", "vocab", "use/call");
  out += line;
  for (const auto& s : summary.conditions) {
    std::snprintf(line, sizeof line,
                  "%-18s %-4s %-13s %4zu %6.1f %7.1f %6.1f %6.3f %6.3f %6.3f %6.3f %7.1f %8.1f\n",
                  s.model_id.c_str(), s.language.c_str(), std::string(to_string(s.task_type)).c_str(),
                  s.n_outputs, s.valid_pct, s.avg_words, s.doc_fidelity_pct, s.avg_ttr,
                  s.avg_code_switch, s.avg_lang_conf, s.avg_quality, s.avg_vocab,
                  s.usable_words_per_call);
    out += line;
  }
  out += "lid backend: " + summary.lid_backend + "; quality = " + summary.quality_formula + "\n";
  return out;
}

}  // namespace elicit
