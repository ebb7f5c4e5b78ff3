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
#include <string_view>
#include <vector>

#include "elicit/evaluation.hpp"

namespace elicit {

enum class TableKind { kValidity, kFidelity, kDiversity, kEfficiency, kFullSummary, kOverlap };
enum class ReportFormat { kCsv, kLatex, kJson };

std::optional<TableKind> parse_table_kind(std::string_view name);
std::optional<ReportFormat> parse_report_format(std::string_view name);
std::string_view to_string(TableKind kind);

/// Contents of results/summary.json.
struct SummaryDocument {
  std::string lid_backend;
  std::string quality_formula;
  int validity_threshold = kDefaultValidityThreshold;
  std::vector<ConditionSummary> conditions;  // (model, language, task_type) order
};

/// Contents of results/overlap.json.
struct OverlapDocument {
  std::string language;
  std::string reference;  // file name of the reference corpus
  std::string granularity;
  double threshold = kMemorizationThreshold;
  std::vector<OverlapResult> results;
};

std::string summary_to_json(const SummaryDocument& doc);
SummaryDocument summary_from_json(std::string_view text, const std::string& source);

std::string overlap_to_json(const std::vector<OverlapDocument>& docs);
std::vector<OverlapDocument> overlap_from_json(std::string_view text, const std::string& source);

/// Renders one table. All row-based tables share the (model, language,
/// task_type) order of `summary.conditions`; overlap rows follow key order.
/// Throws ArgumentError when kind is kOverlap and `overlap` is null.
std::string render_table(TableKind kind, ReportFormat format, const SummaryDocument& summary,
                         const std::vector<OverlapDocument>* overlap = nullptr);

/// Fixed-width table for terminals.
std::string render_console_summary(const SummaryDocument& summary);

}  // namespace elicit
