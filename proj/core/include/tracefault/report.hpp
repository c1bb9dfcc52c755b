// Copyright 2026 The tracefault Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tracefault/attribution.hpp"

namespace tracefault {

/// Outcome of all perturbed runs of one input.
struct InputRobustness {
  std::uint64_t input_ref = 0;
  std::size_t runs = 0;
  std::size_t passes = 0;
  /// Mean edit distance over runs that evaluated a levenshtein relation.
  std::optional<double> mean_edit_distance;

  /// Fraction of perturbations under which the system passed (1 when no
  /// run was evaluated).
  double robustness() const noexcept;
  bool operator==(const InputRobustness&) const = default;
};

/// Mean robustness over inputs; nullopt for an empty list.
std::optional<double> average_robustness(std::span<const InputRobustness> rows);

/// Columns: module, alpha, fc, activations, violations.
std::string format_table(const AttributionReport& report);
/// Same columns; alpha in shortest round-trip form. Header only when the
/// report is empty.
std::string format_csv(const AttributionReport& report);

/// Columns: input, robustness, average edit distance; footer with the
/// average robustness.
std::string format_robustness_table(std::span<const InputRobustness> rows);
std::string format_robustness_csv(std::span<const InputRobustness> rows);

/// Structured summary; read_summary() restores both parts exactly.
nlohmann::json summary_json(const AttributionReport& report,
                            std::span<const InputRobustness> robustness);

struct ReportBundle {
  AttributionReport report;
  std::vector<InputRobustness> robustness;
};

ReportBundle read_summary(const nlohmann::json& summary);

inline constexpr const char* kEventLogFile = "events.jsonl";
inline constexpr const char* kTableFile = "report.txt";
inline constexpr const char* kCsvFile = "report.csv";
inline constexpr const char* kSummaryFile = "summary.json";
inline constexpr const char* kRobustnessFile = "robustness.txt";
inline constexpr const char* kRobustnessCsvFile = "robustness.csv";

/// Writes report.txt, report.csv, summary.json, robustness.txt and
/// robustness.csv into `dir`, creating it if needed. Throws ConfigError when
/// the directory or a file cannot be written.
void emit_report(const AttributionReport& report, std::span<const InputRobustness> robustness,
                 const std::filesystem::path& dir);

/// Loads summary.json from a campaign output directory.
ReportBundle load_report(const std::filesystem::path& dir);

}  // namespace tracefault
