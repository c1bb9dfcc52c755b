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

#include "tracefault/report.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "tracefault/errors.hpp"

namespace tracefault {

namespace {

using nlohmann::json;

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad_left(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

void write_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text) || !out.flush()) {
    throw ConfigError("cannot write " + file.string());
  }
}

}  // namespace

double InputRobustness::robustness() const noexcept {
  return runs == 0 ? 1.0 : static_cast<double>(passes) / static_cast<double>(runs);
}

std::optional<double> average_robustness(std::span<const InputRobustness> rows) {
  if (rows.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& r : rows) sum += r.robustness();
  return sum / static_cast<double>(rows.size());
}

std::string format_table(const AttributionReport& report) {
  std::ostringstream out;
  const auto& m = report.metadata;
  out << "campaign " << (m.campaign_id.empty() ? "-" : m.campaign_id) << ": " << m.dataset_size
      << " inputs x " << m.perturbation_count << " perturbations, seed " << m.seed << '\n';
  if (report.empty()) {
    out << "empty campaign: no perturbed runs evaluated\n";
    return out.str();
  }
  out << "runs " << report.runs << ", system failures " << report.total_failures << '\n';
  if (report.no_failures) out << "no failures observed; every alpha is 0\n";
  std::size_t width = 6;
  for (const auto& id : report.modules) width = std::max(width, id.size());
  out << '\n'
      << pad_right("module", width) << pad_left("alpha", 10) << pad_left("fc", 10)
      << pad_left("activations", 13) << pad_left("violations", 12) << '\n';
  for (std::size_t i = 0; i < report.modules.size(); ++i) {
    out << pad_right(report.modules[i], width) << pad_left(fixed(report.alpha[i], 4), 10)
        << pad_left(std::to_string(report.fc[i]), 10)
        << pad_left(std::to_string(report.activations[i]), 13)
        << pad_left(std::to_string(report.violations[i]), 12) << '\n';
  }
  return out.str();
}

std::string format_csv(const AttributionReport& report) {
  std::string out = "module,alpha,fc,activations,violations\n";
  if (report.empty()) return out;
  for (std::size_t i = 0; i < report.modules.size(); ++i) {
    out += report.modules[i] + ',' + shortest(report.alpha[i]) + ',' +
           std::to_string(report.fc[i]) + ',' + std::to_string(report.activations[i]) + ',' +
           std::to_string(report.violations[i]) + '\n';
  }
  return out;
}

std::string format_robustness_table(std::span<const InputRobustness> rows) {
  std::ostringstream out;
  out << pad_left("Input ID", 8) << pad_left("Robustness", 12)
      << pad_left("Avg. Levenshtein Distance", 27) << '\n';
  for (const auto& r : rows) {
    out << pad_left(std::to_string(r.input_ref), 8) << pad_left(fixed(r.robustness(), 3), 12)
        << pad_left(r.mean_edit_distance ? fixed(*r.mean_edit_distance, 2) : "-", 27) << '\n';
  }
  const auto avg = average_robustness(rows);
  out << pad_left("Average robustness", 20) << pad_left(avg ? fixed(*avg, 3) : "-", 27) << '\n';
  return out.str();
}

std::string format_robustness_csv(std::span<const InputRobustness> rows) {
  std::string out = "input,robustness,avg_levenshtein,runs,passes\n";
  for (const auto& r : rows) {
    out += std::to_string(r.input_ref) + ',' + shortest(r.robustness()) + ',' +
           (r.mean_edit_distance ? shortest(*r.mean_edit_distance) : std::string()) + ',' +
           std::to_string(r.runs) + ',' + std::to_string(r.passes) + '\n';
  }
  return out;
}

json summary_json(const AttributionReport& r, std::span<const InputRobustness> robustness) {
  json rows = json::array();
  for (const auto& x : robustness) {
    rows.push_back(json{{"input_ref", x.input_ref},
                        {"runs", x.runs},
                        {"passes", x.passes},
                        {"mean_edit_distance",
                         x.mean_edit_distance ? json(*x.mean_edit_distance) : json()}});
  }
  return json{{"campaign",
               {{"id", r.metadata.campaign_id},
                {"dataset_size", r.metadata.dataset_size},
                {"perturbation_count", r.metadata.perturbation_count},
                {"seed", r.metadata.seed}}},
              {"modules", r.modules},
              {"alpha", r.alpha},
              {"fc_normalized", r.fc_normalized},
              {"fc", r.fc},
              {"total_failures", r.total_failures},
              {"runs", r.runs},
              {"activations", r.activations},
              {"violations", r.violations},
              {"divergences", r.divergences},
              {"relation_violations", r.relation_violations},
              {"no_failures", r.no_failures},
              {"robustness", std::move(rows)}};
}

ReportBundle read_summary(const json& s) {
  try {
    ReportBundle b;
    auto& r = b.report;
    const json& c = s.at("campaign");
    r.metadata.campaign_id = c.at("id").get<std::string>();
    r.metadata.dataset_size = c.at("dataset_size").get<std::size_t>();
    r.metadata.perturbation_count = c.at("perturbation_count").get<std::size_t>();
    r.metadata.seed = c.at("seed").get<std::uint64_t>();
    s.at("modules").get_to(r.modules);
    s.at("alpha").get_to(r.alpha);
    s.at("fc_normalized").get_to(r.fc_normalized);
    s.at("fc").get_to(r.fc);
    s.at("total_failures").get_to(r.total_failures);
    s.at("runs").get_to(r.runs);
    s.at("activations").get_to(r.activations);
    s.at("violations").get_to(r.violations);
    s.at("divergences").get_to(r.divergences);
    s.at("relation_violations").get_to(r.relation_violations);
    s.at("no_failures").get_to(r.no_failures);
    const std::size_t n = r.modules.size();
    if (r.alpha.size() != n || r.fc_normalized.size() != n || r.fc.size() != n ||
        r.activations.size() != n || r.violations.size() != n || r.divergences.size() != n) {
      throw IntegrityError("summary columns have different lengths");
    }
    for (const auto& row : s.at("robustness")) {
      InputRobustness x;
      row.at("input_ref").get_to(x.input_ref);
      row.at("runs").get_to(x.runs);
      row.at("passes").get_to(x.passes);
      if (!row.at("mean_edit_distance").is_null()) {
        x.mean_edit_distance = row.at("mean_edit_distance").get<double>();
      }
      b.robustness.push_back(x);
    }
    return b;
  } catch (const json::exception& e) {
    throw IntegrityError(std::string("malformed summary: ") + e.what());
  }
}

void emit_report(const AttributionReport& report, std::span<const InputRobustness> robustness,
                 const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / kTableFile, format_table(report));
  write_file(dir / kCsvFile, format_csv(report));
  write_file(dir / kSummaryFile, summary_json(report, robustness).dump(2) + '\n');
  write_file(dir / kRobustnessFile, format_robustness_table(robustness));
  write_file(dir / kRobustnessCsvFile, format_robustness_csv(robustness));
}

ReportBundle load_report(const std::filesystem::path& dir) {
  std::ifstream in(dir / kSummaryFile);
  if (!in) throw ConfigError("cannot open " + (dir / kSummaryFile).string());
  try {
    return read_summary(json::parse(in));
  } catch (const json::parse_error& e) {
    throw IntegrityError(std::string("malformed summary: ") + e.what());
  }
}

}  // namespace tracefault
