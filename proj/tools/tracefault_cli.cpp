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

// Command-line front end: validate, run, report, replay.
//
// Exit codes: 0 success, 1 configuration or validation error, 2 integrity
// error in persisted data.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tracefault/tracefault.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kIntegrity = 2;

int cmd_validate(const std::string& file) {
  const tracefault::PipelineSpec spec = tracefault::load_pipeline(file);
  const auto report = tracefault::validate_pipeline(spec, nullptr);
  for (const auto& issue : report.issues) {
    std::cout << (issue.severity == tracefault::IssueSeverity::Error ? "error" : "warning") << " ["
              << tracefault::to_string(issue.code) << "] " << issue.message << '\n';
  }
  if (!report.ok()) return kInvalid;
  std::cout << "ok: " << spec.states.size() << " states, spec "
            << tracefault::to_hex(tracefault::spec_id(spec)) << '\n';
  return kOk;
}

int cmd_run(const std::string& file, std::optional<std::uint64_t> seed,
            std::optional<std::size_t> jobs, std::optional<std::string> out) {
  tracefault::CampaignConfig cfg = tracefault::load_campaign(file);
  if (seed) cfg.seed = *seed;
  if (jobs) {
    if (*jobs == 0) throw tracefault::ConfigError("--jobs must be at least 1");
    cfg.jobs = *jobs;
  }
  if (out) cfg.output_dir = *out;
  const auto result = tracefault::run_campaign(cfg);
  std::cout << tracefault::format_table(result.report);
  std::cout << "written to " << cfg.output_dir.string() << '\n';
  return kOk;
}

int cmd_report(const std::string& dir, bool csv, bool robustness) {
  const auto bundle = tracefault::load_report(dir);
  if (robustness) {
    std::cout << tracefault::format_robustness_table(bundle.robustness);
  } else if (csv) {
    std::cout << tracefault::format_csv(bundle.report);
  } else {
    std::cout << tracefault::format_table(bundle.report);
  }
  return kOk;
}

int cmd_replay(const std::string& log, const std::string& run) {
  const tracefault::TraceTree tree = tracefault::replay_file(log, run);
  std::cout << tracefault::canonical_json(tree) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fault attribution for compound AI pipelines"};
  app.require_subcommand(1);

  std::string spec_file;
  auto* validate = app.add_subcommand("validate", "Check a pipeline spec");
  validate->add_option("spec", spec_file, "Pipeline spec (JSON)")->required();

  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<std::string> out;
  auto* run = app.add_subcommand("run", "Run a campaign");
  run->add_option("config", config_file, "Campaign config (JSON)")->required();
  run->add_option("--seed", seed, "Override the campaign seed");
  run->add_option("--jobs", jobs, "Worker threads");
  run->add_option("--out", out, "Output directory");

  std::string report_dir;
  bool csv = false;
  bool table = false;
  bool robustness = false;
  auto* report = app.add_subcommand("report", "Print a campaign's report");
  report->add_option("campaign-dir", report_dir, "Campaign output directory")->required();
  auto* csv_flag = report->add_flag("--csv", csv, "CSV output");
  report->add_flag("--table", table, "Table output (default)")->excludes(csv_flag);
  report->add_flag("--robustness", robustness, "Per-input robustness table");

  std::string log_file;
  std::string run_name;
  auto* replay = app.add_subcommand("replay", "Rebuild one run's trace tree from an event log");
  replay->add_option("log", log_file, "Event log (JSONL)")->required();
  replay->add_option("run-id", run_name, "Run id, e.g. x0:ref")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*validate) return cmd_validate(spec_file);
    if (*run) return cmd_run(config_file, seed, jobs, out);
    if (*report) return cmd_report(report_dir, csv, robustness);
    if (*replay) return cmd_replay(log_file, run_name);
  } catch (const tracefault::IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << '\n';
    return kIntegrity;
  } catch (const tracefault::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kInvalid;
}
