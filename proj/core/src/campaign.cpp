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

#include "tracefault/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "tracefault/errors.hpp"
#include "tracefault/event_store.hpp"

namespace tracefault {

namespace {

struct Scorer {
  std::vector<StateId> modules;
  std::vector<CompositeRelation> composites;

  explicit Scorer(const PipelineSpec& spec)
      : modules(spec.module_ids()), composites(spec.composites()) {}

  RunEvaluation operator()(const TraceTree& ref, const TraceTree& pert) const {
    RunEvaluation run;
    run.scores = module_scores(ref, pert, align(ref, pert), modules, composites);
    run.activated_ref = activated_modules(ref);
    run.activated_pert = activated_modules(pert);
    const auto phantom = phantom_flags(run.activated_ref, run.activated_pert, modules);
    run.system_pass = system_score(run.scores, phantom);
    return run;
  }
};

/// Writes each input's runs in input order, whichever worker finishes first.
class OrderedLog {
 public:
  explicit OrderedLog(EventWriter* writer) : writer_(writer) {}

  void submit(std::size_t index, std::vector<TraceTree> runs) {
    if (writer_ == nullptr) return;
    std::lock_guard lock(mutex_);
    pending_.emplace(index, std::move(runs));
    for (auto it = pending_.find(next_); it != pending_.end(); it = pending_.find(next_)) {
      for (const auto& tree : it->second) writer_->write(tree);
      pending_.erase(it);
      ++next_;
    }
  }

 private:
  EventWriter* writer_;
  std::mutex mutex_;
  std::map<std::size_t, std::vector<TraceTree>> pending_;
  std::size_t next_ = 0;
};

void validate_campaign(const Campaign& c, const PerturbationCatalog& catalog) {
  if (c.pipeline == nullptr || c.registry == nullptr || c.dataset == nullptr) {
    throw ConfigError("campaign needs a pipeline, a registry and a dataset");
  }
  const ValidationReport report = validate_pipeline(*c.pipeline, c.registry);
  if (!report.ok()) {
    std::string message = "pipeline does not validate:";
    for (const auto& issue : report.issues) {
      if (issue.severity == IssueSeverity::Error) message += "\n  " + issue.message;
    }
    throw ConfigError(message);
  }
  check_perturbation_set(c.perturbations);
  for (const auto& p : c.perturbations) {
    if (!catalog.contains(p.kind)) throw ConfigError("unknown perturbation kind '" + p.kind + "'");
    if (p.target_state && c.pipeline->find(*p.target_state) == nullptr) {
      throw ConfigError("perturbation '" + p.id + "' targets unknown state '" +
                        *p.target_state + "'");
    }
  }
}

}  // namespace

RunEvaluation evaluate_pair(const PipelineSpec& spec, const TraceTree& ref,
                            const TraceTree& pert) {
  return Scorer(spec)(ref, pert);
}

std::string run_id(std::size_t input_ref, const PerturbationSpec* perturbation) {
  return "x" + std::to_string(input_ref) + ":" + (perturbation ? perturbation->id : "ref");
}

CampaignResult run_campaign(const Campaign& c) {
  const PerturbationCatalog& catalog = c.catalog ? *c.catalog : PerturbationCatalog::builtin();
  validate_campaign(c, catalog);
  const PipelineSpec& spec = *c.pipeline;
  const Scorer scorer(spec);
  const std::size_t inputs = c.dataset->size();
  const std::size_t jobs = std::clamp<std::size_t>(c.jobs, 1, std::max<std::size_t>(inputs, 1));

  std::optional<EventWriter> writer;
  if (c.events != nullptr) writer.emplace(*c.events, c.id);
  OrderedLog log(writer ? &*writer : nullptr);

  std::vector<FCAccumulator> partial(jobs, FCAccumulator(scorer.modules));
  std::vector<InputRobustness> robustness(inputs);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&](std::size_t worker) {
    try {
      while (!failed.load()) {
        const std::size_t i = next.fetch_add(1);
        if (i >= inputs) break;
        const Payload input = c.dataset->input(i);
        std::vector<TraceTree> runs;
        runs.reserve(c.perturbations.size() + 1);
        RunOptions ref_opts{run_id(i, nullptr), i, nullptr, &catalog, c.seed};
        runs.push_back(execute(spec, input, *c.registry, c.seed, ref_opts));

        InputRobustness row{i, 0, 0, std::nullopt};
        double distance_sum = 0.0;
        std::size_t distance_runs = 0;
        for (const auto& p : c.perturbations) {
          const Payload x = p.target_state ? input : catalog.apply(p, input, c.seed, i);
          RunOptions opts{run_id(i, &p), i, &p, &catalog, c.seed};
          runs.push_back(execute(spec, x, *c.registry, c.seed, opts));
          const RunEvaluation eval = scorer(runs.front(), runs.back());
          accumulate(partial[worker], eval);

          ++row.runs;
          if (eval.system_pass) ++row.passes;
          std::optional<double> distance;
          for (const auto& score : eval.scores) {
            for (const auto& obs : score.observations) {
              if (obs.metric == Metric::TextEdit) distance = std::max(distance.value_or(0.0), -obs.theta);
            }
          }
          if (distance) {
            distance_sum += *distance;
            ++distance_runs;
          }
        }
        if (distance_runs > 0) row.mean_edit_distance = distance_sum / static_cast<double>(distance_runs);
        robustness[i] = row;
        log.submit(i, std::move(runs));
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      failed.store(true);
    }
  };

  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < jobs; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  CampaignResult result;
  result.accumulator = FCAccumulator(scorer.modules);
  for (const auto& acc : partial) merge(result.accumulator, acc);
  result.report = finalize(result.accumulator,
                           CampaignMetadata{c.id, inputs, c.perturbations.size(), c.seed});
  result.robustness = std::move(robustness);
  return result;
}

CampaignResult run_campaign(const CampaignConfig& config) {
  const auto dataset = build_dataset(config.dataset);
  const ComponentRegistry registry = build_registry(config.components, dataset);

  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) throw ConfigError("cannot create " + config.output_dir.string() + ": " + ec.message());
  const auto log_path = config.output_dir / kEventLogFile;
  std::ofstream events(log_path, std::ios::binary | std::ios::trunc);
  if (!events) throw ConfigError("cannot write " + log_path.string());

  Campaign c;
  c.id = config.id;
  c.pipeline = &config.pipeline;
  c.registry = &registry;
  c.dataset = dataset.get();
  c.perturbations = config.perturbations;
  c.seed = config.seed;
  c.jobs = config.jobs;
  c.events = &events;
  CampaignResult result = run_campaign(c);
  events.flush();
  if (!events) throw ConfigError("cannot write " + log_path.string());
  emit_report(result.report, result.robustness, config.output_dir);
  return result;
}

}  // namespace tracefault
