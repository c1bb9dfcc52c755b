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

#include <benchmark/benchmark.h>

#include <filesystem>

#include "fixtures.hpp"
#include "tracefault/tracefault.hpp"

namespace tf = tracefault;

namespace {

std::string random_text(tf::SplitMix64& rng, std::size_t len) {
  std::string s;
  for (std::size_t i = 0; i < len; ++i) s += static_cast<char>('a' + rng.below(26));
  return s;
}

void BM_Levenshtein(benchmark::State& state) {
  tf::SplitMix64 rng(1);
  const auto len = static_cast<std::size_t>(state.range(0));
  const std::string a = random_text(rng, len);
  const std::string b = random_text(rng, len);
  for (auto _ : state) benchmark::DoNotOptimize(tf::levenshtein(a, b));
}
BENCHMARK(BM_Levenshtein)->Arg(8)->Arg(32)->Arg(256);

void BM_BboxIou(benchmark::State& state) {
  const tf::Box a{0, 0, 10, 10};
  const tf::Box b{3, 4, 9, 12};
  for (auto _ : state) benchmark::DoNotOptimize(tf::bbox_iou(a, b));
}
BENCHMARK(BM_BboxIou);

void BM_MaskIou(benchmark::State& state) {
  tf::SplitMix64 rng(2);
  const auto side = static_cast<std::size_t>(state.range(0));
  auto a = tf::MaskStack::zeros(1, side, side);
  auto b = tf::MaskStack::zeros(1, side, side);
  for (auto& v : a.bits) v = rng.below(2);
  for (auto& v : b.bits) v = rng.below(2);
  for (auto _ : state) benchmark::DoNotOptimize(tf::mask_iou(a.mask(0), b.mask(0)));
}
BENCHMARK(BM_MaskIou)->Arg(16)->Arg(128);

void BM_DetectorComposite(benchmark::State& state) {
  tf::DetectionSet ref;
  for (int i = 0; i < state.range(0); ++i) {
    ref.items.push_back({{i * 12.0, 0, 10, 10}, "main_signal", 0.9});
  }
  tf::DetectionSet pert = ref;
  for (auto& d : pert.items) d.box.x += 0.2;
  for (auto _ : state) benchmark::DoNotOptimize(tf::mr_detector_composite(ref, pert));
}
BENCHMARK(BM_DetectorComposite)->Arg(4)->Arg(32);

void BM_ExecuteVision(benchmark::State& state) {
  const auto spec = fixture::vision_pipeline();
  tf::SceneOptions opts;
  opts.count = 16;
  opts.labels = fixture::vision_classes();
  const auto data = tf::make_scene_dataset(opts);
  tf::ComponentRegistry registry;
  registry.add("detector", tf::mock_detector({}, data));
  for (const auto& c : fixture::vision_classes()) {
    registry.add(c, tf::mock_classifier({}, {"go", "stop"}));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const auto n = i++ % data->size();
    benchmark::DoNotOptimize(tf::execute(spec, data->input(n), registry, 0, {"run", n}));
  }
}
BENCHMARK(BM_ExecuteVision);

void BM_Campaign(benchmark::State& state) {
  const auto config =
      tf::load_campaign(std::filesystem::path(TRACEFAULT_CONFIG_DIR) / "vision.json");
  const auto data = tf::build_dataset(config.dataset);
  const auto registry = tf::build_registry(config.components, data);
  tf::Campaign campaign;
  campaign.pipeline = &config.pipeline;
  campaign.registry = &registry;
  campaign.dataset = data.get();
  campaign.perturbations = config.perturbations;
  campaign.seed = config.seed;
  campaign.jobs = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tf::run_campaign(campaign));
}
BENCHMARK(BM_Campaign)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
