// Copyright 2026 The qvotes Authors. All Rights Reserved.
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

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "benchmark/benchmark.h"
#include "qvotes/bootstrap.h"
#include "qvotes/data.h"
#include "qvotes/modelfit.h"
#include "qvotes/rng.h"
#include "qvotes/simulate.h"
#include "qvotes/stats.h"

namespace qvotes {
namespace {

// Roughly the shape of a crowdsourced ACR test: every condition rated by a
// few hundred workers, most of them once or twice.
RatingDataset Panel(int conditions, int users, int votes_per_condition) {
  std::mt19937_64 gen(42);
  std::normal_distribution<double> noise(0.0, 0.9);
  std::uniform_int_distribution<int> pick(0, users - 1);
  std::vector<RatingRecord> records;
  for (int x = 0; x < conditions; ++x) {
    const double truth = 1.3 + 3.4 * x / (conditions - 1);
    for (int v = 0; v < votes_per_condition; ++v) {
      const int score = std::clamp(static_cast<int>(std::lround(truth + noise(gen))), 1, 5);
      records.push_back({"c" + std::to_string(x), "u" + std::to_string(pick(gen)), score,
                         std::nullopt});
    }
  }
  return RatingDataset::FromRecords(records);
}

const RatingDataset& SharedPanel() {
  static const RatingDataset ds = Panel(50, 400, 220);
  return ds;
}

void BM_SampleCondition(benchmark::State& state) {
  const RatingDataset& ds = SharedPanel();
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(SampleCondition(ds, 7, n, rng));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SampleCondition)->Arg(10)->Arg(100)->Arg(200);

void BM_BootstrapCiMos(benchmark::State& state) {
  const RatingDataset& ds = SharedPanel();
  Rng rng(2);
  const ConditionSample sample =
      SampleCondition(ds, 7, static_cast<int>(state.range(0)), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(BootstrapCiMos(sample.scores, 1000, 0.95, rng));
  }
}
BENCHMARK(BM_BootstrapCiMos)->Arg(10)->Arg(100)->Arg(200);

void BM_Srcc(benchmark::State& state) {
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<int> value(0, 40);
  std::vector<double> a(state.range(0)), b(state.range(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = value(gen);
    b[i] = a[i] + value(gen) * 0.1;
  }
  for (auto _ : state) benchmark::DoNotOptimize(Srcc(a, b));
}
BENCHMARK(BM_Srcc)->Arg(50)->Arg(300);

void BM_MaxCiWidth(benchmark::State& state) {
  int n = 10;
  for (auto _ : state) {
    benchmark::DoNotOptimize(MaxCiWidth(3.3, n, 0.95));
    n = n == 200 ? 10 : n + 10;
  }
}
BENCHMARK(BM_MaxCiWidth);

void BM_FitPowerModel(benchmark::State& state) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> noise(0.0, 0.002);
  std::vector<CurveSample> pts;
  for (int n = 10; n <= 200; n += 10) {
    pts.push_back({double(n), 0.6467 * std::pow(n, -0.9903) + 0.4803 + noise(gen)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(FitPowerModel(pts));
}
BENCHMARK(BM_FitPowerModel);

void BM_ValiditySweep(benchmark::State& state) {
  const RatingDataset& ds = SharedPanel();
  const MosVector mos = DatasetMos(ds);
  std::map<std::string, double> lab;
  for (std::size_t i = 0; i < mos.conditions.size(); ++i) {
    lab[mos.conditions[i]] = mos.values[i];
  }
  const ReferenceMos ref(lab);
  SweepConfig cfg;
  cfg.repetitions = 10;
  cfg.threads = 1;
  cfg.metrics = {Metric::kValiditySrcc, Metric::kValidityRmse};
  for (auto _ : state) benchmark::DoNotOptimize(RunSweep(ds, &ref, cfg));
}
BENCHMARK(BM_ValiditySweep)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace qvotes

BENCHMARK_MAIN();
