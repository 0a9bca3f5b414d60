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

#ifndef QVOTES_SIMULATE_H_
#define QVOTES_SIMULATE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qvotes/data.h"
#include "qvotes/rng.h"
#include "qvotes/stats.h"

namespace qvotes {

enum class Metric {
  kValiditySrcc,
  kValidityRmse,
  kGainSrcc,
  kGainRmse,
  kCiWidth,
  kIrr,
};

std::string_view MetricName(Metric metric);
std::optional<Metric> ParseMetric(std::string_view name);
// Also accepts the shorthands "srcc" and "rmse" for the validity metrics.
// Throws ConfigError listing the valid names.
std::vector<Metric> ParseMetricList(std::string_view list);
bool NeedsReference(Metric metric);

// Curve names for the baseline-shifted certainty gain.
inline constexpr std::string_view kGainSrccDelta = "gain_srcc_delta";
inline constexpr std::string_view kGainRmseDelta = "gain_rmse_delta";

// start, start + step, ... up to and including stop.
std::vector<int> NValuesRange(int start, int stop, int step);

struct SweepConfig {
  std::vector<int> n_values = NValuesRange(10, 200, 10);
  int repetitions = 250;
  std::uint64_t master_seed = 0;
  std::vector<Metric> metrics;
  int bootstrap_resamples = 1000;
  double ci_level = 0.95;
  bool apply_first_order_map = false;

  // Gain metrics additionally produce curves shifted by their value at
  // delta_baseline_n, which must then be one of n_values.
  bool delta_curves = true;
  int delta_baseline_n = 10;
  int min_conditions_per_user = 3;
  // 0 selects the hardware concurrency. Never affects results.
  unsigned threads = 0;

  // Throws ConfigError.
  void Validate() const;
};

struct CurvePoint {
  int n = 0;
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double std_dev = 0.0;
  // Runs that produced a value; can be below the repetitions for IRR.
  int runs = 0;
};

struct MetricCurve {
  std::string metric;
  std::string dataset;
  std::vector<CurvePoint> points;

  const CurvePoint* At(int n) const;
};

// Votes drawn for one condition; scores[i] was cast by users[i].
struct ConditionSample {
  std::vector<int> scores;
  std::vector<std::size_t> users;
};

// n two-stage draws with replacement: a user with probability
// P(U=u|x) = N_{x,u} / N_x, then that user's score with probability
// P(Q=q|x,u) = N_{x,u,q} / N_{x,u}.
ConditionSample SampleCondition(const RatingDataset& ds, std::size_t condition,
                                int n, Rng& rng);

struct RunSample {
  int run_index = 0;
  int n = 0;
  std::vector<ConditionSample> conditions;
};

// The votes of run `run` at vote count n, drawn from the same substreams
// RunSweep uses.
RunSample DrawRunSample(const RatingDataset& ds, int n, int run,
                        std::uint64_t master_seed);

// Plain-mean MOS per condition of one run.
std::vector<double> SampleMos(const RunSample& sample);

// Mean leave-one-out SRCC between each user's per-condition MOS and the MOS
// of all other votes over the conditions that user rated. Users with fewer
// than min_conditions usable conditions, or with a constant MOS on either
// side, are skipped. nullopt when no user qualifies.
std::optional<double> IrrOfSample(const RunSample& sample,
                                  std::size_t num_users, int min_conditions);
std::optional<double> IrrOfDataset(const RatingDataset& ds, int min_conditions);

// Full-data IRR; throws UndefinedResult when no user is eligible.
double IrrFull(const RatingDataset& ds, int min_conditions = 3);

// Runs the resampling sweep and returns one curve per selected metric (plus
// delta curves for the gain metrics), in metric order. `ref` must be given
// when a validity metric is selected.
std::vector<MetricCurve> RunSweep(const RatingDataset& ds,
                                  const ReferenceMos* ref,
                                  const SweepConfig& config,
                                  std::string_view dataset_label = "");

struct CertaintyGain {
  MetricCurve srcc;        // G(n)
  MetricCurve rmse;        // G*(n)
  MetricCurve srcc_delta;  // G(n) - G(baseline)
  MetricCurve rmse_delta;  // G*(n) - G*(baseline)
};

CertaintyGain CertaintyGainCurves(const RatingDataset& ds,
                                  const SweepConfig& config,
                                  std::string_view dataset_label = "");

// W(n): per run, the mean over conditions of the bootstrap CI width of the
// sampled MOS, averaged over runs.
MetricCurve CiWidthCurve(const RatingDataset& ds, const SweepConfig& config,
                         std::string_view dataset_label = "");

MetricCurve IrrCurve(const RatingDataset& ds, const SweepConfig& config,
                     std::string_view dataset_label = "");

}  // namespace qvotes

#endif  // QVOTES_SIMULATE_H_
