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

#include "qvotes/simulate.h"

#include <cmath>
#include <set>

#include "gtest/gtest.h"
#include "oracles.h"
#include "qvotes/error.h"
#include "test_util.h"

namespace qvotes {
namespace {

using testing::MakeDataset;
using testing::PanelSpec;
using testing::SyntheticPanel;

RatingDataset ThreeUserToy() {
  return MakeDataset({{"x", "a", 5, 3},
                      {"x", "a", 4},
                      {"x", "b", 1, 2},
                      {"x", "c", 2},
                      {"x", "c", 3},
                      {"x", "c", 5, 2}});
}

TEST(SampleCondition, SingleFiveVoter) {
  const RatingDataset ds = MakeDataset({{"x", "u", 5, 4}});
  Rng rng(3);
  for (int n : {1, 10, 57}) {
    const ConditionSample s = SampleCondition(ds, 0, n, rng);
    ASSERT_EQ(s.scores.size(), static_cast<std::size_t>(n));
    for (int q : s.scores) EXPECT_EQ(q, 5);
  }
}

TEST(SampleCondition, FrequenciesMatchTwoStageEnumeration) {
  const RatingDataset ds = ThreeUserToy();
  const auto exact = oracle::TwoStageDistribution(ds, 0);
  Rng rng(2024);
  const int draws = 100000;
  const ConditionSample s = SampleCondition(ds, 0, draws, rng);
  std::array<int, kScaleSize> seen{};
  for (int q : s.scores) ++seen[q - kMinScore];
  for (int q = 0; q < kScaleSize; ++q) {
    const double p = exact[q];
    const double se = std::sqrt(p * (1 - p) / draws);
    EXPECT_NEAR(static_cast<double>(seen[q]) / draws, p, 4 * se + 1e-12) << q + 1;
  }
}

TEST(SampleCondition, MeanConvergesToPlainMos) {
  const RatingDataset ds = ThreeUserToy();
  const auto exact = oracle::TwoStageDistribution(ds, 0);
  double mean = 0.0, second = 0.0;
  for (int q = 0; q < kScaleSize; ++q) {
    mean += (q + 1) * exact[q];
    second += (q + 1) * (q + 1) * exact[q];
  }
  // The two-stage expectation collapses to the plain mean of all votes.
  EXPECT_NEAR(mean, MosPlain(ds.score_counts(0)), 1e-12);
  Rng rng(99);
  const int draws = 100000;
  const ConditionSample s = SampleCondition(ds, 0, draws, rng);
  const double se = std::sqrt((second - mean * mean) / draws);
  EXPECT_NEAR(MosPlain(s.scores), mean, 3 * se);
}

TEST(SampleCondition, SameSeedSameDraws) {
  const RatingDataset ds = ThreeUserToy();
  Rng a = MakeSubstream(7, 10, 0, 0);
  Rng b = MakeSubstream(7, 10, 0, 0);
  const auto x = SampleCondition(ds, 0, 500, a);
  const auto y = SampleCondition(ds, 0, 500, b);
  EXPECT_EQ(x.scores, y.scores);
  EXPECT_EQ(x.users, y.users);
}

TEST(SampleCondition, OnlyUsersWhoRatedTheCondition) {
  const RatingDataset ds = SyntheticPanel({.conditions = 10, .users = 30, .coverage = 0.3});
  for (int run = 0; run < 20; ++run) {
    const RunSample sample = DrawRunSample(ds, 40, run, 5);
    for (std::size_t x = 0; x < sample.conditions.size(); ++x) {
      EXPECT_EQ(sample.conditions[x].scores.size(), 40u);
      for (std::size_t u : sample.conditions[x].users) {
        EXPECT_NE(ds.FindTally(x, u), nullptr);
      }
    }
  }
}

TEST(SweepConfig, Validation) {
  SweepConfig cfg;
  cfg.metrics = {Metric::kGainSrcc};
  EXPECT_NO_THROW(cfg.Validate());
  cfg.n_values = {20, 30};
  EXPECT_THROW(cfg.Validate(), ConfigError);  // baseline 10 missing
  cfg.delta_curves = false;
  EXPECT_NO_THROW(cfg.Validate());
  cfg.n_values = {30, 20};
  EXPECT_THROW(cfg.Validate(), ConfigError);
  cfg.n_values = {10};
  cfg.repetitions = 0;
  EXPECT_THROW(cfg.Validate(), ConfigError);
  cfg.repetitions = 5;
  cfg.ci_level = 1.0;
  EXPECT_THROW(cfg.Validate(), ConfigError);
  cfg.ci_level = 0.95;
  cfg.metrics = {Metric::kCiWidth};
  cfg.n_values = {1, 2};
  EXPECT_THROW(cfg.Validate(), ConfigError);
  cfg.metrics.clear();
  EXPECT_THROW(cfg.Validate(), ConfigError);
}

TEST(NValuesRange, InclusiveStop) {
  EXPECT_EQ(NValuesRange(10, 50, 20), (std::vector<int>{10, 30, 50}));
  EXPECT_EQ(NValuesRange(10, 10, 10), (std::vector<int>{10}));
  EXPECT_EQ(NValuesRange(10, 200, 10).size(), 20u);
  EXPECT_THROW(NValuesRange(0, 10, 1), ConfigError);
  EXPECT_THROW(NValuesRange(10, 5, 1), ConfigError);
}

TEST(ParseMetricList, NamesAndShorthands) {
  EXPECT_EQ(ParseMetricList("srcc,rmse"),
            (std::vector<Metric>{Metric::kValiditySrcc, Metric::kValidityRmse}));
  EXPECT_EQ(ParseMetricList("irr, ci_width,irr"),
            (std::vector<Metric>{Metric::kIrr, Metric::kCiWidth}));
  EXPECT_THROW(ParseMetricList("srcc,bogus"), ConfigError);
}

TEST(RunSweep, ValidityNeedsReference) {
  const RatingDataset ds = SyntheticPanel({.conditions = 5});
  SweepConfig cfg;
  cfg.metrics = {Metric::kValiditySrcc};
  cfg.repetitions = 2;
  EXPECT_THROW(RunSweep(ds, nullptr, cfg), ConfigError);
}

TEST(RunSweep, SingleRunOnConstantCondition) {
  const RatingDataset ds = MakeDataset({{"x", "u", 3, 7}});
  const RunSample sample = DrawRunSample(ds, 7, 0, 1);
  EXPECT_EQ(SampleMos(sample), std::vector<double>{3.0});

  SweepConfig cfg;
  cfg.n_values = {10};
  cfg.repetitions = 1;
  cfg.metrics = {Metric::kCiWidth};
  const auto curves = RunSweep(ds, nullptr, cfg, "toy");
  ASSERT_EQ(curves.size(), 1u);
  const CurvePoint& p = curves[0].points.at(0);
  EXPECT_EQ(p.mean, 0.0);
  EXPECT_EQ(p.std_dev, 0.0);
  EXPECT_EQ(p.ci_low, p.ci_high);
  EXPECT_EQ(curves[0].dataset, "toy");
}

double MeanCiWidth(const MetricCurve& curve) {
  double total = 0.0;
  for (const CurvePoint& p : curve.points) total += p.ci_high - p.ci_low;
  return total / static_cast<double>(curve.points.size());
}

TEST(RunSweep, RunCiShrinksWithMoreRepetitions) {
  const RatingDataset ds = SyntheticPanel({.conditions = 12, .users = 40});
  SweepConfig cfg;
  cfg.n_values = {10, 20, 40};
  cfg.metrics = {Metric::kGainSrcc, Metric::kGainRmse};
  cfg.delta_curves = false;
  cfg.master_seed = 8;
  std::vector<std::vector<MetricCurve>> by_runs;
  for (int r : {50, 250, 1000}) {
    cfg.repetitions = r;
    by_runs.push_back(RunSweep(ds, nullptr, cfg));
  }
  for (std::size_t c = 0; c < by_runs[0].size(); ++c) {
    for (std::size_t i = 0; i < cfg.n_values.size(); ++i) {
      const auto width = [&](std::size_t r) {
        const CurvePoint& p = by_runs[r][c].points[i];
        return p.ci_high - p.ci_low;
      };
      EXPECT_LT(width(1), width(0));
      EXPECT_LT(width(2), width(1));
    }
    EXPECT_LT(MeanCiWidth(by_runs[2][c]), MeanCiWidth(by_runs[0][c]));
  }
}

TEST(RunSweep, ConfidenceIntervalBracketsMean) {
  const RatingDataset ds = SyntheticPanel({.conditions = 8});
  SweepConfig cfg;
  cfg.n_values = {10, 30};
  cfg.repetitions = 30;
  cfg.metrics = {Metric::kGainSrcc, Metric::kGainRmse, Metric::kIrr};
  for (const MetricCurve& curve : RunSweep(ds, nullptr, cfg)) {
    ASSERT_EQ(curve.points.size(), 2u);
    for (const CurvePoint& p : curve.points) {
      EXPECT_LE(p.ci_low, p.mean);
      EXPECT_LE(p.mean, p.ci_high);
    }
  }
}

TEST(RunSweep, DeterministicAcrossWorkerCounts) {
  const RatingDataset ds = SyntheticPanel({.conditions = 10, .users = 30});
  SweepConfig cfg;
  cfg.n_values = {10, 20, 30};
  cfg.repetitions = 40;
  cfg.bootstrap_resamples = 200;
  cfg.metrics = {Metric::kGainSrcc, Metric::kGainRmse, Metric::kCiWidth,
                 Metric::kIrr};
  cfg.master_seed = 12345;
  cfg.threads = 1;
  const auto serial = RunSweep(ds, nullptr, cfg);
  for (unsigned threads : {4u, 16u}) {
    cfg.threads = threads;
    const auto parallel = RunSweep(ds, nullptr, cfg);
    ASSERT_EQ(parallel.size(), serial.size());
    for (std::size_t c = 0; c < serial.size(); ++c) {
      for (std::size_t i = 0; i < serial[c].points.size(); ++i) {
        const CurvePoint& a = serial[c].points[i];
        const CurvePoint& b = parallel[c].points[i];
        EXPECT_EQ(a.mean, b.mean);
        EXPECT_EQ(a.ci_low, b.ci_low);
        EXPECT_EQ(a.ci_high, b.ci_high);
        EXPECT_EQ(a.std_dev, b.std_dev);
      }
    }
  }
}

TEST(RunSweep, ValidityAgainstOwnMosEqualsCertaintyGain) {
  const RatingDataset ds = SyntheticPanel({.conditions = 15, .users = 40});
  const MosVector full = DatasetMos(ds, MosKind::kUserBalanced);
  std::map<std::string, double> as_ref;
  for (std::size_t i = 0; i < full.size(); ++i) as_ref[full.conditions[i]] = full.values[i];
  const ReferenceMos ref(as_ref);

  SweepConfig cfg;
  cfg.n_values = {10, 20, 50};
  cfg.repetitions = 60;
  cfg.master_seed = 77;
  cfg.metrics = {Metric::kValiditySrcc, Metric::kValidityRmse};
  const auto validity = RunSweep(ds, &ref, cfg);
  const CertaintyGain gain = CertaintyGainCurves(ds, cfg);
  for (std::size_t i = 0; i < cfg.n_values.size(); ++i) {
    EXPECT_NEAR(validity[0].points[i].mean, gain.srcc.points[i].mean, 1e-12);
    EXPECT_NEAR(validity[1].points[i].mean, gain.rmse.points[i].mean, 1e-12);
  }
}

TEST(RunSweep, MappedValidityRmseNotAboveUnmapped) {
  const RatingDataset ds = SyntheticPanel({.conditions = 15, .users = 40});
  std::map<std::string, double> lab;
  for (std::size_t x = 0; x < ds.num_conditions(); ++x) {
    lab[ds.conditions()[x]] = std::clamp(0.8 * MosUserBalanced(ds, x) + 0.9, 1.0, 5.0);
  }
  const ReferenceMos ref(lab);
  SweepConfig cfg;
  cfg.n_values = {10, 40};
  cfg.repetitions = 30;
  cfg.metrics = {Metric::kValidityRmse};
  const auto raw = RunSweep(ds, &ref, cfg);
  cfg.apply_first_order_map = true;
  const auto mapped = RunSweep(ds, &ref, cfg);
  for (std::size_t i = 0; i < cfg.n_values.size(); ++i) {
    EXPECT_LE(mapped[0].points[i].mean, raw[0].points[i].mean);
  }
}

TEST(CertaintyGain, DeltaIsZeroAtBaseline) {
  const RatingDataset ds = SyntheticPanel({.conditions = 12});
  SweepConfig cfg;
  cfg.n_values = {10, 20, 40, 80};
  cfg.repetitions = 50;
  const CertaintyGain g = CertaintyGainCurves(ds, cfg);
  EXPECT_EQ(g.srcc_delta.points[0].mean, 0.0);
  EXPECT_EQ(g.rmse_delta.points[0].mean, 0.0);
  for (std::size_t i = 0; i < cfg.n_values.size(); ++i) {
    EXPECT_NEAR(g.srcc_delta.points[i].mean,
                g.srcc.points[i].mean - g.srcc.points[0].mean, 1e-12);
  }
  // More votes, closer to the full-data MOS.
  EXPECT_LT(g.rmse_delta.points.back().mean, 0.0);
  EXPECT_GT(g.srcc_delta.points.back().mean, 0.0);
}

TEST(CertaintyGain, IdenticalVotersGivePerfectAgreement) {
  std::vector<RatingRecord> records;
  for (int x = 0; x < 5; ++x) {
    for (int u = 0; u < 4; ++u) {
      records.push_back({"c" + std::to_string(x), "u" + std::to_string(u), x + 1,
                         std::nullopt});
    }
  }
  const RatingDataset ds = RatingDataset::FromRecords(records);
  SweepConfig cfg;
  cfg.n_values = {10, 20};
  cfg.repetitions = 5;
  const CertaintyGain g = CertaintyGainCurves(ds, cfg);
  for (const CurvePoint& p : g.srcc.points) EXPECT_EQ(p.mean, 1.0);
  for (const CurvePoint& p : g.rmse.points) EXPECT_EQ(p.mean, 0.0);
}

TEST(CertaintyGain, NeedsBaselineAndThreeConditions) {
  SweepConfig cfg;
  cfg.n_values = {20, 30};
  cfg.repetitions = 2;
  EXPECT_THROW(CertaintyGainCurves(SyntheticPanel({.conditions = 5}), cfg),
               ConfigError);
  cfg.n_values = {10};
  EXPECT_THROW(CertaintyGainCurves(SyntheticPanel({.conditions = 2}), cfg),
               ConfigError);
}

TEST(CiWidthCurve, ZeroForIdenticalVotes) {
  const RatingDataset ds =
      MakeDataset({{"x", "a", 4, 5}, {"y", "b", 2, 3}, {"y", "c", 2}});
  SweepConfig cfg;
  cfg.n_values = {10, 50};
  cfg.repetitions = 3;
  const MetricCurve w = CiWidthCurve(ds, cfg);
  for (const CurvePoint& p : w.points) EXPECT_EQ(p.mean, 0.0);
}

TEST(CiWidthCurve, ShrinksLikeInverseRootN) {
  const RatingDataset ds = testing::TwoPointPanel({0.3, 0.5, 0.7}, 40);
  SweepConfig cfg;
  cfg.n_values = {10, 20, 40, 50, 80, 100, 160, 200};
  cfg.repetitions = 200;
  cfg.bootstrap_resamples = 1000;
  const MetricCurve w = CiWidthCurve(ds, cfg);
  for (int n : {10, 20, 40, 50, 80, 100}) {
    const double here = w.At(n)->mean;
    const double doubled = w.At(2 * n)->mean;
    EXPECT_LT(doubled, here) << n;
    EXPECT_NEAR(here / doubled, std::sqrt(2.0), 0.15 * std::sqrt(2.0)) << n;
  }
}

TEST(Irr, IdenticalRatersAgreePerfectly) {
  std::vector<RatingRecord> records;
  for (int x = 0; x < 5; ++x) {
    for (const char* u : {"a", "b"}) {
      records.push_back({"c" + std::to_string(x), u, x + 1, std::nullopt});
    }
  }
  const RatingDataset ds = RatingDataset::FromRecords(records);
  EXPECT_DOUBLE_EQ(IrrFull(ds), 1.0);
  SweepConfig cfg;
  cfg.n_values = {10, 20};
  cfg.repetitions = 5;
  const MetricCurve irr = IrrCurve(ds, cfg);
  for (const CurvePoint& p : irr.points) EXPECT_DOUBLE_EQ(p.mean, 1.0);
}

TEST(Irr, LeaveOneOutByHand) {
  // User a: (1, 2, 3), b: (2, 1, 3), c: (1, 3, 4) over conditions x, y, z.
  const RatingDataset ds = MakeDataset({{"x", "a", 1}, {"y", "a", 2}, {"z", "a", 3},
                                        {"x", "b", 2}, {"y", "b", 1}, {"z", "b", 3},
                                        {"x", "c", 1}, {"y", "c", 3}, {"z", "c", 4}});
  // Others for a: (1.5, 2, 3.5) -> srcc 1; for b: (1, 2.5, 3.5) -> 0.5;
  // for c: (1.5, 1.5, 3) -> ranks (1.5, 1.5, 3) vs (1, 2, 3) -> sqrt(3)/2.
  const double expected = (1.0 + 0.5 + std::sqrt(3.0) / 2.0) / 3.0;
  EXPECT_NEAR(IrrFull(ds), expected, 1e-12);
}

TEST(Irr, SkipsLowCoverageUsers) {
  const RatingDataset ds = MakeDataset({{"x", "a", 1}, {"y", "a", 2},
                                        {"x", "b", 2}, {"y", "b", 1}});
  EXPECT_THROW(IrrFull(ds), UndefinedResult);
  SweepConfig cfg;
  cfg.n_values = {10};
  cfg.repetitions = 2;
  EXPECT_THROW(IrrCurve(ds, cfg), ConfigError);
}

TEST(Irr, RisesWithVotesAndApproachesFullData) {
  // One vote per (user, condition), as in crowd tests where a worker rarely
  // hears the same condition twice.
  const RatingDataset ds =
      SyntheticPanel({.conditions = 30, .users = 150, .coverage = 0.6,
                      .votes_per_pair = 1, .seed = 4});
  const double full = IrrFull(ds);
  SweepConfig cfg;
  cfg.n_values = {20, 60, 200};
  cfg.repetitions = 40;
  const MetricCurve irr = IrrCurve(ds, cfg);
  EXPECT_LT(irr.At(20)->mean, irr.At(60)->mean);
  EXPECT_LT(irr.At(200)->mean, full);
  EXPECT_NEAR(irr.At(200)->mean, full, 0.02);
}

}  // namespace
}  // namespace qvotes
