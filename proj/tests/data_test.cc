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

#include "qvotes/data.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "qvotes/error.h"
#include "test_util.h"

namespace qvotes {
namespace {

using testing::MakeDataset;

LoadedRatings Load(const std::string& text, const ColumnMap& cols = {}) {
  std::istringstream in(text);
  return LoadRatings(in, cols);
}

TEST(LoadRatings, AggregatesDuplicateRows) {
  const auto loaded = Load(
      "condition_id,user_id,score\n"
      "c1,u1,5\n"
      "c1,u1,5\n"
      "c1,u2,1\n");
  const RatingDataset& ds = loaded.dataset;
  const std::size_t c1 = ds.ConditionIndex("c1");
  EXPECT_EQ(ds.count(c1, ds.UserIndex("u1"), 5), 2);
  EXPECT_EQ(ds.count(c1, ds.UserIndex("u2"), 1), 1);
  EXPECT_EQ(ds.votes(c1), 3);
  EXPECT_EQ(loaded.report.rows, 3u);
  EXPECT_EQ(loaded.report.conditions, 1u);
  EXPECT_EQ(loaded.report.users, 2u);
}

TEST(LoadRatings, ScoreOutOfRangeNamesLine) {
  try {
    Load("condition_id,user_id,score\nc1,u1,5\nc1,u2,6\n");
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_STREQ(e.what(), "score out of range at line 3");
  }
}

TEST(LoadRatings, RejectsMalformedRows) {
  EXPECT_THROW(Load("condition_id,user_id,score\nc1,u1,4.5\n"), InputError);
  EXPECT_THROW(Load("condition_id,user_id,score\nc1,,4\n"), InputError);
  EXPECT_THROW(Load("condition_id,user_id,score\nc1,u1\n"), InputError);
  EXPECT_THROW(Load("condition_id,user_id,score\nc1,u1,0\n"), InputError);
  EXPECT_THROW(Load(""), InputError);
  EXPECT_THROW(Load("condition_id,user_id,score\n"), InputError);
  EXPECT_THROW(Load("condition_id,score\nc1,3\n"), InputError);
}

TEST(LoadRatings, IgnoresExtraColumnsAndReadsStimulus) {
  const auto loaded = Load(
      "worker,extra,condition_id,score,user_id,stimulus_id\r\n"
      "w,x,c1,3,u1,f1.wav\r\n"
      "w,x,c1,4,u1,f2.wav\r\n");
  EXPECT_TRUE(loaded.dataset.has_stimuli());
  EXPECT_EQ(loaded.dataset.stimuli().size(), 2u);
  EXPECT_EQ(loaded.dataset.votes(0), 2);
}

TEST(LoadRatings, ColumnRemapping) {
  const ColumnMap cols = ParseColumnMap("condition=cond, user=worker,score=rating");
  const auto loaded = Load("cond,worker,rating\nA,w1,2\nB,w1,3\n", cols);
  EXPECT_EQ(loaded.dataset.num_conditions(), 2u);
  EXPECT_THROW(ParseColumnMap("colour=x"), ConfigError);
  EXPECT_THROW(ParseColumnMap("condition"), ConfigError);
}

TEST(ScanRatings, CollectsEveryProblem) {
  std::istringstream in(
      "condition_id,user_id,score\nc1,u1,5\nc1,u2,9\nc2,u1,x\nc2,u3,2\n");
  const auto loaded = ScanRatings(in);
  ASSERT_EQ(loaded.report.errors.size(), 2u);
  EXPECT_EQ(loaded.report.errors[0].line, 3u);
  EXPECT_EQ(loaded.report.errors[1].line, 4u);
  EXPECT_EQ(loaded.report.rows, 2u);
}

TEST(LoadRatings, RowOrderDoesNotMatter) {
  std::vector<std::string> rows;
  std::mt19937 gen(11);
  for (int i = 0; i < 200; ++i) {
    rows.push_back("c" + std::to_string(gen() % 7) + ",u" +
                   std::to_string(gen() % 13) + "," +
                   std::to_string(1 + gen() % 5) + ",s" +
                   std::to_string(gen() % 3));
  }
  auto text = [&] {
    std::string t = "condition_id,user_id,score,stimulus_id\n";
    for (const auto& r : rows) t += r + "\n";
    return t;
  };
  const RatingDataset first = Load(text()).dataset;
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(rows.begin(), rows.end(), gen);
    EXPECT_EQ(Load(text()).dataset, first);
  }
}

TEST(LoadReference, ParsesAndValidates) {
  {
    std::istringstream in("condition_id,mos\nc1,3.2\nc2,4.5\n");
    EXPECT_EQ(LoadReference(in).size(), 2u);
  }
  {
    std::istringstream in("condition_id,mos\nc1,5.7\n");
    EXPECT_THROW(LoadReference(in), InputError);
  }
  {
    std::istringstream in("condition_id,mos\nc1,3.0\nc1,3.1\n");
    EXPECT_THROW(LoadReference(in), InputError);
  }
}

TEST(LoadReference, OrphansAreReportedNotRejected) {
  const RatingDataset ds = MakeDataset({{"c1", "u1", 3}, {"c2", "u1", 4}});
  std::istringstream in("condition_id,mos\nc1,3.0\nc9,2.0\n");
  const ReferenceMos ref = LoadReference(in);
  EXPECT_EQ(OrphanReferenceConditions(ref, ds), std::vector<std::string>{"c9"});
  EXPECT_EQ(UnreferencedConditions(ref, ds), std::vector<std::string>{"c2"});
}

RatingDataset GroupOf(std::initializer_list<int> scores) {
  std::vector<RatingRecord> records;
  int i = 0;
  for (int s : scores) {
    records.push_back({"x", "u" + std::to_string(i++), s, std::nullopt});
  }
  return RatingDataset::FromRecords(records);
}

TEST(RemoveOutliersIqr, ZeroIqrKeepsOnlyTheMedian) {
  const CleanResult r = RemoveOutliersIqr(GroupOf({1, 3, 3, 3, 3, 3, 3, 5}));
  EXPECT_EQ(r.removed, 2);
  EXPECT_EQ(r.dataset.votes(0), 6);
  EXPECT_EQ(r.dataset.score_counts(0)[3 - kMinScore], 6);
}

TEST(RemoveOutliersIqr, WideGroupUntouched) {
  const CleanResult r = RemoveOutliersIqr(GroupOf({1, 2, 3, 4, 5}));
  EXPECT_EQ(r.removed, 0);
  EXPECT_EQ(r.dataset.votes(0), 5);
}

TEST(RemoveOutliersIqr, SmallIqrRemovesAtThreshold) {
  // Sorted {1,3,3,3,3,3,4,4}: Q1 = 3, Q3 = 3.25, IQR = 0.25, threshold 0.75.
  const CleanResult r =
      RemoveOutliersIqr(GroupOf({1, 3, 3, 3, 3, 3, 4, 4}), {3.0, OutlierScope::kCondition, 1});
  EXPECT_EQ(r.removed, 3);
}

TEST(RemoveOutliersIqr, PerStimulusNeedsStimulusIds) {
  const RatingDataset ds = GroupOf({1, 2, 3});
  EXPECT_THROW(RemoveOutliersIqr(ds, {3.0, OutlierScope::kStimulus, 0}),
               ConfigError);
}

TEST(RemoveOutliersIqr, PerStimulusGroupsSeparately) {
  // The pooled condition group and the two per-file groups give different
  // verdicts for the lone 1.
  std::vector<RatingRecord> records;
  for (int i = 0; i < 6; ++i) records.push_back({"x", "a" + std::to_string(i), 3, "f1"});
  records.push_back({"x", "b", 1, "f1"});
  for (int i = 0; i < 3; ++i) records.push_back({"x", "c" + std::to_string(i), 5, "f2"});
  for (int i = 0; i < 3; ++i) records.push_back({"x", "d" + std::to_string(i), 4, "f2"});
  const RatingDataset ds = RatingDataset::FromRecords(records);
  const auto per_stim = RemoveOutliersIqr(ds, {3.0, OutlierScope::kStimulus, 1});
  // f1: median 3, IQR 0 -> the 1 goes; f2: IQR 1 -> nothing (max distance 0.5).
  EXPECT_EQ(per_stim.removed, 1);
  const auto per_cond = RemoveOutliersIqr(ds, {3.0, OutlierScope::kCondition, 1});
  // Pooled sorted {1,3x6,4x3,5x3}: Q1 = 3, Q3 = 4, median 3, threshold 3.
  EXPECT_EQ(per_cond.removed, 0);
}

// Brute force: explicit sorted list, linear-interpolation quartiles.
std::int64_t BruteRemovals(std::vector<int> v, double k) {
  std::sort(v.begin(), v.end());
  auto q = [&](double p) {
    const double h = (v.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - lo) * (v[hi] - v[lo]);
  };
  const double med = q(0.5), iqr = q(0.75) - q(0.25);
  return std::count_if(v.begin(), v.end(), [&](int s) {
    const double d = std::abs(s - med);
    return iqr > 0 ? d >= k * iqr : d > 0;
  });
}

TEST(RemoveOutliersIqr, SinglePassMatchesBruteForce) {
  std::mt19937 gen(5);
  for (int trial = 0; trial < 500; ++trial) {
    const int size = 1 + static_cast<int>(gen() % 40);
    std::discrete_distribution<int> pick({gen() % 10 + 0.1, gen() % 10 + 0.1,
                                          gen() % 10 + 0.1, gen() % 10 + 0.1,
                                          gen() % 10 + 0.1});
    std::vector<int> votes;
    std::vector<RatingRecord> records;
    for (int i = 0; i < size; ++i) {
      votes.push_back(1 + pick(gen));
      records.push_back({"x", "u" + std::to_string(i % 4), votes.back(), std::nullopt});
    }
    const auto r = RemoveOutliersIqr(RatingDataset::FromRecords(records),
                                     {3.0, OutlierScope::kCondition, 1});
    EXPECT_EQ(r.removed, BruteRemovals(votes, 3.0));
  }
}

TEST(RemoveOutliersIqr, IdempotentAndKeepsMedian) {
  std::mt19937 gen(17);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<RatingRecord> records;
    const int conditions = 1 + static_cast<int>(gen() % 4);
    for (int c = 0; c < conditions; ++c) {
      const int size = 1 + static_cast<int>(gen() % 30);
      const int centre = 1 + static_cast<int>(gen() % 5);
      for (int i = 0; i < size; ++i) {
        int s = centre;
        if (gen() % 3 == 0) s = 1 + static_cast<int>(gen() % 5);
        records.push_back({"c" + std::to_string(c), "u" + std::to_string(gen() % 6), s,
                           std::nullopt});
      }
    }
    const RatingDataset ds = RatingDataset::FromRecords(records);
    const CleanResult once = RemoveOutliersIqr(ds);
    const CleanResult twice = RemoveOutliersIqr(once.dataset);
    EXPECT_EQ(twice.removed, 0);
    EXPECT_EQ(twice.dataset, once.dataset);
    EXPECT_EQ(once.dataset.num_conditions(), ds.num_conditions());
  }
}

TEST(RemoveOutliersIqr, NeverRemovesTheMedianValue) {
  std::mt19937 gen(23);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<int> votes;
    std::vector<RatingRecord> records;
    const int size = 1 + static_cast<int>(gen() % 25);
    for (int i = 0; i < size; ++i) {
      votes.push_back(1 + static_cast<int>(gen() % 5));
      records.push_back({"x", "u" + std::to_string(i), votes.back(), std::nullopt});
    }
    std::sort(votes.begin(), votes.end());
    const double h = (votes.size() - 1) * 0.5;
    const auto lo = static_cast<std::size_t>(h);
    const double median =
        votes[lo] + (h - lo) * (votes[std::min(lo + 1, votes.size() - 1)] - votes[lo]);
    if (median != std::floor(median)) continue;
    const auto ds = RatingDataset::FromRecords(records);
    const auto cleaned = RemoveOutliersIqr(ds, {3.0, OutlierScope::kCondition, 1});
    const int q = static_cast<int>(median) - kMinScore;
    EXPECT_EQ(cleaned.dataset.score_counts(0)[q], ds.score_counts(0)[q]);
  }
}

TEST(EmpiricalUserProb, Examples) {
  const RatingDataset ds =
      MakeDataset({{"x", "u1", 3, 3}, {"x", "u2", 4}, {"y", "u1", 2}});
  const auto p = EmpiricalUserProb(ds, "x");
  EXPECT_DOUBLE_EQ(p.at("u1"), 0.75);
  EXPECT_DOUBLE_EQ(p.at("u2"), 0.25);
  const auto single = EmpiricalUserProb(ds, "y");
  ASSERT_EQ(single.size(), 1u);
  EXPECT_DOUBLE_EQ(single.at("u1"), 1.0);
  const RatingDataset uniform = MakeDataset(
      {{"x", "a", 1, 2}, {"x", "b", 2, 2}, {"x", "c", 3, 2}, {"x", "d", 4, 2}});
  for (const auto& [user, prob] : EmpiricalUserProb(uniform, "x")) {
    EXPECT_DOUBLE_EQ(prob, 0.25) << user;
  }
  EXPECT_THROW(EmpiricalUserProb(ds, "nope"), InputError);
}

TEST(EmpiricalScoreDist, Examples) {
  const RatingDataset ds = MakeDataset(
      {{"x", "u1", 5, 2}, {"x", "u1", 4}, {"x", "u2", 2}, {"y", "u3", 1}});
  const auto p = EmpiricalScoreDist(ds, "x", "u1");
  EXPECT_DOUBLE_EQ(p[0], 0.0);
  EXPECT_DOUBLE_EQ(p[3], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(p[4], 2.0 / 3.0);
  const auto q = EmpiricalScoreDist(ds, "x", "u2");
  EXPECT_EQ(q, (std::array<double, 5>{0, 1, 0, 0, 0}));
  EXPECT_THROW(EmpiricalScoreDist(ds, "x", "u3"), InputError);
}

TEST(EmpiricalProbabilities, SumToOne) {
  std::mt19937 gen(3);
  std::vector<RatingRecord> records;
  for (int i = 0; i < 3000; ++i) {
    records.push_back({"c" + std::to_string(gen() % 9), "u" + std::to_string(gen() % 31),
                       1 + static_cast<int>(gen() % 5), std::nullopt});
  }
  const RatingDataset ds = RatingDataset::FromRecords(records);
  for (const std::string& x : ds.conditions()) {
    double total = 0.0;
    for (const auto& [user, prob] : EmpiricalUserProb(ds, x)) {
      total += prob;
      const auto dist = EmpiricalScoreDist(ds, x, user);
      EXPECT_NEAR(std::accumulate(dist.begin(), dist.end(), 0.0), 1.0, 1e-12);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

}  // namespace
}  // namespace qvotes
