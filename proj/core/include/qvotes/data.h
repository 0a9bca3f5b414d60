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

#ifndef QVOTES_DATA_H_
#define QVOTES_DATA_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qvotes {

// ACR five-point scale.
inline constexpr int kMinScore = 1;
inline constexpr int kMaxScore = 5;
inline constexpr int kScaleSize = kMaxScore - kMinScore + 1;

// Vote counts indexed by score - kMinScore.
using ScoreCounts = std::array<std::int64_t, kScaleSize>;

inline constexpr std::size_t kNoStimulus = std::numeric_limits<std::size_t>::max();

struct RatingRecord {
  std::string condition_id;
  std::string user_id;
  int score = 0;
  std::optional<std::string> stimulus_id;
};

// N_{x,u,q} for one (condition, user) pair with N_{x,u} >= 1.
struct UserTally {
  std::size_t user = 0;
  ScoreCounts counts{};
  std::int64_t total = 0;
};

// Aggregated votes at the finest granularity the input provides.
struct VoteCell {
  std::size_t condition = 0;
  std::size_t user = 0;
  std::size_t stimulus = kNoStimulus;
  int score = 0;
  std::int64_t count = 0;

  friend bool operator==(const VoteCell&, const VoteCell&) = default;
};

// Sparse count tensor of ratings per (condition, user, score). Immutable
// once built, so one instance can be shared by concurrent simulation
// workers. Condition, user and stimulus ids are kept in lexicographic order,
// which makes the dataset independent of input row order.
class RatingDataset {
 public:
  RatingDataset() = default;

  static RatingDataset FromRecords(std::span<const RatingRecord> records);

  // Builds from already-indexed cells. Cells with count 0 are dropped, as
  // are conditions left without votes.
  static RatingDataset FromCells(std::vector<std::string> conditions,
                                 std::vector<std::string> users,
                                 std::vector<std::string> stimuli,
                                 std::vector<VoteCell> cells);

  std::size_t num_conditions() const { return conditions_.size(); }
  std::size_t num_users() const { return users_.size(); }
  bool empty() const { return conditions_.empty(); }
  bool has_stimuli() const { return has_stimuli_; }

  const std::vector<std::string>& conditions() const { return conditions_; }
  const std::vector<std::string>& users() const { return users_; }
  const std::vector<std::string>& stimuli() const { return stimuli_; }
  std::span<const VoteCell> cells() const { return cells_; }

  std::optional<std::size_t> FindCondition(std::string_view id) const;
  std::optional<std::size_t> FindUser(std::string_view id) const;
  // Throws InputError for unknown ids.
  std::size_t ConditionIndex(std::string_view id) const;
  std::size_t UserIndex(std::string_view id) const;

  // Users with N_{x,u} >= 1, ordered by user index.
  std::span<const UserTally> tallies(std::size_t condition) const {
    return tallies_[condition];
  }
  const UserTally* FindTally(std::size_t condition, std::size_t user) const;

  // N_x.
  std::int64_t votes(std::size_t condition) const {
    return condition_totals_[condition];
  }
  // Pooled vote histogram of one condition.
  ScoreCounts score_counts(std::size_t condition) const;
  std::int64_t total_votes() const { return total_votes_; }
  std::int64_t count(std::size_t condition, std::size_t user, int score) const;

  friend bool operator==(const RatingDataset& a, const RatingDataset& b) {
    return a.conditions_ == b.conditions_ && a.users_ == b.users_ &&
           a.stimuli_ == b.stimuli_ && a.cells_ == b.cells_;
  }

 private:
  void BuildTallies();

  std::vector<std::string> conditions_;
  std::vector<std::string> users_;
  std::vector<std::string> stimuli_;
  std::vector<VoteCell> cells_;
  bool has_stimuli_ = false;

  std::vector<std::vector<UserTally>> tallies_;
  std::vector<std::int64_t> condition_totals_;
  std::int64_t total_votes_ = 0;
};

// Header names used to locate the ratings columns. Extra columns are
// ignored; the stimulus column is optional.
struct ColumnMap {
  std::string condition = "condition_id";
  std::string user = "user_id";
  std::string score = "score";
  std::string stimulus = "stimulus_id";
  char delimiter = ',';
};

// Parses "condition=NAME,user=NAME,score=NAME,stimulus=NAME" (any subset)
// over the defaults.
ColumnMap ParseColumnMap(std::string_view spec);

struct Diagnostic {
  std::size_t line = 0;
  std::string message;
};

struct LoadReport {
  std::size_t rows = 0;
  std::size_t conditions = 0;
  std::size_t users = 0;
  std::vector<Diagnostic> errors;

  bool clean() const { return errors.empty(); }
};

struct LoadedRatings {
  RatingDataset dataset;
  LoadReport report;
};

// Reads a delimited ratings table with a header row. Duplicate
// (condition, user, score) rows accumulate. Throws InputError naming the line
// of the first malformed row, or on empty input.
LoadedRatings LoadRatings(std::istream& in, const ColumnMap& columns = {});

// Like LoadRatings but keeps going past malformed rows: every problem is
// reported in `report.errors` and the dataset holds the valid rows. Only a
// missing header or missing required column throws.
LoadedRatings ScanRatings(std::istream& in, const ColumnMap& columns = {});

// Per-condition ground-truth MOS from a lab test.
class ReferenceMos {
 public:
  ReferenceMos() = default;
  // Throws InputError when a value is outside [1, 5].
  explicit ReferenceMos(std::map<std::string, double> mos);

  std::size_t size() const { return mos_.size(); }
  std::optional<double> Find(std::string_view condition) const;
  const std::map<std::string, double, std::less<>>& values() const {
    return mos_;
  }

 private:
  std::map<std::string, double, std::less<>> mos_;
};

struct ReferenceColumns {
  std::string condition = "condition_id";
  std::string mos = "mos";
  char delimiter = ',';
};

// Reads condition_id,mos. Out-of-range values and duplicate condition ids
// are errors.
ReferenceMos LoadReference(std::istream& in,
                           const ReferenceColumns& columns = {});

// Reference conditions that do not occur in the ratings.
std::vector<std::string> OrphanReferenceConditions(const ReferenceMos& ref,
                                                   const RatingDataset& ds);
// Rated conditions without a reference value.
std::vector<std::string> UnreferencedConditions(const ReferenceMos& ref,
                                                const RatingDataset& ds);

enum class OutlierScope { kCondition, kStimulus };

struct OutlierOptions {
  double k = 3.0;
  OutlierScope scope = OutlierScope::kCondition;
  // 0 repeats the sweep until nothing more is removed, which makes the
  // cleaning idempotent. 1 is a single sweep over the raw groups.
  int max_passes = 0;
};

struct CleanResult {
  RatingDataset dataset;
  std::int64_t removed = 0;
  int passes = 0;
};

// Removes extreme outliers: within each group, votes v with
// |v - median| >= k * IQR. When IQR is 0 only votes different from the median
// are removed. Quartiles use linear interpolation between order statistics,
// Q(p) = x[floor(h)] + (h - floor(h)) * (x[floor(h) + 1] - x[floor(h)]) with
// h = (m - 1) * p over the m sorted votes of the group.
CleanResult RemoveOutliersIqr(const RatingDataset& ds,
                              const OutlierOptions& options = {});

// P(U = u | x) = N_{x,u} / N_x over users that rated x.
std::map<std::string, double> EmpiricalUserProb(const RatingDataset& ds,
                                                std::string_view condition);

// P(Q = q | x, u) = N_{x,u,q} / N_{x,u}, indexed by q - 1.
std::array<double, kScaleSize> EmpiricalScoreDist(const RatingDataset& ds,
                                                  std::string_view condition,
                                                  std::string_view user);

}  // namespace qvotes

#endif  // QVOTES_DATA_H_
