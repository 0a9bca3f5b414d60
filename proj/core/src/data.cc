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
#include <cmath>
#include <istream>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

#include "csv.h"
#include "qvotes/error.h"

namespace qvotes {
namespace {

using internal::FindColumn;
using internal::IsBlank;
using internal::LineReader;
using internal::ParseNumber;
using internal::SplitCsvLine;

std::size_t IndexOf(const std::vector<std::string>& sorted_ids,
                    std::string_view id) {
  const auto it = std::lower_bound(sorted_ids.begin(), sorted_ids.end(), id);
  return static_cast<std::size_t>(it - sorted_ids.begin());
}

std::vector<std::string> SortedUnique(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

auto CellKey(const VoteCell& c) {
  return std::tie(c.condition, c.user, c.stimulus, c.score);
}

std::string AtLine(std::string_view what, std::size_t line) {
  std::ostringstream os;
  os << what << " at line " << line;
  return os.str();
}

}  // namespace

RatingDataset RatingDataset::FromRecords(std::span<const RatingRecord> records) {
  std::vector<std::string> conditions, users, stimuli;
  conditions.reserve(records.size());
  users.reserve(records.size());
  for (const RatingRecord& r : records) {
    if (r.condition_id.empty()) throw InputError("empty condition_id");
    if (r.user_id.empty()) throw InputError("empty user_id");
    if (r.score < kMinScore || r.score > kMaxScore) {
      throw InputError("score out of range: " + std::to_string(r.score));
    }
    conditions.push_back(r.condition_id);
    users.push_back(r.user_id);
    if (r.stimulus_id) stimuli.push_back(*r.stimulus_id);
  }
  conditions = SortedUnique(std::move(conditions));
  users = SortedUnique(std::move(users));
  stimuli = SortedUnique(std::move(stimuli));

  std::vector<VoteCell> cells;
  cells.reserve(records.size());
  for (const RatingRecord& r : records) {
    cells.push_back({IndexOf(conditions, r.condition_id),
                     IndexOf(users, r.user_id),
                     r.stimulus_id ? IndexOf(stimuli, *r.stimulus_id)
                                   : kNoStimulus,
                     r.score, 1});
  }
  return FromCells(std::move(conditions), std::move(users), std::move(stimuli),
                   std::move(cells));
}

RatingDataset RatingDataset::FromCells(std::vector<std::string> conditions,
                                       std::vector<std::string> users,
                                       std::vector<std::string> stimuli,
                                       std::vector<VoteCell> cells) {
  std::erase_if(cells, [](const VoteCell& c) { return c.count == 0; });
  for (const VoteCell& c : cells) {
    if (c.count < 0) throw InputError("negative vote count");
    if (c.score < kMinScore || c.score > kMaxScore) {
      throw InputError("score out of range: " + std::to_string(c.score));
    }
    if (c.condition >= conditions.size() || c.user >= users.size() ||
        (c.stimulus != kNoStimulus && c.stimulus >= stimuli.size())) {
      throw InputError("vote cell refers to an unknown id");
    }
  }

  // Drop ids that no longer carry votes and renumber in sorted id order.
  auto compact = [](std::vector<std::string>& ids, auto used_index) {
    std::vector<std::size_t> order(ids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
    std::vector<std::size_t> remap(ids.size(), kNoStimulus);
    std::vector<std::string> kept;
    for (std::size_t old : order) {
      if (!used_index[old]) continue;
      if (!kept.empty() && kept.back() == ids[old]) {
        throw InputError("duplicate id '" + ids[old] + "'");
      }
      remap[old] = kept.size();
      kept.push_back(ids[old]);
    }
    ids = std::move(kept);
    return remap;
  };
  std::vector<bool> cond_used(conditions.size()), user_used(users.size()),
      stim_used(stimuli.size());
  for (const VoteCell& c : cells) {
    cond_used[c.condition] = true;
    user_used[c.user] = true;
    if (c.stimulus != kNoStimulus) stim_used[c.stimulus] = true;
  }
  const auto cond_map = compact(conditions, cond_used);
  const auto user_map = compact(users, user_used);
  const auto stim_map = compact(stimuli, stim_used);
  for (VoteCell& c : cells) {
    c.condition = cond_map[c.condition];
    c.user = user_map[c.user];
    if (c.stimulus != kNoStimulus) c.stimulus = stim_map[c.stimulus];
  }

  std::sort(cells.begin(), cells.end(),
            [](const VoteCell& a, const VoteCell& b) {
              return CellKey(a) < CellKey(b);
            });
  std::vector<VoteCell> merged;
  merged.reserve(cells.size());
  for (const VoteCell& c : cells) {
    if (!merged.empty() && CellKey(merged.back()) == CellKey(c)) {
      merged.back().count += c.count;
    } else {
      merged.push_back(c);
    }
  }

  RatingDataset ds;
  ds.conditions_ = std::move(conditions);
  ds.users_ = std::move(users);
  ds.stimuli_ = std::move(stimuli);
  ds.cells_ = std::move(merged);
  ds.has_stimuli_ = std::any_of(
      ds.cells_.begin(), ds.cells_.end(),
      [](const VoteCell& c) { return c.stimulus != kNoStimulus; });
  ds.BuildTallies();
  return ds;
}

void RatingDataset::BuildTallies() {
  tallies_.assign(conditions_.size(), {});
  condition_totals_.assign(conditions_.size(), 0);
  total_votes_ = 0;
  // Cells are sorted by (condition, user, ...), so tallies come out ordered.
  for (const VoteCell& c : cells_) {
    auto& row = tallies_[c.condition];
    if (row.empty() || row.back().user != c.user) {
      row.push_back(UserTally{c.user, {}, 0});
    }
    row.back().counts[c.score - kMinScore] += c.count;
    row.back().total += c.count;
    condition_totals_[c.condition] += c.count;
    total_votes_ += c.count;
  }
}

std::optional<std::size_t> RatingDataset::FindCondition(
    std::string_view id) const {
  const std::size_t i = IndexOf(conditions_, id);
  if (i < conditions_.size() && conditions_[i] == id) return i;
  return std::nullopt;
}

std::optional<std::size_t> RatingDataset::FindUser(std::string_view id) const {
  const std::size_t i = IndexOf(users_, id);
  if (i < users_.size() && users_[i] == id) return i;
  return std::nullopt;
}

std::size_t RatingDataset::ConditionIndex(std::string_view id) const {
  if (auto i = FindCondition(id)) return *i;
  throw InputError("unknown condition '" + std::string(id) + "'");
}

std::size_t RatingDataset::UserIndex(std::string_view id) const {
  if (auto i = FindUser(id)) return *i;
  throw InputError("unknown user '" + std::string(id) + "'");
}

const UserTally* RatingDataset::FindTally(std::size_t condition,
                                          std::size_t user) const {
  const auto& row = tallies_.at(condition);
  const auto it = std::lower_bound(
      row.begin(), row.end(), user,
      [](const UserTally& t, std::size_t u) { return t.user < u; });
  if (it != row.end() && it->user == user) return &*it;
  return nullptr;
}

ScoreCounts RatingDataset::score_counts(std::size_t condition) const {
  ScoreCounts out{};
  for (const UserTally& t : tallies_.at(condition)) {
    for (int q = 0; q < kScaleSize; ++q) out[q] += t.counts[q];
  }
  return out;
}

std::int64_t RatingDataset::count(std::size_t condition, std::size_t user,
                                  int score) const {
  if (score < kMinScore || score > kMaxScore) return 0;
  const UserTally* t = FindTally(condition, user);
  return t ? t->counts[score - kMinScore] : 0;
}

ColumnMap ParseColumnMap(std::string_view spec) {
  ColumnMap map;
  std::string_view rest = spec;
  while (!rest.empty()) {
    const std::size_t comma = rest.find(',');
    const std::string_view item = internal::Trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{}
                                           : rest.substr(comma + 1);
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq + 1 == item.size()) {
      throw ConfigError("column mapping '" + std::string(item) +
                        "' must look like key=NAME");
    }
    const std::string_view key = item.substr(0, eq);
    std::string name(item.substr(eq + 1));
    if (key == "condition" || key == "condition_id") {
      map.condition = std::move(name);
    } else if (key == "user" || key == "user_id") {
      map.user = std::move(name);
    } else if (key == "score") {
      map.score = std::move(name);
    } else if (key == "stimulus" || key == "stimulus_id") {
      map.stimulus = std::move(name);
    } else {
      throw ConfigError("unknown column key '" + std::string(key) +
                        "' (expected condition, user, score or stimulus)");
    }
  }
  return map;
}

namespace {

LoadedRatings ReadRatings(std::istream& in, const ColumnMap& columns,
                          bool strict) {
  LineReader reader(in);
  std::string line;
  bool have_header = false;
  while (reader.Next(line)) {
    if (!IsBlank(line)) {
      have_header = true;
      break;
    }
  }
  if (!have_header) throw InputError("empty ratings input");

  const auto header = SplitCsvLine(line, columns.delimiter);
  const auto cond_col = FindColumn(header, columns.condition);
  const auto user_col = FindColumn(header, columns.user);
  const auto score_col = FindColumn(header, columns.score);
  const auto stim_col = FindColumn(header, columns.stimulus);
  for (const auto& [col, name] :
       {std::pair{cond_col, &columns.condition},
        std::pair{user_col, &columns.user},
        std::pair{score_col, &columns.score}}) {
    if (!col) {
      throw InputError("ratings header lacks required column '" + *name +
                       "'");
    }
  }

  LoadedRatings result;
  std::vector<RatingRecord> records;
  auto fail = [&](std::string_view what) {
    const std::string msg = AtLine(what, reader.line_number());
    if (strict) throw InputError(msg);
    result.report.errors.push_back({reader.line_number(), msg});
  };

  while (reader.Next(line)) {
    if (IsBlank(line)) continue;
    const auto fields = SplitCsvLine(line, columns.delimiter);
    auto field = [&](std::optional<std::size_t> col) -> std::string_view {
      if (!col || *col >= fields.size()) return {};
      return fields[*col];
    };
    const std::string_view cond = field(cond_col);
    const std::string_view user = field(user_col);
    const std::string_view score_text = field(score_col);
    if (cond.empty()) {
      fail("missing condition_id");
      continue;
    }
    if (user.empty()) {
      fail("missing user_id");
      continue;
    }
    if (score_text.empty()) {
      fail("missing score");
      continue;
    }
    const auto score = ParseNumber<int>(score_text);
    if (!score) {
      fail("non-integer score '" + std::string(score_text) + "'");
      continue;
    }
    if (*score < kMinScore || *score > kMaxScore) {
      fail("score out of range");
      continue;
    }
    RatingRecord record{std::string(cond), std::string(user), *score, {}};
    if (const std::string_view stim = field(stim_col); !stim.empty()) {
      record.stimulus_id = std::string(stim);
    }
    records.push_back(std::move(record));
  }
  if (records.empty() && result.report.errors.empty()) {
    throw InputError("ratings input has no data rows");
  }

  result.dataset = RatingDataset::FromRecords(records);
  result.report.rows = records.size();
  result.report.conditions = result.dataset.num_conditions();
  result.report.users = result.dataset.num_users();
  return result;
}

}  // namespace

LoadedRatings LoadRatings(std::istream& in, const ColumnMap& columns) {
  return ReadRatings(in, columns, /*strict=*/true);
}

LoadedRatings ScanRatings(std::istream& in, const ColumnMap& columns) {
  return ReadRatings(in, columns, /*strict=*/false);
}

ReferenceMos::ReferenceMos(std::map<std::string, double> mos) {
  for (auto& [condition, value] : mos) {
    if (!(value >= kMinScore && value <= kMaxScore)) {
      throw InputError("reference MOS for '" + condition +
                       "' outside [1, 5]");
    }
    mos_.emplace(condition, value);
  }
}

std::optional<double> ReferenceMos::Find(std::string_view condition) const {
  const auto it = mos_.find(condition);
  if (it == mos_.end()) return std::nullopt;
  return it->second;
}

ReferenceMos LoadReference(std::istream& in, const ReferenceColumns& columns) {
  LineReader reader(in);
  std::string line;
  bool have_header = false;
  while (reader.Next(line)) {
    if (!IsBlank(line)) {
      have_header = true;
      break;
    }
  }
  if (!have_header) throw InputError("empty reference input");
  const auto header = SplitCsvLine(line, columns.delimiter);
  const auto cond_col = FindColumn(header, columns.condition);
  const auto mos_col = FindColumn(header, columns.mos);
  if (!cond_col || !mos_col) {
    throw InputError("reference header needs columns '" + columns.condition +
                     "' and '" + columns.mos + "'");
  }

  std::map<std::string, double> mos;
  while (reader.Next(line)) {
    if (IsBlank(line)) continue;
    const auto fields = SplitCsvLine(line, columns.delimiter);
    const std::size_t need = std::max(*cond_col, *mos_col);
    if (fields.size() <= need || fields[*cond_col].empty()) {
      throw InputError(AtLine("missing field", reader.line_number()));
    }
    const auto value = ParseNumber<double>(fields[*mos_col]);
    if (!value || !std::isfinite(*value)) {
      throw InputError(AtLine("non-numeric mos", reader.line_number()));
    }
    if (*value < kMinScore || *value > kMaxScore) {
      throw InputError(AtLine("mos out of range [1, 5]", reader.line_number()));
    }
    if (!mos.emplace(fields[*cond_col], *value).second) {
      throw InputError(AtLine("duplicate condition_id '" + fields[*cond_col] +
                                  "'",
                              reader.line_number()));
    }
  }
  if (mos.empty()) throw InputError("reference input has no data rows");
  return ReferenceMos(std::move(mos));
}

std::vector<std::string> OrphanReferenceConditions(const ReferenceMos& ref,
                                                   const RatingDataset& ds) {
  std::vector<std::string> out;
  for (const auto& [condition, value] : ref.values()) {
    if (!ds.FindCondition(condition)) out.push_back(condition);
  }
  return out;
}

std::vector<std::string> UnreferencedConditions(const ReferenceMos& ref,
                                                const RatingDataset& ds) {
  std::vector<std::string> out;
  for (const std::string& condition : ds.conditions()) {
    if (!ref.Find(condition)) out.push_back(condition);
  }
  return out;
}

namespace {

// Value at 0-based position `index` of the sorted votes described by counts.
double OrderStatistic(const ScoreCounts& counts, std::int64_t index) {
  std::int64_t seen = 0;
  for (int q = 0; q < kScaleSize; ++q) {
    seen += counts[q];
    if (index < seen) return q + kMinScore;
  }
  return kMaxScore;
}

double QuantileOfCounts(const ScoreCounts& counts, std::int64_t total,
                        double p) {
  const double h = static_cast<double>(total - 1) * p;
  const auto lo = static_cast<std::int64_t>(std::floor(h));
  const std::int64_t hi = std::min(lo + 1, total - 1);
  const double x_lo = OrderStatistic(counts, lo);
  const double x_hi = OrderStatistic(counts, hi);
  return x_lo + (h - static_cast<double>(lo)) * (x_hi - x_lo);
}

// Scores removed from a group with the given histogram.
std::array<bool, kScaleSize> OutlierScores(const ScoreCounts& counts,
                                           double k) {
  std::array<bool, kScaleSize> removed{};
  std::int64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) return removed;
  const double median = QuantileOfCounts(counts, total, 0.5);
  const double iqr = QuantileOfCounts(counts, total, 0.75) -
                     QuantileOfCounts(counts, total, 0.25);
  for (int q = 0; q < kScaleSize; ++q) {
    const double distance = std::abs((q + kMinScore) - median);
    removed[q] = iqr > 0.0 ? distance >= k * iqr : distance > 0.0;
  }
  return removed;
}

}  // namespace

CleanResult RemoveOutliersIqr(const RatingDataset& ds,
                              const OutlierOptions& options) {
  if (ds.empty()) throw ConfigError("outlier removal on an empty dataset");
  if (!(options.k > 0.0)) throw ConfigError("outlier factor k must be > 0");
  if (options.max_passes < 0) throw ConfigError("max_passes must be >= 0");
  const bool per_stimulus = options.scope == OutlierScope::kStimulus;
  if (per_stimulus) {
    for (const VoteCell& c : ds.cells()) {
      if (c.stimulus == kNoStimulus) {
        throw ConfigError(
            "per-stimulus outlier removal needs a stimulus_id on every vote");
      }
    }
  }

  std::vector<VoteCell> cells(ds.cells().begin(), ds.cells().end());
  auto group_key = [&](const VoteCell& c) {
    return std::pair{c.condition, per_stimulus ? c.stimulus : kNoStimulus};
  };

  CleanResult result;
  while (options.max_passes == 0 || result.passes < options.max_passes) {
    std::map<std::pair<std::size_t, std::size_t>, ScoreCounts> groups;
    for (const VoteCell& c : cells) {
      groups[group_key(c)][c.score - kMinScore] += c.count;
    }
    std::map<std::pair<std::size_t, std::size_t>, std::array<bool, kScaleSize>>
        drop;
    for (const auto& [key, counts] : groups) {
      drop[key] = OutlierScores(counts, options.k);
    }
    std::int64_t removed = 0;
    for (VoteCell& c : cells) {
      if (c.count > 0 && drop[group_key(c)][c.score - kMinScore]) {
        removed += c.count;
        c.count = 0;
      }
    }
    ++result.passes;
    result.removed += removed;
    if (removed == 0) break;
  }
  result.dataset = RatingDataset::FromCells(ds.conditions(), ds.users(),
                                            ds.stimuli(), std::move(cells));
  return result;
}

std::map<std::string, double> EmpiricalUserProb(const RatingDataset& ds,
                                                std::string_view condition) {
  const std::size_t x = ds.ConditionIndex(condition);
  const double total = static_cast<double>(ds.votes(x));
  std::map<std::string, double> out;
  for (const UserTally& t : ds.tallies(x)) {
    out.emplace(ds.users()[t.user], static_cast<double>(t.total) / total);
  }
  return out;
}

std::array<double, kScaleSize> EmpiricalScoreDist(const RatingDataset& ds,
                                                  std::string_view condition,
                                                  std::string_view user) {
  const std::size_t x = ds.ConditionIndex(condition);
  const std::size_t u = ds.UserIndex(user);
  const UserTally* t = ds.FindTally(x, u);
  if (t == nullptr) {
    throw InputError("user '" + std::string(user) + "' never rated '" +
                     std::string(condition) + "'");
  }
  std::array<double, kScaleSize> p{};
  for (int q = 0; q < kScaleSize; ++q) {
    p[q] = static_cast<double>(t->counts[q]) / static_cast<double>(t->total);
  }
  return p;
}

}  // namespace qvotes
