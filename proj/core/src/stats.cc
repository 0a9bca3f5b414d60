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

#include "qvotes/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qvotes/error.h"

namespace qvotes {
namespace {

void RequireSameLength(std::span<const double> a, std::span<const double> b,
                       std::string_view what) {
  if (a.size() != b.size()) {
    throw ConfigError(std::string(what) + ": length mismatch (" +
                      std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()) + ")");
  }
}

double Mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

}  // namespace

std::optional<double> MosVector::Find(std::string_view condition) const {
  for (std::size_t i = 0; i < conditions.size(); ++i) {
    if (conditions[i] == condition) return values[i];
  }
  return std::nullopt;
}

double MosUserBalanced(const RatingDataset& ds, std::size_t condition) {
  const auto tallies = ds.tallies(condition);
  if (tallies.empty()) throw InputError("condition without votes");
  double sum = 0.0;
  for (const UserTally& t : tallies) {
    double weighted = 0.0;
    for (int q = 0; q < kScaleSize; ++q) {
      weighted += static_cast<double>((q + kMinScore) * t.counts[q]);
    }
    sum += weighted / static_cast<double>(t.total);
  }
  return sum / static_cast<double>(tallies.size());
}

double MosUserBalanced(const RatingDataset& ds, std::string_view condition) {
  return MosUserBalanced(ds, ds.ConditionIndex(condition));
}

double MosPlain(std::span<const int> votes) {
  if (votes.empty()) throw ConfigError("MOS of an empty vote set");
  const long long sum = std::accumulate(votes.begin(), votes.end(), 0LL);
  return static_cast<double>(sum) / static_cast<double>(votes.size());
}

double MosPlain(const ScoreCounts& counts) {
  std::int64_t total = 0;
  std::int64_t sum = 0;
  for (int q = 0; q < kScaleSize; ++q) {
    total += counts[q];
    sum += (q + kMinScore) * counts[q];
  }
  if (total == 0) throw ConfigError("MOS of an empty vote set");
  return static_cast<double>(sum) / static_cast<double>(total);
}

MosVector DatasetMos(const RatingDataset& ds, MosKind kind) {
  MosVector out;
  out.conditions = ds.conditions();
  out.values.reserve(ds.num_conditions());
  out.vote_counts.reserve(ds.num_conditions());
  for (std::size_t x = 0; x < ds.num_conditions(); ++x) {
    out.values.push_back(kind == MosKind::kUserBalanced
                             ? MosUserBalanced(ds, x)
                             : MosPlain(ds.score_counts(x)));
    out.vote_counts.push_back(ds.votes(x));
  }
  return out;
}

std::vector<double> AverageRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 (0-based) share the rank (i + 1 + j) / 2.
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = rank;
    i = j;
  }
  return ranks;
}

double Pearson(std::span<const double> a, std::span<const double> b) {
  RequireSameLength(a, b, "pearson");
  if (a.size() < 2) throw ConfigError("pearson needs at least 2 points");
  const double ma = Mean(a);
  const double mb = Mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) {
    throw UndefinedResult("correlation of a constant vector is undefined");
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double Srcc(std::span<const double> a, std::span<const double> b) {
  RequireSameLength(a, b, "srcc");
  if (a.size() < 3) throw ConfigError("srcc needs at least 3 points");
  const auto ra = AverageRanks(a);
  const auto rb = AverageRanks(b);
  return Pearson(ra, rb);
}

double Rmse(std::span<const double> a, std::span<const double> b) {
  RequireSameLength(a, b, "rmse");
  if (a.empty()) throw ConfigError("rmse of empty vectors");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(a.size()));
}

double QuantileSorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ConfigError("quantile of an empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double LinearMap::Apply(double x) const {
  return std::clamp(slope * x + intercept, static_cast<double>(kMinScore),
                    static_cast<double>(kMaxScore));
}

std::vector<double> LinearMap::Apply(std::span<const double> xs) const {
  std::vector<double> out(xs.size());
  std::transform(xs.begin(), xs.end(), out.begin(),
                 [this](double x) { return Apply(x); });
  return out;
}

LinearMap FitLinear(std::span<const double> x, std::span<const double> y) {
  RequireSameLength(x, y, "linear fit");
  if (x.size() < 2) throw ConfigError("linear fit needs at least 2 points");
  const double mx = Mean(x);
  const double my = Mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) {
    throw UndefinedResult("linear fit with a constant regressor");
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

AlignedMos AlignToReference(const MosVector& cs, const ReferenceMos& ref) {
  AlignedMos out;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (auto lab = ref.Find(cs.conditions[i])) {
      out.conditions.push_back(cs.conditions[i]);
      out.cs.push_back(cs.values[i]);
      out.ref.push_back(*lab);
    }
  }
  return out;
}

namespace {

AlignedMos AlignAtLeastThree(const MosVector& cs, const ReferenceMos& ref) {
  AlignedMos aligned = AlignToReference(cs, ref);
  if (aligned.cs.size() < 3) {
    throw InputError("only " + std::to_string(aligned.cs.size()) +
                     " conditions shared with the reference; need at least 3");
  }
  return aligned;
}

}  // namespace

LinearMap FitFirstOrderMap(const MosVector& cs, const ReferenceMos& ref) {
  const AlignedMos aligned = AlignAtLeastThree(cs, ref);
  return FitLinear(aligned.cs, aligned.ref);
}

Comparison CompareToReference(const MosVector& cs, const ReferenceMos& ref,
                              bool with_mapping) {
  const AlignedMos aligned = AlignAtLeastThree(cs, ref);
  Comparison out;
  out.shared = aligned.cs.size();
  out.srcc = Srcc(aligned.cs, aligned.ref);
  out.rmse = Rmse(aligned.cs, aligned.ref);
  if (with_mapping) {
    const LinearMap map = FitLinear(aligned.cs, aligned.ref);
    out.mapping = map;
    out.rmse_mapped = Rmse(map.Apply(aligned.cs), aligned.ref);
  }
  return out;
}

}  // namespace qvotes
