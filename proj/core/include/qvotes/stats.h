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

#ifndef QVOTES_STATS_H_
#define QVOTES_STATS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qvotes/data.h"

namespace qvotes {

enum class MosKind {
  // Mean over contributing users of each user's own MOS.
  kUserBalanced,
  // Arithmetic mean of all votes.
  kPlain,
};

// Per-condition MOS in dataset condition order.
struct MosVector {
  std::vector<std::string> conditions;
  std::vector<double> values;
  std::vector<std::int64_t> vote_counts;

  std::size_t size() const { return values.size(); }
  std::optional<double> Find(std::string_view condition) const;
};

// M_x: mean over users with N_{x,u} >= 1 of
// M_{x,u} = sum_q q * N_{x,u,q} / N_{x,u}.
double MosUserBalanced(const RatingDataset& ds, std::size_t condition);
double MosUserBalanced(const RatingDataset& ds, std::string_view condition);

// Throws ConfigError on an empty vote set.
double MosPlain(std::span<const int> votes);
double MosPlain(const ScoreCounts& counts);

MosVector DatasetMos(const RatingDataset& ds,
                     MosKind kind = MosKind::kUserBalanced);

// 1-based ranks, ties receive the average of the positions they span.
std::vector<double> AverageRanks(std::span<const double> values);

// Pearson correlation. Throws UndefinedResult when either input is constant.
double Pearson(std::span<const double> a, std::span<const double> b);

// Spearman rank correlation with average ranks for ties. Requires equal
// lengths of at least 3; throws UndefinedResult when either side is
// constant.
double Srcc(std::span<const double> a, std::span<const double> b);

double Rmse(std::span<const double> a, std::span<const double> b);

// Linear-interpolation quantile of an ascending-sorted sample,
// h = (m - 1) * p.
double QuantileSorted(std::span<const double> sorted, double p);

struct LinearMap {
  double slope = 1.0;
  double intercept = 0.0;

  // Mapped value clipped to the rating scale.
  double Apply(double x) const;
  std::vector<double> Apply(std::span<const double> xs) const;
};

// Least-squares line y ~ slope * x + intercept. Throws UndefinedResult when
// x is constant.
LinearMap FitLinear(std::span<const double> x, std::span<const double> y);

// Pairs of (crowd MOS, lab MOS) over conditions present in both, in the
// crowd vector's order.
struct AlignedMos {
  std::vector<std::string> conditions;
  std::vector<double> cs;
  std::vector<double> ref;
};

AlignedMos AlignToReference(const MosVector& cs, const ReferenceMos& ref);

// First-order mapping of crowd MOS onto lab MOS. Needs at least 3 shared
// conditions and non-constant crowd values.
LinearMap FitFirstOrderMap(const MosVector& cs, const ReferenceMos& ref);

struct Comparison {
  std::size_t shared = 0;
  double srcc = 0.0;
  double rmse = 0.0;
  std::optional<double> rmse_mapped;
  std::optional<LinearMap> mapping;
};

// SRCC and RMSE over the shared conditions; with_mapping adds the RMSE after
// a first-order mapping. Throws InputError when fewer than 3 conditions are
// shared.
Comparison CompareToReference(const MosVector& cs, const ReferenceMos& ref,
                              bool with_mapping);

}  // namespace qvotes

#endif  // QVOTES_STATS_H_
