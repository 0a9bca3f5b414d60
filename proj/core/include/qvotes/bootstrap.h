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

#ifndef QVOTES_BOOTSTRAP_H_
#define QVOTES_BOOTSTRAP_H_

#include <cstdint>
#include <span>

#include "qvotes/rng.h"

namespace qvotes {

struct Interval {
  double low = 0.0;
  double high = 0.0;
  double level = 0.95;

  double width() const { return high - low; }
};

inline constexpr int kDefaultBootstrapResamples = 1000;

// Efron percentile bootstrap CI of the mean vote: `resamples` resamples of
// size |votes| drawn with replacement, interval bounds at the alpha/2 and
// 1 - alpha/2 empirical quantiles of the resample means (linear
// interpolation). Requires |votes| >= 2 and resamples >= 100.
Interval BootstrapCiMos(std::span<const int> votes, int resamples,
                        double level, Rng& rng);

// Exact (Clopper-Pearson) binomial proportion interval. The lower bound is 0
// for zero successes and the upper bound is 1 when successes == trials.
Interval ClopperPearson(std::int64_t successes, std::int64_t trials,
                        double level);

// Clopper-Pearson bounds through the beta quantiles, for a possibly
// fractional success count 0 <= successes <= trials.
Interval ClopperPearsonBeta(double successes, double trials, double level);

enum class SuccessCount {
  // s = p * n, fed to the beta-quantile form of the interval. Agrees with the
  // integer interval whenever p * n is whole and keeps the width monotone in
  // n.
  kFractional,
  // s = round(p * n).
  kRounded,
};

// Widest possible MOS CI for a given MOS: the two-point rating distribution
// with a share p = (mos - 1) / 4 of fives and 1 - p of ones, whose CI width
// is 4 * (p_H - p_L) for the Clopper-Pearson interval of p * n successes in n
// trials.
double MaxCiWidth(double mos, std::int64_t n, double level,
                  SuccessCount successes = SuccessCount::kFractional);

}  // namespace qvotes

#endif  // QVOTES_BOOTSTRAP_H_
