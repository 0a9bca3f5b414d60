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

#include "qvotes/bootstrap.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "qvotes/data.h"
#include "qvotes/error.h"
#include "qvotes/stats.h"

namespace qvotes {
namespace {

void RequireLevel(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw ConfigError("confidence level must lie in (0, 1)");
  }
}

}  // namespace

Interval BootstrapCiMos(std::span<const int> votes, int resamples,
                        double level, Rng& rng) {
  RequireLevel(level);
  if (votes.size() < 2) {
    throw ConfigError("bootstrap CI needs at least 2 votes");
  }
  if (resamples < 100) {
    throw ConfigError("bootstrap needs at least 100 resamples");
  }
  const std::uint64_t n = votes.size();
  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (double& mean : means) {
    long long sum = 0;
    for (std::uint64_t i = 0; i < n; ++i) sum += votes[UniformBelow(rng, n)];
    mean = static_cast<double>(sum) / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double alpha = 1.0 - level;
  return {QuantileSorted(means, alpha / 2.0),
          QuantileSorted(means, 1.0 - alpha / 2.0), level};
}

Interval ClopperPearsonBeta(double successes, double trials, double level) {
  RequireLevel(level);
  if (!(trials > 0.0) || !(successes >= 0.0) || successes > trials) {
    throw ConfigError("Clopper-Pearson needs 0 <= successes <= trials, "
                      "trials > 0");
  }
  const double alpha = 1.0 - level;
  const double s = successes;
  const double n = trials;
  Interval out{0.0, 1.0, level};
  // Lower bound: the alpha/2 quantile of Beta(s, n - s + 1); upper: the
  // 1 - alpha/2 quantile of Beta(s + 1, n - s).
  if (s > 0.0) out.low = boost::math::ibeta_inv(s, n - s + 1.0, alpha / 2.0);
  if (s < n) out.high = boost::math::ibeta_inv(s + 1.0, n - s, 1.0 - alpha / 2.0);
  return out;
}

Interval ClopperPearson(std::int64_t successes, std::int64_t trials,
                        double level) {
  if (trials < 1 || successes < 0 || successes > trials) {
    throw ConfigError("Clopper-Pearson needs 0 <= successes <= trials, "
                      "trials >= 1");
  }
  return ClopperPearsonBeta(static_cast<double>(successes),
                            static_cast<double>(trials), level);
}

double MaxCiWidth(double mos, std::int64_t n, double level,
                  SuccessCount successes) {
  if (!(mos >= kMinScore && mos <= kMaxScore)) {
    throw ConfigError("MOS must lie in [1, 5]");
  }
  if (n < 1) throw ConfigError("vote count must be positive");
  const double p = (mos - 1.0) / 4.0;
  double s = p * static_cast<double>(n);
  if (successes == SuccessCount::kRounded) s = std::round(s);
  s = std::clamp(s, 0.0, static_cast<double>(n));
  return 4.0 * ClopperPearsonBeta(s, static_cast<double>(n), level).width();
}

}  // namespace qvotes
