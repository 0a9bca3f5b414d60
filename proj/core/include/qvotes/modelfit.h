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

#ifndef QVOTES_MODELFIT_H_
#define QVOTES_MODELFIT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qvotes {

// y = a * x^b + c. For b < 0 the curve saturates towards c.
struct PowerModel {
  double a = 0.0;
  double b = -1.0;
  double c = 0.0;
  double rmse_of_fit = 0.0;
  int n_points = 0;
  std::string metric;
  std::string dataset;
};

struct CurveSample {
  double x = 0.0;
  double y = 0.0;
};

struct PowerFitOptions {
  std::vector<double> b_starts = {-2.0, -1.5, -1.0, -0.5, -0.25, -0.1};
  int max_iterations = 500;
  double step_tolerance = 1e-10;
};

struct PowerFitReport {
  PowerModel model;
  // RMSE of the best start before any Levenberg-Marquardt iteration.
  double best_start_rmse = 0.0;
  int iterations = 0;
  bool degenerate = false;
};

// Least-squares fit with Levenberg-Marquardt from several b starts, each with
// (a, c) solved linearly. Needs at least 4 distinct positive x. Constant y
// yields the model a = 0, b = -1, c = mean(y).
PowerFitReport FitPowerModelReport(std::span<const CurveSample> points,
                                   const PowerFitOptions& options = {});
PowerModel FitPowerModel(std::span<const CurveSample> points,
                         const PowerFitOptions& options = {});

double EvaluateModel(const PowerModel& model, double x);

// Smallest n >= 1 at which the model reaches the target: value >= target for
// curves rising to c (a < 0), value <= target for curves falling to c
// (a > 0). nullopt when the target lies on or beyond the asymptote. Throws
// ConfigError when the model does not saturate (a == 0 or b >= 0).
std::optional<std::int64_t> VotesForTarget(const PowerModel& model,
                                           double target);

}  // namespace qvotes

#endif  // QVOTES_MODELFIT_H_
