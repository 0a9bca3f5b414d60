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

#include "qvotes/modelfit.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/Dense>

#include "qvotes/error.h"

namespace qvotes {
namespace {

struct Params {
  double a = 0.0;
  double b = -1.0;
  double c = 0.0;
};

double Sse(std::span<const CurveSample> points, const Params& p) {
  double sse = 0.0;
  for (const CurveSample& s : points) {
    const double r = p.a * std::pow(s.x, p.b) + p.c - s.y;
    sse += r * r;
  }
  return sse;
}

// Best (a, c) for a fixed exponent: ordinary least squares on the basis
// {x^b, 1}.
Params SolveLinear(std::span<const CurveSample> points, double b) {
  Eigen::MatrixXd design(points.size(), 2);
  Eigen::VectorXd y(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    design(static_cast<Eigen::Index>(i), 0) = std::pow(points[i].x, b);
    design(static_cast<Eigen::Index>(i), 1) = 1.0;
    y(static_cast<Eigen::Index>(i)) = points[i].y;
  }
  const Eigen::Vector2d ac = design.colPivHouseholderQr().solve(y);
  return {ac(0), b, ac(1)};
}

struct LocalFit {
  Params params;
  double sse = 0.0;
  int iterations = 0;
};

LocalFit LevenbergMarquardt(std::span<const CurveSample> points, Params start,
                            const PowerFitOptions& options) {
  LocalFit fit{start, Sse(points, start), 0};
  double lambda = 1e-3;
  const auto m = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd jac(m, 3);
  Eigen::VectorXd residual(m);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    fit.iterations = iter + 1;
    const Params& p = fit.params;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double x = points[static_cast<std::size_t>(i)].x;
      const double xb = std::pow(x, p.b);
      jac(i, 0) = xb;
      jac(i, 1) = p.a * xb * std::log(x);
      jac(i, 2) = 1.0;
      residual(i) = p.a * xb + p.c - points[static_cast<std::size_t>(i)].y;
    }
    const Eigen::Matrix3d jtj = jac.transpose() * jac;
    const Eigen::Vector3d gradient = jac.transpose() * residual;

    bool accepted = false;
    double step_norm = 0.0;
    while (lambda < 1e20) {
      Eigen::Matrix3d damped = jtj;
      for (int d = 0; d < 3; ++d) {
        damped(d, d) += lambda * std::max(jtj(d, d), 1e-12);
      }
      const Eigen::Vector3d step = damped.ldlt().solve(-gradient);
      step_norm = step.norm();
      const Params trial{p.a + step(0), p.b + step(1), p.c + step(2)};
      const double trial_sse = Sse(points, trial);
      if (std::isfinite(trial_sse) && trial_sse <= fit.sse) {
        fit.params = trial;
        fit.sse = trial_sse;
        lambda = std::max(lambda / 3.0, 1e-15);
        accepted = true;
        break;
      }
      lambda *= 4.0;
      if (step_norm < options.step_tolerance) break;
    }
    if (!accepted || step_norm < options.step_tolerance) break;
  }
  return fit;
}

}  // namespace

PowerFitReport FitPowerModelReport(std::span<const CurveSample> points,
                                   const PowerFitOptions& options) {
  std::set<double> distinct_x;
  for (const CurveSample& s : points) {
    if (!(s.x > 0.0) || !std::isfinite(s.x) || !std::isfinite(s.y)) {
      throw ConfigError("power-model fit needs finite points with x > 0");
    }
    distinct_x.insert(s.x);
  }
  if (distinct_x.size() < 4) {
    throw ConfigError("power-model fit needs at least 4 distinct x values, got " +
                      std::to_string(distinct_x.size()));
  }
  if (options.b_starts.empty()) throw ConfigError("no exponent starts given");

  PowerFitReport report;
  report.model.n_points = static_cast<int>(points.size());
  const double n = static_cast<double>(points.size());

  const bool constant_y =
      std::all_of(points.begin(), points.end(), [&](const CurveSample& s) {
        return s.y == points.front().y;
      });
  if (constant_y) {
    report.degenerate = true;
    report.model.a = 0.0;
    report.model.b = -1.0;
    report.model.c = points.front().y;
    report.model.rmse_of_fit = 0.0;
    return report;
  }

  double best_start_sse = std::numeric_limits<double>::infinity();
  LocalFit best{{}, std::numeric_limits<double>::infinity(), 0};
  for (double b0 : options.b_starts) {
    const Params start = SolveLinear(points, b0);
    const double start_sse = Sse(points, start);
    best_start_sse = std::min(best_start_sse, start_sse);
    const LocalFit local = LevenbergMarquardt(points, start, options);
    report.iterations += local.iterations;
    if (local.sse < best.sse) best = local;
  }
  report.best_start_rmse = std::sqrt(best_start_sse / n);
  report.model.a = best.params.a;
  report.model.b = best.params.b;
  report.model.c = best.params.c;
  report.model.rmse_of_fit = std::sqrt(best.sse / n);
  return report;
}

PowerModel FitPowerModel(std::span<const CurveSample> points,
                         const PowerFitOptions& options) {
  return FitPowerModelReport(points, options).model;
}

double EvaluateModel(const PowerModel& model, double x) {
  return model.a * std::pow(x, model.b) + model.c;
}

std::optional<std::int64_t> VotesForTarget(const PowerModel& model,
                                           double target) {
  if (model.a == 0.0 || !(model.b < 0.0) || !std::isfinite(model.a) ||
      !std::isfinite(model.b) || !std::isfinite(model.c)) {
    throw ConfigError("votes-for-target needs a saturating model (a != 0, b < 0)");
  }
  const bool rising = model.a < 0.0;
  auto meets = [&](std::int64_t n) {
    const double v = EvaluateModel(model, static_cast<double>(n));
    return rising ? v >= target : v <= target;
  };
  if (rising ? target >= model.c : target <= model.c) return std::nullopt;
  if (meets(1)) return 1;

  // a * n^b reaches target - c at n = ((target - c) / a)^(1 / b).
  const double ratio = (target - model.c) / model.a;
  const double estimate = std::pow(ratio, 1.0 / model.b);
  constexpr double kLimit = 1e15;
  if (!std::isfinite(estimate) || estimate > kLimit) return std::nullopt;
  auto n = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(estimate)));
  while (n > 1 && meets(n - 1)) --n;
  while (!meets(n)) {
    if (static_cast<double>(++n) > kLimit) return std::nullopt;
  }
  return n;
}

}  // namespace qvotes
