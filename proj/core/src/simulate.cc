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

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "qvotes/bootstrap.h"
#include "qvotes/error.h"

namespace qvotes {
namespace {

constexpr std::array kAllMetrics = {Metric::kValiditySrcc, Metric::kValidityRmse,
                                    Metric::kGainSrcc,     Metric::kGainRmse,
                                    Metric::kCiWidth,      Metric::kIrr};
constexpr std::size_t kNumMetrics = kAllMetrics.size();

std::size_t Slot(Metric m) { return static_cast<std::size_t>(m); }

bool Selected(const SweepConfig& config, Metric m) {
  return std::find(config.metrics.begin(), config.metrics.end(), m) !=
         config.metrics.end();
}

bool IsGain(Metric m) {
  return m == Metric::kGainSrcc || m == Metric::kGainRmse;
}

struct UserSum {
  std::size_t user = 0;
  double sum = 0.0;
  std::int64_t count = 0;
};

std::optional<double> IrrFromSums(
    const std::vector<std::vector<UserSum>>& per_condition,
    std::size_t num_users, int min_conditions) {
  std::vector<std::vector<double>> own(num_users), others(num_users);
  for (const auto& entries : per_condition) {
    double total_sum = 0.0;
    std::int64_t total_count = 0;
    for (const UserSum& e : entries) {
      total_sum += e.sum;
      total_count += e.count;
    }
    for (const UserSum& e : entries) {
      const std::int64_t rest = total_count - e.count;
      if (rest == 0) continue;  // nobody else rated this condition
      own[e.user].push_back(e.sum / static_cast<double>(e.count));
      others[e.user].push_back((total_sum - e.sum) / static_cast<double>(rest));
    }
  }
  double sum = 0.0;
  int eligible = 0;
  for (std::size_t u = 0; u < num_users; ++u) {
    if (own[u].size() < static_cast<std::size_t>(min_conditions)) continue;
    try {
      sum += Srcc(own[u], others[u]);
      ++eligible;
    } catch (const UndefinedResult&) {
      // Constant MOS on one side: rank correlation undefined for this user.
    }
  }
  if (eligible == 0) return std::nullopt;
  return sum / eligible;
}

double StudentQuantile(double level, int runs) {
  const boost::math::students_t dist(static_cast<double>(runs - 1));
  return boost::math::quantile(dist, 0.5 + level / 2.0);
}

CurvePoint Aggregate(int n, const std::vector<double>& values, double level) {
  CurvePoint p;
  p.n = n;
  p.runs = static_cast<int>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  p.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - p.mean) * (v - p.mean);
  double half = 0.0;
  if (values.size() > 1) {
    p.std_dev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    half = StudentQuantile(level, p.runs) * p.std_dev /
           std::sqrt(static_cast<double>(values.size()));
  }
  p.ci_low = p.mean - half;
  p.ci_high = p.mean + half;
  return p;
}

// Values of every metric for one (n, run).
using RunValues = std::array<std::optional<double>, kNumMetrics>;

struct SweepContext {
  const RatingDataset& ds;
  const SweepConfig& config;
  // Validity: dataset condition indices shared with the reference.
  std::vector<std::size_t> ref_index;
  std::vector<double> ref_values;
  // Certainty gain: full-data MOS.
  std::vector<double> full_mos;
};

template <typename F>
std::optional<double> Guarded(F&& f) {
  try {
    return f();
  } catch (const UndefinedResult&) {
    return std::nullopt;
  }
}

RunValues EvaluateRun(const SweepContext& ctx, int n, int run) {
  const RunSample sample =
      DrawRunSample(ctx.ds, n, run, ctx.config.master_seed);
  const std::vector<double> mos = SampleMos(sample);
  RunValues values;
  const auto& cfg = ctx.config;

  if (Selected(cfg, Metric::kValiditySrcc) ||
      Selected(cfg, Metric::kValidityRmse)) {
    std::vector<double> shared(ctx.ref_index.size());
    for (std::size_t i = 0; i < shared.size(); ++i) {
      shared[i] = mos[ctx.ref_index[i]];
    }
    if (Selected(cfg, Metric::kValiditySrcc)) {
      values[Slot(Metric::kValiditySrcc)] =
          Guarded([&] { return Srcc(shared, ctx.ref_values); });
    }
    if (Selected(cfg, Metric::kValidityRmse)) {
      values[Slot(Metric::kValidityRmse)] = Guarded([&] {
        if (!cfg.apply_first_order_map) return Rmse(shared, ctx.ref_values);
        const LinearMap map = FitLinear(shared, ctx.ref_values);
        return Rmse(map.Apply(shared), ctx.ref_values);
      });
    }
  }
  if (Selected(cfg, Metric::kGainSrcc)) {
    values[Slot(Metric::kGainSrcc)] =
        Guarded([&] { return Srcc(mos, ctx.full_mos); });
  }
  if (Selected(cfg, Metric::kGainRmse)) {
    values[Slot(Metric::kGainRmse)] = Rmse(mos, ctx.full_mos);
  }
  if (Selected(cfg, Metric::kCiWidth)) {
    double width_sum = 0.0;
    for (std::size_t x = 0; x < sample.conditions.size(); ++x) {
      Rng rng = MakeSubstream(cfg.master_seed, static_cast<std::uint64_t>(n),
                              static_cast<std::uint64_t>(run), 2 * x + 1);
      width_sum += BootstrapCiMos(sample.conditions[x].scores,
                                  cfg.bootstrap_resamples, cfg.ci_level, rng)
                       .width();
    }
    values[Slot(Metric::kCiWidth)] =
        width_sum / static_cast<double>(sample.conditions.size());
  }
  if (Selected(cfg, Metric::kIrr)) {
    values[Slot(Metric::kIrr)] =
        IrrOfSample(sample, ctx.ds.num_users(), cfg.min_conditions_per_user);
  }
  return values;
}

unsigned WorkerCount(unsigned requested, std::size_t tasks) {
  unsigned workers = requested;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(
      std::min<std::size_t>(workers, std::max<std::size_t>(tasks, 1)));
}

// Evaluates every (n, run) pair; results[ni][run] is independent of the
// worker that produced it.
std::vector<std::vector<RunValues>> EvaluateAll(const SweepContext& ctx) {
  const auto& cfg = ctx.config;
  const std::size_t runs = static_cast<std::size_t>(cfg.repetitions);
  const std::size_t tasks = cfg.n_values.size() * runs;
  std::vector<std::vector<RunValues>> results(cfg.n_values.size(),
                                              std::vector<RunValues>(runs));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      const std::size_t ni = t / runs;
      const std::size_t run = t % runs;
      try {
        results[ni][run] =
            EvaluateRun(ctx, cfg.n_values[ni], static_cast<int>(run));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = tasks;
      }
    }
  };
  const unsigned workers = WorkerCount(cfg.threads, tasks);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace

std::string_view MetricName(Metric metric) {
  switch (metric) {
    case Metric::kValiditySrcc:
      return "validity_srcc";
    case Metric::kValidityRmse:
      return "validity_rmse";
    case Metric::kGainSrcc:
      return "gain_srcc";
    case Metric::kGainRmse:
      return "gain_rmse";
    case Metric::kCiWidth:
      return "ci_width";
    case Metric::kIrr:
      return "irr";
  }
  return "unknown";
}

std::optional<Metric> ParseMetric(std::string_view name) {
  if (name == "srcc") return Metric::kValiditySrcc;
  if (name == "rmse") return Metric::kValidityRmse;
  for (Metric m : kAllMetrics) {
    if (MetricName(m) == name) return m;
  }
  return std::nullopt;
}

std::vector<Metric> ParseMetricList(std::string_view list) {
  std::vector<Metric> out;
  while (!list.empty()) {
    const std::size_t comma = list.find(',');
    std::string_view item = list.substr(0, comma);
    list = comma == std::string_view::npos ? std::string_view{}
                                           : list.substr(comma + 1);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item.empty()) continue;
    const auto metric = ParseMetric(item);
    if (!metric) {
      std::string valid;
      for (Metric m : kAllMetrics) {
        if (!valid.empty()) valid += ", ";
        valid += MetricName(m);
      }
      throw ConfigError("unknown metric '" + std::string(item) +
                        "'; valid metrics: " + valid);
    }
    if (std::find(out.begin(), out.end(), *metric) == out.end()) {
      out.push_back(*metric);
    }
  }
  if (out.empty()) throw ConfigError("no metrics selected");
  return out;
}

bool NeedsReference(Metric metric) {
  return metric == Metric::kValiditySrcc || metric == Metric::kValidityRmse;
}

std::vector<int> NValuesRange(int start, int stop, int step) {
  if (start < 1 || step < 1 || stop < start) {
    throw ConfigError("vote-count range needs 1 <= start <= stop and step >= 1");
  }
  std::vector<int> out;
  for (int n = start; n <= stop; n += step) out.push_back(n);
  return out;
}

void SweepConfig::Validate() const {
  if (n_values.empty()) throw ConfigError("no vote counts to sweep");
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    if (n_values[i] < 1) throw ConfigError("vote counts must be positive");
    if (i > 0 && n_values[i] <= n_values[i - 1]) {
      throw ConfigError("vote counts must be strictly increasing");
    }
  }
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (!(ci_level > 0.0 && ci_level < 1.0)) {
    throw ConfigError("ci_level must lie in (0, 1)");
  }
  if (metrics.empty()) throw ConfigError("no metrics selected");
  if (min_conditions_per_user < 3) {
    throw ConfigError("min_conditions_per_user must be >= 3");
  }
  const bool ci = std::find(metrics.begin(), metrics.end(), Metric::kCiWidth) !=
                  metrics.end();
  if (ci) {
    if (bootstrap_resamples < 100) {
      throw ConfigError("bootstrap resamples must be >= 100");
    }
    if (n_values.front() < 2) {
      throw ConfigError("ci_width needs at least 2 votes per condition");
    }
  }
  const bool gain = std::any_of(metrics.begin(), metrics.end(), IsGain);
  if (gain && delta_curves &&
      std::find(n_values.begin(), n_values.end(), delta_baseline_n) ==
          n_values.end()) {
    throw ConfigError("certainty-gain deltas need the baseline n = " +
                      std::to_string(delta_baseline_n) +
                      " among the swept vote counts");
  }
}

const CurvePoint* MetricCurve::At(int n) const {
  for (const CurvePoint& p : points) {
    if (p.n == n) return &p;
  }
  return nullptr;
}

ConditionSample SampleCondition(const RatingDataset& ds, std::size_t condition,
                                int n, Rng& rng) {
  const auto tallies = ds.tallies(condition);
  const std::int64_t total = ds.votes(condition);
  if (total < 1) throw ConfigError("condition without votes");
  // Cumulative N_{x,u}; stage 1 picks a vote slot uniformly, which selects
  // user u with probability N_{x,u} / N_x.
  std::vector<std::int64_t> cumulative(tallies.size());
  std::int64_t running = 0;
  for (std::size_t i = 0; i < tallies.size(); ++i) {
    running += tallies[i].total;
    cumulative[i] = running;
  }
  ConditionSample out;
  out.scores.reserve(static_cast<std::size_t>(n));
  out.users.reserve(static_cast<std::size_t>(n));
  for (int draw = 0; draw < n; ++draw) {
    const auto slot = static_cast<std::int64_t>(
        UniformBelow(rng, static_cast<std::uint64_t>(total)));
    const auto it =
        std::upper_bound(cumulative.begin(), cumulative.end(), slot);
    const UserTally& t = tallies[static_cast<std::size_t>(it - cumulative.begin())];
    auto pick = static_cast<std::int64_t>(
        UniformBelow(rng, static_cast<std::uint64_t>(t.total)));
    int q = 0;
    while (pick >= t.counts[q]) pick -= t.counts[q++];
    out.scores.push_back(q + kMinScore);
    out.users.push_back(t.user);
  }
  return out;
}

RunSample DrawRunSample(const RatingDataset& ds, int n, int run,
                        std::uint64_t master_seed) {
  RunSample sample;
  sample.run_index = run;
  sample.n = n;
  sample.conditions.reserve(ds.num_conditions());
  for (std::size_t x = 0; x < ds.num_conditions(); ++x) {
    Rng rng = MakeSubstream(master_seed, static_cast<std::uint64_t>(n),
                            static_cast<std::uint64_t>(run), 2 * x);
    sample.conditions.push_back(SampleCondition(ds, x, n, rng));
  }
  return sample;
}

std::vector<double> SampleMos(const RunSample& sample) {
  std::vector<double> mos;
  mos.reserve(sample.conditions.size());
  for (const ConditionSample& c : sample.conditions) {
    mos.push_back(MosPlain(c.scores));
  }
  return mos;
}

std::optional<double> IrrOfSample(const RunSample& sample,
                                  std::size_t num_users, int min_conditions) {
  std::vector<std::vector<UserSum>> per_condition;
  per_condition.reserve(sample.conditions.size());
  std::vector<double> sums(num_users, 0.0);
  std::vector<std::int64_t> counts(num_users, 0);
  std::vector<std::size_t> touched;
  for (const ConditionSample& c : sample.conditions) {
    touched.clear();
    for (std::size_t i = 0; i < c.scores.size(); ++i) {
      const std::size_t u = c.users[i];
      if (u >= num_users) throw ConfigError("sampled user index out of range");
      if (counts[u] == 0) touched.push_back(u);
      sums[u] += c.scores[i];
      ++counts[u];
    }
    std::sort(touched.begin(), touched.end());
    auto& entries = per_condition.emplace_back();
    entries.reserve(touched.size());
    for (std::size_t u : touched) {
      entries.push_back({u, sums[u], counts[u]});
      sums[u] = 0.0;
      counts[u] = 0;
    }
  }
  return IrrFromSums(per_condition, num_users, min_conditions);
}

std::optional<double> IrrOfDataset(const RatingDataset& ds,
                                   int min_conditions) {
  std::vector<std::vector<UserSum>> per_condition(ds.num_conditions());
  for (std::size_t x = 0; x < ds.num_conditions(); ++x) {
    for (const UserTally& t : ds.tallies(x)) {
      double sum = 0.0;
      for (int q = 0; q < kScaleSize; ++q) {
        sum += static_cast<double>((q + kMinScore) * t.counts[q]);
      }
      per_condition[x].push_back({t.user, sum, t.total});
    }
  }
  return IrrFromSums(per_condition, ds.num_users(), min_conditions);
}

double IrrFull(const RatingDataset& ds, int min_conditions) {
  const auto irr = IrrOfDataset(ds, min_conditions);
  if (!irr) {
    throw UndefinedResult("no user rated at least " +
                          std::to_string(min_conditions) +
                          " conditions with a non-constant MOS");
  }
  return *irr;
}

std::vector<MetricCurve> RunSweep(const RatingDataset& ds,
                                  const ReferenceMos* ref,
                                  const SweepConfig& config,
                                  std::string_view dataset_label) {
  config.Validate();
  if (ds.empty()) throw ConfigError("cannot simulate an empty dataset");

  SweepContext ctx{ds, config, {}, {}, {}};
  const bool validity =
      std::any_of(config.metrics.begin(), config.metrics.end(), NeedsReference);
  if (validity) {
    if (ref == nullptr) {
      throw ConfigError("validity metrics need a reference MOS table");
    }
    for (std::size_t x = 0; x < ds.num_conditions(); ++x) {
      if (auto lab = ref->Find(ds.conditions()[x])) {
        ctx.ref_index.push_back(x);
        ctx.ref_values.push_back(*lab);
      }
    }
    if (ctx.ref_index.size() < 3) {
      throw ConfigError("validity metrics need at least 3 conditions shared "
                        "with the reference; found " +
                        std::to_string(ctx.ref_index.size()));
    }
  }
  const bool gain =
      std::any_of(config.metrics.begin(), config.metrics.end(), IsGain);
  if (gain) {
    if (ds.num_conditions() < 3) {
      throw ConfigError("certainty gain needs at least 3 conditions");
    }
    ctx.full_mos = DatasetMos(ds, MosKind::kUserBalanced).values;
  }
  if (Selected(config, Metric::kIrr) &&
      !IrrOfDataset(ds, config.min_conditions_per_user)) {
    throw ConfigError("no user rated at least " +
                      std::to_string(config.min_conditions_per_user) +
                      " conditions; IRR is undefined");
  }

  const auto results = EvaluateAll(ctx);

  std::vector<MetricCurve> curves;
  const std::size_t baseline_ni = static_cast<std::size_t>(
      std::find(config.n_values.begin(), config.n_values.end(),
                config.delta_baseline_n) -
      config.n_values.begin());
  for (Metric metric : kAllMetrics) {
    if (!Selected(config, metric)) continue;
    const std::size_t slot = Slot(metric);
    MetricCurve curve{std::string(MetricName(metric)),
                      std::string(dataset_label), {}};
    for (std::size_t ni = 0; ni < config.n_values.size(); ++ni) {
      std::vector<double> values;
      for (const RunValues& rv : results[ni]) {
        if (rv[slot]) values.push_back(*rv[slot]);
      }
      if (values.empty()) {
        throw UndefinedResult(std::string(MetricName(metric)) +
                              " is undefined in every run at n = " +
                              std::to_string(config.n_values[ni]));
      }
      curve.points.push_back(
          Aggregate(config.n_values[ni], values, config.ci_level));
    }
    curves.push_back(std::move(curve));

    if (IsGain(metric) && config.delta_curves) {
      MetricCurve delta{std::string(metric == Metric::kGainSrcc
                                        ? kGainSrccDelta
                                        : kGainRmseDelta),
                        std::string(dataset_label), {}};
      for (std::size_t ni = 0; ni < config.n_values.size(); ++ni) {
        std::vector<double> diffs;
        for (std::size_t run = 0; run < results[ni].size(); ++run) {
          const auto& here = results[ni][run][slot];
          const auto& base = results[baseline_ni][run][slot];
          if (here && base) diffs.push_back(*here - *base);
        }
        if (diffs.empty()) {
          throw UndefinedResult("certainty-gain delta undefined at n = " +
                                std::to_string(config.n_values[ni]));
        }
        delta.points.push_back(
            Aggregate(config.n_values[ni], diffs, config.ci_level));
      }
      curves.push_back(std::move(delta));
    }
  }
  return curves;
}

namespace {

MetricCurve TakeCurve(std::vector<MetricCurve>& curves, std::string_view name) {
  for (MetricCurve& c : curves) {
    if (c.metric == name) return std::move(c);
  }
  throw Error("missing curve " + std::string(name));
}

}  // namespace

CertaintyGain CertaintyGainCurves(const RatingDataset& ds,
                                  const SweepConfig& config,
                                  std::string_view dataset_label) {
  SweepConfig cfg = config;
  cfg.metrics = {Metric::kGainSrcc, Metric::kGainRmse};
  cfg.delta_curves = true;
  auto curves = RunSweep(ds, nullptr, cfg, dataset_label);
  CertaintyGain out;
  out.srcc = TakeCurve(curves, MetricName(Metric::kGainSrcc));
  out.rmse = TakeCurve(curves, MetricName(Metric::kGainRmse));
  out.srcc_delta = TakeCurve(curves, kGainSrccDelta);
  out.rmse_delta = TakeCurve(curves, kGainRmseDelta);
  return out;
}

MetricCurve CiWidthCurve(const RatingDataset& ds, const SweepConfig& config,
                         std::string_view dataset_label) {
  SweepConfig cfg = config;
  cfg.metrics = {Metric::kCiWidth};
  auto curves = RunSweep(ds, nullptr, cfg, dataset_label);
  return std::move(curves.front());
}

MetricCurve IrrCurve(const RatingDataset& ds, const SweepConfig& config,
                     std::string_view dataset_label) {
  SweepConfig cfg = config;
  cfg.metrics = {Metric::kIrr};
  auto curves = RunSweep(ds, nullptr, cfg, dataset_label);
  return std::move(curves.front());
}

}  // namespace qvotes
