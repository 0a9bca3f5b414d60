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

// qvotes: how many subjective quality votes does a condition need?
//
//   qvotes validate ratings.csv [--reference lab.csv]
//   qvotes compare ratings.csv lab.csv [--fom] [--json out.json]
//   qvotes simulate ratings.csv [--reference lab.csv] --metrics srcc,rmse
//       [--n 10:200:10] [--runs 250] [--seed 0] [--out curves.csv]
//   qvotes fit curves.csv --metric validity_rmse [--out model.json]
//   qvotes maxci --mos 3 [--n 10:200:10] [--level 0.95]

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "manifest.h"
#include "qvotes/bootstrap.h"
#include "qvotes/data.h"
#include "qvotes/error.h"
#include "qvotes/modelfit.h"
#include "qvotes/report.h"
#include "qvotes/simulate.h"
#include "qvotes/stats.h"

#ifndef QVOTES_VERSION
#define QVOTES_VERSION "0.0.0"
#endif

namespace qvotes::cli {
namespace {

constexpr int kExitInput = 1;
constexpr int kExitConfig = 2;

struct InputOptions {
  std::string column_spec;
  std::string ref_column_spec;
  std::string delimiter = ",";
  bool remove_outliers = false;
  double outlier_k = 3.0;
  std::string outlier_scope = "condition";
  int outlier_passes = 0;
};

char ParseDelimiter(const std::string& d) {
  if (d == "tab" || d == "\\t") return '\t';
  if (d.size() != 1) throw ConfigError("delimiter must be one character or 'tab'");
  return d[0];
}

ReferenceColumns ParseReferenceColumns(const std::string& spec, char delim) {
  ReferenceColumns cols;
  cols.delimiter = delim;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected key=NAME in --ref-col, got '" + item + "'");
    }
    const std::string key = item.substr(0, eq), name = item.substr(eq + 1);
    if (key == "condition") {
      cols.condition = name;
    } else if (key == "mos") {
      cols.mos = name;
    } else {
      throw ConfigError("unknown --ref-col key '" + key +
                        "' (expected condition or mos)");
    }
  }
  return cols;
}

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return in;
}

ColumnMap RatingColumns(const InputOptions& opt) {
  ColumnMap cols = ParseColumnMap(opt.column_spec);
  cols.delimiter = ParseDelimiter(opt.delimiter);
  return cols;
}

RatingDataset LoadDataset(const std::string& path, const InputOptions& opt) {
  auto in = OpenInput(path);
  RatingDataset ds = LoadRatings(in, RatingColumns(opt)).dataset;
  if (!opt.remove_outliers) return ds;
  OutlierOptions o;
  o.k = opt.outlier_k;
  o.max_passes = opt.outlier_passes;
  if (opt.outlier_scope == "stimulus") {
    o.scope = OutlierScope::kStimulus;
  } else if (opt.outlier_scope != "condition") {
    throw ConfigError("--outlier-scope must be condition or stimulus");
  }
  CleanResult clean = RemoveOutliersIqr(ds, o);
  std::cerr << "removed " << clean.removed << " extreme outlier votes in "
            << clean.passes << " passes\n";
  return std::move(clean.dataset);
}

ReferenceMos LoadRef(const std::string& path, const InputOptions& opt) {
  auto in = OpenInput(path);
  return LoadReference(
      in, ParseReferenceColumns(opt.ref_column_spec, ParseDelimiter(opt.delimiter)));
}

// "10:200:10", "10:200" (step 1) or "60".
std::vector<int> ParseSweep(const std::string& text) {
  std::vector<int> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ':')) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size()) {
      v.clear();
      break;
    }
    v.push_back(value);
  }
  if (v.empty() || v.size() > 3 || text.back() == ':') {
    throw ConfigError("bad sweep '" + text + "', expected start:stop:step");
  }
  if (v.size() == 1) v.push_back(v[0]);
  if (v.size() == 2) v.push_back(1);
  return NValuesRange(v[0], v[1], v[2]);
}

unsigned ThreadsFromEnv() {
  const char* env = std::getenv("QVOTES_THREADS");
  if (!env || !*env) return 0;
  unsigned n = 0;
  const std::string s(env);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc() || ptr != s.data() + s.size() || n == 0) {
    throw ConfigError("QVOTES_THREADS must be a positive integer");
  }
  return n;
}

std::string DefaultLabel(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

std::string Fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

void WriteFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << content;
  if (!out) throw InputError("write failed on '" + path + "'");
}

RunManifest MakeManifest(const std::vector<std::string>& argv,
                         const std::vector<std::string>& inputs,
                         std::optional<std::uint64_t> seed) {
  RunManifest m{QVOTES_VERSION, argv, seed, {}, UtcTimestamp()};
  for (const std::string& path : inputs) {
    m.input_digests.emplace_back(path, Sha256File(path));
  }
  return m;
}

// ---------------------------------------------------------------------------

struct ValidateArgs {
  std::string ratings;
  std::string reference;
};

int RunValidate(const ValidateArgs& args, const InputOptions& opt) {
  auto in = OpenInput(args.ratings);
  LoadedRatings loaded = ScanRatings(in, RatingColumns(opt));
  const RatingDataset& ds = loaded.dataset;

  double mean = 0.0, sd = 0.0;
  const std::size_t nc = ds.num_conditions();
  for (std::size_t x = 0; x < nc; ++x) mean += ds.votes(x);
  if (nc) mean /= nc;
  for (std::size_t x = 0; x < nc; ++x) sd += std::pow(ds.votes(x) - mean, 2);
  sd = nc > 1 ? std::sqrt(sd / (nc - 1)) : 0.0;

  std::cout << "rows:        " << loaded.report.rows << "\n"
            << "conditions:  " << nc << "\n"
            << "users:       " << ds.num_users() << "\n"
            << "votes:       " << ds.total_votes() << "\n"
            << "votes/cond:  " << Fmt(mean) << " (" << Fmt(sd) << ")\n";
  if (!ds.empty()) {
    const CleanResult probe = RemoveOutliersIqr(ds, {.max_passes = 1});
    std::cout << "outliers:    " << probe.removed
              << " votes beyond 3.0 x IQR from the median\n";
  }

  for (const Diagnostic& d : loaded.report.errors) {
    std::cout << "error: " << d.message << "\n";
  }
  bool clean = loaded.report.clean() && !ds.empty();
  if (ds.empty() && loaded.report.clean()) std::cout << "error: no votes\n";

  if (!args.reference.empty()) {
    ReferenceMos ref;
    try {
      ref = LoadRef(args.reference, opt);
    } catch (const InputError& e) {
      std::cout << "error: reference: " << e.what() << "\n";
      return kExitInput;
    }
    const auto orphans = OrphanReferenceConditions(ref, ds);
    const auto missing = UnreferencedConditions(ref, ds);
    std::cout << "reference:   " << ref.size() << " conditions, "
              << ref.size() - orphans.size() << " shared\n";
    if (!orphans.empty()) {
      std::cout << "warning: " << orphans.size()
                << " reference conditions have no ratings:";
      for (const auto& c : orphans) std::cout << ' ' << c;
      std::cout << "\n";
    }
    if (!missing.empty()) {
      std::cout << "warning: " << missing.size()
                << " rated conditions have no reference:";
      for (const auto& c : missing) std::cout << ' ' << c;
      std::cout << "\n";
    }
  }
  std::cout << (clean ? "ok\n" : "invalid\n");
  return clean ? 0 : kExitInput;
}

// ---------------------------------------------------------------------------

struct CompareArgs {
  std::string ratings;
  std::string reference;
  bool fom = false;
  std::string json_out;
};

int RunCompare(const CompareArgs& args, const InputOptions& opt,
               const std::vector<std::string>& argv) {
  const RatingDataset ds = LoadDataset(args.ratings, opt);
  const ReferenceMos ref = LoadRef(args.reference, opt);
  const Comparison cmp = CompareToReference(DatasetMos(ds), ref, args.fom);
  std::cout << "shared:      " << cmp.shared << "\n"
            << "srcc:        " << Fmt(cmp.srcc) << "\n"
            << "rmse:        " << Fmt(cmp.rmse) << "\n";
  if (cmp.rmse_mapped) {
    std::cout << "rmse_mapped: " << Fmt(*cmp.rmse_mapped) << "\n"
              << "slope:       " << Fmt(cmp.mapping->slope) << "\n"
              << "intercept:   " << Fmt(cmp.mapping->intercept) << "\n";
  }
  if (!args.json_out.empty()) {
    nlohmann::ordered_json doc = {{"ratings", args.ratings},
                                  {"reference", args.reference},
                                  {"shared", cmp.shared},
                                  {"srcc", cmp.srcc},
                                  {"rmse", cmp.rmse}};
    if (cmp.rmse_mapped) {
      doc["rmse_mapped"] = *cmp.rmse_mapped;
      doc["slope"] = cmp.mapping->slope;
      doc["intercept"] = cmp.mapping->intercept;
    }
    WriteFile(args.json_out, doc.dump(2) + "\n");
    WriteFile(ManifestPathFor(args.json_out),
              ManifestToJson(MakeManifest(
                  argv, {args.ratings, args.reference}, std::nullopt)));
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string ratings;
  std::string reference;
  std::string sweep = "10:200:10";
  int runs = 250;
  std::uint64_t seed = 0;
  std::string metrics;
  std::string out;
  std::string label;
  bool fom = false;
  double ci_level = 0.95;
  int boot = kDefaultBootstrapResamples;
  bool no_delta = false;
  int baseline_n = 10;
  int min_conditions = 3;
  unsigned threads = 0;
};

int RunSimulate(const SimulateArgs& args, const InputOptions& opt,
                const std::vector<std::string>& argv) {
  SweepConfig cfg;
  cfg.n_values = ParseSweep(args.sweep);
  cfg.repetitions = args.runs;
  cfg.master_seed = args.seed;
  cfg.metrics = ParseMetricList(args.metrics);
  cfg.bootstrap_resamples = args.boot;
  cfg.ci_level = args.ci_level;
  cfg.apply_first_order_map = args.fom;
  cfg.delta_curves = !args.no_delta;
  cfg.delta_baseline_n = args.baseline_n;
  cfg.min_conditions_per_user = args.min_conditions;
  cfg.threads = args.threads ? args.threads : ThreadsFromEnv();
  bool gain = false;
  for (Metric m : cfg.metrics) {
    gain |= m == Metric::kGainSrcc || m == Metric::kGainRmse;
    if (NeedsReference(m) && args.reference.empty()) {
      throw ConfigError("metric " + std::string(MetricName(m)) +
                        " needs --reference");
    }
  }
  // A baseline outside the sweep only matters when deltas are produced.
  if (!gain) cfg.delta_curves = false;
  cfg.Validate();

  const RatingDataset ds = LoadDataset(args.ratings, opt);
  ReferenceMos ref;
  if (!args.reference.empty()) ref = LoadRef(args.reference, opt);
  const std::string label =
      args.label.empty() ? DefaultLabel(args.ratings) : args.label;
  const auto curves =
      RunSweep(ds, args.reference.empty() ? nullptr : &ref, cfg, label);

  std::ostringstream csv;
  WriteCurvesCsv(csv, curves);
  if (args.out.empty()) {
    std::cout << csv.str();
    return 0;
  }
  std::filesystem::path base(args.out);
  std::string csv_path = args.out;
  if (base.extension() != ".csv") csv_path += ".csv";
  std::filesystem::path json_path(csv_path);
  json_path.replace_extension(".json");
  WriteFile(csv_path, csv.str());
  WriteFile(json_path.string(), CurvesToJson(curves, cfg));
  std::vector<std::string> inputs = {args.ratings};
  if (!args.reference.empty()) inputs.push_back(args.reference);
  WriteFile(ManifestPathFor(csv_path),
            ManifestToJson(MakeManifest(argv, inputs, cfg.master_seed)));
  std::cerr << "wrote " << csv_path << ", " << json_path.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct FitArgs {
  std::string curves;
  std::string metric;
  std::string dataset;
  std::string out;
  std::vector<double> targets;
};

int RunFit(const FitArgs& args, const std::vector<std::string>& argv) {
  auto in = OpenInput(args.curves);
  const bool json =
      std::filesystem::path(args.curves).extension() == ".json";
  const auto curves = json ? ReadCurvesJson(in) : ReadCurvesCsv(in);

  std::vector<const MetricCurve*> matches;
  std::vector<std::string> names;
  for (const MetricCurve& c : curves) {
    if (std::find(names.begin(), names.end(), c.metric) == names.end()) {
      names.push_back(c.metric);
    }
    if (c.metric == args.metric &&
        (args.dataset.empty() || c.dataset == args.dataset)) {
      matches.push_back(&c);
    }
  }
  if (matches.empty()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("no curve for metric '" + args.metric + "'" +
                      (args.dataset.empty() ? "" : " and dataset '" + args.dataset + "'") +
                      " in " + args.curves + "; available metrics: " + list);
  }
  if (matches.size() > 1) {
    std::string list;
    for (const auto* c : matches) list += (list.empty() ? "" : ", ") + c->dataset;
    throw ConfigError("several datasets carry metric '" + args.metric +
                      "', pick one with --dataset: " + list);
  }
  const MetricCurve& curve = *matches.front();
  std::vector<CurveSample> points;
  for (const CurvePoint& p : curve.points) points.push_back({double(p.n), p.mean});
  PowerModel model = FitPowerModel(points);
  model.metric = curve.metric;
  model.dataset = curve.dataset;

  std::cout << "model:       y = a * n^b + c  (" << model.metric
            << (model.dataset.empty() ? "" : ", " + model.dataset) << ")\n"
            << "a:           " << Fmt(model.a) << "\n"
            << "b:           " << Fmt(model.b) << "\n"
            << "c:           " << Fmt(model.c) << "  (asymptote)\n"
            << "fit rmse:    " << Fmt(model.rmse_of_fit) << " over "
            << model.n_points << " points\n";
  for (double t : args.targets) {
    std::cout << "target " << Fmt(t) << ": ";
    if (model.a == 0.0) {
      std::cout << "flat curve\n";
      continue;
    }
    const auto n = VotesForTarget(model, t);
    if (n) {
      std::cout << *n << " votes\n";
    } else {
      std::cout << "not reachable (asymptote " << Fmt(model.c) << ")\n";
    }
  }
  if (!args.out.empty()) {
    WriteFile(args.out, ModelToJson(model));
    WriteFile(ManifestPathFor(args.out),
              ManifestToJson(MakeManifest(argv, {args.curves}, std::nullopt)));
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct MaxCiArgs {
  std::string sweep = "10:200:10";
  double mos = 3.0;
  double level = 0.95;
  bool round_successes = false;
};

int RunMaxCi(const MaxCiArgs& args) {
  const auto ns = ParseSweep(args.sweep);
  const SuccessCount mode =
      args.round_successes ? SuccessCount::kRounded : SuccessCount::kFractional;
  std::ostringstream os;
  os << std::setprecision(6) << "n,mos,level,width\n";
  for (int n : ns) {
    os << n << ',' << args.mos << ',' << args.level << ','
       << MaxCiWidth(args.mos, n, args.level, mode) << '\n';
  }
  std::cout << os.str();
  return 0;
}

void AddInputOptions(CLI::App* cmd, InputOptions& opt, bool outliers) {
  cmd->add_option("--col", opt.column_spec,
                  "Ratings columns, e.g. condition=cond,user=worker,score=rating");
  cmd->add_option("--ref-col", opt.ref_column_spec,
                  "Reference columns, e.g. condition=cond,mos=MOS");
  cmd->add_option("--delimiter", opt.delimiter, "Field delimiter or 'tab'")
      ->capture_default_str();
  if (!outliers) return;
  cmd->add_flag("--remove-outliers", opt.remove_outliers,
                "Drop extreme outlier votes before analysis");
  cmd->add_option("--outlier-k", opt.outlier_k, "IQR multiple")
      ->capture_default_str();
  cmd->add_option("--outlier-scope", opt.outlier_scope,
                  "Group votes per condition or per stimulus")
      ->check(CLI::IsMember({"condition", "stimulus"}))
      ->capture_default_str();
  cmd->add_option("--outlier-passes", opt.outlier_passes,
                  "Sweeps of the rule, 0 repeats until stable")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

int Main(int argc, char** argv) {
  const std::vector<std::string> invocation(argv, argv + argc);
  CLI::App app{"Resampling study of how many quality votes a condition needs",
               "qvotes"};
  app.set_version_flag("--version", QVOTES_VERSION);
  app.require_subcommand(1);

  InputOptions input;

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Check a ratings file");
  validate->add_option("ratings", va.ratings, "Ratings CSV")->required();
  validate->add_option("-r,--reference", va.reference, "Reference MOS CSV");
  AddInputOptions(validate, input, false);

  CompareArgs ca;
  auto* compare =
      app.add_subcommand("compare", "SRCC and RMSE of the ratings MOS against a reference");
  compare->add_option("ratings", ca.ratings, "Ratings CSV")->required();
  compare->add_option("reference", ca.reference, "Reference MOS CSV")->required();
  compare->add_flag("--fom", ca.fom, "Also report RMSE after a first-order mapping");
  compare->add_option("--json", ca.json_out, "Write the result as JSON");
  AddInputOptions(compare, input, true);

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Resample the ratings and sweep n");
  simulate->add_option("ratings", sa.ratings, "Ratings CSV")->required();
  simulate->add_option("-r,--reference", sa.reference, "Reference MOS CSV");
  simulate->add_option("--n", sa.sweep, "Votes per condition, start:stop:step")
      ->capture_default_str();
  simulate->add_option("--runs", sa.runs, "Repetitions per n")->capture_default_str();
  simulate->add_option("--seed", sa.seed, "Master seed")->capture_default_str();
  simulate
      ->add_option("--metrics", sa.metrics,
                   "validity_srcc, validity_rmse (srcc, rmse), gain_srcc, "
                   "gain_rmse, ci_width, irr")
      ->required();
  simulate->add_option("-o,--out", sa.out,
                       "Output CSV; JSON and manifest are written next to it");
  simulate->add_option("--label", sa.label, "Dataset label (default: file stem)");
  simulate->add_flag("--fom", sa.fom, "Map each run's MOS onto the reference first");
  simulate->add_option("--ci-level", sa.ci_level, "Confidence level")
      ->capture_default_str();
  simulate->add_option("--boot", sa.boot, "Bootstrap resamples for ci_width")
      ->capture_default_str();
  simulate->add_flag("--no-delta", sa.no_delta, "Skip baseline-shifted gain curves");
  simulate->add_option("--baseline-n", sa.baseline_n, "Baseline n of the delta curves")
      ->capture_default_str();
  simulate->add_option("--min-conditions", sa.min_conditions,
                       "Conditions a user needs to enter the IRR")
      ->capture_default_str();
  simulate->add_option("--threads", sa.threads,
                       "Worker threads (default: QVOTES_THREADS or all cores)");
  AddInputOptions(simulate, input, true);

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Fit y = a * n^b + c to a simulated curve");
  fit->add_option("curves", fa.curves, "Curves CSV or JSON from simulate")->required();
  fit->add_option("--metric", fa.metric, "Curve to fit")->required();
  fit->add_option("--dataset", fa.dataset, "Dataset label when several are present");
  fit->add_option("-o,--out", fa.out, "Write the model as JSON");
  fit->add_option("--target", fa.targets, "Report votes needed to reach this value");

  MaxCiArgs ma;
  auto* maxci = app.add_subcommand("maxci", "Widest possible MOS CI per n");
  maxci->add_option("--n", ma.sweep, "start:stop:step")->capture_default_str();
  maxci->add_option("--mos", ma.mos, "MOS in [1, 5]")->capture_default_str();
  maxci->add_option("--level", ma.level, "Confidence level")->capture_default_str();
  maxci->add_flag("--round-successes", ma.round_successes,
                  "Round p * n to whole successes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*validate) return RunValidate(va, input);
    if (*compare) return RunCompare(ca, input, invocation);
    if (*simulate) return RunSimulate(sa, input, invocation);
    if (*fit) return RunFit(fa, invocation);
    if (*maxci) return RunMaxCi(ma);
  } catch (const ConfigError& e) {
    std::cerr << "qvotes: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "qvotes: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitConfig;
}

}  // namespace
}  // namespace qvotes::cli

int main(int argc, char** argv) { return qvotes::cli::Main(argc, argv); }
