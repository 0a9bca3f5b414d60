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

#include "qvotes/report.h"

#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "csv.h"
#include "json.hpp"
#include "qvotes/error.h"

namespace qvotes {
namespace {

using json = nlohmann::ordered_json;

constexpr const char* kCurveColumns[] = {"metric",  "dataset", "n",
                                         "mean",    "ci_low",  "ci_high",
                                         "std_dev"};

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

json CurveJson(const MetricCurve& curve) {
  json points = json::array();
  for (const CurvePoint& p : curve.points) {
    points.push_back({{"n", p.n},
                      {"mean", p.mean},
                      {"ci_low", p.ci_low},
                      {"ci_high", p.ci_high},
                      {"std_dev", p.std_dev},
                      {"runs", p.runs}});
  }
  return {{"metric", curve.metric},
          {"dataset", curve.dataset},
          {"points", std::move(points)}};
}

}  // namespace

void WriteCurvesCsv(std::ostream& out, std::span<const MetricCurve> curves) {
  std::ostringstream os;
  os << std::setprecision(6);
  for (std::size_t i = 0; i < std::size(kCurveColumns); ++i) {
    os << (i ? "," : "") << kCurveColumns[i];
  }
  os << '\n';
  for (const MetricCurve& curve : curves) {
    for (const CurvePoint& p : curve.points) {
      os << CsvField(curve.metric) << ',' << CsvField(curve.dataset) << ','
         << p.n << ',' << p.mean << ',' << p.ci_low << ',' << p.ci_high << ','
         << p.std_dev << '\n';
    }
  }
  out << os.str();
}

std::vector<MetricCurve> ReadCurvesCsv(std::istream& in) {
  internal::LineReader reader(in);
  std::string line;
  if (!reader.Next(line)) throw InputError("empty curves file");
  const auto header = internal::SplitCsvLine(line, ',');
  std::size_t cols[std::size(kCurveColumns)];
  for (std::size_t i = 0; i < std::size(kCurveColumns); ++i) {
    const auto col = internal::FindColumn(header, kCurveColumns[i]);
    if (!col) {
      throw InputError(std::string("curves file lacks column '") +
                       kCurveColumns[i] + "'");
    }
    cols[i] = *col;
  }

  std::vector<MetricCurve> curves;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  while (reader.Next(line)) {
    if (internal::IsBlank(line)) continue;
    const auto fields = internal::SplitCsvLine(line, ',');
    auto get = [&](std::size_t i) -> const std::string& {
      if (cols[i] >= fields.size()) {
        throw InputError("missing field at line " +
                         std::to_string(reader.line_number()));
      }
      return fields[cols[i]];
    };
    auto number = [&](std::size_t i) {
      const auto v = internal::ParseNumber<double>(get(i));
      if (!v) {
        throw InputError("bad number in column '" +
                         std::string(kCurveColumns[i]) + "' at line " +
                         std::to_string(reader.line_number()));
      }
      return *v;
    };
    const auto n = internal::ParseNumber<int>(get(2));
    if (!n) {
      throw InputError("bad n at line " + std::to_string(reader.line_number()));
    }
    const auto key = std::pair{get(0), get(1)};
    auto [it, inserted] = index.emplace(key, curves.size());
    if (inserted) curves.push_back({key.first, key.second, {}});
    curves[it->second].points.push_back(
        {*n, number(3), number(4), number(5), number(6), 0});
  }
  return curves;
}

std::string CurvesToJson(std::span<const MetricCurve> curves,
                         const SweepConfig& config) {
  json metrics = json::array();
  for (Metric m : config.metrics) metrics.push_back(MetricName(m));
  json doc;
  doc["config"] = {{"n_values", config.n_values},
                   {"repetitions", config.repetitions},
                   {"master_seed", config.master_seed},
                   {"metrics", std::move(metrics)},
                   {"bootstrap_resamples", config.bootstrap_resamples},
                   {"ci_level", config.ci_level},
                   {"apply_first_order_map", config.apply_first_order_map},
                   {"delta_curves", config.delta_curves},
                   {"delta_baseline_n", config.delta_baseline_n},
                   {"min_conditions_per_user", config.min_conditions_per_user}};
  json list = json::array();
  for (const MetricCurve& c : curves) list.push_back(CurveJson(c));
  doc["curves"] = std::move(list);
  return doc.dump(2) + "\n";
}

std::vector<MetricCurve> ReadCurvesJson(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid curves JSON: ") + e.what());
  }
  const json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("curves")) throw InputError("curves JSON lacks 'curves'");
    list = &doc["curves"];
  }
  if (!list->is_array()) throw InputError("'curves' must be an array");
  std::vector<MetricCurve> curves;
  try {
    for (const json& c : *list) {
      MetricCurve curve{c.at("metric").get<std::string>(),
                        c.value("dataset", std::string()), {}};
      for (const json& p : c.at("points")) {
        curve.points.push_back({p.at("n").get<int>(), p.at("mean").get<double>(),
                                p.value("ci_low", 0.0), p.value("ci_high", 0.0),
                                p.value("std_dev", 0.0), p.value("runs", 0)});
      }
      curves.push_back(std::move(curve));
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed curve entry: ") + e.what());
  }
  return curves;
}

std::string ModelToJson(const PowerModel& model) {
  const json doc = {{"metric", model.metric},
                    {"dataset", model.dataset},
                    {"a", model.a},
                    {"b", model.b},
                    {"c", model.c},
                    {"rmse_of_fit", model.rmse_of_fit},
                    {"n_points", model.n_points}};
  return doc.dump(2) + "\n";
}

PowerModel ModelFromJson(const std::string& text) {
  try {
    const json doc = json::parse(text);
    PowerModel m;
    m.metric = doc.value("metric", std::string());
    m.dataset = doc.value("dataset", std::string());
    m.a = doc.at("a").get<double>();
    m.b = doc.at("b").get<double>();
    m.c = doc.at("c").get<double>();
    m.rmse_of_fit = doc.value("rmse_of_fit", 0.0);
    m.n_points = doc.value("n_points", 0);
    return m;
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid model JSON: ") + e.what());
  }
}

}  // namespace qvotes
