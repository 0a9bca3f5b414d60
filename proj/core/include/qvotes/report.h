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

#ifndef QVOTES_REPORT_H_
#define QVOTES_REPORT_H_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qvotes/modelfit.h"
#include "qvotes/simulate.h"

namespace qvotes {

// CSV with header metric,dataset,n,mean,ci_low,ci_high,std_dev; numbers with
// 6 significant digits, LF line endings.
void WriteCurvesCsv(std::ostream& out, std::span<const MetricCurve> curves);
std::vector<MetricCurve> ReadCurvesCsv(std::istream& in);

// JSON bundle {"config": {...}, "curves": [...]} at full precision. The
// config echo leaves out the worker count, which never changes results.
std::string CurvesToJson(std::span<const MetricCurve> curves,
                         const SweepConfig& config);
std::vector<MetricCurve> ReadCurvesJson(std::istream& in);

// {"metric", "dataset", "a", "b", "c", "rmse_of_fit", "n_points"}.
std::string ModelToJson(const PowerModel& model);
PowerModel ModelFromJson(const std::string& text);

}  // namespace qvotes

#endif  // QVOTES_REPORT_H_
