/* Copyright 2026 The adgraph Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Central-difference gradient check against the tape gradient.
//
// The nominal step is rounded to the nearest power of two so that x + h and
// x - h are exact for moderate x. Relative error is measured as
//
//   |analytic - numeric| / max(1, |analytic|, |numeric|)
//
// which stays meaningful for derivatives near zero.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "adgraph/dataflow.hpp"
#include "adgraph/errors.hpp"
#include "adgraph/graph.hpp"
#include "adgraph/parser.hpp"
#include "adgraph/tape.hpp"

namespace adgraph {

struct GradCheckOptions {
  double step = 1e-6;
  double tolerance = 1e-5;
};

struct GradCheckEntry {
  std::string variable;
  double analytic = 0.0;
  double numeric = 0.0;
  double relative_error = 0.0;
  bool conclusive = true;
  std::string note;  // why the entry is inconclusive
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;  // variable declaration order
  double value = 0.0;
  double step = 0.0;  // the step actually used
  double tolerance = 0.0;
  double max_relative_error = 0.0;  // +inf if any entry is inconclusive
  bool passed = false;
};

inline double relative_error(double analytic, double numeric) {
  const double scale = std::max({1.0, std::abs(analytic), std::abs(numeric)});
  return std::abs(analytic - numeric) / scale;
}

inline double snapped_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw ContractError("gradcheck step must be positive and finite");
  }
  return std::exp2(std::round(std::log2(h)));
}

inline GradCheckReport gradcheck(const Graph& graph, const Bindings& bindings,
                                 GradCheckOptions opts = {}) {
  GradCheckReport report;
  report.step = snapped_step(opts.step);
  report.tolerance = opts.tolerance;

  GradResult analytic = grad(graph, bindings);
  report.value = analytic.value;

  for (NodeId v : graph.variables()) {
    const std::string& name = graph.node(v).op.name();
    GradCheckEntry entry;
    entry.variable = name;
    entry.analytic = analytic.gradient.at(name);
    const double x = bindings.find(name)->second;
    try {
      Bindings plus = bindings;
      Bindings minus = bindings;
      plus[name] = x + report.step;
      minus[name] = x - report.step;
      const double fp = evaluate(graph, plus).outputs[0];
      const double fm = evaluate(graph, minus).outputs[0];
      entry.numeric = (fp - fm) / (2.0 * report.step);
      entry.relative_error = relative_error(entry.analytic, entry.numeric);
    } catch (const DomainError& e) {
      entry.conclusive = false;
      entry.note = e.what();
      entry.relative_error = std::numeric_limits<double>::infinity();
    }
    report.max_relative_error = std::max(report.max_relative_error, entry.relative_error);
    report.entries.push_back(std::move(entry));
  }
  report.passed = report.max_relative_error <= report.tolerance;
  return report;
}

inline GradCheckReport gradcheck(std::string_view source, const Bindings& bindings,
                                 GradCheckOptions opts = {}) {
  return gradcheck(compile_source(source).graph, bindings, opts);
}

}  // namespace adgraph
