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

// Shared fixtures and test-only oracles. Nothing here calls into the
// differentiation code; expected values come from closed forms or from
// finite differences of plain C++ lambdas.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "adgraph/graph.hpp"

namespace adgraph::testing {

inline const char* const kGolden = "ln(x1) + x1*x2 - sin(x2)";
inline const char* const kThreeOutputs = "Z := A * B + C\nW := Z + 4\nY := Z^2 - (3*Z + B)";

inline double golden(double x1, double x2) {
  return std::log(x1) + x1 * x2 - std::sin(x2);
}

inline double three_outputs_y(double a, double b, double c) {
  const double z = a * b + c;
  return z * z - (3.0 * z + b);
}

// Central difference of a plain function along coordinate `k`.
inline double central_difference(const std::function<double(std::vector<double>)>& f,
                                 std::vector<double> x, std::size_t k,
                                 double h = 1e-6) {
  std::vector<double> xp = x;
  std::vector<double> xm = x;
  xp[k] += h;
  xm[k] -= h;
  return (f(xp) - f(xm)) / (2.0 * h);
}

inline Graph golden_graph() {
  GraphBuilder b;
  NodeId x1 = b.variable("x1");
  NodeId x2 = b.variable("x2");
  NodeId v1 = b.unary(OpTag::kLn, x1);
  NodeId v2 = b.binary(OpTag::kMul, x1, x2);
  NodeId v3 = b.unary(OpTag::kSin, x2);
  NodeId v4 = b.binary(OpTag::kAdd, v1, v2);
  NodeId v5 = b.binary(OpTag::kSub, v4, v3);
  return std::move(b).finish({v5});
}

inline bool relative_close(double a, double b, double tol) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= tol * scale;
}

// Graph of n nodes over variables in [-1, 1] using only ops that keep every
// value in [-1, 1], so any size evaluates without domain errors.
inline Graph bounded_random_graph(std::size_t n, std::uint64_t seed,
                                  std::size_t n_vars = 4) {
  std::mt19937_64 rng(seed);
  GraphBuilder b;
  for (std::size_t v = 0; v < n_vars && b.size() < n; ++v) {
    b.variable("u" + std::to_string(v));
  }
  std::uniform_int_distribution<int> pick_op(0, 3);
  while (b.size() < n) {
    std::uniform_int_distribution<std::size_t> pick(0, b.size() - 1);
    NodeId a{pick(rng)};
    NodeId c{pick(rng)};
    switch (pick_op(rng)) {
      case 0: b.unary(OpTag::kSin, a); break;
      case 1: b.unary(OpTag::kCos, a); break;
      case 2: b.binary(OpTag::kMul, a, c); break;
      default: b.unary(OpTag::kNeg, a); break;
    }
  }
  return std::move(b).finish({NodeId{b.size() - 1}}, Liveness::kAllowDead);
}

inline Bindings bounded_bindings(std::size_t n_vars, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Bindings b;
  for (std::size_t v = 0; v < n_vars; ++v) b["u" + std::to_string(v)] = u(rng);
  return b;
}

}  // namespace adgraph::testing
