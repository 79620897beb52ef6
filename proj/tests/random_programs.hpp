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

// Seeded generator of random straight-line DSL programs for the cross-mode
// and finite-difference suites.
//
// Statements are grown one at a time. Each candidate operation is checked
// against the running values at the sampled inputs and rejected unless it
// stays well inside its domain:
//
//   ln argument >= 0.1, |divisor| >= 0.2, pow base >= 0.2 with |exponent|
//   <= 3, exp argument <= 3, every value within [-50, 50].
//
// The margins dwarf any finite-difference step, so perturbed evaluations
// never leave the domain either. Each value also carries a bound on the
// sum of its derivative magnitudes over the inputs, propagated by hand,
// and candidates above kMaxSlope are rejected. Without it, chains such as
// sin(exp(exp(x))) stay bounded but bend too sharply for a 1e-6 step.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "adgraph/graph.hpp"

namespace adgraph::testing {

struct RandomProgram {
  std::string source;
  Bindings bindings;
  std::size_t node_estimate = 0;  // nodes after lowering
};

class ProgramGenerator {
 public:
  explicit ProgramGenerator(std::uint64_t seed) : rng_(seed) {}

  RandomProgram next(std::size_t max_nodes = 50) {
    RandomProgram out;
    pool_.clear();
    std::size_t nodes = 0;
    const std::size_t n_vars = uniform_int(1, 4);
    std::uniform_real_distribution<double> var_value(-2.0, 2.0);
    for (std::size_t v = 0; v < n_vars; ++v) {
      std::string name = "x" + std::to_string(v);
      double value = var_value(rng_);
      out.bindings[name] = value;
      pool_.push_back({name, value, 1.0, false});
      ++nodes;
    }
    // Grow toward a random size; a statement adds at most two nodes
    // (operation + literal), so stopping one short keeps the cap.
    const std::size_t target_size = uniform_int(nodes + 1, max_nodes);
    for (std::size_t s = 0; s == 0 || nodes + 2 <= target_size; ++s) {
      std::string target = "t" + std::to_string(s);
      Candidate c = candidate();
      out.source += target + " := " + c.text + "\n";
      nodes += c.nodes;
      pool_.push_back({target, c.value, c.slope, false});
    }
    out.source += pool_.back().name + "\n";
    out.node_estimate = nodes;
    return out;
  }

 private:
  static constexpr double kMaxSlope = 25.0;

  struct Entry {
    std::string name;
    double value;
    double slope;  // bound on sum over inputs of |d value / d input|
    bool used;
  };

  struct Candidate {
    std::string text;
    double value = 0.0;
    double slope = 0.0;
    std::size_t nodes = 1;
  };

  std::size_t uniform_int(std::size_t lo, std::size_t hi) {
    if (hi < lo) hi = lo;
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }

  // Prefers values nobody consumed yet so most statements feed the output.
  std::size_t pick_operand() {
    std::vector<std::size_t> unused;
    for (std::size_t i = 0; i < pool_.size(); ++i) {
      if (!pool_[i].used) unused.push_back(i);
    }
    if (!unused.empty() && uniform_int(0, 3) != 0) {
      return unused[uniform_int(0, unused.size() - 1)];
    }
    return uniform_int(0, pool_.size() - 1);
  }

  static bool safe(double v) { return std::isfinite(v) && std::abs(v) <= 50.0; }

  Candidate candidate() {
    for (int attempt = 0; attempt < 64; ++attempt) {
      if (auto c = try_candidate()) return *c;
    }
    // Always safe: sum of an operand with itself scaled down.
    std::size_t a = pick_operand();
    pool_[a].used = true;
    return {"0.5*" + pool_[a].name, 0.5 * pool_[a].value, 0.5 * pool_[a].slope, 2};
  }

  std::optional<Candidate> try_candidate() {
    const std::size_t a = pick_operand();
    const double x = pool_[a].value;
    const double sx = pool_[a].slope;
    const std::string& xa = pool_[a].name;
    const int op = static_cast<int>(uniform_int(0, 9));

    // Second operand: another pool value or a fresh literal.
    std::size_t b = pick_operand();
    double y = pool_[b].value;
    double sy = pool_[b].slope;
    std::string yb = pool_[b].name;
    std::size_t nodes = 1;
    if (uniform_int(0, 4) == 0) {
      y = std::round(std::uniform_real_distribution<double>(0.5, 3.0)(rng_) * 4.0) / 4.0;
      yb = literal(y);
      sy = 0.0;
      nodes = 2;
      b = pool_.size();
    }

    Candidate c;
    c.nodes = 1;
    bool binary = true;
    switch (op) {
      case 0: c.text = xa + " + " + yb; c.value = x + y; c.slope = sx + sy; break;
      case 1: c.text = xa + " - " + yb; c.value = x - y; c.slope = sx + sy; break;
      case 2:
        c.text = xa + "*" + yb;
        c.value = x * y;
        c.slope = std::abs(y) * sx + std::abs(x) * sy;
        break;
      case 3:
        if (std::abs(y) < 0.2) return std::nullopt;
        c.text = xa + "/" + yb;
        c.value = x / y;
        c.slope = sx / std::abs(y) + std::abs(x) * sy / (y * y);
        break;
      case 4:
        if (x < 0.2 || std::abs(y) > 3.0) return std::nullopt;
        c.text = xa + "^" + yb;
        c.value = std::pow(x, y);
        c.slope = std::abs(y * std::pow(x, y - 1.0)) * sx +
                  std::abs(c.value * std::log(x)) * sy;
        break;
      case 5: c.text = "-" + xa; c.value = -x; c.slope = sx; binary = false; break;
      case 6:
        if (x < 0.1) return std::nullopt;
        c.text = "ln(" + xa + ")";
        c.value = std::log(x);
        c.slope = sx / x;
        binary = false;
        break;
      case 7:
        c.text = "sin(" + xa + ")";
        c.value = std::sin(x);
        c.slope = sx;
        binary = false;
        break;
      case 8:
        c.text = "cos(" + xa + ")";
        c.value = std::cos(x);
        c.slope = sx;
        binary = false;
        break;
      default:
        if (x > 3.0) return std::nullopt;
        c.text = "exp(" + xa + ")";
        c.value = std::exp(x);
        c.slope = c.value * sx;
        binary = false;
        break;
    }
    if (!safe(c.value) || !(c.slope <= kMaxSlope)) return std::nullopt;
    pool_[a].used = true;
    if (binary) {
      c.nodes = nodes;
      if (b < pool_.size()) pool_[b].used = true;
    }
    return c;
  }

  static std::string literal(double v) {
    std::string s = std::to_string(v);
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
    return s;
  }

  std::mt19937_64 rng_;
  std::vector<Entry> pool_;
};

}  // namespace adgraph::testing
