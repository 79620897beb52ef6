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

// Value and local partial-derivative rules for each primitive. These two
// functions are the only place the library encodes calculus; forward mode,
// the tape and the adjoint builder all derive from them.
//
//   op    value          d/d in0             d/d in1
//   Add   a + b          1                   1
//   Sub   a - b          1                   -1
//   Mul   a * b          b                   a
//   Div   a / b          1 / b               -(a / (b * b))
//   Neg   -a             -1
//   Ln    ln a           1 / a
//   Sin   sin a          cos a
//   Cos   cos a          -sin a
//   Exp   exp a          exp a
//   Pow   a ^ b          b * a^(b - 1)       a^b * ln a

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "adgraph/errors.hpp"
#include "adgraph/graph.hpp"

namespace adgraph {

namespace detail {

inline void check_inputs(const OpKind& op, std::span<const double> in) {
  if (op.is_var()) {
    throw ContractError("Var nodes take their value from the bindings");
  }
  if (in.size() != op.arity()) {
    throw ContractError(std::string(tag_name(op.tag())) + " expects " +
                        std::to_string(op.arity()) + " values, got " +
                        std::to_string(in.size()));
  }
}

inline double finite_or_throw(const OpKind& op, double r) {
  if (!std::isfinite(r)) {
    throw DomainError(std::string(tag_name(op.tag())) + ": non-finite result");
  }
  return r;
}

inline void check_ln(double a) {
  if (!(a > 0.0)) {
    throw DomainError("LN: argument " + shortest(a) + " is not positive");
  }
}

inline void check_div(double b) {
  if (b == 0.0) throw DomainError("DIV: division by zero");
}

inline void check_pow(double base, double exponent) {
  if (base < 0.0 && std::trunc(exponent) != exponent) {
    throw DomainError("POW: negative base with non-integer exponent");
  }
  if (base == 0.0 && exponent < 0.0) {
    throw DomainError("POW: zero base with negative exponent");
  }
}

}  // namespace detail

inline double primitive_value(const OpKind& op, std::span<const double> in) {
  detail::check_inputs(op, in);
  double r = 0.0;
  switch (op.tag()) {
    case OpTag::kConst:
      return op.literal();
    case OpTag::kVar:
      break;
    case OpTag::kAdd:
      r = in[0] + in[1];
      break;
    case OpTag::kSub:
      r = in[0] - in[1];
      break;
    case OpTag::kMul:
      r = in[0] * in[1];
      break;
    case OpTag::kDiv:
      detail::check_div(in[1]);
      r = in[0] / in[1];
      break;
    case OpTag::kNeg:
      r = -in[0];
      break;
    case OpTag::kLn:
      detail::check_ln(in[0]);
      r = std::log(in[0]);
      break;
    case OpTag::kSin:
      r = std::sin(in[0]);
      break;
    case OpTag::kCos:
      r = std::cos(in[0]);
      break;
    case OpTag::kExp:
      r = std::exp(in[0]);
      break;
    case OpTag::kPow:
      detail::check_pow(in[0], in[1]);
      r = std::pow(in[0], in[1]);
      break;
  }
  return detail::finite_or_throw(op, r);
}

inline double primitive_partial(const OpKind& op, std::span<const double> in,
                                std::size_t wrt) {
  detail::check_inputs(op, in);
  if (wrt >= op.arity()) {
    throw ContractError(std::string(tag_name(op.tag())) + " has no input " +
                        std::to_string(wrt));
  }
  double r = 0.0;
  switch (op.tag()) {
    case OpTag::kConst:
    case OpTag::kVar:
      break;  // unreachable: arity 0
    case OpTag::kAdd:
      r = 1.0;
      break;
    case OpTag::kSub:
      r = wrt == 0 ? 1.0 : -1.0;
      break;
    case OpTag::kMul:
      r = wrt == 0 ? in[1] : in[0];
      break;
    case OpTag::kDiv:
      detail::check_div(in[1]);
      r = wrt == 0 ? 1.0 / in[1] : -(in[0] / (in[1] * in[1]));
      break;
    case OpTag::kNeg:
      r = -1.0;
      break;
    case OpTag::kLn:
      detail::check_ln(in[0]);
      r = 1.0 / in[0];
      break;
    case OpTag::kSin:
      r = std::cos(in[0]);
      break;
    case OpTag::kCos:
      r = -std::sin(in[0]);
      break;
    case OpTag::kExp:
      r = std::exp(in[0]);
      break;
    case OpTag::kPow:
      detail::check_pow(in[0], in[1]);
      if (wrt == 0) {
        r = in[1] * std::pow(in[0], in[1] - 1.0);
      } else {
        if (!(in[0] > 0.0)) {
          throw DomainError("POW: derivative in the exponent needs a positive base");
        }
        r = std::pow(in[0], in[1]) * std::log(in[0]);
      }
      break;
  }
  return detail::finite_or_throw(op, r);
}

// Re-raises a domain error with the node that triggered it.
[[noreturn]] inline void rethrow_at(const DomainError& e, NodeId id,
                                    const OpKind& op) {
  throw DomainError(std::string(e.what()) + " (node " +
                        std::to_string(id.index) + ", " +
                        std::string(tag_name(op.tag())) + ")",
                    id.index);
}

}  // namespace adgraph
