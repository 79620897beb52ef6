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

// Forward mode: every node carries a (value, tangent) pair, and a node's
// tangent is the partial-weighted sum of its input tangents. One pass gives
// one directional derivative, so a full gradient costs one pass per input.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "adgraph/dataflow.hpp"
#include "adgraph/errors.hpp"
#include "adgraph/graph.hpp"
#include "adgraph/primitives.hpp"

namespace adgraph {

struct Dual {
  double value = 0.0;
  double tangent = 0.0;
};

struct DualValuation {
  std::vector<Dual> nodes;  // indexed by node id
  std::vector<double> outputs;
  std::vector<double> output_tangents;
  std::size_t firings = 0;
};

// Jacobian-vector product. Variables missing from `tangent_seed` get a zero
// tangent.
template <Schedule S = LowestFirst>
DualValuation jvp(const Graph& graph, const Bindings& bindings,
                  const Bindings& tangent_seed, S&& schedule = {}) {
  DualValuation out;
  out.nodes.assign(graph.size(), Dual{});
  auto on_fire = [&](NodeId id, std::span<const double> inputs, double result) {
    const Node& node = graph.node(id);
    Dual& d = out.nodes[id.index];
    d.value = result;
    if (node.op.is_var()) {
      auto it = tangent_seed.find(node.op.name());
      d.tangent = it == tangent_seed.end() ? 0.0 : it->second;
      return;
    }
    double t = 0.0;
    for (std::size_t i = 0; i < node.inputs.size(); ++i) {
      try {
        t += primitive_partial(node.op, inputs, i) *
             out.nodes[node.inputs[i].index].tangent;
      } catch (const DomainError& e) {
        rethrow_at(e, id, node.op);
      }
    }
    d.tangent = t;
  };
  Valuation val = evaluate_with_schedule(graph, bindings, schedule, on_fire);
  out.firings = val.firings();
  out.outputs = std::move(val.outputs);
  for (NodeId o : graph.outputs()) {
    out.output_tangents.push_back(out.nodes[o.index].tangent);
  }
  return out;
}

struct ForwardGradient {
  double value = 0.0;
  Gradient gradient;
  std::size_t passes = 0;
  std::size_t firings = 0;
};

// One jvp per variable with a unit seed.
inline ForwardGradient gradient_forward(const Graph& graph,
                                        const Bindings& bindings) {
  if (graph.outputs().size() != 1) {
    throw ContractError("gradient_forward needs a single-output graph; this one has " +
                        std::to_string(graph.outputs().size()) + " outputs");
  }
  ForwardGradient out;
  if (graph.variables().empty()) {
    out.value = evaluate(graph, bindings).outputs[0];
    return out;
  }
  for (NodeId v : graph.variables()) {
    const std::string& name = graph.node(v).op.name();
    DualValuation pass = jvp(graph, bindings, Bindings{{name, 1.0}});
    out.value = pass.outputs[0];
    out.gradient[name] = pass.output_tangents[0];
    ++out.passes;
    out.firings += pass.firings;
  }
  return out;
}

}  // namespace adgraph
