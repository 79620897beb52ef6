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

// Dataflow evaluation of a Graph. A node becomes fireable once every input
// edge carries a value; the executor repeatedly asks a schedule to pick one
// fireable node, fires it, and forwards the result along its out-edges.
//
// Each node's arithmetic reads its inputs from a single-assignment table in
// fixed input order, so the result does not depend on which fireable node
// the schedule picks first.

#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "adgraph/errors.hpp"
#include "adgraph/graph.hpp"
#include "adgraph/primitives.hpp"

namespace adgraph {

using ReadySet = std::set<NodeId>;

// A schedule picks one member of the current ready set.
template <class S>
concept Schedule = requires(S s, const ReadySet& ready) {
  { s(ready) } -> std::convertible_to<NodeId>;
};

struct LowestFirst {
  NodeId operator()(const ReadySet& ready) const { return *ready.begin(); }
};

struct HighestFirst {
  NodeId operator()(const ReadySet& ready) const { return *ready.rbegin(); }
};

// Observer signature: (node, input values in slot order, result value).
struct NoObserver {
  void operator()(NodeId, std::span<const double>, double) const {}
};

struct Valuation {
  std::vector<double> values;  // indexed by node id
  std::vector<double> outputs;
  std::vector<NodeId> firing_order;

  std::size_t firings() const { return firing_order.size(); }
  double value(NodeId id) const { return values.at(id.index); }
};

class EvalState {
 public:
  explicit EvalState(const Graph& graph)
      : graph_(&graph),
        values_(graph.size()),
        pending_(graph.size(), 0) {
    for (std::size_t i = 0; i < graph.size(); ++i) {
      pending_[i] = graph.nodes()[i].inputs.size();
      if (pending_[i] == 0) ready_.insert(NodeId{i});
    }
  }

  const ReadySet& ready() const { return ready_; }
  bool done() const { return fired_ == graph_->size(); }
  std::size_t fired() const { return fired_; }
  std::size_t pending(NodeId id) const { return pending_.at(id.index); }
  const std::optional<double>& value(NodeId id) const {
    return values_.at(id.index);
  }

  // Fires one ready node and returns its value.
  template <class OnFire = NoObserver>
  double fire(NodeId id, const Bindings& bindings, OnFire&& on_fire = {}) {
    if (!ready_.contains(id)) {
      throw ContractError("node " + std::to_string(id.index) +
                          " is not fireable");
    }
    const Node& node = graph_->node(id);
    std::array<double, 2> in{};
    for (std::size_t slot = 0; slot < node.inputs.size(); ++slot) {
      in[slot] = *values_[node.inputs[slot].index];
    }
    std::span<const double> inputs(in.data(), node.inputs.size());

    double result = 0.0;
    if (node.op.is_var()) {
      auto it = bindings.find(node.op.name());
      if (it == bindings.end()) throw BindingError(node.op.name());
      if (!std::isfinite(it->second)) {
        throw DomainError("non-finite binding for '" + node.op.name() + "'",
                          id.index);
      }
      result = it->second;
    } else {
      try {
        result = primitive_value(node.op, inputs);
      } catch (const DomainError& e) {
        rethrow_at(e, id, node.op);
      }
    }

    values_[id.index] = result;
    ready_.erase(id);
    ++fired_;
    for (const Use& use : graph_->uses(id)) {
      if (--pending_[use.consumer.index] == 0) ready_.insert(use.consumer);
    }
    on_fire(id, inputs, result);
    return result;
  }

 private:
  const Graph* graph_;
  std::vector<std::optional<double>> values_;
  std::vector<std::size_t> pending_;
  ReadySet ready_;
  std::size_t fired_ = 0;
};

inline ReadySet ready_set(const EvalState& state) { return state.ready(); }

inline void require_bindings(const Graph& graph, const Bindings& bindings) {
  for (NodeId v : graph.variables()) {
    const std::string& name = graph.node(v).op.name();
    if (!bindings.contains(name)) throw BindingError(name);
  }
}

// Runs the graph to completion, letting `schedule` choose among fireable
// nodes. `on_fire` sees every firing in order. Throws on the first error;
// no partial Valuation is ever returned.
template <Schedule S, class OnFire = NoObserver>
Valuation evaluate_with_schedule(const Graph& graph, const Bindings& bindings,
                                 S&& schedule, OnFire&& on_fire = {}) {
  require_valid(graph);
  require_bindings(graph, bindings);
  EvalState state(graph);
  Valuation out;
  out.firing_order.reserve(graph.size());
  while (!state.done()) {
    if (state.ready().empty()) {
      throw GraphError("no fireable node left; graph is not acyclic");
    }
    NodeId next = schedule(state.ready());
    state.fire(next, bindings, on_fire);
    out.firing_order.push_back(next);
  }
  out.values.reserve(graph.size());
  for (std::size_t i = 0; i < graph.size(); ++i) {
    out.values.push_back(*state.value(NodeId{i}));
  }
  for (NodeId o : graph.outputs()) out.outputs.push_back(out.values[o.index]);
  return out;
}

inline Valuation evaluate(const Graph& graph, const Bindings& bindings) {
  return evaluate_with_schedule(graph, bindings, LowestFirst{});
}

}  // namespace adgraph
