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

// Tape-based reverse mode. A forward run appends one entry per executed
// operation (inputs and result included); backward() then walks the tape in
// strict reverse order accumulating adjoints:
//
//   adjoint[input] += adjoint[result] * d(op)/d(input)
//
// Adjoints start at zero and the output slot is seeded, so the first write
// to a slot behaves like an assignment and later writes accumulate.

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adgraph/counters.hpp"
#include "adgraph/dataflow.hpp"
#include "adgraph/errors.hpp"
#include "adgraph/graph.hpp"
#include "adgraph/primitives.hpp"

namespace adgraph {

struct TapeEntry {
  std::size_t result_slot = 0;
  OpKind op = OpKind::constant(0.0);
  std::vector<std::size_t> input_slots;
  std::vector<double> input_values;
  double result_value = 0.0;
};

struct TapeVariable {
  std::string name;
  std::size_t slot = 0;
  double value = 0.0;
};

// Wengert list. Variable slots come first (0..k-1), then one slot per entry
// in execution order.
struct Tape {
  std::vector<TapeVariable> variables;
  std::vector<TapeEntry> entries;
  std::vector<std::size_t> output_slots;

  std::size_t slot_count() const { return variables.size() + entries.size(); }

  double slot_value(std::size_t slot) const {
    return slot < variables.size() ? variables[slot].value
                                   : entries[slot - variables.size()].result_value;
  }
};

struct BackwardStats {
  std::size_t sweeps = 0;
  std::size_t partial_evaluations = 0;
  std::vector<std::size_t> contributions;  // per slot
};

// Accumulation observer: (entry index, input position, contribution,
// adjoint of the input slot after the update).
struct NoAccumulateObserver {
  void operator()(std::size_t, std::size_t, double, double) const {}
};

// Reverse sweep with one seed per tape output. Returns the adjoint of every
// slot.
template <class OnAccumulate = NoAccumulateObserver>
std::vector<double> backward_adjoints(const Tape& tape,
                                      std::span<const double> seeds,
                                      BackwardStats* stats = nullptr,
                                      OnAccumulate&& on_accumulate = {}) {
  if (seeds.size() != tape.output_slots.size()) {
    throw ContractError("expected " + std::to_string(tape.output_slots.size()) +
                        " seeds, got " + std::to_string(seeds.size()));
  }
  std::vector<double> adjoint(tape.slot_count(), 0.0);
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    adjoint[tape.output_slots[k]] += seeds[k];
  }
  if (stats) {
    *stats = BackwardStats{};
    stats->contributions.assign(tape.slot_count(), 0);
    stats->sweeps = 1;
  }
  for (std::size_t e = tape.entries.size(); e-- > 0;) {
    const TapeEntry& entry = tape.entries[e];
    const double upstream = adjoint[entry.result_slot];
    for (std::size_t i = 0; i < entry.input_slots.size(); ++i) {
      double partial = 0.0;
      try {
        partial = primitive_partial(entry.op, entry.input_values, i);
      } catch (const DomainError& err) {
        throw DomainError(std::string(err.what()) + " (tape entry " +
                              std::to_string(e) + ")",
                          entry.result_slot);
      }
      const std::size_t target = entry.input_slots[i];
      const double contribution = upstream * partial;
      adjoint[target] += contribution;
      if (stats) {
        ++stats->partial_evaluations;
        ++stats->contributions[target];
      }
      on_accumulate(e, i, contribution, adjoint[target]);
    }
  }
  return adjoint;
}

inline Gradient variable_adjoints(const Tape& tape,
                                  std::span<const double> adjoint) {
  Gradient g;
  for (const TapeVariable& v : tape.variables) g[v.name] = adjoint[v.slot];
  return g;
}

// Gradient of the first output scaled by `seed`.
inline Gradient backward(const Tape& tape, double seed = 1.0,
                         BackwardStats* stats = nullptr) {
  if (tape.output_slots.size() != 1) {
    throw ContractError(
        "tape has " + std::to_string(tape.output_slots.size()) +
        " outputs; pass one seed per output");
  }
  const double seeds[] = {seed};
  return variable_adjoints(tape, backward_adjoints(tape, seeds, stats));
}

// Vector-Jacobian product for multi-output tapes.
inline Gradient backward(const Tape& tape, std::span<const double> seeds,
                         BackwardStats* stats = nullptr) {
  return variable_adjoints(tape, backward_adjoints(tape, seeds, stats));
}

struct Recording {
  std::vector<double> values;  // one per graph output
  Tape tape;
  std::vector<std::size_t> node_slots;  // graph node id -> tape slot
  std::size_t firings = 0;

  double value() const { return values.at(0); }
};

// Runs the graph once through the dataflow executor, appending an entry
// for every non-Var node as it fires.
inline Recording record(const Graph& graph, const Bindings& bindings) {
  Recording rec;
  rec.node_slots.assign(graph.size(), 0);
  for (NodeId v : graph.variables()) {
    const std::string& name = graph.node(v).op.name();
    auto it = bindings.find(name);
    rec.node_slots[v.index] = rec.tape.variables.size();
    rec.tape.variables.push_back(
        {name, rec.tape.variables.size(), it == bindings.end() ? 0.0 : it->second});
  }
  const std::size_t n_vars = rec.tape.variables.size();
  auto on_fire = [&](NodeId id, std::span<const double> inputs, double result) {
    const Node& node = graph.node(id);
    if (node.op.is_var()) return;
    TapeEntry entry;
    entry.result_slot = n_vars + rec.tape.entries.size();
    entry.op = node.op;
    for (NodeId in : node.inputs) entry.input_slots.push_back(rec.node_slots[in.index]);
    entry.input_values.assign(inputs.begin(), inputs.end());
    entry.result_value = result;
    rec.node_slots[id.index] = entry.result_slot;
    rec.tape.entries.push_back(std::move(entry));
  };
  Valuation val = evaluate_with_schedule(graph, bindings, LowestFirst{}, on_fire);
  for (NodeId o : graph.outputs()) {
    rec.tape.output_slots.push_back(rec.node_slots[o.index]);
  }
  rec.values = std::move(val.outputs);
  rec.firings = val.firings();
  ++build_counters().tapes_recorded;
  return rec;
}

struct GradResult {
  double value = 0.0;
  Gradient gradient;
  std::size_t forward_firings = 0;
  BackwardStats backward;
};

// One recorded forward run and one reverse sweep, seeded with 1.
inline GradResult grad(const Graph& graph, const Bindings& bindings) {
  if (graph.outputs().size() != 1) {
    throw ContractError("grad needs a single-output graph; this one has " +
                        std::to_string(graph.outputs().size()) +
                        " outputs (use backward() with one seed per output)");
  }
  Recording rec = record(graph, bindings);
  GradResult out;
  out.value = rec.value();
  out.forward_firings = rec.firings;
  out.gradient = backward(rec.tape, 1.0, &out.backward);
  return out;
}

// Operator-overloading front end: ordinary C++ arithmetic on Active values
// appends to a TapeRecorder, building the same Tape that record() produces
// from a graph.
class TapeRecorder;

class Active {
 public:
  double value() const { return value_; }
  std::size_t slot() const { return slot_; }

 private:
  friend class TapeRecorder;
  Active(TapeRecorder* owner, std::size_t slot, double value)
      : owner_(owner), slot_(slot), value_(value) {}

  TapeRecorder* owner_;
  std::size_t slot_;
  double value_;

  friend Active apply(OpKind op, std::initializer_list<Active> args);
  friend Active lift(const Active& like, double c);
};

class TapeRecorder {
 public:
  TapeRecorder() = default;
  TapeRecorder(const TapeRecorder&) = delete;
  TapeRecorder& operator=(const TapeRecorder&) = delete;

  Active variable(std::string name, double value) {
    if (!tape_.entries.empty()) {
      throw ContractError("variables must be declared before any operation");
    }
    for (const TapeVariable& v : tape_.variables) {
      if (v.name == name) throw ContractError("duplicate variable '" + name + "'");
    }
    const std::size_t slot = tape_.variables.size();
    tape_.variables.push_back({std::move(name), slot, value});
    return Active(this, slot, value);
  }

  Active constant(double value) { return push(OpKind::constant(value), {}); }

  Tape finish(std::initializer_list<Active> outputs) && {
    if (outputs.size() == 0) throw ContractError("tape needs an output");
    for (const Active& a : outputs) {
      check_owner(a);
      tape_.output_slots.push_back(a.slot());
    }
    ++build_counters().tapes_recorded;
    return std::move(tape_);
  }

 private:
  friend Active apply(OpKind op, std::initializer_list<Active> args);

  void check_owner(const Active& a) const {
    if (a.owner_ != this) throw ContractError("value belongs to another tape");
  }

  Active push(OpKind op, std::initializer_list<Active> args) {
    TapeEntry entry;
    entry.result_slot = tape_.slot_count();
    for (const Active& a : args) {
      check_owner(a);
      entry.input_slots.push_back(a.slot());
      entry.input_values.push_back(a.value());
    }
    try {
      entry.result_value = primitive_value(op, entry.input_values);
    } catch (const DomainError& e) {
      throw DomainError(std::string(e.what()) + " (tape entry " +
                            std::to_string(tape_.entries.size()) + ")",
                        entry.result_slot);
    }
    entry.op = std::move(op);
    Active out(this, entry.result_slot, entry.result_value);
    tape_.entries.push_back(std::move(entry));
    return out;
  }

  Tape tape_;
};

inline Active apply(OpKind op, std::initializer_list<Active> args) {
  return args.begin()->owner_->push(std::move(op), args);
}

inline Active lift(const Active& like, double c) {
  return like.owner_->constant(c);
}

inline Active operator+(const Active& a, const Active& b) { return apply(OpTag::kAdd, {a, b}); }
inline Active operator-(const Active& a, const Active& b) { return apply(OpTag::kSub, {a, b}); }
inline Active operator*(const Active& a, const Active& b) { return apply(OpTag::kMul, {a, b}); }
inline Active operator/(const Active& a, const Active& b) { return apply(OpTag::kDiv, {a, b}); }
inline Active operator-(const Active& a) { return apply(OpTag::kNeg, {a}); }

inline Active operator+(const Active& a, double b) { return a + lift(a, b); }
inline Active operator-(const Active& a, double b) { return a - lift(a, b); }
inline Active operator*(const Active& a, double b) { return a * lift(a, b); }
inline Active operator/(const Active& a, double b) { return a / lift(a, b); }
inline Active operator+(double a, const Active& b) { return lift(b, a) + b; }
inline Active operator-(double a, const Active& b) { return lift(b, a) - b; }
inline Active operator*(double a, const Active& b) { return lift(b, a) * b; }
inline Active operator/(double a, const Active& b) { return lift(b, a) / b; }

inline Active ln(const Active& a) { return apply(OpTag::kLn, {a}); }
inline Active sin(const Active& a) { return apply(OpTag::kSin, {a}); }
inline Active cos(const Active& a) { return apply(OpTag::kCos, {a}); }
inline Active exp(const Active& a) { return apply(OpTag::kExp, {a}); }
inline Active pow(const Active& a, const Active& b) { return apply(OpTag::kPow, {a, b}); }
inline Active pow(const Active& a, double b) { return pow(a, lift(a, b)); }
inline Active pow(double a, const Active& b) { return pow(lift(b, a), b); }

}  // namespace adgraph
