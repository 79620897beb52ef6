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

// Human-readable views of a computation: evaluation-trace tables in the
// primal/adjoint two-section layout, and Graphviz DOT export.
//
// Display names follow the usual evaluation-trace convention. With k input
// variables, inputs are v-(k-1) .. v0 in declaration order and operation
// nodes are v1, v2, ... in execution order. Constants are shown inline by
// value. Internally every node keeps its dense non-negative id.

#pragma once

#include <cstddef>
#include <cstdio>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "adgraph/dataflow.hpp"
#include "adgraph/errors.hpp"
#include "adgraph/graph.hpp"
#include "adgraph/parser.hpp"
#include "adgraph/tape.hpp"

namespace adgraph {

// decimals < 0 selects the shortest round-trip form.
inline std::string format_number(double v, int decimals) {
  if (decimals < 0) return shortest(v);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

// Per-node display name: v-i / v0 for variables, v1.. for operations in id
// order, the literal for constants.
inline std::vector<std::string> display_names(const Graph& graph) {
  std::vector<std::string> names(graph.size());
  const long k = static_cast<long>(graph.variables().size());
  long var_index = 0;
  long op_index = 0;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const OpKind& op = graph.nodes()[i].op;
    if (op.is_var()) {
      names[i] = "v" + std::to_string(var_index++ - (k - 1));
    } else if (op.is_const()) {
      names[i] = shortest(op.literal());
    } else {
      names[i] = "v" + std::to_string(++op_index);
    }
  }
  return names;
}

// "x1" -> "x'1", "x" -> "x'".
inline std::string primed(std::string_view name) {
  std::size_t cut = name.size();
  while (cut > 0 && name[cut - 1] >= '0' && name[cut - 1] <= '9') --cut;
  if (cut == 0) cut = name.size();
  return std::string(name.substr(0, cut)) + "'" + std::string(name.substr(cut));
}

struct TraceRow {
  std::string name;
  std::string expression;
  double value = 0.0;
};

struct TraceTable {
  std::vector<TraceRow> primal;   // execution order
  std::vector<TraceRow> adjoint;  // reverse execution order
};

namespace detail {

inline std::string wrap_operand(const std::string& s) {
  return s.starts_with('-') ? "(" + s + ")" : s;
}

inline std::string primal_form(const OpKind& op, const std::string& a,
                               const std::string& b) {
  switch (op.tag()) {
    case OpTag::kAdd: return a + " + " + b;
    case OpTag::kSub: return a + " - " + b;
    case OpTag::kMul: return a + " * " + b;
    case OpTag::kDiv: return a + " / " + b;
    case OpTag::kPow: return a + "^" + b;
    case OpTag::kNeg: return "-" + a;
    case OpTag::kLn:
    case OpTag::kSin:
    case OpTag::kCos:
    case OpTag::kExp:
      return std::string(tag_symbol(op.tag())) + "(" + a + ")";
    case OpTag::kConst:
      return shortest(op.literal());
    case OpTag::kVar:
      return op.name();
  }
  return "?";
}

// u * d(op)/d(input `slot`), written over display names.
inline std::string adjoint_form(const OpKind& op, std::size_t slot,
                                const std::string& u, const std::string& a,
                                const std::string& b) {
  switch (op.tag()) {
    case OpTag::kAdd: return u + " * 1";
    case OpTag::kSub: return slot == 0 ? u + " * 1" : u + " * (-1)";
    case OpTag::kMul: return u + " * " + (slot == 0 ? b : a);
    case OpTag::kDiv:
      return slot == 0 ? u + " / " + b : u + " * (-" + a + " / " + b + "^2)";
    case OpTag::kNeg: return u + " * (-1)";
    case OpTag::kLn: return u + " / " + a;
    case OpTag::kSin: return u + " * cos(" + a + ")";
    case OpTag::kCos: return u + " * (-sin(" + a + "))";
    case OpTag::kExp: return u + " * exp(" + a + ")";
    case OpTag::kPow:
      return slot == 0 ? u + " * " + b + " * " + a + "^(" + b + " - 1)"
                       : u + " * " + a + "^" + b + " * ln(" + a + ")";
    case OpTag::kConst:
    case OpTag::kVar:
      break;
  }
  return "?";
}

}  // namespace detail

// Builds the reverse-mode trace of a single-output lowered program: one
// recorded forward run, one reverse sweep with seed 1.
inline TraceTable trace_table(const LoweredProgram& lowered,
                              const Bindings& bindings) {
  const Graph& g = lowered.graph;
  if (g.outputs().size() != 1) {
    throw ContractError("trace needs a single-output program");
  }
  const std::vector<std::string> shown = display_names(g);
  Recording rec = record(g, bindings);
  const Tape& tape = rec.tape;

  std::vector<NodeId> node_of_slot(tape.slot_count());
  for (std::size_t i = 0; i < g.size(); ++i) {
    node_of_slot[rec.node_slots[i]] = NodeId{i};
  }
  auto name_of_slot = [&](std::size_t slot) {
    return detail::wrap_operand(shown[node_of_slot[slot].index]);
  };
  auto adj_name = [&](std::size_t slot) {
    const std::string& s = shown[node_of_slot[slot].index];
    return "v'" + s.substr(1);
  };

  TraceTable table;
  for (const TapeVariable& v : tape.variables) {
    table.primal.push_back({shown[node_of_slot[v.slot].index], v.name, v.value});
  }
  for (const TapeEntry& e : tape.entries) {
    if (e.op.is_const()) continue;
    std::string a = name_of_slot(e.input_slots[0]);
    std::string b = e.input_slots.size() > 1 ? name_of_slot(e.input_slots[1]) : "";
    table.primal.push_back({shown[node_of_slot[e.result_slot].index],
                            detail::primal_form(e.op, a, b), e.result_value});
  }

  const std::string& out_name = lowered.output_names.at(0);
  const std::size_t out_slot = tape.output_slots[0];
  const NodeId out_node = node_of_slot[out_slot];
  const bool out_is_op = !g.node(out_node).op.is_var() && !g.node(out_node).op.is_const();
  if (!g.node(out_node).op.is_var()) {
    table.primal.push_back({out_name, shown[out_node.index], tape.slot_value(out_slot)});
  }
  if (out_is_op) {
    table.adjoint.push_back({adj_name(out_slot), out_name + "'", 1.0});
  }

  std::set<std::size_t> written = {out_slot};
  auto on_accumulate = [&](std::size_t entry_index, std::size_t i, double,
                           double updated) {
    const TapeEntry& e = tape.entries[entry_index];
    const std::size_t target = e.input_slots[i];
    if (g.node(node_of_slot[target]).op.is_const()) return;
    std::string a = name_of_slot(e.input_slots[0]);
    std::string b = e.input_slots.size() > 1 ? name_of_slot(e.input_slots[1]) : "";
    std::string expr = detail::adjoint_form(e.op, i, adj_name(e.result_slot), a, b);
    if (!written.insert(target).second) expr = adj_name(target) + " + " + expr;
    table.adjoint.push_back({adj_name(target), std::move(expr), updated});
  };
  const double seed[] = {1.0};
  std::vector<double> adjoint = backward_adjoints(tape, seed, nullptr, on_accumulate);

  for (const TapeVariable& v : tape.variables) {
    table.adjoint.push_back({primed(v.name), adj_name(v.slot), adjoint[v.slot]});
  }
  return table;
}

inline std::string format_trace(const TraceTable& table, int decimals = 3) {
  std::string out = "Forward primal trace\n";
  for (const TraceRow& r : table.primal) {
    out += r.name + " = " + r.expression + " = " + format_number(r.value, decimals) + "\n";
  }
  out += "\nReverse adjoint trace\n";
  for (const TraceRow& r : table.adjoint) {
    out += r.name + " = " + r.expression + " = " + format_number(r.value, decimals) + "\n";
  }
  return out;
}

inline std::string render_trace(std::string_view source, const Bindings& bindings,
                                int decimals = 3) {
  return format_trace(trace_table(compile_source(source), bindings), decimals);
}

// Graphviz digraph; edges point from producer to consumer. Output is a
// pure function of the graph and names.
inline std::string to_dot(const Graph& graph, const NameMap& names = {}) {
  require_valid(graph);
  const std::vector<std::string> shown = display_names(graph);
  std::set<std::size_t> is_output;
  for (NodeId o : graph.outputs()) is_output.insert(o.index);

  std::string out = "digraph adgraph {\n";
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const OpKind& op = graph.nodes()[i].op;
    std::string label;
    if (op.is_var()) {
      label = shown[i] + "\\n" + op.name();
    } else if (op.is_const()) {
      label = shown[i];
    } else {
      label = shown[i] + "\\n" + std::string(tag_symbol(op.tag()));
      if (auto n = names.label(NodeId{i})) label += " (" + *n + ")";
    }
    out += "  n" + std::to_string(i) + " [label=\"" + label + "\"";
    if (op.is_var()) out += ", shape=box";
    if (is_output.contains(i)) out += ", peripheries=2";
    out += "];\n";
  }
  for (std::size_t i = 0; i < graph.size(); ++i) {
    for (NodeId in : graph.nodes()[i].inputs) {
      out += "  n" + std::to_string(in.index) + " -> n" + std::to_string(i) + ";\n";
    }
  }
  out += "}\n";
  return out;
}

}  // namespace adgraph
