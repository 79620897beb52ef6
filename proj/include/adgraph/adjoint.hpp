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

// Source-transformation reverse mode: the adjoint program is built once as
// ordinary graph nodes appended after the primal ones, so a gradient is a
// single dataflow evaluation of the combined graph with the seed bound.
//
// For a primal node v, its adjoint is the balanced sum over every input
// edge (c, slot) leaving v of
//
//   adjoint(c) * partial(c, slot)
//
// where partial(c, slot) is a small subgraph over primal nodes (Sin's
// partial is a Cos node, Exp's is the Exp node itself, ...). Edges are
// summed in consumer-id order, which fixes the floating-point association.

#pragma once

#include <cstddef>
#include <optional>
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

inline constexpr std::string_view kSeedName = "__seed";

struct AdjointProgram {
  Graph combined;
  // Nodes [0, primal_size) are the primal graph, unchanged.
  std::size_t primal_size = 0;
  std::vector<NodeId> primal_outputs;
  std::vector<NodeId> seed_nodes;  // one per primal output
  std::vector<std::pair<std::string, NodeId>> gradient_outputs;  // var order
  // Construction detail, per primal node. Empty after loading from a file.
  std::vector<std::optional<NodeId>> adjoint_of;
  std::vector<std::size_t> accumulation_leaves;

  NodeId seed_node() const { return seed_nodes.at(0); }

  std::optional<NodeId> gradient_node(std::string_view name) const {
    for (const auto& [n, id] : gradient_outputs) {
      if (n == name) return id;
    }
    return std::nullopt;
  }
};

inline std::string seed_name(std::size_t output_index, std::size_t n_outputs) {
  std::string name(kSeedName);
  if (n_outputs > 1) name += std::to_string(output_index);
  return name;
}

namespace detail {

class AdjointBuilder {
 public:
  explicit AdjointBuilder(const Graph& primal) : primal_(primal) {}

  AdjointProgram run() {
    require_valid(primal_);
    for (const Node& node : primal_.nodes()) b_.add(node.op, node.inputs);

    AdjointProgram out;
    out.primal_size = primal_.size();
    out.primal_outputs.assign(primal_.outputs().begin(), primal_.outputs().end());
    const std::size_t n_out = primal_.outputs().size();
    for (std::size_t k = 0; k < n_out; ++k) {
      out.seed_nodes.push_back(b_.variable(seed_name(k, n_out)));
    }

    const std::size_t n = primal_.size();
    out.adjoint_of.assign(n, std::nullopt);
    out.accumulation_leaves.assign(n, 0);
    for (std::size_t i = n; i-- > 0;) {
      const NodeId v{i};
      std::vector<NodeId> leaves;
      for (std::size_t k = 0; k < n_out; ++k) {
        if (primal_.outputs()[k] == v) leaves.push_back(out.seed_nodes[k]);
      }
      for (const Use& use : primal_.uses(v)) {
        const auto& upstream = out.adjoint_of[use.consumer.index];
        if (!upstream) continue;  // consumer does not reach an output
        leaves.push_back(b_.binary(OpTag::kMul, *upstream,
                                   partial(use.consumer, use.slot)));
      }
      out.accumulation_leaves[i] = leaves.size();
      if (!leaves.empty()) out.adjoint_of[i] = sum(leaves);
    }

    std::vector<NodeId> outputs = out.primal_outputs;
    for (NodeId var : primal_.variables()) {
      NodeId g = out.adjoint_of[var.index] ? *out.adjoint_of[var.index]
                                           : b_.constant(0.0);
      out.gradient_outputs.emplace_back(primal_.node(var).op.name(), g);
      outputs.push_back(g);
    }
    out.combined = std::move(b_).finish(std::move(outputs), Liveness::kAllowDead);
    return out;
  }

 private:
  NodeId one() { return b_.constant(1.0); }

  // d(consumer)/d(input `slot`) as new nodes over primal nodes.
  NodeId partial(NodeId c, std::size_t slot) {
    const Node& node = primal_.node(c);
    const NodeId x0 = node.inputs[0];
    const NodeId x1 = node.inputs.size() > 1 ? node.inputs[1] : x0;
    switch (node.op.tag()) {
      case OpTag::kAdd:
        return one();
      case OpTag::kSub:
        return slot == 0 ? one() : b_.unary(OpTag::kNeg, one());
      case OpTag::kMul:
        return slot == 0 ? x1 : x0;
      case OpTag::kDiv:
        if (slot == 0) return b_.binary(OpTag::kDiv, one(), x1);
        return b_.unary(OpTag::kNeg,
                        b_.binary(OpTag::kDiv, x0, b_.binary(OpTag::kMul, x1, x1)));
      case OpTag::kNeg:
        return b_.unary(OpTag::kNeg, one());
      case OpTag::kLn:
        return b_.binary(OpTag::kDiv, one(), x0);
      case OpTag::kSin:
        return b_.unary(OpTag::kCos, x0);
      case OpTag::kCos:
        return b_.unary(OpTag::kNeg, b_.unary(OpTag::kSin, x0));
      case OpTag::kExp:
        return c;
      case OpTag::kPow:
        if (slot == 0) {
          NodeId reduced = b_.binary(OpTag::kSub, x1, one());
          return b_.binary(OpTag::kMul, x1, b_.binary(OpTag::kPow, x0, reduced));
        }
        return b_.binary(OpTag::kMul, c, b_.unary(OpTag::kLn, x0));
      case OpTag::kConst:
      case OpTag::kVar:
        break;
    }
    throw ContractError("no partial for a leaf node");
  }

  NodeId sum(std::span<const NodeId> terms) {
    if (terms.size() == 1) return terms[0];
    const std::size_t mid = terms.size() / 2;
    NodeId lhs = sum(terms.first(mid));
    NodeId rhs = sum(terms.subspan(mid));
    return b_.binary(OpTag::kAdd, lhs, rhs);
  }

  const Graph& primal_;
  GraphBuilder b_;
};

struct FoldResult {
  Graph graph;
  std::vector<std::optional<NodeId>> remap;  // old id -> new id
};

inline FoldResult fold(const Graph& graph, std::span<const NodeId> keep_alive,
                       Liveness liveness) {
  require_valid(graph);
  const std::size_t n = graph.size();
  std::vector<std::optional<double>> known(n);
  std::vector<Node> folded;
  folded.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Node& node = graph.nodes()[i];
    if (node.op.is_var()) {
      folded.push_back(node);
      continue;
    }
    bool all_known = true;
    double in[2] = {0.0, 0.0};
    for (std::size_t s = 0; s < node.inputs.size(); ++s) {
      const auto& k = known[node.inputs[s].index];
      if (!k) {
        all_known = false;
        break;
      }
      in[s] = *k;
    }
    if (!all_known) {
      folded.push_back(node);
      continue;
    }
    try {
      known[i] = primitive_value(node.op, std::span<const double>(in, node.inputs.size()));
    } catch (const DomainError& e) {
      throw DomainError("constant folding: " + std::string(e.what()) + " (node " +
                            std::to_string(i) + ", " +
                            std::string(tag_name(node.op.tag())) + ")",
                        i);
    }
    folded.push_back(Node{OpKind::constant(*known[i]), {}});
  }

  std::vector<NodeId> outputs(graph.outputs().begin(), graph.outputs().end());
  Graph shape = Graph::from_parts(folded, outputs);
  std::vector<bool> live = live_nodes(shape, keep_alive);

  FoldResult out;
  out.remap.assign(n, std::nullopt);
  std::vector<Node> kept;
  for (std::size_t i = 0; i < n; ++i) {
    if (!live[i]) continue;
    Node node = std::move(folded[i]);
    for (NodeId& in : node.inputs) in = *out.remap[in.index];
    out.remap[i] = NodeId{kept.size()};
    kept.push_back(std::move(node));
  }
  for (NodeId& o : outputs) o = *out.remap[o.index];
  out.graph = Graph::from_parts(std::move(kept), std::move(outputs), liveness);
  require_valid(out.graph);
  return out;
}

}  // namespace detail

inline AdjointProgram build_adjoint(const Graph& graph) {
  AdjointProgram prog = detail::AdjointBuilder(graph).run();
  ++build_counters().adjoints_built;
  return prog;
}

struct TwoPhaseResult {
  double value = 0.0;
  Gradient gradient;
  Valuation valuation;  // over the combined graph
};

// Evaluates primal and adjoint nodes in one dataflow run. Every seed node is
// bound to the matching entry of `seeds`.
inline TwoPhaseResult two_phase_grad(const AdjointProgram& prog,
                                     const Bindings& bindings,
                                     std::span<const double> seeds) {
  if (seeds.size() != prog.seed_nodes.size()) {
    throw ContractError("expected " + std::to_string(prog.seed_nodes.size()) +
                        " seeds, got " + std::to_string(seeds.size()));
  }
  Bindings full = bindings;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    full[prog.combined.node(prog.seed_nodes[k]).op.name()] = seeds[k];
  }
  TwoPhaseResult out;
  out.valuation = evaluate(prog.combined, full);
  out.value = out.valuation.value(prog.primal_outputs.at(0));
  for (const auto& [name, id] : prog.gradient_outputs) {
    out.gradient[name] = out.valuation.value(id);
  }
  return out;
}

inline TwoPhaseResult two_phase_grad(const AdjointProgram& prog,
                                     const Bindings& bindings,
                                     double seed = 1.0) {
  const double seeds[] = {seed};
  return two_phase_grad(prog, bindings, seeds);
}

// Replaces every node whose inputs are all constant by a Const of its value
// and drops nodes no output depends on. Output values are bit-identical to
// the original graph's for every binding.
inline Graph constant_fold(const Graph& graph) {
  return detail::fold(graph, {}, Liveness::kRequireReachable).graph;
}

// Folds the combined graph. Seed variables survive even when no gradient
// depends on them.
inline AdjointProgram constant_fold(const AdjointProgram& prog) {
  detail::FoldResult f =
      detail::fold(prog.combined, prog.seed_nodes, Liveness::kAllowDead);
  AdjointProgram out;
  out.combined = std::move(f.graph);
  for (std::size_t i = 0; i < prog.primal_size; ++i) {
    if (f.remap[i]) ++out.primal_size;
  }
  for (NodeId o : prog.primal_outputs) out.primal_outputs.push_back(*f.remap[o.index]);
  for (NodeId s : prog.seed_nodes) out.seed_nodes.push_back(*f.remap[s.index]);
  for (const auto& [name, id] : prog.gradient_outputs) {
    out.gradient_outputs.emplace_back(name, *f.remap[id.index]);
  }
  out.adjoint_of.reserve(prog.adjoint_of.size());
  for (const auto& a : prog.adjoint_of) {
    out.adjoint_of.push_back(a ? f.remap[a->index] : std::nullopt);
  }
  out.accumulation_leaves = prog.accumulation_leaves;
  return out;
}

}  // namespace adgraph
