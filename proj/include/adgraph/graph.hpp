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

// Computation-graph data model: primitive operation kinds, nodes, and the
// immutable Graph that every evaluator and transformation consumes.
//
// Node ids are dense and an input edge always points at a strictly smaller
// id, so a Graph is topologically ordered (and therefore acyclic) by
// construction.

#pragma once

#include <bit>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adgraph/errors.hpp"

namespace adgraph {

// Number formatting shared by every text emitter: the shortest decimal that
// reads back to the same double.
inline std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

enum class OpTag : std::uint8_t {
  kConst,
  kVar,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kLn,
  kSin,
  kCos,
  kExp,
  kPow,
};

inline constexpr OpTag kAllOpTags[] = {
    OpTag::kConst, OpTag::kVar, OpTag::kAdd, OpTag::kSub,
    OpTag::kMul,   OpTag::kDiv, OpTag::kNeg, OpTag::kLn,
    OpTag::kSin,   OpTag::kCos, OpTag::kExp, OpTag::kPow,
};

constexpr std::size_t arity(OpTag tag) {
  switch (tag) {
    case OpTag::kConst:
    case OpTag::kVar:
      return 0;
    case OpTag::kNeg:
    case OpTag::kLn:
    case OpTag::kSin:
    case OpTag::kCos:
    case OpTag::kExp:
      return 1;
    case OpTag::kAdd:
    case OpTag::kSub:
    case OpTag::kMul:
    case OpTag::kDiv:
    case OpTag::kPow:
      return 2;
  }
  return 0;
}

// Upper-case tag used by the graph file format.
constexpr std::string_view tag_name(OpTag tag) {
  switch (tag) {
    case OpTag::kConst: return "CONST";
    case OpTag::kVar: return "VAR";
    case OpTag::kAdd: return "ADD";
    case OpTag::kSub: return "SUB";
    case OpTag::kMul: return "MUL";
    case OpTag::kDiv: return "DIV";
    case OpTag::kNeg: return "NEG";
    case OpTag::kLn: return "LN";
    case OpTag::kSin: return "SIN";
    case OpTag::kCos: return "COS";
    case OpTag::kExp: return "EXP";
    case OpTag::kPow: return "POW";
  }
  return "?";
}

inline std::optional<OpTag> tag_from_name(std::string_view name) {
  for (OpTag tag : kAllOpTags) {
    if (tag_name(tag) == name) return tag;
  }
  return std::nullopt;
}

// Short mathematical symbol, used for DOT labels and traces.
constexpr std::string_view tag_symbol(OpTag tag) {
  switch (tag) {
    case OpTag::kConst: return "const";
    case OpTag::kVar: return "var";
    case OpTag::kAdd: return "+";
    case OpTag::kSub: return "-";
    case OpTag::kMul: return "*";
    case OpTag::kDiv: return "/";
    case OpTag::kNeg: return "neg";
    case OpTag::kLn: return "ln";
    case OpTag::kSin: return "sin";
    case OpTag::kCos: return "cos";
    case OpTag::kExp: return "exp";
    case OpTag::kPow: return "^";
  }
  return "?";
}

// An operation kind together with its payload: the literal of a Const or
// the name of a Var. Other tags carry no payload.
class OpKind {
 public:
  // Payload-free operation. Const and Var must go through the factories.
  OpKind(OpTag tag) : tag_(tag) {  // NOLINT(google-explicit-constructor)
    if (tag == OpTag::kConst || tag == OpTag::kVar) {
      throw ContractError("Const and Var op kinds need a payload");
    }
  }

  static OpKind constant(double literal) {
    OpKind op;
    op.tag_ = OpTag::kConst;
    op.literal_ = literal;
    return op;
  }

  static OpKind var(std::string name) {
    OpKind op;
    op.tag_ = OpTag::kVar;
    op.name_ = std::move(name);
    return op;
  }

  OpTag tag() const { return tag_; }
  std::size_t arity() const { return adgraph::arity(tag_); }
  double literal() const { return literal_; }
  const std::string& name() const { return name_; }

  bool is_const() const { return tag_ == OpTag::kConst; }
  bool is_var() const { return tag_ == OpTag::kVar; }

  // Literals compare by bit pattern so that 0.0 and -0.0 stay distinct.
  friend bool operator==(const OpKind& a, const OpKind& b) {
    return a.tag_ == b.tag_ &&
           std::bit_cast<std::uint64_t>(a.literal_) ==
               std::bit_cast<std::uint64_t>(b.literal_) &&
           a.name_ == b.name_;
  }

 private:
  OpKind() = default;

  OpTag tag_ = OpTag::kAdd;
  double literal_ = 0.0;
  std::string name_;
};

struct NodeId {
  std::size_t index = 0;

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

struct Node {
  OpKind op;
  std::vector<NodeId> inputs;

  friend bool operator==(const Node&, const Node&) = default;
};

// One input edge seen from the producer side.
struct Use {
  NodeId consumer;
  std::size_t slot = 0;

  friend constexpr bool operator==(Use, Use) = default;
};

using Bindings = std::map<std::string, double, std::less<>>;
using Gradient = std::map<std::string, double, std::less<>>;

struct Violation {
  std::optional<NodeId> node;
  std::string message;
};

enum class Liveness {
  kRequireReachable,  // every node must feed some output
  kAllowDead,         // dead nodes tolerated (pre-optimization graphs)
};

class Graph {
 public:
  Graph() = default;

  // Assembles a graph without checking it. Pair with validate(); all
  // evaluators assume a graph that validates.
  static Graph from_parts(std::vector<Node> nodes, std::vector<NodeId> outputs,
                          Liveness liveness = Liveness::kAllowDead) {
    Graph g;
    g.nodes_ = std::move(nodes);
    g.outputs_ = std::move(outputs);
    g.liveness_ = liveness;
    g.index();
    return g;
  }

  std::size_t size() const { return nodes_.size(); }
  std::span<const Node> nodes() const { return nodes_; }
  const Node& node(NodeId id) const { return nodes_.at(id.index); }
  std::span<const NodeId> outputs() const { return outputs_; }
  Liveness liveness() const { return liveness_; }

  // Edges leaving `id`, ordered by consumer id then input slot.
  std::span<const Use> uses(NodeId id) const { return uses_.at(id.index); }

  // Var nodes in id order (declaration order for lowered programs).
  std::span<const NodeId> variables() const { return variables_; }

  std::optional<NodeId> find_variable(std::string_view name) const {
    for (NodeId id : variables_) {
      if (nodes_[id.index].op.name() == name) return id;
    }
    return std::nullopt;
  }

  // Total number of input edges.
  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const Node& node : nodes_) n += node.inputs.size();
    return n;
  }

  // Structural equality: same nodes in the same order, same outputs.
  friend bool operator==(const Graph& a, const Graph& b) {
    return a.nodes_ == b.nodes_ && a.outputs_ == b.outputs_;
  }

 private:
  void index() {
    uses_.assign(nodes_.size(), {});
    variables_.clear();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node& node = nodes_[i];
      if (node.op.is_var()) variables_.push_back(NodeId{i});
      for (std::size_t slot = 0; slot < node.inputs.size(); ++slot) {
        std::size_t src = node.inputs[slot].index;
        if (src < nodes_.size()) uses_[src].push_back(Use{NodeId{i}, slot});
      }
    }
  }

  std::vector<Node> nodes_;
  std::vector<NodeId> outputs_;
  Liveness liveness_ = Liveness::kAllowDead;
  std::vector<std::vector<Use>> uses_;
  std::vector<NodeId> variables_;
};

// Nodes from which some output is reachable.
inline std::vector<bool> live_nodes(const Graph& graph,
                                    std::span<const NodeId> extra_roots = {}) {
  std::vector<bool> live(graph.size(), false);
  auto mark = [&](NodeId id) {
    if (id.index < live.size()) live[id.index] = true;
  };
  for (NodeId out : graph.outputs()) mark(out);
  for (NodeId root : extra_roots) mark(root);
  for (std::size_t i = graph.size(); i-- > 0;) {
    if (!live[i]) continue;
    for (NodeId in : graph.nodes()[i].inputs) {
      if (in.index < i) live[in.index] = true;
    }
  }
  return live;
}

// Reports every structural invariant violation. An empty result means the
// graph is well formed.
inline std::vector<Violation> validate(const Graph& graph) {
  std::vector<Violation> out;
  std::set<std::string, std::less<>> var_names;
  const std::size_t n = graph.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Node& node = graph.nodes()[i];
    const NodeId id{i};
    if (node.inputs.size() != node.op.arity()) {
      out.push_back({id, std::string(tag_name(node.op.tag())) + " expects " +
                             std::to_string(node.op.arity()) +
                             " inputs, has " +
                             std::to_string(node.inputs.size())});
    }
    for (NodeId in : node.inputs) {
      if (in.index >= n) {
        out.push_back({id, "dangling input " + std::to_string(in.index)});
      } else if (in.index >= i) {
        out.push_back({id, "non-topological edge from " +
                               std::to_string(in.index)});
      }
    }
    if (node.op.is_var() && !var_names.insert(node.op.name()).second) {
      out.push_back({id, "duplicate variable '" + node.op.name() + "'"});
    }
    if (node.op.is_const() && !std::isfinite(node.op.literal())) {
      out.push_back({id, "non-finite constant"});
    }
  }
  if (graph.outputs().empty()) out.push_back({std::nullopt, "no outputs"});
  bool outputs_in_range = true;
  for (NodeId o : graph.outputs()) {
    if (o.index >= n) {
      outputs_in_range = false;
      out.push_back({std::nullopt, "dangling output " + std::to_string(o.index)});
    }
  }
  if (graph.liveness() == Liveness::kRequireReachable && outputs_in_range &&
      out.empty()) {
    std::vector<bool> live = live_nodes(graph);
    for (std::size_t i = 0; i < n; ++i) {
      if (!live[i]) out.push_back({NodeId{i}, "unreachable node"});
    }
  }
  return out;
}

inline std::string describe(std::span<const Violation> violations) {
  std::string text;
  for (const Violation& v : violations) {
    if (!text.empty()) text += "; ";
    if (v.node) text += "node " + std::to_string(v.node->index) + ": ";
    text += v.message;
  }
  return text;
}

inline void require_valid(const Graph& graph) {
  std::vector<Violation> violations = validate(graph);
  if (!violations.empty()) throw GraphError(describe(violations));
}

// Incremental construction. Each add() checks arity and that every input
// already exists, so the result is topological by construction.
class GraphBuilder {
 public:
  NodeId add(OpKind op, std::vector<NodeId> inputs = {}) {
    if (inputs.size() != op.arity()) {
      throw GraphError(std::string(tag_name(op.tag())) + " expects " +
                       std::to_string(op.arity()) + " inputs, got " +
                       std::to_string(inputs.size()));
    }
    for (NodeId in : inputs) {
      if (in.index >= nodes_.size()) {
        throw GraphError("dangling input " + std::to_string(in.index));
      }
    }
    if (op.is_var()) {
      for (const Node& node : nodes_) {
        if (node.op.is_var() && node.op.name() == op.name()) {
          throw GraphError("duplicate variable '" + op.name() + "'");
        }
      }
    }
    if (op.is_const() && !std::isfinite(op.literal())) {
      throw GraphError("non-finite constant");
    }
    nodes_.push_back(Node{std::move(op), std::move(inputs)});
    return NodeId{nodes_.size() - 1};
  }

  NodeId constant(double literal) { return add(OpKind::constant(literal)); }
  NodeId variable(std::string name) { return add(OpKind::var(std::move(name))); }
  NodeId unary(OpTag tag, NodeId a) { return add(tag, {a}); }
  NodeId binary(OpTag tag, NodeId a, NodeId b) { return add(tag, {a, b}); }

  std::size_t size() const { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_.at(id.index); }

  Graph finish(std::vector<NodeId> outputs,
               Liveness liveness = Liveness::kRequireReachable) && {
    Graph g = Graph::from_parts(std::move(nodes_), std::move(outputs), liveness);
    require_valid(g);
    return g;
  }

 private:
  std::vector<Node> nodes_;
};

// Same nodes, outputs narrowed to a single entry. Nodes that only fed the
// dropped outputs stay in place as dead nodes.
inline Graph select_output(const Graph& graph, std::size_t output_index) {
  if (output_index >= graph.outputs().size()) {
    throw ContractError("output index " + std::to_string(output_index) +
                        " out of range");
  }
  std::vector<Node> nodes(graph.nodes().begin(), graph.nodes().end());
  return Graph::from_parts(std::move(nodes),
                           {graph.outputs()[output_index]},
                           Liveness::kAllowDead);
}

}  // namespace adgraph

template <>
struct std::hash<adgraph::NodeId> {
  std::size_t operator()(adgraph::NodeId id) const noexcept {
    return std::hash<std::size_t>{}(id.index);
  }
};
