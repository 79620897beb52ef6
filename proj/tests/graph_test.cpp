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

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "adgraph/graph.hpp"
#include "adgraph/primitives.hpp"
#include "fixtures.hpp"

namespace adgraph {
namespace {

double value(OpTag tag, std::vector<double> in) { return primitive_value(tag, in); }
double partial(OpTag tag, std::vector<double> in, std::size_t wrt) {
  return primitive_partial(tag, in, wrt);
}

TEST(GraphBuilder, FirstNodeIsZero) {
  GraphBuilder b;
  EXPECT_EQ(b.variable("x1"), NodeId{0});
}

TEST(GraphBuilder, GoldenHasSevenNodes) {
  Graph g = testing::golden_graph();
  ASSERT_EQ(g.size(), 7u);
  int vars = 0;
  std::multiset<OpTag> ops;
  for (const Node& n : g.nodes()) {
    if (n.op.is_var()) ++vars;
    else ops.insert(n.op.tag());
  }
  EXPECT_EQ(vars, 2);
  EXPECT_EQ(ops, (std::multiset<OpTag>{OpTag::kLn, OpTag::kMul, OpTag::kSin,
                                       OpTag::kAdd, OpTag::kSub}));
}

TEST(GraphBuilder, ArityMismatch) {
  GraphBuilder b;
  NodeId x = b.variable("x");
  EXPECT_THROW(b.add(OpTag::kAdd, {x}), GraphError);
  EXPECT_THROW(b.add(OpKind::var("y"), {x}), GraphError);
}

TEST(GraphBuilder, DanglingInput) {
  GraphBuilder b;
  b.variable("x");
  EXPECT_THROW(b.add(OpTag::kSin, {NodeId{5}}), GraphError);
}

TEST(GraphBuilder, FreshIdExceedsInputs) {
  GraphBuilder b;
  NodeId x = b.variable("x");
  NodeId c = b.constant(2.0);
  NodeId m = b.binary(OpTag::kMul, x, c);
  EXPECT_GT(m, x);
  EXPECT_GT(m, c);
}

TEST(GraphBuilder, RejectsDuplicateVariable) {
  GraphBuilder b;
  b.variable("x");
  EXPECT_THROW(b.variable("x"), GraphError);
}

TEST(GraphBuilder, StrictFinishRejectsDeadNodes) {
  GraphBuilder b;
  NodeId x = b.variable("x");
  b.unary(OpTag::kSin, x);
  NodeId c = b.unary(OpTag::kCos, x);
  GraphBuilder b2 = b;
  EXPECT_THROW(std::move(b).finish({c}), GraphError);
  EXPECT_NO_THROW(std::move(b2).finish({c}, Liveness::kAllowDead));
}

TEST(Validate, GoldenIsOk) { EXPECT_TRUE(validate(testing::golden_graph()).empty()); }

TEST(Validate, NonTopologicalEdge) {
  Graph g = Graph::from_parts(
      {Node{OpKind::var("x"), {}}, Node{OpTag::kSin, {NodeId{2}}},
       Node{OpTag::kCos, {NodeId{0}}}},
      {NodeId{1}});
  auto v = validate(g);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].message.find("non-topological edge"), std::string::npos);
  EXPECT_EQ(v[0].node, NodeId{1});
}

TEST(Validate, NoOutputs) {
  Graph g = Graph::from_parts({Node{OpKind::var("x"), {}}}, {});
  auto v = validate(g);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].message, "no outputs");
}

TEST(Validate, ReportsEveryViolation) {
  Graph g = Graph::from_parts(
      {Node{OpKind::var("x"), {}}, Node{OpTag::kAdd, {NodeId{0}}},
       Node{OpTag::kSin, {NodeId{9}}}, Node{OpKind::var("x"), {}}},
      {NodeId{7}});
  auto v = validate(g);
  // arity, dangling input, duplicate variable, dangling output
  EXPECT_EQ(v.size(), 4u) << describe(v);
}

TEST(Validate, NeverReportsCycleForBuiltGraphs) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Graph g = testing::bounded_random_graph(60, seed);
    EXPECT_TRUE(validate(g).empty()) << describe(validate(g));
  }
}

TEST(PrimitiveValue, TraceRows) {
  EXPECT_NEAR(value(OpTag::kLn, {2.0}), 0.693, 5e-4);
  EXPECT_EQ(value(OpTag::kMul, {2.0, 5.0}), 10.0);
  EXPECT_EQ(value(OpTag::kAdd, {0.0, 0.0}), 0.0);
  EXPECT_NEAR(value(OpTag::kSin, {5.0}), -0.959, 5e-4);
  EXPECT_EQ(primitive_value(OpKind::constant(4.5), {}), 4.5);
}

TEST(PrimitiveValue, InputOrderIsSemantic) {
  EXPECT_EQ(value(OpTag::kSub, {5.0, 3.0}), 2.0);
  EXPECT_EQ(value(OpTag::kDiv, {6.0, 3.0}), 2.0);
  EXPECT_EQ(value(OpTag::kPow, {2.0, 3.0}), 8.0);
}

TEST(PrimitiveValue, DomainErrors) {
  EXPECT_THROW(value(OpTag::kLn, {0.0}), DomainError);
  EXPECT_THROW(value(OpTag::kLn, {-1.0}), DomainError);
  EXPECT_THROW(value(OpTag::kDiv, {1.0, 0.0}), DomainError);
  EXPECT_THROW(value(OpTag::kPow, {-2.0, 0.5}), DomainError);
  EXPECT_THROW(value(OpTag::kPow, {0.0, -1.0}), DomainError);
  EXPECT_THROW(value(OpTag::kExp, {1000.0}), DomainError);
  EXPECT_EQ(value(OpTag::kPow, {-2.0, 3.0}), -8.0);
}

TEST(PrimitiveValue, WrongInputCount) {
  EXPECT_THROW(value(OpTag::kAdd, {1.0}), ContractError);
  EXPECT_THROW(primitive_value(OpKind::var("x"), {}), ContractError);
}

TEST(PrimitivePartial, TraceRows) {
  EXPECT_EQ(partial(OpTag::kMul, {2.0, 5.0}, 0), 5.0);
  EXPECT_EQ(partial(OpTag::kSub, {10.693, -0.959}, 1), -1.0);
  EXPECT_EQ(partial(OpTag::kLn, {2.0}, 0), 0.5);
}

TEST(PrimitivePartial, DomainErrors) {
  EXPECT_THROW(partial(OpTag::kLn, {0.0}, 0), DomainError);
  EXPECT_THROW(partial(OpTag::kDiv, {1.0, 0.0}, 1), DomainError);
  EXPECT_THROW(partial(OpTag::kPow, {-2.0, 2.0}, 1), DomainError);
  EXPECT_THROW(partial(OpTag::kPow, {0.0, 2.0}, 1), DomainError);
  EXPECT_EQ(partial(OpTag::kPow, {-2.0, 2.0}, 0), -4.0);
}

TEST(PrimitivePartial, ExactlyArityManyValidIndices) {
  for (OpTag tag : kAllOpTags) {
    if (tag == OpTag::kVar) continue;
    OpKind op = tag == OpTag::kConst ? OpKind::constant(1.0) : OpKind(tag);
    std::vector<double> in(op.arity(), 1.5);
    for (std::size_t wrt = 0; wrt < op.arity(); ++wrt) {
      EXPECT_NO_THROW(primitive_partial(op, in, wrt)) << tag_name(tag);
    }
    EXPECT_THROW(primitive_partial(op, in, op.arity()), ContractError) << tag_name(tag);
  }
}

// Central differences of primitive_value, h = 1e-6, at random points in
// [-3, 3] that stay clear of each domain boundary.
TEST(PrimitivePartial, MatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const double h = 1e-6;
  for (OpTag tag : kAllOpTags) {
    if (tag == OpTag::kConst || tag == OpTag::kVar) continue;
    OpKind op(tag);
    int checked = 0;
    while (checked < 200) {
      std::vector<double> in(op.arity());
      for (double& v : in) v = u(rng);
      if (tag == OpTag::kLn && in[0] < 0.1) continue;
      if (tag == OpTag::kDiv && std::abs(in[1]) < 0.1) continue;
      if (tag == OpTag::kPow && in[0] < 0.1) continue;
      for (std::size_t wrt = 0; wrt < op.arity(); ++wrt) {
        std::vector<double> p = in, m = in;
        p[wrt] += h;
        m[wrt] -= h;
        const double fd = (primitive_value(op, p) - primitive_value(op, m)) / (2 * h);
        const double an = primitive_partial(op, in, wrt);
        EXPECT_TRUE(testing::relative_close(an, fd, 1e-5))
            << tag_name(tag) << " wrt " << wrt << ": " << an << " vs " << fd;
      }
      ++checked;
    }
  }
}

TEST(OpKind, LiteralEqualityIsBitwise) {
  EXPECT_EQ(OpKind::constant(1.0), OpKind::constant(1.0));
  EXPECT_FALSE(OpKind::constant(0.0) == OpKind::constant(-0.0));
  EXPECT_THROW(OpKind(OpTag::kConst), ContractError);
}

TEST(SelectOutput, KeepsNodesNarrowsOutputs) {
  GraphBuilder b;
  NodeId x = b.variable("x");
  NodeId s = b.unary(OpTag::kSin, x);
  NodeId c = b.unary(OpTag::kCos, x);
  Graph g = std::move(b).finish({s, c});
  Graph one = select_output(g, 1);
  EXPECT_EQ(one.size(), 3u);
  ASSERT_EQ(one.outputs().size(), 1u);
  EXPECT_EQ(one.outputs()[0], c);
  EXPECT_THROW(select_output(g, 2), ContractError);
}

}  // namespace
}  // namespace adgraph
