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

#include <cstring>
#include <random>

#include <gtest/gtest.h>

#include "adgraph/dataflow.hpp"
#include "adgraph/parser.hpp"
#include "fixtures.hpp"

namespace adgraph {
namespace {

const Bindings kAt25 = {{"x1", 2.0}, {"x2", 5.0}};

// Picks uniformly from the ready set.
struct RandomSchedule {
  std::mt19937_64* rng;
  NodeId operator()(const ReadySet& ready) const {
    std::uniform_int_distribution<std::size_t> pick(0, ready.size() - 1);
    auto it = ready.begin();
    std::advance(it, pick(*rng));
    return *it;
  }
};

bool bit_identical(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

TEST(ReadySet, FollowsDataDependencies) {
  Graph g = testing::golden_graph();
  EvalState state(g);
  EXPECT_EQ(ready_set(state), (ReadySet{NodeId{0}, NodeId{1}}));
  state.fire(NodeId{0}, kAt25);
  // ln(x1) can fire; x1*x2 still waits on x2.
  EXPECT_EQ(ready_set(state), (ReadySet{NodeId{1}, NodeId{2}}));
  EXPECT_EQ(state.pending(NodeId{3}), 1u);
  state.fire(NodeId{1}, kAt25);
  EXPECT_EQ(ready_set(state), (ReadySet{NodeId{2}, NodeId{3}, NodeId{4}}));
  while (!state.done()) state.fire(*state.ready().begin(), kAt25);
  EXPECT_TRUE(ready_set(state).empty());
  EXPECT_EQ(state.fired(), g.size());
}

TEST(ReadySet, FiringUnreadyNodeIsContractError) {
  Graph g = testing::golden_graph();
  EvalState state(g);
  EXPECT_THROW(state.fire(NodeId{6}, kAt25), ContractError);
  state.fire(NodeId{0}, kAt25);
  EXPECT_THROW(state.fire(NodeId{0}, kAt25), ContractError);
}

TEST(Evaluate, Golden) {
  Valuation v = evaluate(testing::golden_graph(), kAt25);
  ASSERT_EQ(v.outputs.size(), 1u);
  EXPECT_NEAR(v.outputs[0], 11.652, 1e-3);
  EXPECT_EQ(v.outputs[0], testing::golden(2.0, 5.0));
  EXPECT_EQ(v.firings(), 7u);
  EXPECT_NEAR(v.value(NodeId{2}), 0.693, 1e-3);
  EXPECT_NEAR(v.value(NodeId{4}), -0.959, 1e-3);
}

TEST(Evaluate, Identity) {
  Valuation v = evaluate(compile_source("x").graph, {{"x", 7.0}});
  EXPECT_EQ(v.outputs, (std::vector<double>{7.0}));
  EXPECT_EQ(v.firings(), 1u);
}

TEST(Evaluate, ThreeOutputs) {
  Valuation v = evaluate(compile_source(testing::kThreeOutputs).graph,
                         {{"A", 2.0}, {"B", 3.0}, {"C", 1.0}});
  EXPECT_EQ(v.outputs, (std::vector<double>{7.0, 11.0, 25.0}));
  EXPECT_EQ(v.outputs[2], testing::three_outputs_y(2.0, 3.0, 1.0));
}

TEST(Evaluate, ExtraBindingsAreIgnored) {
  Valuation v = evaluate(compile_source("x").graph, {{"x", 1.0}, {"unused", 2.0}});
  EXPECT_EQ(v.outputs[0], 1.0);
}

TEST(Evaluate, FiringOrderIsTopological) {
  Graph g = compile_source(testing::kThreeOutputs).graph;
  Valuation v = evaluate_with_schedule(g, {{"A", 2.0}, {"B", 3.0}, {"C", 1.0}},
                                       HighestFirst{});
  std::vector<std::size_t> position(g.size());
  for (std::size_t k = 0; k < v.firing_order.size(); ++k) {
    position[v.firing_order[k].index] = k;
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (NodeId in : g.nodes()[i].inputs) EXPECT_LT(position[in.index], position[i]);
  }
}

TEST(Schedules, LowestAndHighestAgreeBitwise) {
  Graph g = compile_source(testing::kThreeOutputs).graph;
  Bindings b = {{"A", 0.3}, {"B", -1.7}, {"C", 2.9}};
  Valuation lo = evaluate_with_schedule(g, b, LowestFirst{});
  Valuation hi = evaluate_with_schedule(g, b, HighestFirst{});
  EXPECT_NE(lo.firing_order, hi.firing_order);
  EXPECT_TRUE(bit_identical(lo.values, hi.values));
}

TEST(Schedules, RandomSchedulesAgreeBitwise) {
  std::mt19937_64 rng(2026);
  for (auto [graph, bindings] :
       {std::pair{testing::golden_graph(), Bindings{{"x1", 2.0}, {"x2", 5.0}}},
        std::pair{compile_source(testing::kThreeOutputs).graph,
                  Bindings{{"A", 2.0}, {"B", 3.0}, {"C", 1.0}}}}) {
    Valuation ref = evaluate(graph, bindings);
    for (int i = 0; i < 100; ++i) {
      Valuation v = evaluate_with_schedule(graph, bindings, RandomSchedule{&rng});
      ASSERT_TRUE(bit_identical(ref.values, v.values));
      ASSERT_TRUE(bit_identical(ref.outputs, v.outputs));
    }
  }
}

TEST(Errors, MissingBindingNamesVariable) {
  try {
    evaluate(testing::golden_graph(), {{"x1", 2.0}});
    FAIL() << "expected BindingError";
  } catch (const BindingError& e) {
    EXPECT_EQ(e.variable(), "x2");
  }
}

TEST(Errors, DomainErrorCarriesNode) {
  Graph g = testing::golden_graph();
  try {
    evaluate(g, {{"x1", -1.0}, {"x2", 5.0}});
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    ASSERT_TRUE(e.node().has_value());
    EXPECT_EQ(*e.node(), 2u);
    EXPECT_EQ(g.node(NodeId{*e.node()}).op.tag(), OpTag::kLn);
  }
}

TEST(Errors, NonFiniteBindingIsDomainError) {
  EXPECT_THROW(evaluate(compile_source("x").graph, {{"x", std::nan("")}}),
               DomainError);
}

TEST(Errors, InvalidGraphIsRejectedBeforeFiring) {
  Graph bad = Graph::from_parts({Node{OpTag::kSin, {NodeId{0}}}}, {NodeId{0}});
  EXPECT_THROW(evaluate(bad, {}), GraphError);
}

TEST(Scale, LargeGraphFiresEveryNodeOnce) {
  Graph g = testing::bounded_random_graph(1000, 5);
  Valuation v = evaluate(g, testing::bounded_bindings(4, 5));
  EXPECT_EQ(v.firings(), 1000u);
  std::vector<bool> seen(1000, false);
  for (NodeId id : v.firing_order) {
    EXPECT_FALSE(seen[id.index]);
    seen[id.index] = true;
  }
}

}  // namespace
}  // namespace adgraph
