#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "vseg/maxflow.hpp"

namespace vseg {
namespace {

using testing::brute_force_min_cut;

TEST(MaxFlow, TwoLinkChain) {
  FlowGraph g(1);
  g.add_tlinks(0, 3.0, 2.0);
  const auto r = max_flow_min_cut(g);
  EXPECT_DOUBLE_EQ(r.flow, 2.0);
  EXPECT_EQ(r.sink_side[0], 0);
}

TEST(MaxFlow, ClassicSixNodeNetwork) {
  // s -> a (10), s -> c (10), a -> b (4), a -> c (2), a -> d (8), c -> d (9), d -> b (6),
  // b -> t (10), d -> t (10). Max-flow 19.
  FlowGraph g(4);
  const int a = 0, b = 1, c = 2, d = 3;
  g.add_tlinks(a, 10, 0);
  g.add_tlinks(c, 10, 0);
  g.add_edge(a, b, 4);
  g.add_edge(a, c, 2);
  g.add_edge(a, d, 8);
  g.add_edge(c, d, 9);
  g.add_edge(d, b, 6);
  g.add_tlinks(b, 0, 10);
  g.add_tlinks(d, 0, 10);
  const auto r = max_flow_min_cut(g);
  EXPECT_DOUBLE_EQ(r.flow, 19.0);
  EXPECT_DOUBLE_EQ(brute_force_min_cut(g), 19.0);
  EXPECT_DOUBLE_EQ(g.cut_capacity(r.sink_side), r.flow);
}

TEST(MaxFlow, NoSinkLinksMeansNoFlow) {
  FlowGraph g(5);
  for (int i = 0; i < 5; ++i) g.add_tlinks(i, 1.0 + i, 0.0);
  for (int i = 0; i + 1 < 5; ++i) g.add_edge(i, i + 1, 2.0, 2.0);
  const auto r = max_flow_min_cut(g);
  EXPECT_DOUBLE_EQ(r.flow, 0.0);
  for (auto s : r.sink_side) EXPECT_EQ(s, 0);
}

TEST(MaxFlow, MatchesBruteForceOnRandomGraphs) {
  std::mt19937 rng(12);
  std::uniform_int_distribution<int> size(2, 10);
  std::uniform_real_distribution<double> cap(0.0, 10.0);
  std::bernoulli_distribution present(0.4);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = size(rng);
    FlowGraph g(n);
    for (int i = 0; i < n; ++i) g.add_tlinks(i, present(rng) ? cap(rng) : 0.0, present(rng) ? cap(rng) : 0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (present(rng)) g.add_edge(i, j, cap(rng), present(rng) ? cap(rng) : 0.0);
      }
    }
    const auto r = max_flow_min_cut(g);
    const double oracle = brute_force_min_cut(g);
    EXPECT_NEAR(r.flow, oracle, 1e-9 * (1.0 + oracle)) << "trial " << trial;
    EXPECT_NEAR(g.cut_capacity(r.sink_side), r.flow, 1e-9 * (1.0 + oracle)) << "trial " << trial;
  }
}

TEST(MaxFlow, RejectsBadCapacities) {
  FlowGraph g(2);
  EXPECT_THROW(g.add_edge(0, 1, -1.0), config_error);
  EXPECT_THROW(g.add_tlinks(0, std::numeric_limits<double>::infinity(), 0.0), config_error);
  EXPECT_THROW(g.add_edge(0, 2, 1.0), config_error);
  EXPECT_THROW(g.add_edge(1, 1, 1.0), config_error);
}

}  // namespace
}  // namespace vseg
