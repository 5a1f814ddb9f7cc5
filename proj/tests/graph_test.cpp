#include <gtest/gtest.h>

#include "support.hpp"

using namespace dlmcol;
using namespace testing_support;

TEST(Parse, PathWithWeights) {
  const auto g = parse_dimacs("p edge 3 2\ne 1 2\ne 2 3\n", "3\n5\n2\n");
  EXPECT_EQ(g.size(), 3);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.weights(), (std::vector<Weight>{3, 5, 2}));
  EXPECT_TRUE(g.adjacent(0, 1));
  EXPECT_FALSE(g.adjacent(0, 2));
}

TEST(Parse, DuplicateEdgeIsDropped) {
  const auto a = parse_dimacs("p edge 3 2\ne 1 2\ne 2 3\n", "3\n5\n2\n");
  const auto b = parse_dimacs("c comment\np edge 3 3\ne 1 2\ne 2 3\ne 2 1\n", "3 5 2");
  EXPECT_EQ(b.edge_count(), 2u);
  EXPECT_TRUE(a == b);
}

TEST(Parse, UnweightedDefaultsToOne) {
  const auto g = parse_dimacs("p col 2 1\r\ne 1 2\r\n");
  EXPECT_EQ(g.weights(), (std::vector<Weight>{1, 1}));
}

TEST(Parse, ErrorsCarryLineNumbers) {
  try {
    parse_dimacs("p edge 3 1\ne 1 4\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_dimacs("e 1 2\n"), ParseError);
  EXPECT_THROW(parse_dimacs("p edge 2 1\ne 1 1\n"), ParseError);
  EXPECT_THROW(parse_dimacs("p edge 2 1\ne 1 x\n"), ParseError);
  EXPECT_THROW(parse_dimacs("p edge 2 1\ne 1 2\n", "4\n"), ParseError);
  EXPECT_THROW(parse_dimacs("p edge 2 1\ne 1 2\n", "4\n0\n"), ParseError);
  EXPECT_THROW(parse_dimacs("p edge 2 1\nq 1 2\n"), ParseError);
}

TEST(Parse, WriteReadRoundTrip) {
  Rng rng = test_rng(1);
  const auto g = random_graph(12, 0.4, 20, rng);
  EXPECT_TRUE(parse_dimacs(write_dimacs(g), write_weights(g)) == g);
}

TEST(Reduction, StarWithUnitLeavesIsKept) {
  // every clique holds a leaf, so w' is 1 and 1 < 1 fails
  const WeightedGraph star(4, {{0, 1}, {0, 2}, {0, 3}}, {10, 1, 1, 1});
  const auto [reduced, report] = reduce_graph(star, 40);
  EXPECT_EQ(reduced.size(), 4);
  EXPECT_TRUE(report.removed.empty());
}

TEST(Reduction, StarLosesItsLightLeaves) {
  // edge {0,4} is a 2-clique with w' = 5 > 1, leaves have degree 1
  const WeightedGraph g(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}, {10, 1, 1, 1, 5});
  const auto [reduced, report] = reduce_graph(g, 50);
  EXPECT_EQ(reduced.size(), 2);
  EXPECT_EQ(report.removed.size(), 3u);
  EXPECT_EQ(brute_force_wvcp(g), 15);
  EXPECT_EQ(brute_force_wvcp(reduced), 15);
}

TEST(Reduction, EqualWeightsKeepEverything) {
  Rng rng = test_rng(2);
  auto g = random_graph(10, 0.5, 1, rng);
  const auto [reduced, report] = reduce_graph(g, 100);
  EXPECT_EQ(reduced.size(), g.size());
  EXPECT_TRUE(report.removed.empty());
}

TEST(Reduction, EdgelessKeepsEverything) {
  const WeightedGraph g(4, {}, {5, 3, 1, 2});
  const auto [reduced, report] = reduce_graph(g, 40);
  EXPECT_EQ(reduced.size(), 4);
}

// Property: optimum unchanged, and lifting a reduced optimum is optimal.
TEST(Reduction, PreservesBruteForceOptimum) {
  int shrunk = 0;
  for (int t = 0; t < 50; ++t) {
    Rng rng = test_rng(100 + static_cast<std::uint64_t>(t));
    const int n = 4 + rng.uniform_int(7);
    const auto g = random_graph(n, 0.2 + 0.6 * rng.uniform01(), 12, rng);
    const auto [reduced, report] = reduce_graph(g, static_cast<std::size_t>(10 * n));
    if (reduced.size() < g.size()) ++shrunk;
    const Weight opt = brute_force_wvcp(g);
    ASSERT_EQ(brute_force_wvcp(reduced), opt) << "trial " << t;
    const auto coloring = greedy_degree_coloring(reduced);
    const auto lifted = lift_coloring(g, report, coloring);
    EXPECT_TRUE(is_legal(g, lifted));
    EXPECT_EQ(wvcp_score(g, lifted).score, wvcp_score(reduced, coloring).score);
  }
  EXPECT_GT(shrunk, 0);
}

TEST(Reduction, InducedSubgraphMapsIds) {
  const auto g = cycle_graph(5, {1, 2, 3, 4, 5});
  const auto h = g.induced({1, 2, 4});
  EXPECT_EQ(h.size(), 3);
  EXPECT_EQ(h.edge_count(), 1u);
  EXPECT_EQ(h.weights(), (std::vector<Weight>{2, 3, 5}));
}
