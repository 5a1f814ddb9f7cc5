#include <gtest/gtest.h>

#include "support.hpp"

using namespace dlmcol;
using namespace testing_support;

TEST(Score, SingleVertex) {
  const WeightedGraph g(1, {}, {7});
  const auto r = wvcp_score(g, Coloring({0}, 1));
  EXPECT_EQ(r.score, 7);
  EXPECT_EQ(r.conflicts, 0);
}

TEST(Score, Edge) {
  const WeightedGraph g(2, {{0, 1}}, {3, 5});
  EXPECT_EQ(wvcp_score(g, Coloring({0, 0}, 2)).score, 5);
  EXPECT_EQ(wvcp_score(g, Coloring({0, 0}, 2)).conflicts, 1);
  EXPECT_EQ(wvcp_score(g, Coloring({0, 1}, 2)).score, 8);
  EXPECT_EQ(wvcp_score(g, Coloring({0, 1}, 2)).conflicts, 0);
}

TEST(Score, Penalized) {
  EXPECT_DOUBLE_EQ(penalized_score(10, 0, 4.0), 10.0);
  EXPECT_DOUBLE_EQ(penalized_score(10, 3, 4.0), 22.0);
  EXPECT_DOUBLE_EQ(penalized_score(565, 0, 1e9), 565.0);
}

TEST(Conflicts, TriangleAndEvenCycle) {
  EXPECT_EQ(col_conflicts(complete_graph(3), Coloring({0, 0, 0}, 1)), 3);
  EXPECT_EQ(col_conflicts(cycle_graph(6), Coloring({0, 1, 0, 1, 0, 1}, 2)), 0);
}

TEST(Delta, SoleVertexToEmptyClass) {
  const WeightedGraph g(2, {}, {4, 6});
  WvcpEval eval(g, Coloring({0, 1}, 3));
  EXPECT_EQ(eval.move_delta(0, 2).score, 0);
  EXPECT_EQ(eval.move_delta(0, 2).conflicts, 0);
}

TEST(Delta, LighterEndpointLeaves) {
  const WeightedGraph g(2, {{0, 1}}, {3, 5});
  WvcpEval eval(g, Coloring({0, 0}, 2));
  const auto d = eval.move_delta(0, 1);
  EXPECT_EQ(d.score, 3);
  EXPECT_EQ(d.conflicts, -1);
}

TEST(Delta, DuplicateMaximumStays) {
  const WeightedGraph g(2, {}, {9, 9});
  WvcpEval eval(g, Coloring({0, 0}, 2));
  EXPECT_EQ(eval.move_delta(0, 1).score, 9);
}

// 200 random (graph, coloring, move) triples against recomputation.
TEST(Delta, MatchesScratchRecomputation) {
  for (int t = 0; t < 200; ++t) {
    Rng rng = test_rng(300 + static_cast<std::uint64_t>(t));
    const int n = 2 + rng.uniform_int(14);
    const int k = 1 + rng.uniform_int(6);
    const auto g = random_graph(n, rng.uniform01(), 1 + rng.uniform_int(30), rng);
    const auto s = random_coloring(n, k, rng);
    WvcpEval eval(g, s);
    ColEval ceval(g, s);
    const int v = rng.uniform_int(n);
    const int to = rng.uniform_int(k);
    auto moved = s.assignment();
    moved[static_cast<std::size_t>(v)] = to;
    const auto before = naive_score(g, s.assignment());
    const auto after = naive_score(g, moved);
    const auto d = eval.move_delta(v, to);
    ASSERT_EQ(d.score, after.first - before.first) << "trial " << t;
    ASSERT_EQ(d.conflicts, after.second - before.second) << "trial " << t;
    ASSERT_EQ(ceval.move_delta(v, to), after.second - before.second) << "trial " << t;
    eval.apply(v, to);
    ceval.apply(v, to);
    ASSERT_EQ(eval.score(), after.first);
    ASSERT_EQ(eval.conflicts(), after.second);
    ASSERT_EQ(ceval.conflicts(), after.second);
  }
}

TEST(Delta, LongRandomWalkStaysConsistent) {
  Rng rng = test_rng(9);
  const auto g = random_graph(20, 0.3, 15, rng);
  WvcpEval eval(g, random_coloring(20, 5, rng));
  for (int step = 0; step < 2000; ++step) {
    const int v = rng.uniform_int(20), to = rng.uniform_int(5);
    const auto d = eval.move_delta(v, to);
    const Score s0 = eval.score(), c0 = eval.conflicts();
    eval.apply(v, to);
    ASSERT_EQ(eval.score(), s0 + d.score);
    ASSERT_EQ(eval.conflicts(), c0 + d.conflicts);
  }
  const auto scratch = wvcp_score(g, eval.coloring());
  EXPECT_EQ(eval.score(), scratch.score);
  EXPECT_EQ(eval.conflicts(), scratch.conflicts);
}

TEST(Coloring, RejectsBadColors) {
  EXPECT_THROW(Coloring({0, 2}, 2), std::invalid_argument);
  EXPECT_THROW(Coloring({0}, 0), std::invalid_argument);
}

TEST(Coloring, CanonicalRelabels) {
  const Coloring s({2, 0, 2, 1}, 3);
  EXPECT_EQ(s.canonical().assignment(), (std::vector<int>{0, 1, 0, 2}));
  EXPECT_EQ(s.colors_used(), 3);
}

TEST(SolutionFile, RoundTripAndValidation) {
  const WeightedGraph g(3, {{0, 1}, {1, 2}}, {3, 5, 2});
  const Coloring s({0, 1, 0}, 2);
  const auto text = write_solution(g, s);
  EXPECT_EQ(text.substr(0, 4), "s 8\n");
  EXPECT_EQ(read_solution(g, text), s);
  EXPECT_THROW(read_solution(g, "s 8\nv 1 0\nv 2 1\n"), ParseError);
  EXPECT_THROW(read_solution(g, "s 9\nv 1 0\nv 2 1\nv 3 0\n"), ParseError);
  EXPECT_THROW(read_solution(g, "v 1 0\nv 2 0\nv 3 1\n"), ParseError);
}
