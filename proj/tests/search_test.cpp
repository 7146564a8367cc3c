#include <gtest/gtest.h>

#include <set>

#include "iwkit/domains.hpp"
#include "iwkit/errors.hpp"
#include "iwkit/grounder.hpp"
#include "iwkit/novelty.hpp"
#include "iwkit/oracle.hpp"
#include "iwkit/search.hpp"
#include "support.hpp"

using namespace iwkit;
using namespace iwkit::testing;

namespace {

TEST(Bfs, GridLine) {
    auto in = load(grid(4, 1, {1, 1}, {4, 1}));
    auto r = bfs_optimal(in.problem, goal_test(in.problem));
    ASSERT_TRUE(r.solved());
    EXPECT_EQ(r.plan.size(), 3u);
    EXPECT_TRUE(plan_reaches_goal(in.problem, r.plan));
}

TEST(Bfs, HanoiThreeDisks) {
    auto in = load(hanoi(3, 1, 3, false));
    auto r = bfs_optimal(in.problem, goal_test(in.problem));
    ASSERT_TRUE(r.solved());
    EXPECT_EQ(r.plan.size(), 7u);
}

TEST(Bfs, ClearTwoAbove) {
    auto in = load(blocks_clear(2));
    const auto& p = in.problem;
    auto r = bfs_optimal(p, goal_test(p));
    ASSERT_TRUE(r.solved());
    EXPECT_EQ(*reference_bfs(p).optimal, 3);
    ASSERT_EQ(r.plan.size(), 3u);
    EXPECT_EQ(p.actions[r.plan[0]].name, "unstack");
    EXPECT_EQ(p.actions[r.plan[1]].name, "putdown");
    EXPECT_EQ(p.actions[r.plan[2]].name, "unstack");
}

TEST(Bfs, UnsolvableReportsNoPlan) {
    auto p = load_problem(kToyDomain, kToyProblem);  // q is never added
    auto r = bfs_optimal(p, goal_test(p));
    EXPECT_EQ(r.outcome, Outcome::NoPlanExists);
}

TEST(Bfs, GeneratedLimitStopsSearch) {
    auto in = load(blocks_clear(4, 1));
    SearchOptions o;
    o.max_generated = 5;
    auto r = bfs_optimal(in.problem, goal_test(in.problem), o);
    EXPECT_EQ(r.outcome, Outcome::Failure);
    EXPECT_TRUE(r.capped);
}

TEST(IwT, ExampleClearSetIsOptimalAndCheap) {
    auto b = blocks_clear(3, 1);
    auto in = load(b);
    const auto& p = in.problem;
    auto T = parse_tuples(b.tuple_set("clear"), p);
    auto r = iw_t(p, T, goal_test(p));
    ASSERT_TRUE(r.solved());
    EXPECT_EQ(static_cast<std::int64_t>(r.plan.size()), *reference_bfs(p).optimal);
    EXPECT_LE(r.stats.expanded, T.count());
    EXPECT_TRUE(plan_reaches_goal(p, r.plan));
}

TEST(IwT, EmptySetExpandsNothing) {
    auto in = load(blocks_clear(2));
    auto r = iw_t(in.problem, TupleSet{}, goal_test(in.problem));
    EXPECT_EQ(r.outcome, Outcome::Failure);
    EXPECT_EQ(r.stats.expanded, 0u);
}

TEST(IwT, SupersetOfAdmissibleSetStaysOptimal) {
    auto b = blocks_clear(2, 1, true);
    auto in = load(b);
    const auto& p = in.problem;
    auto T = parse_tuples(b.tuple_set("clear"), p);
    for (AtomId a = 0; a < p.num_atoms(); a += 3) T.insert({a});
    auto r = iw_t(p, T, goal_test(p));
    ASSERT_TRUE(r.solved());
    EXPECT_EQ(static_cast<std::int64_t>(r.plan.size()), *reference_bfs(p).optimal);
}

TEST(IwK, ClearIsSolvedOptimallyByWidthOne) {
    auto in = load(blocks_clear(3, 1));
    const auto& p = in.problem;
    auto r = iw_k(p, 1, goal_test(p));
    ASSERT_TRUE(r.solved());
    EXPECT_EQ(static_cast<std::int64_t>(r.plan.size()), *reference_bfs(p).optimal);
}

TEST(IwK, OnIsSolvedOptimallyByWidthTwo) {
    auto in = load(blocks_on(1, 1));
    const auto& p = in.problem;
    auto r = iw_k(p, 2, goal_test(p));
    ASSERT_TRUE(r.solved());
    EXPECT_EQ(static_cast<std::int64_t>(r.plan.size()), *reference_bfs(p).optimal);
}

TEST(IwK, WidthZeroOnSolvedInstance) {
    auto in = load(blocks_clear(0));
    auto r = iw_k(in.problem, 0, goal_test(in.problem));
    ASSERT_TRUE(r.solved());
    EXPECT_TRUE(r.plan.empty());
}

TEST(IwK, NegativeWidthIsRejected) {
    auto in = load(blocks_clear(1));
    EXPECT_THROW((void)iw_k(in.problem, -1, goal_test(in.problem)), contract_violation);
}

TEST(Iw, GridTwoNeedsAtMostPairs) {
    auto in = load(grid2(3, 3, {1, 1}, {3, 3}));
    auto r = iw(in.problem, goal_test(in.problem));
    ASSERT_TRUE(r.solved());
    EXPECT_LE(r.k, 2);
    EXPECT_TRUE(plan_reaches_goal(in.problem, r.plan));
}

TEST(Iw, UnsolvableStopsEarly) {
    auto p = load_problem(kToyDomain, kToyProblem);
    auto r = iw(p, goal_test(p));
    EXPECT_EQ(r.outcome, Outcome::NoPlanExists);
    EXPECT_LT(r.k, static_cast<int>(p.num_atoms()));
}

TEST(Iw, LimitedWidthFailureIsNotAProof) {
    auto in = load(blocks_on(1, 1));
    auto r = iw(in.problem, goal_test(in.problem), {}, 1);
    EXPECT_EQ(r.outcome, Outcome::Failure);
}

TEST(Iw, ReturnsValidPlans) {
    for (const auto& b : {blocks({{"a", "b", "c"}}, {{"c", "b", "a"}}), hanoi(3),
                          delivery(3, 2, {1, 1}, {3, 2}, {{2, 1}, {1, 2}})}) {
        auto in = load(b);
        auto r = iw(in.problem, goal_test(in.problem));
        ASSERT_TRUE(r.solved()) << b.family;
        EXPECT_TRUE(plan_reaches_goal(in.problem, r.plan)) << b.family;
    }
}

TEST(IwPhi, ClearWithHeldAndCount) {
    for (int above = 1; above <= 4; ++above) {
        auto in = load(blocks_clear(above, 1));
        const auto& p = in.problem;
        FeatureEvaluator phi(in.features.select({"H", "n"}), p);
        auto r = iw_phi(p, phi, goal_test(p));
        ASSERT_TRUE(r.solved());
        EXPECT_EQ(static_cast<std::int64_t>(r.plan.size()), *reference_bfs(p).optimal);
        const std::uint64_t blocks = static_cast<std::uint64_t>(above) + 2;
        EXPECT_LE(r.stats.expanded, 2 * (blocks + 1));
    }
}

TEST(IwPhi, MarblesIsOptimal) {
    auto in = load(marbles({2, 1}));
    const auto& p = in.problem;
    FeatureEvaluator phi(in.features, p);
    auto r = iw_phi(p, phi, goal_test(p));
    ASSERT_TRUE(r.solved());
    EXPECT_EQ(r.plan.size(), 5u);
    EXPECT_EQ(*reference_bfs(p).optimal, 5);
}

TEST(IwPhi, TwoValuationsCannotReachADistantGoal) {
    auto in = load(delivery(3, 1, {1, 1}, {3, 1}, {{2, 1}}));
    const auto& p = in.problem;
    ASSERT_GE(*reference_bfs(p).optimal, 3);
    FeatureEvaluator phi(in.features.select({"H"}), p);
    auto r = iw_phi(p, phi, goal_test(p));
    EXPECT_EQ(r.outcome, Outcome::Failure);
    EXPECT_LE(r.stats.expanded, 2u);
}

// Expanded states of IW(k) are a subset of the states BFS reaches.
TEST(Properties, PruningOnlyRemovesWork) {
    for (const auto& b : {blocks_clear(2, 1), blocks_on(1, 1), grid2(3, 3, {1, 1}, {3, 3}),
                          delivery(3, 2, {1, 1}, {3, 2}, {{3, 1}})}) {
        auto in = load(b);
        const auto& p = in.problem;
        auto g = goal_test(p);
        auto bfs = bfs_optimal(p, g);
        auto ref = reference_bfs(p);
        for (int k = 0; k <= 2; ++k) {
            auto r = iw_k(p, k, g);
            EXPECT_LE(r.stats.expanded, ref.dist.size());
            if (r.solved()) {
                EXPECT_TRUE(plan_reaches_goal(p, r.plan));
                EXPECT_GE(r.plan.size(), bfs.plan.size());
            }
        }
    }
}

TEST(Properties, WidthBoundedInstancesAreSolvedOptimally) {
    for (const auto& b : {blocks_clear(3, 1), blocks_clear(2, 0, true), grid(4, 3, {1, 1}, {4, 3}),
                          grid2(4, 4, {1, 1}, {4, 4}), delivery(3, 3, {1, 1}, {3, 3}, {{3, 1}})}) {
        auto in = load(b);
        const auto& p = in.problem;
        auto w = effective_width(p, 2);
        ASSERT_TRUE(w.bounded) << b.family;
        for (int k = w.k; k <= 2; ++k) {
            auto r = iw_k(p, k, goal_test(p));
            ASSERT_TRUE(r.solved());
            EXPECT_EQ(static_cast<std::int64_t>(r.plan.size()), w.optimal) << b.family << " k=" << k;
        }
    }
}

// Empirical only: more tuples never shrink the expanded set on these runs.
TEST(Properties, ExpandedGrowsWithWidth) {
    for (const auto& b : {blocks_clear(2, 1), grid2(3, 3, {1, 1}, {3, 3}), hanoi(3)}) {
        auto in = load(b);
        const auto& p = in.problem;
        auto never = [](const State&) { return false; };
        std::uint64_t prev = 0;
        for (int k = 1; k <= 3; ++k) {
            auto r = iw_k(p, k, never);
            EXPECT_GE(r.stats.expanded, prev) << b.family << " k=" << k;
            prev = r.stats.expanded;
        }
    }
}

TEST(Format, PlanLines) {
    auto in = load(grid(3, 1, {1, 1}, {3, 1}));
    auto r = bfs_optimal(in.problem, goal_test(in.problem));
    EXPECT_EQ(format_plan(in.problem, r.plan), "(move c_1_1 c_2_1)\n(move c_2_1 c_3_1)\n");
}

}  // namespace
