#include <gtest/gtest.h>

#include <set>

#include "iwkit/domains.hpp"
#include "iwkit/errors.hpp"
#include "iwkit/search.hpp"
#include "iwkit/siw.hpp"
#include "support.hpp"

using namespace iwkit;
using namespace iwkit::testing;

namespace {

struct Bound {
    Bundle bundle;
    Instance in;
    Sketch sk;
    FeatureEvaluator phi;

    Bound(Bundle b, const std::string& sketch)
        : bundle(std::move(b)),
          in(load(bundle)),
          sk(parse_sketch(bundle.sketch(sketch))),
          phi(bind(sk, in.features, in.problem)) {}
};

SerializedResult run(const Bound& b, int k_max) {
    SiwOptions o;
    o.k_max = k_max;
    return siw_r(b.in.problem, b.sk, b.phi, o);
}

void expect_valid(const Bound& b, const SerializedResult& r) {
    ASSERT_TRUE(r.solved()) << r.diagnostic;
    EXPECT_TRUE(plan_reaches_goal(b.in.problem, r.plan));
    std::size_t total = 0;
    for (std::size_t i = 0; i < r.segments.size(); ++i) {
        const auto& seg = r.segments[i];
        total += seg.plan.size();
        EXPECT_TRUE(plan_reaches_goal(b.in.problem, seg.plan, [&](const State& s) { return s == seg.end; },
                                      seg.start));
        if (i + 1 < r.segments.size()) {
            EXPECT_TRUE(relation(b.sk, seg.f_start, seg.f_end)) << "segment " << i;
            EXPECT_EQ(r.segments[i + 1].start, seg.end);
        }
    }
    EXPECT_EQ(total, r.plan.size());
}

TEST(Siw, DeliveryTwoPackagesWithWidthOneSketch) {
    Bound b(delivery(3, 3, {1, 1}, {3, 3}, {{3, 1}, {1, 3}}), "r5");
    auto r = run(b, 1);
    expect_valid(b, r);
    for (const auto& seg : r.segments) EXPECT_LE(seg.k, 1);
}

TEST(Siw, EmptySketchIsPlainIw) {
    Bound b(delivery(3, 3, {1, 1}, {3, 3}, {{3, 1}}), "r0");
    auto r = run(b, 2);
    expect_valid(b, r);
    ASSERT_EQ(r.segments.size(), 1u);
    EXPECT_EQ(r.segments[0].k, 2);
}

TEST(Siw, ZeroWidthSketchTakesSingleSteps) {
    Bound b(delivery(3, 3, {1, 1}, {3, 3}, {{3, 1}, {1, 3}}), "r8");
    auto r = run(b, 0);
    expect_valid(b, r);
    for (const auto& seg : r.segments) EXPECT_EQ(seg.plan.size(), 1u);
}

TEST(Siw, HanoiZeroWidth) {
    Bound b(hanoi(3), "hanoi_policy");
    auto r = run(b, 0);
    expect_valid(b, r);
    EXPECT_EQ(r.plan.size(), 7u);
    EXPECT_EQ(r.segments.size(), 7u);
}

TEST(Siw, InnerFailureIsReported) {
    Bound b(delivery(3, 3, {1, 1}, {3, 3}, {{3, 1}}), "r0");
    auto r = run(b, 1);
    EXPECT_EQ(r.status, SiwStatus::InnerFailure);
    EXPECT_FALSE(r.diagnostic.empty());
}

TEST(Siw, SegmentCapStopsTheLoop) {
    Bound b(delivery(3, 3, {1, 1}, {3, 3}, {{3, 1}}), "r8");
    SiwOptions o;
    o.k_max = 0;
    o.max_segments = 2;
    auto r = siw_r(b.in.problem, b.sk, b.phi, o);
    EXPECT_EQ(r.status, SiwStatus::CycleGuard);
    EXPECT_EQ(r.segments.size(), 2u);
}

TEST(Siw, MismatchedEvaluatorIsRejected) {
    Bound b(delivery(3, 3, {1, 1}, {3, 3}, {{3, 1}}), "r8");
    FeatureEvaluator short_phi(b.in.features.select({"H"}), b.in.problem);
    EXPECT_THROW(siw_r(b.in.problem, b.sk, short_phi), contract_violation);
    EXPECT_THROW(run_policy(b.in.problem, b.sk, short_phi), contract_violation);
}

TEST(Siw, SegmentFormat) {
    Bound b(hanoi(3), "hanoi_policy");
    auto r = run(b, 0);
    ASSERT_FALSE(r.segments.empty());
    EXPECT_EQ(format_segment(0, r.segments[0]).rfind("segment 0: k=0 len=1 f(start)=(", 0), 0u);
}

TEST(Policy, ClearTowerOfThree) {
    Bound b(blocks_clear(3, 1), "clear_policy");
    auto run = run_policy(b.in.problem, b.sk, b.phi);
    ASSERT_TRUE(run.solved());
    EXPECT_EQ(run.plan.size(), 5u);
    EXPECT_EQ(*reference_bfs(b.in.problem).optimal, 5);
    EXPECT_TRUE(plan_reaches_goal(b.in.problem, run.plan));
    EXPECT_EQ(run.trajectory.size(), 6u);
}

TEST(Policy, MarblesLength) {
    for (const auto& boxes : std::vector<std::vector<int>>{{3}, {2, 1}, {0, 2, 1}}) {
        Bound b(marbles(boxes), "marbles_policy");
        auto run = run_policy(b.in.problem, b.sk, b.phi);
        ASSERT_TRUE(run.solved());
        std::size_t expected = boxes.size();
        for (int m : boxes) expected += static_cast<std::size_t>(m);
        EXPECT_EQ(run.plan.size(), expected);
    }
}

TEST(Policy, HanoiOdd) {
    for (int n : {3, 5}) {
        Bound b(hanoi(n), "hanoi_policy");
        auto run = run_policy(b.in.problem, b.sk, b.phi);
        ASSERT_TRUE(run.solved());
        EXPECT_EQ(run.plan.size(), (std::size_t{1} << n) - 1);
    }
}

TEST(Policy, EmptySketchIsStuck) {
    Bound b(delivery(3, 3, {1, 1}, {3, 3}, {{3, 1}}), "r0");
    auto run = run_policy(b.in.problem, b.sk, b.phi);
    EXPECT_EQ(run.outcome, PolicyOutcome::Stuck);
    EXPECT_TRUE(run.plan.empty());
}

TEST(Policy, RevisitIsReportedAsCyclic) {
    auto b = grid(3, 1, {1, 1}, {3, 1});
    auto in = load(b);
    auto sk = parse_sketch("features { d: num; }\nrules { { d>0 } => { d? }; }\n");
    auto phi = bind(sk, in.features, in.problem);
    auto run = run_policy(in.problem, sk, phi);
    EXPECT_EQ(run.outcome, PolicyOutcome::Cyclic);
    auto capped = run_policy(in.problem, sk, phi, 10, false);
    EXPECT_EQ(capped.outcome, PolicyOutcome::StepCap);
}

TEST(Closure, ClearTowerOfTwo) {
    Bound b(blocks_clear(2, 1), "clear_policy");
    const auto& p = b.in.problem;
    auto states = policy_reachable(p, b.sk, b.phi);
    // Reference: close over rule-compatible transitions by hand.
    std::set<State> seen{p.init};
    std::vector<State> todo{p.init};
    while (!todo.empty()) {
        State s = todo.back();
        todo.pop_back();
        if (p.is_goal(s)) continue;
        for (ActionId a : p.applicable_actions(s)) {
            State t = p.apply(s, a);
            if (relation(b.sk, b.phi.valuation(s), b.phi.valuation(t)) && seen.insert(t).second)
                todo.push_back(t);
        }
    }
    EXPECT_EQ(std::set<State>(states.begin(), states.end()), seen);
    EXPECT_EQ(states.front(), p.init);
    // s0, hold b1, two putdown targets, hold b2, then two goal states per branch.
    EXPECT_GT(states.size(), 4u);
}

TEST(Closure, EmptySketch) {
    Bound b(delivery(3, 3, {1, 1}, {3, 3}, {{3, 1}}), "r0");
    auto states = policy_reachable(b.in.problem, b.sk, b.phi);
    ASSERT_EQ(states.size(), 1u);
    EXPECT_EQ(states[0], b.in.problem.init);
}

TEST(Closure, MarblesChain) {
    Bound b(marbles({2}), "marbles_policy");
    auto states = policy_reachable(b.in.problem, b.sk, b.phi);
    // s0, either marble removed, empty box, box removed.
    EXPECT_EQ(states.size(), 5u);
}

TEST(ZeroWidth, PolicyAndSerializationAgree) {
    struct Case {
        Bundle b;
        const char* sketch;
    };
    std::vector<Case> cases{{blocks_clear(3, 1), "clear_policy"},
                            {marbles({2, 1}), "marbles_policy"},
                            {delivery(3, 3, {1, 1}, {3, 3}, {{3, 1}, {1, 3}}), "r8"},
                            {delivery(3, 3, {1, 1}, {3, 3}, {{3, 1}}), "delivery_policy"},
                            {hanoi(3), "hanoi_policy"},
                            {delivery(3, 3, {1, 1}, {3, 3}, {{3, 1}}), "r0"},
                            {delivery(3, 3, {1, 1}, {3, 3}, {{3, 1}}), "r6"}};
    for (auto& c : cases) {
        Bound b(c.b, c.sketch);
        auto pol = run_policy(b.in.problem, b.sk, b.phi);
        auto ser = run(b, 0);
        EXPECT_EQ(pol.solved(), ser.solved()) << c.b.family << " " << c.sketch;
    }
}

}  // namespace
