#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "iwkit/domains.hpp"
#include "iwkit/novelty.hpp"
#include "iwkit/oracle.hpp"
#include "iwkit/search.hpp"
#include "iwkit/siw.hpp"
#include "iwkit/sketch.hpp"
#include "property_checks.hpp"
#include "support.hpp"

using namespace iwkit;
using namespace iwkit::testing;

namespace {

TEST(Oracle, DualRouteAgreement) {
    std::mt19937 rng(11);
    for (const auto& c : property_matrix()) {
        SCOPED_TRACE(c.label);
        auto in = load(c.bundle);
        auto space = enumerate(in.problem);
        TupleSet example = c.tuples.empty() ? TupleSet{} : parse_tuples(c.bundle.tuple_set(c.tuples), in.problem);
        for (const auto& T : random_tuple_sets(space, example, rng, 120)) {
            auto env = is_admissible(space, T, AdmissibilityRoute::Envelope);
            auto dir = is_admissible(space, T, AdmissibilityRoute::Direct);
            EXPECT_EQ(env.verdict, dir.verdict) << format_tuples(T, in.problem);
        }
    }
}

TEST(Oracle, CostTrajectoriesAreOptimalTrajectories) {
    int checked = 0;
    for (const auto& c : property_matrix()) {
        auto in = load(c.bundle);
        auto space = enumerate(in.problem);
        auto same = cost_trajectories_match(space);
        if (!same) continue;
        EXPECT_TRUE(*same) << c.label;
        ++checked;
    }
    EXPECT_GE(checked, 6);
}

// A lower bound of k-1 and an effective width of k are bracketed by an
// admissible set of size-k tuples. Instances follow the example classes:
// towers over x, x and y both covered, diagonal grids, single packages.
TEST(Oracle, BracketingIsConsistent) {
    const std::vector<std::pair<std::string, Bundle>> cases{
        {"clear-2", blocks_clear(2)},
        {"clear-3", blocks_clear(3, 1)},
        {"clear-2-hold", blocks_clear(2, 0, true)},
        {"on-1-1", blocks_on(1, 1)},
        {"on-2-1", blocks_on(2, 1)},
        {"on-0-1", blocks_on(0, 1)},
        {"grid-3x3", grid(3, 3, {1, 1}, {3, 3})},
        {"grid2-3x3", grid2(3, 3, {1, 1}, {3, 3})},
        {"grid2-4x4", grid2(4, 4, {1, 1}, {4, 4})},
        {"delivery-1", delivery(3, 3, {1, 1}, {3, 3}, {{3, 1}})},
        {"delivery-4x4", delivery(4, 4, {1, 1}, {4, 4}, {{4, 1}})},
        {"hanoi-3", hanoi(3)}};
    int bracketed = 0;
    for (const auto& [label, b] : cases) {
        auto in = load(b);
        auto space = enumerate(in.problem);
        auto w = effective_width(in.problem, 2);
        if (!w.bounded || w.k == 0) continue;
        if (!lower_bound_witness(space, w.k - 1)) continue;
        SCOPED_TRACE(label);
        auto T = largest_closed_subset(space, w.k);
        ASSERT_FALSE(T.empty());
        EXPECT_TRUE(is_admissible(space, T).holds());
        EXPECT_TRUE(is_admissible(space, T, AdmissibilityRoute::Direct).holds());
        auto r = iw_t(in.problem, T, goal_test(in.problem));
        ASSERT_TRUE(r.solved());
        EXPECT_EQ(static_cast<std::int64_t>(r.plan.size()), space.problem_cost());
        EXPECT_LE(r.stats.expanded, T.count());
        ++bracketed;
    }
    EXPECT_GE(bracketed, 10);
}

// With y already clear, IW(1) finds an optimal plan by tie-breaking, yet
// no set of single atoms is admissible: hold(x) is first reached with the
// removed block possibly stacked on y. The bracket does not certify w = 1.
TEST(Oracle, EffectiveWidthCanUndershootWidth) {
    for (int above : {1, 2}) {
        auto in = load(blocks_on(above, 0));
        auto space = enumerate(in.problem);
        auto w = effective_width(in.problem, 2);
        ASSERT_TRUE(w.bounded);
        EXPECT_EQ(w.k, 1);
        EXPECT_TRUE(lower_bound_witness(space, 0));
        auto singles = largest_closed_subset(space, 1);
        EXPECT_FALSE(!singles.empty() && is_admissible(space, singles).holds());
        auto pairs = largest_closed_subset(space, 2);
        EXPECT_TRUE(is_admissible(space, pairs).holds());
    }
}

// The closed subset is the union of all admissible subsets, so its verdict
// decides whether any admissible set of size-k tuples exists.
TEST(Oracle, ClosedSubsetDecidesSmallWidths) {
    auto in = load(blocks_clear(2));
    auto space = enumerate(in.problem);
    auto T = largest_closed_subset(space, 1);
    auto example = parse_tuples(blocks_clear(2).tuple_set("clear"), in.problem);
    for (const auto& t : example.tuples()) EXPECT_TRUE(T.contains(t)) << format_tuple(t, in.problem);
    auto grid_in = load(grid2(3, 3, {1, 1}, {3, 3}));
    auto grid_space = enumerate(grid_in.problem);
    auto singles = largest_closed_subset(grid_space, 1);
    EXPECT_FALSE(!singles.empty() && is_admissible(grid_space, singles).holds());
}

TEST(Oracle, ExampleSetsMakeIwTOptimal) {
    for (const auto& c : property_matrix()) {
        if (c.tuples.empty()) continue;
        auto in = load(c.bundle);
        auto space = enumerate(in.problem);
        auto T = parse_tuples(c.bundle.tuple_set(c.tuples), in.problem);
        if (!is_admissible(space, T).holds()) continue;
        SCOPED_TRACE(c.label);
        auto r = iw_t(in.problem, T, goal_test(in.problem));
        ASSERT_TRUE(r.solved());
        EXPECT_EQ(static_cast<std::int64_t>(r.plan.size()), space.problem_cost());
        EXPECT_LE(r.stats.expanded, T.count());
    }
}

// When the valuations met along an optimal plan, restricted to their
// cheapest states, form a cost-envelope, the feature search is optimal.
TEST(Oracle, FeatureSearchOptimalOnEnvelopes) {
    struct FCase {
        Bundle b;
        std::vector<std::string> features;
    };
    std::vector<FCase> cases{{blocks_clear(3, 1), {"H", "n"}},
                             {blocks_clear(2, 0, true), {"H", "n"}},
                             {grid(3, 3, {1, 1}, {3, 3}), {"d"}},
                             {delivery(3, 3, {1, 1}, {3, 3}, {{3, 1}}), {"H", "p", "t", "u"}}};
    int envelopes = 0;
    for (auto& c : cases) {
        auto in = load(c.b);
        const auto& p = in.problem;
        auto space = enumerate(p);
        FeatureEvaluator phi(in.features.select(c.features), p);
        auto bfs = bfs_optimal(p, goal_test(p));
        ASSERT_TRUE(bfs.solved());
        std::set<FeatureValuation> F;
        State s = p.init;
        F.insert(phi.valuation(s));
        for (ActionId a : bfs.plan) {
            s = p.apply(s, a);
            F.insert(phi.valuation(s));
        }
        std::map<FeatureValuation, std::int64_t> best;
        for (std::uint32_t i = 0; i < space.size(); ++i) {
            auto v = phi.valuation(space.state(i));
            if (!F.count(v)) continue;
            auto [it, fresh] = best.emplace(v, space.cost(i));
            if (!fresh) it->second = std::min(it->second, space.cost(i));
        }
        StateSet E;
        for (std::uint32_t i = 0; i < space.size(); ++i) {
            auto v = phi.valuation(space.state(i));
            if (F.count(v) && best[v] == space.cost(i)) E.push_back(i);
        }
        if (!is_cost_envelope(space, E).holds()) continue;
        ++envelopes;
        auto r = iw_phi(p, phi, goal_test(p));
        ASSERT_TRUE(r.solved()) << c.b.family;
        EXPECT_EQ(r.plan.size(), bfs.plan.size()) << c.b.family;
    }
    EXPECT_GE(envelopes, 1);
}

TEST(Sketches, AcceptedSketchesAreFeatureAcyclic) {
    int checked = 0;
    for (const auto& c : sketch_matrix()) {
        auto sk = parse_sketch(c.bundle.sketch(c.sketch));
        if (!sieve(build_policy_graph(sk)).accepted) continue;
        auto in = load(c.bundle);
        auto space = enumerate(in.problem);
        auto phi = bind(sk, in.features, in.problem);
        EXPECT_TRUE(is_feature_acyclic_on(space, sk, phi)) << c.bundle.family << " " << c.sketch;
        ++checked;
    }
    EXPECT_GT(checked, 20);
}

// Every concrete rule-compatible valuation pair projects onto a graph edge.
TEST(Sketches, EdgeAbstractionIsSound) {
    for (const auto& c : sketch_matrix()) {
        auto sk = parse_sketch(c.bundle.sketch(c.sketch));
        auto g = build_policy_graph(sk);
        std::set<std::pair<BooleanValuation, BooleanValuation>> edges;
        for (const auto& e : g.edges) edges.insert({e.from, e.to});
        auto in = load(c.bundle);
        auto phi = bind(sk, in.features, in.problem);
        std::set<FeatureValuation> vals;
        for (const auto& [s, d] : reference_bfs(in.problem).dist) vals.insert(phi.valuation(s));
        for (const auto& v : vals)
            for (const auto& w : vals) {
                if (!relation(sk, v, w)) continue;
                auto from = boolean_projection(phi.features(), v);
                auto to = boolean_projection(phi.features(), w);
                EXPECT_TRUE(edges.count({from, to}))
                    << c.sketch << " " << format_valuation(v) << " -> " << format_valuation(w);
            }
    }
}

TEST(Sketches, ZeroWidthIffPolicySolves) {
    int solving = 0;
    for (const auto& c : sketch_matrix()) {
        auto sk = parse_sketch(c.bundle.sketch(c.sketch));
        auto in = load(c.bundle);
        auto phi = bind(sk, in.features, in.problem);
        auto space = enumerate(in.problem);
        const bool solves = policy_solves(in.problem, sk, phi);
        auto w = sketch_width_on(space, sk, phi, 0);
        EXPECT_EQ(solves, w.bounded && w.width == 0) << c.bundle.family << " " << c.sketch;
        SiwOptions o;
        o.k_max = 0;
        auto ser = siw_r(in.problem, sk, phi, o);
        auto run = run_policy(in.problem, sk, phi);
        if (solves) {
            EXPECT_TRUE(ser.solved()) << c.sketch;
            EXPECT_TRUE(run.solved()) << c.sketch;
            ++solving;
        }
        if (run.outcome == PolicyOutcome::Stuck) EXPECT_FALSE(ser.solved()) << c.sketch;
    }
    EXPECT_GE(solving, 8);
}

TEST(Sketches, SegmentCountBoundedByValuations) {
    for (const auto& c : sketch_matrix()) {
        auto sk = parse_sketch(c.bundle.sketch(c.sketch));
        if (!sieve(build_policy_graph(sk)).accepted) continue;
        auto in = load(c.bundle);
        auto phi = bind(sk, in.features, in.problem);
        SiwOptions o;
        o.k_max = 2;
        auto r = siw_r(in.problem, sk, phi, o);
        if (!r.solved()) continue;
        std::set<FeatureValuation> seen;
        for (const auto& seg : r.segments) {
            seen.insert(seg.f_start);
            seen.insert(seg.f_end);
        }
        EXPECT_LE(r.segments.size(), seen.size()) << c.sketch;
        EXPECT_TRUE(plan_reaches_goal(in.problem, r.plan));
    }
}

TEST(Complexity, NoveltyBoundsHold) {
    for (const auto& c : property_matrix()) {
        auto in = load(c.bundle);
        const auto& p = in.problem;
        auto never = [](const State&) { return false; };
        for (int k = 1; k <= 2; ++k) {
            std::uint64_t bound = 0;
            for (int i = 1; i <= k; ++i) bound += choose(p.num_atoms(), static_cast<std::uint64_t>(i));
            // A goal that never holds runs the search to exhaustion.
            EXPECT_LE(iw_k(p, k, never).stats.expanded, bound) << c.label;
            EXPECT_LE(iw_k(p, k, goal_test(p)).stats.expanded, bound) << c.label;
        }
        if (c.tuples.empty()) continue;
        auto T = parse_tuples(c.bundle.tuple_set(c.tuples), p);
        EXPECT_LE(iw_t(p, T, never).stats.expanded, T.count());
    }
}

TEST(Determinism, RepeatedRunsAgree) {
    for (const auto& c : property_matrix()) {
        auto a = load(c.bundle);
        auto b = load(c.bundle);
        auto ra = iw(a.problem, goal_test(a.problem), {}, 2);
        auto rb = iw(b.problem, goal_test(b.problem), {}, 2);
        EXPECT_EQ(ra.plan, rb.plan);
        EXPECT_EQ(ra.stats.expanded, rb.stats.expanded);
        EXPECT_EQ(ra.stats.generated, rb.stats.generated);
    }
}

}  // namespace
