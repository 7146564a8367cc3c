#include <gtest/gtest.h>

#include <random>

#include "iwkit/domains.hpp"
#include "iwkit/errors.hpp"
#include "iwkit/pddl.hpp"
#include "iwkit/sexpr.hpp"
#include "support.hpp"

using namespace iwkit;

namespace {

std::vector<Bundle> sample_bundles() {
    return {blocks_clear(2, 1, true),
            blocks_on(1, 2),
            blocks({{"a", "b"}, {"c"}}, {{"c", "b", "a"}}),
            grid(3, 3, {1, 1}, {3, 3}),
            grid2(3, 2, {1, 1}, {3, 2}),
            delivery(3, 3, {1, 1}, {3, 3}, {{2, 1}, {1, 2}}),
            marbles({3, 1}),
            hanoi(3),
            hanoi(4, 1, 3, false)};
}

TEST(SExpr, ReadsNestedListsAndLowercases) {
    auto e = read_sexpr("(Define (Domain X) ; comment\n (:predicates (p ?x)))");
    ASSERT_TRUE(e.head_is("define"));
    EXPECT_EQ(e.items.size(), 3u);
    EXPECT_TRUE(e.items[1].items[1].is_atom("x"));
    EXPECT_EQ(e.items[2].line, 2);
}

TEST(SExpr, RejectsUnbalancedInput) {
    EXPECT_THROW(read_sexpr("(a (b)"), parse_error);
    EXPECT_THROW(read_sexpr("(a))"), parse_error);
    EXPECT_THROW(read_sexpr(""), parse_error);
    EXPECT_THROW(read_sexpr("(a) (b)"), parse_error);
}

TEST(SExpr, ErrorCarriesPosition) {
    try {
        (void)read_sexpr("(a\n  (b\n");
        FAIL();
    } catch (const parse_error& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_EQ(e.column(), 3);
    }
}

TEST(Domain, BlocksworldHasFourSchemas) {
    auto d = parse_domain(blocks_clear(1).domain);
    EXPECT_EQ(d.name, "blocksworld");
    ASSERT_EQ(d.actions.size(), 4u);
    EXPECT_EQ(d.actions[0].name, "pickup");
    EXPECT_EQ(d.actions[3].name, "unstack");
    EXPECT_EQ(d.predicates.size(), 5u);
}

TEST(Domain, ArityMismatchIsReported) {
    const char* text = R"((define (domain d) (:predicates (on ?x ?y))
      (:action a :parameters (?x) :precondition (and (on ?x)) :effect (and))))";
    EXPECT_THROW(parse_domain(text), semantic_error);
}

TEST(Domain, UndeclaredPredicateIsReported) {
    const char* text = R"((define (domain d) (:predicates (p))
      (:action a :parameters () :precondition (and (q)) :effect (and))))";
    EXPECT_THROW(parse_domain(text), semantic_error);
}

TEST(Domain, UnboundVariableIsReported) {
    const char* text = R"((define (domain d) (:predicates (p ?x))
      (:action a :parameters () :precondition (and (p ?y)) :effect (and))))";
    EXPECT_THROW(parse_domain(text), semantic_error);
}

TEST(Domain, EmptyEffectIsAccepted) {
    const char* text = R"((define (domain d) (:predicates (p))
      (:action a :parameters () :precondition (and (p)) :effect (and))))";
    auto d = parse_domain(text);
    ASSERT_EQ(d.actions.size(), 1u);
    EXPECT_TRUE(d.actions[0].add.empty());
    EXPECT_TRUE(d.actions[0].del.empty());
}

TEST(Problem, GridHasOneObjectPerCell) {
    auto p = parse_problem(grid(3, 3, {1, 1}, {3, 3}).problem);
    EXPECT_EQ(p.objects.size(), 9u);
    EXPECT_EQ(p.domain, "grid");
}

TEST(Problem, NegativeGoalIsAccepted) {
    auto b = marbles({2});
    auto p = parse_problem(b.problem, parse_domain(b.domain));
    ASSERT_EQ(p.goal.size(), 1u);
    EXPECT_TRUE(p.goal[0].negated);
    EXPECT_EQ(p.goal[0].atom.predicate, "ontable");
}

TEST(Problem, UndeclaredGoalObjectIsReported) {
    const char* text = R"((define (problem q) (:domain blocksworld) (:objects a)
      (:init (clear a)) (:goal (and (clear z)))))";
    EXPECT_THROW(parse_problem(text), semantic_error);
}

TEST(Problem, DomainMismatchIsReported) {
    auto b = grid(2, 1, {1, 1}, {2, 1});
    EXPECT_THROW(parse_problem(b.problem, parse_domain(blocks_clear(1).domain)), semantic_error);
}

TEST(RoundTrip, GeneratedTextsSurvivePrintAndParse) {
    for (const auto& b : sample_bundles()) {
        SCOPED_TRACE(b.family);
        auto d = parse_domain(b.domain);
        auto p = parse_problem(b.problem, d);
        EXPECT_EQ(parse_domain(to_pddl(d)), d);
        EXPECT_EQ(parse_problem(to_pddl(p), d), p);
    }
}

// Mutated inputs must produce an AST or a typed diagnostic, never a crash
// or an unrelated exception.
TEST(Fuzz, ParserIsTotalOnMutatedInputs) {
    std::mt19937 rng(20240611);
    const std::string alphabet = "()?:- abcxyz\n;\t&,0123456789";
    int parsed = 0;
    for (const auto& b : sample_bundles()) {
        for (const std::string* src : {&b.domain, &b.problem}) {
            for (int round = 0; round < 150; ++round) {
                std::string text = *src;
                const int edits = 1 + static_cast<int>(rng() % 4);
                for (int e = 0; e < edits && !text.empty(); ++e) {
                    const std::size_t at = rng() % text.size();
                    switch (rng() % 3) {
                        case 0: text.erase(at, 1 + rng() % 8); break;
                        case 1: text.insert(at, 1, alphabet[rng() % alphabet.size()]); break;
                        default: text[at] = static_cast<char>(rng() % 256); break;
                    }
                }
                try {
                    if (src == &b.domain) (void)parse_domain(text);
                    else (void)parse_problem(text);
                    ++parsed;
                } catch (const parse_error&) {
                } catch (const semantic_error&) {
                }
            }
        }
    }
    EXPECT_GT(parsed, 0);
}

}  // namespace
