#pragma once

// Shared fixtures and brute-force reference computations. The references
// use only apply/applicable_actions so they stay independent of the
// search and oracle modules they check.

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "iwkit/domains.hpp"
#include "iwkit/grounder.hpp"
#include "iwkit/strips.hpp"

namespace iwkit::testing {

inline AtomId atom(const GroundProblem& p, std::string_view text) {
    const AtomId* a = p.find_atom(text);
    if (!a) throw std::invalid_argument("no atom " + std::string(text));
    return *a;
}

inline State state_of(const GroundProblem& p, const std::vector<std::string>& atoms) {
    std::vector<AtomId> ids;
    for (const auto& a : atoms) ids.push_back(atom(p, a));
    return p.state_from_atoms(ids);
}

inline std::vector<std::string> action_names(const GroundProblem& p,
                                             const std::vector<ActionId>& ids) {
    std::vector<std::string> out;
    for (ActionId a : ids) out.push_back(p.action_name(a));
    return out;
}

// Reference BFS keyed by std::map; returns goal distance or nullopt.
struct Reference {
    std::map<State, std::int64_t> dist;  // every reachable state
    std::optional<std::int64_t> optimal;
};

inline Reference reference_bfs(const GroundProblem& p, const StatePredicate& goal,
                               std::size_t cap = 300'000) {
    Reference r;
    std::deque<State> open{p.init};
    r.dist[p.init] = 0;
    while (!open.empty()) {
        State s = open.front();
        open.pop_front();
        const auto d = r.dist[s];
        if (goal(s) && (!r.optimal || d < *r.optimal)) r.optimal = d;
        for (ActionId a : p.applicable_actions(s)) {
            State t = p.apply(s, a);
            if (r.dist.count(t)) continue;
            if (r.dist.size() >= cap) throw std::runtime_error("reference space too large");
            r.dist[t] = d + 1;
            open.push_back(std::move(t));
        }
    }
    return r;
}

inline Reference reference_bfs(const GroundProblem& p) {
    return reference_bfs(p, [&](const State& s) { return p.is_goal(s); });
}

inline bool plan_reaches_goal(const GroundProblem& p, const std::vector<ActionId>& plan,
                              const StatePredicate& goal, const State& from) {
    State s = from;
    for (ActionId a : plan) {
        const auto& act = p.actions.at(a);
        if (!s.contains_all(act.pre)) return false;
        s = p.apply(s, a);
    }
    return goal(s);
}

inline bool plan_reaches_goal(const GroundProblem& p, const std::vector<ActionId>& plan) {
    return plan_reaches_goal(p, plan, [&](const State& s) { return p.is_goal(s); }, p.init);
}

inline std::uint64_t choose(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Small hand-written domains.
inline const char* kTwoBlocksProblem = R"((define (problem two)
  (:domain blocksworld)
  (:objects a b)
  (:init (on a b) (ontable b) (clear a) (handempty))
  (:goal (and (ontable a))))
)";

inline const char* kToyDomain = R"((define (domain toy)
  (:requirements :strips)
  (:predicates (p) (q) (r ?x) (link ?x ?y))
  (:action noop
    :parameters ()
    :precondition (and)
    :effect (and))
  (:action make-p
    :parameters ()
    :precondition (and)
    :effect (and (p)))
  (:action walk
    :parameters (?x ?y)
    :precondition (and (r ?x) (link ?x ?y))
    :effect (and (r ?y) (not (r ?x)))))
)";

inline const char* kToyProblem = R"((define (problem toy-1)
  (:domain toy)
  (:objects a b c)
  (:init (r a) (link a b))
  (:goal (and (q))))
)";

inline GroundProblem blocks_domain_with(const char* problem) {
    return load_problem(blocks_clear(0).domain, problem);
}

}  // namespace iwkit::testing
