#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "iwkit/features.hpp"
#include "iwkit/novelty.hpp"
#include "iwkit/search.hpp"
#include "iwkit/sketch.hpp"
#include "iwkit/strips.hpp"

namespace iwkit {

inline constexpr std::int64_t kUnreachable = -1;

// Full forward closure of a problem; index 0 is the initial state.
class StateSpace {
public:
    [[nodiscard]] const GroundProblem& problem() const noexcept { return *problem_; }
    [[nodiscard]] std::size_t size() const noexcept { return states_.size(); }
    [[nodiscard]] const State& state(std::uint32_t i) const { return states_[i]; }
    [[nodiscard]] const std::vector<State>& states() const noexcept { return states_; }
    [[nodiscard]] std::optional<std::uint32_t> find(const State& s) const;

    // (action, target) pairs in ascending action order.
    [[nodiscard]] const std::vector<std::pair<ActionId, std::uint32_t>>& successors(
        std::uint32_t i) const {
        return succ_[i];
    }
    [[nodiscard]] const std::vector<std::uint32_t>& predecessors(std::uint32_t i) const {
        return pred_[i];
    }

    [[nodiscard]] bool is_goal(std::uint32_t i) const { return goal_[i]; }
    [[nodiscard]] std::int64_t cost(std::uint32_t i) const { return cost_[i]; }
    // Problem cost for goal states, cost() otherwise.
    [[nodiscard]] std::int64_t cost_star(std::uint32_t i) const {
        return goal_[i] ? problem_cost_ : cost_[i];
    }
    [[nodiscard]] std::int64_t goal_distance(std::uint32_t i) const { return goal_distance_[i]; }
    [[nodiscard]] std::int64_t problem_cost() const noexcept { return problem_cost_; }
    [[nodiscard]] bool solvable() const noexcept { return problem_cost_ != kUnreachable; }

    // Min cost of a state containing t; kUnreachable if none.
    [[nodiscard]] std::int64_t tuple_cost(const AtomTuple& t) const;

    // Forward BFS distances from `from` within the space.
    [[nodiscard]] std::vector<std::int64_t> distances_from(std::uint32_t from) const;

    friend StateSpace enumerate(const GroundProblem& p, std::size_t cap);

private:
    const GroundProblem* problem_ = nullptr;
    std::vector<State> states_;
    std::unordered_map<State, std::uint32_t, StateHash> index_;
    std::vector<std::vector<std::pair<ActionId, std::uint32_t>>> succ_;
    std::vector<std::vector<std::uint32_t>> pred_;
    std::vector<char> goal_;
    std::vector<std::int64_t> cost_;
    std::vector<std::int64_t> goal_distance_;
    std::int64_t problem_cost_ = kUnreachable;
};

inline constexpr std::size_t kDefaultStateCap = 200'000;

StateSpace enumerate(const GroundProblem& p, std::size_t cap = kDefaultStateCap);

using StateSet = std::vector<std::uint32_t>;  // sorted state indices

StateSet opt_states(const StateSpace& space, const TupleSet& T);
StateSet opt_states(const StateSpace& space, const AtomTuple& t);

enum class Verdict { Holds, Fails, UnreachableTuple };

const char* to_string(Verdict v);

struct EnvelopeReport {
    Verdict verdict = Verdict::Fails;
    std::optional<std::uint32_t> witness;  // failing state, if any
    std::string detail;

    [[nodiscard]] bool holds() const noexcept { return verdict == Verdict::Holds; }
};

EnvelopeReport is_cost_envelope(const StateSpace& space, const StateSet& E);

enum class AdmissibilityRoute { Envelope, Direct };

// Direct route checks the definition on every state of OPT(t); goal states
// are exempt from the extension condition.
EnvelopeReport is_admissible(const StateSpace& space, const TupleSet& T,
                             AdmissibilityRoute route = AdmissibilityRoute::Envelope);

// Direct route with only optimal goal states exempt.
EnvelopeReport is_admissible_strict(const StateSpace& space, const TupleSet& T);

// True iff no optimal goal-reaching trajectory stays inside OPT(T^k).
bool lower_bound_witness(const StateSpace& space, int k);

struct WidthReport {
    bool bounded = false;
    int k = -1;              // width found, or the largest k tried
    std::int64_t optimal = kUnreachable;
    std::string detail;
};

WidthReport effective_width(const GroundProblem& p, int k_cap);
WidthReport effective_width(const GroundProblem& p, const StatePredicate& goal,
                            const State& start, int k_cap);

bool is_feature_acyclic_on(const StateSpace& space, const Sketch& sk, const FeatureEvaluator& phi);

struct SketchWidthReport {
    bool bounded = false;
    int width = -1;
    std::size_t subproblems = 0;
    std::optional<std::uint32_t> worst;  // subproblem root with the largest width
    std::string detail;
};

SketchWidthReport sketch_width_on(const StateSpace& space, const Sketch& sk,
                                  const FeatureEvaluator& phi, int k_cap);

std::string render_state(const StateSpace& space, std::uint32_t i);

}  // namespace iwkit
