#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "iwkit/novelty.hpp"
#include "iwkit/strips.hpp"

namespace iwkit {

class FeatureEvaluator;

enum class Outcome { Plan, Failure, NoPlanExists };

const char* to_string(Outcome o);

struct SearchStats {
    std::uint64_t expanded = 0;
    std::uint64_t generated = 0;
    std::uint64_t max_queue = 0;
    std::uint64_t novel_registrations = 0;
    std::uint64_t pruned = 0;
    std::uint64_t pruned_duplicates = 0;  // only counted when duplicate tracking is on
    double wall_ms = 0.0;
};

struct SearchResult {
    Outcome outcome = Outcome::Failure;
    std::vector<ActionId> plan;
    SearchStats stats;
    int k = -1;              // width parameter that produced the result, if any
    bool capped = false;     // stopped by a resource limit
    std::string diagnostic;
    State end_state;         // state reached by the plan

    [[nodiscard]] bool solved() const noexcept { return outcome == Outcome::Plan; }
};

struct SearchOptions {
    std::optional<State> start;      // defaults to the initial state
    std::uint64_t max_generated = 0; // 0 = unlimited
    double max_wall_ms = 0.0;        // 0 = unlimited
    bool track_duplicates = false;   // count pruned nodes whose state was expanded before
};

SearchResult bfs_optimal(const GroundProblem& p, const StatePredicate& goal,
                         const SearchOptions& opts = {});
SearchResult iw_t(const GroundProblem& p, const TupleSet& T, const StatePredicate& goal,
                  const SearchOptions& opts = {});
SearchResult iw_k(const GroundProblem& p, int k, const StatePredicate& goal,
                  const SearchOptions& opts = {});
// Runs IW(0), IW(1), ... up to k_max (N when negative).
SearchResult iw(const GroundProblem& p, const StatePredicate& goal, const SearchOptions& opts = {},
                int k_max = -1);
SearchResult iw_phi(const GroundProblem& p, const FeatureEvaluator& phi,
                    const StatePredicate& goal, const SearchOptions& opts = {});

StatePredicate goal_test(const GroundProblem& p);

std::string format_plan(const GroundProblem& p, const std::vector<ActionId>& plan);

}  // namespace iwkit
