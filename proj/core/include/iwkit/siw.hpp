#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iwkit/features.hpp"
#include "iwkit/search.hpp"
#include "iwkit/sketch.hpp"

namespace iwkit {

struct Segment {
    State start;
    State end;
    std::vector<ActionId> plan;
    int k = 0;
    FeatureValuation f_start;
    FeatureValuation f_end;
    SearchStats stats;
};

enum class SiwStatus { Solved, InnerFailure, CycleGuard };

const char* to_string(SiwStatus s);

struct SerializedResult {
    SiwStatus status = SiwStatus::InnerFailure;
    std::vector<ActionId> plan;
    std::vector<Segment> segments;
    SearchStats total;
    std::string diagnostic;

    [[nodiscard]] bool solved() const noexcept { return status == SiwStatus::Solved; }
};

struct SiwOptions {
    int k_max = 2;
    std::uint64_t max_segments = 0;  // 0 = N^(l+1), l = number of numerical features
    SearchOptions search;            // limits for each inner search
};

// `phi` evaluates the sketch's features in sketch order (see bind()).
SerializedResult siw_r(const GroundProblem& p, const Sketch& sk, const FeatureEvaluator& phi,
                       const SiwOptions& opts = {});

std::string format_segment(std::size_t index, const Segment& seg);

enum class PolicyOutcome { Goal, Stuck, Cyclic, StepCap };

const char* to_string(PolicyOutcome o);

struct PolicyRun {
    PolicyOutcome outcome = PolicyOutcome::Stuck;
    std::vector<ActionId> plan;
    std::vector<State> trajectory;  // s0 .. last state
    std::string diagnostic;

    [[nodiscard]] bool solved() const noexcept { return outcome == PolicyOutcome::Goal; }
};

// Follows the first successor compatible with some rule.
PolicyRun run_policy(const GroundProblem& p, const Sketch& sk, const FeatureEvaluator& phi,
                     std::uint64_t step_cap = 1'000'000, bool remember_states = true);

// States reachable from s0 through rule-compatible transitions. Goal states
// are not expanded. Order is breadth-first.
std::vector<State> policy_reachable(const GroundProblem& p, const Sketch& sk,
                                    const FeatureEvaluator& phi, std::size_t cap = 200'000);

}  // namespace iwkit
