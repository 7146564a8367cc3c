#include "iwkit/siw.hpp"

#include <deque>
#include <limits>
#include <unordered_set>

#include "iwkit/errors.hpp"

namespace iwkit {

const char* to_string(SiwStatus s) {
    switch (s) {
        case SiwStatus::Solved: return "solved";
        case SiwStatus::InnerFailure: return "inner-failure";
        case SiwStatus::CycleGuard: return "cycle-guard";
    }
    return "?";
}

const char* to_string(PolicyOutcome o) {
    switch (o) {
        case PolicyOutcome::Goal: return "goal";
        case PolicyOutcome::Stuck: return "stuck";
        case PolicyOutcome::Cyclic: return "cyclic";
        case PolicyOutcome::StepCap: return "step-cap";
    }
    return "?";
}

namespace {

std::uint64_t saturating_pow(std::uint64_t base, std::size_t exp) {
    std::uint64_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base)
            return std::numeric_limits<std::uint64_t>::max();
        r *= base;
    }
    return r;
}

void add_stats(SearchStats& into, const SearchStats& s) {
    into.expanded += s.expanded;
    into.generated += s.generated;
    into.novel_registrations += s.novel_registrations;
    into.pruned += s.pruned;
    into.max_queue = std::max(into.max_queue, s.max_queue);
    into.wall_ms += s.wall_ms;
}

}  // namespace

SerializedResult siw_r(const GroundProblem& p, const Sketch& sk, const FeatureEvaluator& phi,
                       const SiwOptions& opts) {
    if (phi.size() != sk.num_features())
        throw contract_violation("feature evaluator does not match the sketch");
    std::size_t numerical = 0;
    for (const auto& f : sk.features) numerical += f.kind == FeatureKind::Numerical;
    const std::uint64_t cap = opts.max_segments
                                  ? opts.max_segments
                                  : saturating_pow(std::max<std::uint64_t>(p.num_atoms(), 2),
                                                   numerical + 1);
    SerializedResult res;
    State s = opts.search.start ? *opts.search.start : p.init;
    while (!p.is_goal(s)) {
        if (res.segments.size() >= cap) {
            res.status = SiwStatus::CycleGuard;
            res.diagnostic = "segment cap " + std::to_string(cap) + " reached";
            return res;
        }
        const FeatureValuation fs = phi.valuation(s);
        const State root = s;
        StatePredicate subgoal = [&](const State& x) {
            if (p.is_goal(x)) return true;
            if (x == root) return false;
            return relation(sk, fs, phi.valuation(x));
        };
        SearchOptions so = opts.search;
        so.start = s;
        SearchResult r = iw(p, subgoal, so, opts.k_max);
        add_stats(res.total, r.stats);
        if (!r.solved()) {
            res.status = SiwStatus::InnerFailure;
            res.diagnostic = "segment " + std::to_string(res.segments.size()) +
                             ": no subgoal found with k <= " + std::to_string(opts.k_max) +
                             (r.diagnostic.empty() ? "" : " (" + r.diagnostic + ")");
            return res;
        }
        Segment seg;
        seg.start = s;
        seg.end = r.end_state;
        seg.plan = r.plan;
        seg.k = r.k;
        seg.f_start = fs;
        seg.f_end = phi.valuation(r.end_state);
        seg.stats = r.stats;
        res.plan.insert(res.plan.end(), r.plan.begin(), r.plan.end());
        s = r.end_state;
        res.segments.push_back(std::move(seg));
    }
    res.status = SiwStatus::Solved;
    return res;
}

std::string format_segment(std::size_t index, const Segment& seg) {
    return "segment " + std::to_string(index) + ": k=" + std::to_string(seg.k) +
           " len=" + std::to_string(seg.plan.size()) + " f(start)=" +
           format_valuation(seg.f_start) + " f(end)=" + format_valuation(seg.f_end);
}

PolicyRun run_policy(const GroundProblem& p, const Sketch& sk, const FeatureEvaluator& phi,
                     std::uint64_t step_cap, bool remember_states) {
    if (phi.size() != sk.num_features())
        throw contract_violation("feature evaluator does not match the sketch");
    PolicyRun run;
    State s = p.init;
    std::unordered_set<State, StateHash> visited;
    visited.insert(s);
    run.trajectory.push_back(s);
    for (;;) {
        if (p.is_goal(s)) {
            run.outcome = PolicyOutcome::Goal;
            return run;
        }
        if (run.plan.size() >= step_cap) {
            run.outcome = PolicyOutcome::StepCap;
            run.diagnostic = "step cap " + std::to_string(step_cap) + " exceeded";
            return run;
        }
        const FeatureValuation fs = phi.valuation(s);
        bool moved = false;
        for (ActionId a : p.applicable_actions(s)) {
            State next = p.apply(s, a);
            if (!relation(sk, fs, phi.valuation(next))) continue;
            run.plan.push_back(a);
            run.trajectory.push_back(next);
            if (remember_states && !visited.insert(next).second) {
                run.outcome = PolicyOutcome::Cyclic;
                run.diagnostic = "state revisited after " + std::to_string(run.plan.size()) +
                                 " steps";
                return run;
            }
            s = std::move(next);
            moved = true;
            break;
        }
        if (!moved) {
            run.outcome = PolicyOutcome::Stuck;
            run.diagnostic = "no rule-compatible successor after " +
                             std::to_string(run.plan.size()) + " steps";
            return run;
        }
    }
}

std::vector<State> policy_reachable(const GroundProblem& p, const Sketch& sk,
                                    const FeatureEvaluator& phi, std::size_t cap) {
    std::vector<State> order{p.init};
    std::unordered_set<State, StateHash> seen{p.init};
    for (std::size_t i = 0; i < order.size(); ++i) {
        const State s = order[i];
        if (p.is_goal(s)) continue;
        const FeatureValuation fs = phi.valuation(s);
        for (ActionId a : p.applicable_actions(s)) {
            State next = p.apply(s, a);
            if (seen.count(next) || !relation(sk, fs, phi.valuation(next))) continue;
            if (order.size() >= cap)
                throw cap_exceeded("policy closure exceeds " + std::to_string(cap) + " states");
            seen.insert(next);
            order.push_back(std::move(next));
        }
    }
    return order;
}

}  // namespace iwkit
