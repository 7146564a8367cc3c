#include "iwkit/search.hpp"

#include <chrono>
#include <deque>
#include <unordered_set>

#include "iwkit/errors.hpp"
#include "iwkit/features.hpp"

namespace iwkit {

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Plan: return "plan";
        case Outcome::Failure: return "failure";
        case Outcome::NoPlanExists: return "no-plan";
    }
    return "?";
}

StatePredicate goal_test(const GroundProblem& p) {
    return [&p](const State& s) { return p.is_goal(s); };
}

std::string format_plan(const GroundProblem& p, const std::vector<ActionId>& plan) {
    std::string out;
    for (ActionId a : plan) out += p.action_name(a) + "\n";
    return out;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Node {
    State state;
    std::int64_t parent;
    ActionId action;
};

class Timer {
public:
    Timer() : start_(Clock::now()) {}
    double ms() const {
        return std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    }

private:
    Clock::time_point start_;
};

std::vector<ActionId> extract(const std::vector<Node>& nodes, std::int64_t i) {
    std::vector<ActionId> plan;
    while (nodes[static_cast<std::size_t>(i)].parent >= 0) {
        plan.push_back(nodes[static_cast<std::size_t>(i)].action);
        i = nodes[static_cast<std::size_t>(i)].parent;
    }
    return {plan.rbegin(), plan.rend()};
}

bool over_limit(const SearchOptions& o, const SearchStats& st, const Timer& t) {
    if (o.max_generated && st.generated > o.max_generated) return true;
    if (o.max_wall_ms > 0 && (st.generated & 255) == 0 && t.ms() > o.max_wall_ms) return true;
    return false;
}

void finish_capped(SearchResult& r, const SearchOptions& o) {
    r.outcome = Outcome::Failure;
    r.capped = true;
    r.diagnostic = "resource limit reached (max_generated=" + std::to_string(o.max_generated) +
                   ", max_wall_ms=" + std::to_string(o.max_wall_ms) + ")";
}

// Breadth-first search with goal test at dequeue. A dequeued non-goal node is
// expanded only when `novel(state, parent_state, action)` says so.
template <typename Novel>
SearchResult pruned_bfs(const GroundProblem& p, const StatePredicate& goal,
                        const SearchOptions& opts, Novel&& novel) {
    Timer timer;
    SearchResult r;
    std::vector<Node> nodes;
    std::deque<std::int64_t> queue;
    std::unordered_set<State, StateHash> expanded_states;

    nodes.push_back({opts.start ? *opts.start : p.init, -1, 0});
    queue.push_back(0);
    r.stats.generated = 1;
    r.stats.max_queue = 1;

    while (!queue.empty()) {
        std::int64_t i = queue.front();
        queue.pop_front();
        const State& s = nodes[static_cast<std::size_t>(i)].state;
        if (goal(s)) {
            r.outcome = Outcome::Plan;
            r.plan = extract(nodes, i);
            r.end_state = s;
            r.stats.wall_ms = timer.ms();
            return r;
        }
        const Node& n = nodes[static_cast<std::size_t>(i)];
        const State* parent = n.parent >= 0 ? &nodes[static_cast<std::size_t>(n.parent)].state : nullptr;
        if (!novel(s, parent, n.action)) {
            ++r.stats.pruned;
            if (opts.track_duplicates && expanded_states.count(s)) ++r.stats.pruned_duplicates;
            continue;
        }
        ++r.stats.novel_registrations;
        ++r.stats.expanded;
        if (opts.track_duplicates) expanded_states.insert(s);
        State copy = s;  // nodes may reallocate below
        for (ActionId a : p.applicable_actions(copy)) {
            nodes.push_back({p.apply(copy, a), i, a});
            queue.push_back(static_cast<std::int64_t>(nodes.size() - 1));
            ++r.stats.generated;
            if (over_limit(opts, r.stats, timer)) {
                finish_capped(r, opts);
                r.stats.wall_ms = timer.ms();
                return r;
            }
        }
        r.stats.max_queue = std::max<std::uint64_t>(r.stats.max_queue, queue.size());
    }
    r.outcome = Outcome::Failure;
    r.diagnostic = "queue exhausted";
    r.stats.wall_ms = timer.ms();
    return r;
}

std::vector<AtomId> flipped(const GroundProblem& p, const State& parent, ActionId a) {
    std::vector<AtomId> out;
    const auto& act = p.actions[a];
    for (AtomId x : act.add)
        if (!parent.contains(x)) out.push_back(x);
    for (AtomId x : act.del)
        if (parent.contains(x)) out.push_back(x);
    return out;
}

}  // namespace

SearchResult bfs_optimal(const GroundProblem& p, const StatePredicate& goal,
                         const SearchOptions& opts) {
    std::unordered_set<State, StateHash> seen;
    Timer timer;
    SearchResult r;
    std::vector<Node> nodes;
    std::deque<std::int64_t> queue;
    nodes.push_back({opts.start ? *opts.start : p.init, -1, 0});
    seen.insert(nodes[0].state);
    queue.push_back(0);
    r.stats.generated = 1;
    r.stats.max_queue = 1;
    while (!queue.empty()) {
        std::int64_t i = queue.front();
        queue.pop_front();
        State s = nodes[static_cast<std::size_t>(i)].state;
        if (goal(s)) {
            r.outcome = Outcome::Plan;
            r.plan = extract(nodes, i);
            r.end_state = s;
            r.stats.wall_ms = timer.ms();
            return r;
        }
        ++r.stats.expanded;
        for (ActionId a : p.applicable_actions(s)) {
            State next = p.apply(s, a);
            if (!seen.insert(next).second) continue;
            nodes.push_back({std::move(next), i, a});
            queue.push_back(static_cast<std::int64_t>(nodes.size() - 1));
            ++r.stats.generated;
            if (over_limit(opts, r.stats, timer)) {
                finish_capped(r, opts);
                r.stats.wall_ms = timer.ms();
                return r;
            }
        }
        r.stats.max_queue = std::max<std::uint64_t>(r.stats.max_queue, queue.size());
    }
    r.outcome = Outcome::NoPlanExists;
    r.diagnostic = "state space exhausted";
    r.stats.wall_ms = timer.ms();
    return r;
}

SearchResult iw_t(const GroundProblem& p, const TupleSet& T, const StatePredicate& goal,
                  const SearchOptions& opts) {
    auto table = make_table(T, p.num_atoms());
    auto r = pruned_bfs(p, goal, opts, [&](const State& s, const State* parent, ActionId a) {
        if (!parent) return table->register_state(s);
        auto delta = flipped(p, *parent, a);
        return table->register_state(s, &delta);
    });
    return r;
}

SearchResult iw_k(const GroundProblem& p, int k, const StatePredicate& goal,
                  const SearchOptions& opts) {
    if (k < 0) throw contract_violation("iw_k requires k >= 0");
    if (k == 0) {
        Timer timer;
        SearchResult r;
        r.k = 0;
        State s0 = opts.start ? *opts.start : p.init;
        r.stats.generated = 1;
        r.stats.max_queue = 1;
        if (goal(s0)) {
            r.outcome = Outcome::Plan;
            r.end_state = s0;
            r.stats.wall_ms = timer.ms();
            return r;
        }
        r.stats.expanded = 1;
        r.stats.novel_registrations = 1;
        auto apps = p.applicable_actions(s0);
        r.stats.max_queue = std::max<std::uint64_t>(1, apps.size());
        for (ActionId a : apps) {
            ++r.stats.generated;
            State next = p.apply(s0, a);
            if (goal(next)) {
                r.outcome = Outcome::Plan;
                r.plan = {a};
                r.end_state = std::move(next);
                r.stats.wall_ms = timer.ms();
                return r;
            }
        }
        r.stats.pruned = apps.size();
        r.outcome = Outcome::Failure;
        r.diagnostic = "no goal within one step";
        r.stats.wall_ms = timer.ms();
        return r;
    }
    auto table = make_table(all_tuples_up_to(p, k));
    auto r = pruned_bfs(p, goal, opts, [&](const State& s, const State* parent, ActionId a) {
        if (!parent) return table->register_state(s);
        auto delta = flipped(p, *parent, a);
        return table->register_state(s, &delta);
    });
    r.k = k;
    return r;
}

SearchResult iw(const GroundProblem& p, const StatePredicate& goal, const SearchOptions& opts,
                int k_max) {
    const int limit = k_max < 0 ? static_cast<int>(p.num_atoms()) : k_max;
    SearchOptions o = opts;
    o.track_duplicates = true;
    SearchStats total;
    SearchResult last;
    for (int k = 0; k <= limit; ++k) {
        last = iw_k(p, k, goal, o);
        total.expanded += last.stats.expanded;
        total.generated += last.stats.generated;
        total.novel_registrations += last.stats.novel_registrations;
        total.pruned += last.stats.pruned;
        total.max_queue = std::max(total.max_queue, last.stats.max_queue);
        total.wall_ms += last.stats.wall_ms;
        if (last.solved() || last.capped) {
            last.stats = total;
            return last;
        }
        // Every pruned node repeated an expanded state: the reachable space is exhausted.
        if (k >= 1 && last.stats.pruned == last.stats.pruned_duplicates) {
            last.outcome = Outcome::NoPlanExists;
            last.diagnostic = "IW(" + std::to_string(k) + ") pruned only duplicate states";
            last.stats = total;
            return last;
        }
    }
    last.stats = total;
    // IW(N) prunes only duplicates, so failing it is exhaustive.
    last.outcome = static_cast<std::size_t>(limit) >= p.num_atoms() ? Outcome::NoPlanExists
                                                                    : Outcome::Failure;
    last.diagnostic = "no IW(k) call with k <= " + std::to_string(limit) + " found a plan";
    return last;
}

SearchResult iw_phi(const GroundProblem& p, const FeatureEvaluator& phi,
                    const StatePredicate& goal, const SearchOptions& opts) {
    std::unordered_set<FeatureValuation, ValuationHash> seen;
    return pruned_bfs(p, goal, opts, [&](const State& s, const State*, ActionId) {
        return seen.insert(phi.valuation(s)).second;
    });
}

}  // namespace iwkit
