#include "iwkit/oracle.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include "iwkit/errors.hpp"

namespace iwkit {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Holds: return "holds";
        case Verdict::Fails: return "fails";
        case Verdict::UnreachableTuple: return "unreachable-tuple";
    }
    return "?";
}

std::optional<std::uint32_t> StateSpace::find(const State& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::int64_t StateSpace::tuple_cost(const AtomTuple& t) const {
    // States are stored in breadth-first order, so the first match is cheapest.
    for (const auto& s : states_)
        if (holds(t, s)) return cost_[static_cast<std::size_t>(&s - states_.data())];
    return kUnreachable;
}

std::vector<std::int64_t> StateSpace::distances_from(std::uint32_t from) const {
    std::vector<std::int64_t> d(states_.size(), kUnreachable);
    std::deque<std::uint32_t> q{from};
    d[from] = 0;
    while (!q.empty()) {
        auto i = q.front();
        q.pop_front();
        for (auto [a, j] : succ_[i]) {
            (void)a;
            if (d[j] != kUnreachable) continue;
            d[j] = d[i] + 1;
            q.push_back(j);
        }
    }
    return d;
}

StateSpace enumerate(const GroundProblem& p, std::size_t cap) {
    StateSpace sp;
    sp.problem_ = &p;
    sp.states_.push_back(p.init);
    sp.index_.emplace(p.init, 0);
    sp.cost_.push_back(0);
    for (std::uint32_t i = 0; i < sp.states_.size(); ++i) {
        const State s = sp.states_[i];
        std::vector<std::pair<ActionId, std::uint32_t>> out;
        for (ActionId a : p.applicable_actions(s)) {
            State next = p.apply(s, a);
            auto it = sp.index_.find(next);
            std::uint32_t j;
            if (it == sp.index_.end()) {
                if (sp.states_.size() >= cap)
                    throw cap_exceeded("state space exceeds " + std::to_string(cap) + " states");
                j = static_cast<std::uint32_t>(sp.states_.size());
                sp.index_.emplace(next, j);
                sp.states_.push_back(std::move(next));
                sp.cost_.push_back(sp.cost_[i] + 1);
            } else {
                j = it->second;
            }
            out.emplace_back(a, j);
        }
        sp.succ_.push_back(std::move(out));
    }
    const std::size_t n = sp.states_.size();
    sp.pred_.assign(n, {});
    for (std::uint32_t i = 0; i < n; ++i)
        for (auto [a, j] : sp.succ_[i]) {
            (void)a;
            sp.pred_[j].push_back(i);
        }
    for (auto& v : sp.pred_) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    sp.goal_.assign(n, 0);
    sp.goal_distance_.assign(n, kUnreachable);
    std::deque<std::uint32_t> q;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (!p.is_goal(sp.states_[i])) continue;
        sp.goal_[i] = 1;
        sp.goal_distance_[i] = 0;
        q.push_back(i);
        if (sp.problem_cost_ == kUnreachable || sp.cost_[i] < sp.problem_cost_)
            sp.problem_cost_ = sp.cost_[i];
    }
    while (!q.empty()) {
        auto j = q.front();
        q.pop_front();
        for (auto i : sp.pred_[j]) {
            if (sp.goal_distance_[i] != kUnreachable) continue;
            sp.goal_distance_[i] = sp.goal_distance_[j] + 1;
            q.push_back(i);
        }
    }
    return sp;
}

StateSet opt_states(const StateSpace& space, const AtomTuple& t) {
    StateSet out;
    std::int64_t best = kUnreachable;
    for (std::uint32_t i = 0; i < space.size(); ++i) {
        if (best != kUnreachable && space.cost(i) > best) break;
        if (!holds(t, space.state(i))) continue;
        best = space.cost(i);
        out.push_back(i);
    }
    return out;
}

StateSet opt_states(const StateSpace& space, const TupleSet& T) {
    StateSet out;
    for (const auto& t : T.tuples()) {
        auto part = opt_states(space, t);
        out.insert(out.end(), part.begin(), part.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

EnvelopeReport is_cost_envelope(const StateSpace& space, const StateSet& E) {
    EnvelopeReport rep;
    std::vector<char> in(space.size(), 0);
    for (auto i : E) in[i] = 1;
    if (!in[0]) {
        rep.verdict = Verdict::Fails;
        rep.witness = 0;
        rep.detail = "initial state not in the set";
        return rep;
    }
    for (auto i : E) {
        if (space.is_goal(i)) continue;
        bool ok = false;
        for (auto [a, j] : space.successors(i)) {
            (void)a;
            if (in[j] && space.cost_star(i) < space.cost_star(j)) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            rep.verdict = Verdict::Fails;
            rep.witness = i;
            rep.detail = "no cost-increasing successor inside the set";
            return rep;
        }
    }
    rep.verdict = Verdict::Holds;
    return rep;
}

namespace {

void require_strips(const StateSpace& space) {
    if (!space.problem().is_strips())
        throw contract_violation("width oracles require a goal without negative literals");
}

EnvelopeReport direct_route(const StateSpace& space, const TupleSet& T, bool exempt_all_goals) {
    EnvelopeReport rep;
    const auto& tuples = T.tuples();
    std::vector<std::int64_t> tc;
    for (const auto& t : tuples) tc.push_back(space.tuple_cost(t));

    bool initial = false;
    for (const auto& t : tuples)
        if (holds(t, space.state(0))) initial = true;
    if (!initial) {
        rep.verdict = Verdict::Fails;
        rep.witness = 0;
        rep.detail = "no tuple holds in the initial state";
        return rep;
    }
    for (std::size_t ti = 0; ti < tuples.size(); ++ti) {
        const std::int64_t c = tc[ti];
        for (auto i : opt_states(space, tuples[ti])) {
            if (space.is_goal(i) &&
                (exempt_all_goals || space.cost(i) == space.problem_cost()))
                continue;
            bool ok = false;
            for (auto [a, j] : space.successors(i)) {
                (void)a;
                if (space.cost_star(j) != c + 1) continue;
                for (std::size_t tj = 0; tj < tuples.size() && !ok; ++tj)
                    ok = tc[tj] == c + 1 && holds(tuples[tj], space.state(j));
                if (ok) break;
            }
            if (!ok) {
                rep.verdict = Verdict::Fails;
                rep.witness = i;
                rep.detail = "optimal state for a tuple has no one-step extension";
                return rep;
            }
        }
    }
    rep.verdict = Verdict::Holds;
    return rep;
}

std::optional<EnvelopeReport> unreachable_tuple(const StateSpace& space, const TupleSet& T) {
    for (const auto& t : T.tuples()) {
        if (space.tuple_cost(t) != kUnreachable) continue;
        EnvelopeReport rep;
        rep.verdict = Verdict::UnreachableTuple;
        rep.detail = "unreachable tuple " + format_tuple(t, space.problem());
        return rep;
    }
    return std::nullopt;
}

}  // namespace

EnvelopeReport is_admissible(const StateSpace& space, const TupleSet& T, AdmissibilityRoute route) {
    require_strips(space);
    if (auto bad = unreachable_tuple(space, T)) return *bad;
    if (route == AdmissibilityRoute::Envelope) return is_cost_envelope(space, opt_states(space, T));
    return direct_route(space, T, true);
}

EnvelopeReport is_admissible_strict(const StateSpace& space, const TupleSet& T) {
    require_strips(space);
    if (auto bad = unreachable_tuple(space, T)) return *bad;
    return direct_route(space, T, false);
}

namespace {

// Marks states of OPT(T^k). Static atoms never change and are skipped:
// a tuple containing one has the same optimal states as the tuple without it.
std::vector<char> opt_membership(const StateSpace& space, int k) {
    const auto& p = space.problem();
    const std::size_t n = space.size();
    std::vector<char> in(n, 0);
    in[0] = 1;  // the empty tuple
    if (k <= 0) return in;

    std::vector<char> fluent(p.num_atoms(), 0);
    for (const auto& a : p.atoms) fluent[a.atom_id] = !p.predicates[a.predicate].is_static;
    std::vector<std::vector<AtomId>> atoms(n);
    for (std::size_t i = 0; i < n; ++i)
        space.state(static_cast<std::uint32_t>(i)).for_each([&](AtomId a) {
            if (fluent[a]) atoms[i].push_back(a);
        });

    // Min cost of every tuple over fluent atoms of size 1..k.
    std::unordered_map<AtomTuple, std::int64_t, TupleHash> best;
    std::vector<std::int64_t> single(p.num_atoms(), kUnreachable);
    const std::size_t N = p.num_atoms();
    const bool dense_pairs = k >= 2 && N <= 2048;
    std::vector<std::int32_t> pair;
    if (dense_pairs) pair.assign(N * N, -1);

    auto for_each_subset = [&](const std::vector<AtomId>& xs, int size, auto&& f) {
        std::vector<std::size_t> idx(static_cast<std::size_t>(size));
        std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t depth,
                                                                std::size_t from) {
            if (depth == idx.size()) {
                AtomTuple t;
                for (auto j : idx) t.push_back(xs[j]);
                f(t);
                return;
            }
            for (std::size_t j = from; j < xs.size(); ++j) {
                idx[depth] = j;
                rec(depth + 1, j + 1);
            }
        };
        rec(0, 0);
    };

    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t c = space.cost(static_cast<std::uint32_t>(i));
        const auto& xs = atoms[i];
        for (auto a : xs)
            if (single[a] == kUnreachable) single[a] = c;
        if (k >= 2) {
            if (dense_pairs) {
                for (std::size_t x = 0; x < xs.size(); ++x)
                    for (std::size_t y = x + 1; y < xs.size(); ++y) {
                        auto& slot = pair[xs[x] * N + xs[y]];
                        if (slot < 0) slot = static_cast<std::int32_t>(c);
                    }
            }
            for (int size = dense_pairs ? 3 : 2; size <= k; ++size)
                for_each_subset(xs, size, [&](const AtomTuple& t) { best.try_emplace(t, c); });
        }
    }
    for (std::size_t i = 1; i < n; ++i) {
        const std::int64_t c = space.cost(static_cast<std::uint32_t>(i));
        const auto& xs = atoms[i];
        bool hit = false;
        for (auto a : xs)
            if (single[a] == c) hit = true;
        if (!hit && dense_pairs)
            for (std::size_t x = 0; x < xs.size() && !hit; ++x)
                for (std::size_t y = x + 1; y < xs.size() && !hit; ++y)
                    hit = pair[xs[x] * N + xs[y]] == c;
        for (int size = dense_pairs ? 3 : 2; size <= k && !hit; ++size)
            for_each_subset(xs, size, [&](const AtomTuple& t) {
                if (!hit && best.at(t) == c) hit = true;
            });
        in[i] = hit;
    }
    return in;
}

}  // namespace

bool lower_bound_witness(const StateSpace& space, int k) {
    require_strips(space);
    if (!space.solvable()) throw contract_violation("lower bound needs a solvable problem");
    auto in = opt_membership(space, k);
    // Search an optimal trajectory inside OPT(T^k).
    std::vector<char> seen(space.size(), 0);
    std::deque<std::uint32_t> q{0};
    seen[0] = 1;
    while (!q.empty()) {
        auto i = q.front();
        q.pop_front();
        if (space.is_goal(i)) {
            if (space.cost(i) == space.problem_cost()) return false;
            continue;
        }
        for (auto [a, j] : space.successors(i)) {
            (void)a;
            if (seen[j] || !in[j] || space.cost(j) != space.cost(i) + 1) continue;
            if (space.goal_distance(j) == kUnreachable ||
                space.cost(j) + space.goal_distance(j) != space.problem_cost())
                continue;
            seen[j] = 1;
            q.push_back(j);
        }
    }
    return true;
}

WidthReport effective_width(const GroundProblem& p, const StatePredicate& goal, const State& start,
                            int k_cap) {
    WidthReport rep;
    SearchOptions o;
    o.start = start;
    auto opt = bfs_optimal(p, goal, o);
    if (!opt.solved()) {
        rep.bounded = false;
        rep.k = k_cap;
        rep.detail = "no goal reachable (dead end)";
        return rep;
    }
    rep.optimal = static_cast<std::int64_t>(opt.plan.size());
    for (int k = 0; k <= k_cap; ++k) {
        auto r = iw_k(p, k, goal, o);
        if (r.solved() && static_cast<std::int64_t>(r.plan.size()) == rep.optimal) {
            rep.bounded = true;
            rep.k = k;
            return rep;
        }
    }
    rep.bounded = false;
    rep.k = k_cap;
    rep.detail = "no IW(k) with k <= " + std::to_string(k_cap) + " returned an optimal plan";
    return rep;
}

WidthReport effective_width(const GroundProblem& p, int k_cap) {
    return effective_width(p, goal_test(p), p.init, k_cap);
}

bool is_feature_acyclic_on(const StateSpace& space, const Sketch& sk, const FeatureEvaluator& phi) {
    std::unordered_map<FeatureValuation, std::uint32_t, ValuationHash> ids;
    std::vector<FeatureValuation> vals;
    for (const auto& s : space.states()) {
        auto v = phi.valuation(s);
        if (ids.emplace(v, static_cast<std::uint32_t>(vals.size())).second) vals.push_back(v);
    }
    std::vector<PolicyEdge> edges;
    for (std::uint32_t a = 0; a < vals.size(); ++a)
        for (std::uint32_t b = 0; b < vals.size(); ++b) {
            if (!relation(sk, vals[a], vals[b])) continue;
            if (a == b) return false;
            edges.push_back({a, b, 0});
        }
    for (const auto& comp : strongly_connected_components(vals.size(), edges))
        if (comp.size() > 1) return false;
    return true;
}

SketchWidthReport sketch_width_on(const StateSpace& space, const Sketch& sk,
                                  const FeatureEvaluator& phi, int k_cap) {
    const auto& p = space.problem();
    SketchWidthReport rep;
    std::vector<FeatureValuation> val;
    val.reserve(space.size());
    for (const auto& s : space.states()) val.push_back(phi.valuation(s));

    std::vector<char> queued(space.size(), 0);
    std::deque<std::uint32_t> work{0};
    queued[0] = 1;
    rep.width = 0;
    while (!work.empty()) {
        const std::uint32_t s = work.front();
        work.pop_front();
        ++rep.subproblems;
        if (space.is_goal(s)) continue;
        const FeatureValuation& fs = val[s];
        const State root = space.state(s);
        StatePredicate goal = [&](const State& x) {
            if (p.is_goal(x)) return true;
            if (x == root) return false;
            return relation(sk, fs, phi.valuation(x));
        };
        auto w = effective_width(p, goal, root, k_cap);
        if (!w.bounded) {
            rep.bounded = false;
            rep.width = w.k;
            rep.worst = s;
            rep.detail = "subproblem at state " + std::to_string(s) + ": " + w.detail;
            return rep;
        }
        if (w.k > rep.width || !rep.worst) {
            if (w.k >= rep.width) rep.worst = s;
            rep.width = std::max(rep.width, w.k);
        }

        auto subgoal = [&](std::uint32_t j) { return j != s && relation(sk, fs, val[j]); };
        bool one_step = false;
        for (auto [a, j] : space.successors(s)) {
            (void)a;
            if (space.is_goal(j) || subgoal(j)) one_step = true;
            if (!space.is_goal(j) && subgoal(j) && !queued[j]) {
                queued[j] = 1;
                work.push_back(j);
            }
        }
        if (!one_step) {
            auto d = space.distances_from(s);
            for (std::uint32_t j = 0; j < space.size(); ++j) {
                if (d[j] == kUnreachable || space.is_goal(j) || !subgoal(j) || queued[j]) continue;
                queued[j] = 1;
                work.push_back(j);
            }
        }
    }
    rep.bounded = true;
    return rep;
}

std::string render_state(const StateSpace& space, std::uint32_t i) {
    return space.problem().render(space.state(i));
}

}  // namespace iwkit
