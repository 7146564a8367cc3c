#include "iwkit/grounder.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "iwkit/errors.hpp"

namespace iwkit {

namespace {

using Key = std::vector<std::uint32_t>;  // predicate index followed by object indices

struct Lifted {
    std::uint32_t predicate;
    std::vector<int> slots;  // parameter index per argument
};

struct SchemaPlan {
    std::vector<Lifted> pre, add, del;
    // Static preconditions grouped by the last parameter they mention.
    std::vector<std::vector<const Lifted*>> checks;
    std::vector<const Lifted*> nullary_checks;
};

Key instantiate(const Lifted& l, const std::vector<ObjectId>& binding) {
    Key k;
    k.reserve(l.slots.size() + 1);
    k.push_back(l.predicate);
    for (int s : l.slots) k.push_back(binding[static_cast<std::size_t>(s)]);
    return k;
}

}  // namespace

GroundProblem ground(const DomainAst& domain, const ProblemAst& problem) {
    if (problem.domain != domain.name)
        throw semantic_error("problem refers to domain '" + problem.domain + "', not '" +
                             domain.name + "'");
    GroundProblem gp;
    gp.domain_name = domain.name;
    gp.problem_name = problem.name;
    gp.objects = problem.objects;

    std::unordered_map<std::string, std::uint32_t> pred_idx;
    for (const auto& p : domain.predicates) {
        pred_idx[p.name] = static_cast<std::uint32_t>(gp.predicates.size());
        gp.predicates.push_back({p.name, static_cast<int>(p.params.size()), true});
    }
    for (const auto& a : domain.actions) {
        for (const auto& x : a.add) gp.predicates[pred_idx.at(x.predicate)].is_static = false;
        for (const auto& x : a.del) gp.predicates[pred_idx.at(x.predicate)].is_static = false;
    }
    std::unordered_map<std::string, ObjectId> obj_idx;
    for (ObjectId i = 0; i < gp.objects.size(); ++i) obj_idx[gp.objects[i]] = i;

    auto ground_key = [&](const AtomAst& a) {
        auto pit = pred_idx.find(a.predicate);
        if (pit == pred_idx.end())
            throw semantic_error("undeclared predicate '" + a.predicate + "'");
        if (static_cast<std::size_t>(gp.predicates[pit->second].arity) != a.args.size())
            throw semantic_error("arity mismatch for '" + a.predicate + "'");
        Key k{pit->second};
        for (const auto& o : a.args) {
            auto oit = obj_idx.find(o);
            if (oit == obj_idx.end()) throw semantic_error("undeclared object '" + o + "'");
            k.push_back(oit->second);
        }
        return k;
    };

    std::set<Key> init_keys;
    for (const auto& a : problem.init) init_keys.insert(ground_key(a));
    std::vector<std::pair<Key, bool>> goal_keys;
    for (const auto& l : problem.goal) goal_keys.emplace_back(ground_key(l.atom), l.negated);

    std::map<Key, AtomId> universe;
    for (const auto& k : init_keys) universe.emplace(k, 0);
    for (const auto& [k, neg] : goal_keys) universe.emplace(k, 0);

    struct Proto {
        std::uint32_t schema;
        std::vector<ObjectId> args;
        std::vector<Key> pre, add, del;
    };
    std::vector<Proto> protos;

    const std::size_t n_obj = gp.objects.size();
    for (std::uint32_t si = 0; si < domain.actions.size(); ++si) {
        const auto& schema = domain.actions[si];
        SchemaPlan plan;
        auto lift = [&](const AtomAst& a) {
            Lifted l{pred_idx.at(a.predicate), {}};
            for (const auto& v : a.args) {
                auto it = std::find(schema.params.begin(), schema.params.end(), v);
                l.slots.push_back(static_cast<int>(it - schema.params.begin()));
            }
            return l;
        };
        for (const auto& a : schema.pre) plan.pre.push_back(lift(a));
        for (const auto& a : schema.add) plan.add.push_back(lift(a));
        for (const auto& a : schema.del) plan.del.push_back(lift(a));
        plan.checks.resize(schema.params.size());
        for (const auto& l : plan.pre) {
            if (!gp.predicates[l.predicate].is_static) continue;
            if (l.slots.empty()) {
                plan.nullary_checks.push_back(&l);
            } else {
                int last = *std::max_element(l.slots.begin(), l.slots.end());
                plan.checks[static_cast<std::size_t>(last)].push_back(&l);
            }
        }
        bool nullary_ok = true;
        for (const Lifted* l : plan.nullary_checks)
            if (!init_keys.count(Key{l->predicate})) nullary_ok = false;
        if (!nullary_ok) continue;

        std::vector<ObjectId> binding(schema.params.size(), 0);
        // Depth-first over parameters in order, which yields lexicographic argument order.
        auto rec = [&](auto&& self, std::size_t depth) -> void {
            if (depth == binding.size()) {
                Proto p{si, binding, {}, {}, {}};
                for (const auto& l : plan.pre) p.pre.push_back(instantiate(l, binding));
                for (const auto& l : plan.add) p.add.push_back(instantiate(l, binding));
                for (const auto& l : plan.del) p.del.push_back(instantiate(l, binding));
                protos.push_back(std::move(p));
                return;
            }
            for (ObjectId o = 0; o < n_obj; ++o) {
                binding[depth] = o;
                bool ok = true;
                for (const Lifted* l : plan.checks[depth]) {
                    if (!init_keys.count(instantiate(*l, binding))) {
                        ok = false;
                        break;
                    }
                }
                if (ok) self(self, depth + 1);
            }
        };
        rec(rec, 0);
    }

    for (const auto& p : protos) {
        for (const auto& k : p.pre) universe.emplace(k, 0);
        for (const auto& k : p.add) universe.emplace(k, 0);
        for (const auto& k : p.del) universe.emplace(k, 0);
    }
    AtomId next = 0;
    for (auto& [k, id] : universe) {
        id = next++;
        gp.atoms.push_back({id, k[0], std::vector<ObjectId>(k.begin() + 1, k.end())});
    }

    auto ids = [&](const std::vector<Key>& keys) {
        std::vector<AtomId> out;
        for (const auto& k : keys) out.push_back(universe.at(k));
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    };
    for (auto& p : protos) {
        GroundAction a;
        a.action_id = static_cast<ActionId>(gp.actions.size());
        a.schema = p.schema;
        a.name = domain.actions[p.schema].name;
        a.args = std::move(p.args);
        a.pre = ids(p.pre);
        a.add = ids(p.add);
        std::vector<AtomId> del = ids(p.del);
        // Add-after-delete: an atom both added and deleted stays true.
        std::erase_if(del, [&](AtomId d) {
            return std::binary_search(a.add.begin(), a.add.end(), d);
        });
        a.del = std::move(del);
        gp.actions.push_back(std::move(a));
    }

    gp.init = State(gp.atoms.size());
    for (const auto& k : init_keys) gp.init.insert(universe.at(k));
    for (const auto& [k, neg] : goal_keys) (neg ? gp.goal_neg : gp.goal_pos).push_back(universe.at(k));
    for (auto* g : {&gp.goal_pos, &gp.goal_neg}) {
        std::sort(g->begin(), g->end());
        g->erase(std::unique(g->begin(), g->end()), g->end());
    }
    for (AtomId a : gp.goal_pos)
        if (std::binary_search(gp.goal_neg.begin(), gp.goal_neg.end(), a))
            throw semantic_error("goal requires " + gp.atom_name(a) + " both true and false");
    gp.index();
    return gp;
}

GroundProblem load_problem(std::string_view domain_text, std::string_view problem_text) {
    DomainAst d = parse_domain(domain_text);
    ProblemAst p = parse_problem(problem_text, d);
    return ground(d, p);
}

GroundProblem load_problem_files(const std::string& domain_path, const std::string& problem_path) {
    return load_problem(read_file(domain_path), read_file(problem_path));
}

}  // namespace iwkit
