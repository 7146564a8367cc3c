#include "iwkit/strips.hpp"

#include <algorithm>
#include <cctype>

#include "iwkit/errors.hpp"

namespace iwkit {

std::size_t State::count() const noexcept {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(__builtin_popcountll(w));
    return n;
}

std::vector<AtomId> State::atoms() const {
    std::vector<AtomId> out;
    out.reserve(count());
    for_each([&](AtomId a) { out.push_back(a); });
    return out;
}

std::vector<AtomId> State::difference(const State& other) const {
    std::vector<AtomId> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
        std::uint64_t bits = words_[w] ^ other.words_[w];
        while (bits) {
            int b = __builtin_ctzll(bits);
            out.push_back(static_cast<AtomId>(w * 64 + b));
            bits &= bits - 1;
        }
    }
    return out;
}

std::size_t State::hash() const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ull ^ num_atoms_;
    for (auto w : words_) {
        h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        h *= 0xff51afd7ed558ccdull;
        h ^= h >> 33;
    }
    return static_cast<std::size_t>(h);
}

namespace {

std::string atom_key(const std::string& pred, const std::vector<std::string>& args) {
    std::string key = pred;
    if (!args.empty()) {
        key += '(';
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (i) key += ',';
            key += args[i];
        }
        key += ')';
    }
    return key;
}

}  // namespace

void GroundProblem::index() {
    atom_by_name_.clear();
    pred_by_name_.clear();
    obj_by_name_.clear();
    for (std::uint32_t i = 0; i < predicates.size(); ++i) pred_by_name_[predicates[i].name] = i;
    for (ObjectId i = 0; i < objects.size(); ++i) obj_by_name_[objects[i]] = i;

    pred_first_.assign(predicates.size() + 1, static_cast<AtomId>(atoms.size()));
    for (std::size_t i = atoms.size(); i-- > 0;) {
        if (i > 0 && atoms[i - 1].predicate > atoms[i].predicate)
            throw contract_violation("atoms are not grouped by predicate");
        pred_first_[atoms[i].predicate] = static_cast<AtomId>(i);
    }
    // Predicates without atoms get an empty range at the right position.
    for (std::size_t p = predicates.size(); p-- > 0;)
        pred_first_[p] = std::min(pred_first_[p], pred_first_[p + 1]);
    for (const auto& a : atoms) atom_by_name_[atom_name(a.atom_id)] = a.atom_id;
}

std::vector<ActionId> GroundProblem::applicable_actions(const State& s) const {
    std::vector<ActionId> out;
    for (const auto& a : actions)
        if (s.contains_all(a.pre)) out.push_back(a.action_id);
    return out;
}

State GroundProblem::apply(const State& s, ActionId a) const {
    const auto& act = actions.at(a);
    if (!s.contains_all(act.pre))
        throw contract_violation("action " + action_name(a) + " is not applicable");
    State next = s;
    for (AtomId d : act.del) next.erase(d);
    for (AtomId d : act.add) next.insert(d);
    return next;
}

bool GroundProblem::is_goal(const State& s) const {
    if (!s.contains_all(goal_pos)) return false;
    for (AtomId a : goal_neg)
        if (s.contains(a)) return false;
    return true;
}

const AtomId* GroundProblem::find_atom(std::uint32_t predicate,
                                       const std::vector<ObjectId>& args) const {
    std::vector<std::string> names;
    names.reserve(args.size());
    for (auto o : args) names.push_back(objects.at(o));
    auto it = atom_by_name_.find(atom_key(predicates.at(predicate).name, names));
    return it == atom_by_name_.end() ? nullptr : &it->second;
}

const AtomId* GroundProblem::find_atom(std::string_view text) const {
    std::string key;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (key.size() >= 2 && key.ends_with("()")) key.resize(key.size() - 2);
    auto it = atom_by_name_.find(key);
    return it == atom_by_name_.end() ? nullptr : &it->second;
}

int GroundProblem::find_predicate(std::string_view name) const {
    auto it = pred_by_name_.find(std::string(name));
    return it == pred_by_name_.end() ? -1 : static_cast<int>(it->second);
}

int GroundProblem::find_object(std::string_view name) const {
    auto it = obj_by_name_.find(std::string(name));
    return it == obj_by_name_.end() ? -1 : static_cast<int>(it->second);
}

std::string GroundProblem::atom_name(AtomId a) const {
    const auto& atom = atoms.at(a);
    std::vector<std::string> names;
    for (auto o : atom.args) names.push_back(objects[o]);
    return atom_key(predicates[atom.predicate].name, names);
}

std::string GroundProblem::action_name(ActionId a) const {
    const auto& act = actions.at(a);
    std::string out = "(" + act.name;
    for (auto o : act.args) out += " " + objects[o];
    return out + ")";
}

std::string GroundProblem::render(const State& s, bool include_static) const {
    std::string out = "{";
    bool first = true;
    s.for_each([&](AtomId a) {
        if (!include_static && predicates[atoms[a].predicate].is_static) return;
        if (!first) out += ", ";
        out += atom_name(a);
        first = false;
    });
    return out + "}";
}

State GroundProblem::state_from_atoms(const std::vector<AtomId>& ids) const {
    State s(num_atoms());
    for (AtomId a : ids) s.insert(a);
    return s;
}

std::size_t GroundProblem::max_flip() const noexcept {
    std::size_t m = 0;
    for (const auto& a : actions) m = std::max(m, a.add.size() + a.del.size());
    return m;
}

bool replay(const GroundProblem& p, const State& from, const std::vector<ActionId>& plan,
            State* end) {
    State s = from;
    for (ActionId a : plan) {
        if (a >= p.actions.size() || !s.contains_all(p.actions[a].pre)) return false;
        s = p.apply(s, a);
    }
    if (end) *end = s;
    return true;
}

}  // namespace iwkit
