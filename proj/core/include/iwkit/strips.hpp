#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace iwkit {

using AtomId = std::uint32_t;
using ActionId = std::uint32_t;
using ObjectId = std::uint32_t;

// Fixed-width bit set over the atoms of one problem.
class State {
public:
    State() = default;
    explicit State(std::size_t num_atoms)
        : num_atoms_(num_atoms), words_((num_atoms + 63) / 64, 0) {}

    [[nodiscard]] std::size_t universe() const noexcept { return num_atoms_; }

    [[nodiscard]] bool contains(AtomId a) const noexcept {
        return (words_[a >> 6] >> (a & 63)) & 1u;
    }
    void insert(AtomId a) noexcept { words_[a >> 6] |= std::uint64_t{1} << (a & 63); }
    void erase(AtomId a) noexcept { words_[a >> 6] &= ~(std::uint64_t{1} << (a & 63)); }

    [[nodiscard]] bool contains_all(const std::vector<AtomId>& atoms) const noexcept {
        for (AtomId a : atoms)
            if (!contains(a)) return false;
        return true;
    }

    [[nodiscard]] std::size_t count() const noexcept;
    [[nodiscard]] std::vector<AtomId> atoms() const;

    template <typename F>
    void for_each(F&& f) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t bits = words_[w];
            while (bits) {
                int b = __builtin_ctzll(bits);
                f(static_cast<AtomId>(w * 64 + b));
                bits &= bits - 1;
            }
        }
    }

    // Atoms set in exactly one of the two states.
    [[nodiscard]] std::vector<AtomId> difference(const State& other) const;

    [[nodiscard]] std::size_t hash() const noexcept;
    friend bool operator==(const State& a, const State& b) noexcept {
        return a.num_atoms_ == b.num_atoms_ && a.words_ == b.words_;
    }
    friend bool operator<(const State& a, const State& b) noexcept { return a.words_ < b.words_; }

private:
    std::size_t num_atoms_ = 0;
    std::vector<std::uint64_t> words_;
};

struct StateHash {
    std::size_t operator()(const State& s) const noexcept { return s.hash(); }
};

struct Predicate {
    std::string name;
    int arity = 0;
    bool is_static = false;
};

struct GroundAtom {
    AtomId atom_id = 0;
    std::uint32_t predicate = 0;
    std::vector<ObjectId> args;
};

struct GroundAction {
    ActionId action_id = 0;
    std::uint32_t schema = 0;
    std::string name;
    std::vector<ObjectId> args;
    std::vector<AtomId> pre;
    std::vector<AtomId> add;
    std::vector<AtomId> del;
};

using StatePredicate = std::function<bool(const State&)>;

class GroundProblem {
public:
    std::string domain_name;
    std::string problem_name;
    std::vector<std::string> objects;
    std::vector<Predicate> predicates;
    std::vector<GroundAtom> atoms;
    std::vector<GroundAction> actions;
    State init;
    std::vector<AtomId> goal_pos;
    std::vector<AtomId> goal_neg;

    [[nodiscard]] std::size_t num_atoms() const noexcept { return atoms.size(); }

    // Must be called once atoms are final; builds lookup tables.
    void index();

    [[nodiscard]] std::vector<ActionId> applicable_actions(const State& s) const;
    [[nodiscard]] State apply(const State& s, ActionId a) const;
    [[nodiscard]] bool is_goal(const State& s) const;
    [[nodiscard]] bool is_strips() const noexcept { return goal_neg.empty(); }

    [[nodiscard]] const AtomId* find_atom(std::uint32_t predicate,
                                          const std::vector<ObjectId>& args) const;
    [[nodiscard]] const AtomId* find_atom(std::string_view text) const;
    [[nodiscard]] int find_predicate(std::string_view name) const;
    [[nodiscard]] int find_object(std::string_view name) const;

    // Contiguous id range [first, last) holding the atoms of one predicate.
    [[nodiscard]] std::pair<AtomId, AtomId> predicate_range(std::uint32_t predicate) const {
        return {pred_first_[predicate], pred_first_[predicate + 1]};
    }

    [[nodiscard]] std::string atom_name(AtomId a) const;
    [[nodiscard]] std::string action_name(ActionId a) const;
    [[nodiscard]] std::string render(const State& s, bool include_static = false) const;
    [[nodiscard]] State state_from_atoms(const std::vector<AtomId>& atoms) const;

    // Largest |add|+|del| over all actions.
    [[nodiscard]] std::size_t max_flip() const noexcept;

private:
    std::unordered_map<std::string, AtomId> atom_by_name_;
    std::unordered_map<std::string, std::uint32_t> pred_by_name_;
    std::unordered_map<std::string, ObjectId> obj_by_name_;
    std::vector<AtomId> pred_first_;
};

inline std::vector<ActionId> applicable_actions(const GroundProblem& p, const State& s) {
    return p.applicable_actions(s);
}
inline State apply(const GroundProblem& p, const State& s, ActionId a) { return p.apply(s, a); }
inline bool is_goal(const GroundProblem& p, const State& s) { return p.is_goal(s); }

// Replays a plan from `from`; returns false if some step is inapplicable.
bool replay(const GroundProblem& p, const State& from, const std::vector<ActionId>& plan,
            State* end = nullptr);

}  // namespace iwkit

template <>
struct std::hash<iwkit::State> {
    std::size_t operator()(const iwkit::State& s) const noexcept { return s.hash(); }
};
