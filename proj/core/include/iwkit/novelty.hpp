#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "iwkit/strips.hpp"

namespace iwkit {

// Sorted, duplicate-free atom ids. The empty tuple holds in every state.
using AtomTuple = std::vector<AtomId>;

AtomTuple make_tuple(std::vector<AtomId> atoms);
bool holds(const AtomTuple& t, const State& s);

struct TupleHash {
    std::size_t operator()(const AtomTuple& t) const noexcept;
};

class TupleSet {
public:
    TupleSet() = default;
    explicit TupleSet(std::vector<AtomTuple> tuples);

    bool insert(AtomTuple t);
    [[nodiscard]] bool contains(const AtomTuple& t) const { return index_.count(t) != 0; }
    [[nodiscard]] std::size_t count() const noexcept { return tuples_.size(); }
    [[nodiscard]] std::size_t size() const noexcept { return max_size_; }  // max |t|
    [[nodiscard]] bool empty() const noexcept { return tuples_.empty(); }
    [[nodiscard]] const std::vector<AtomTuple>& tuples() const noexcept { return tuples_; }
    [[nodiscard]] const AtomTuple& operator[](std::size_t i) const { return tuples_[i]; }

private:
    std::vector<AtomTuple> tuples_;
    std::unordered_set<AtomTuple, TupleHash> index_;
    std::size_t max_size_ = 0;
};

// Logical universe of all tuples with 1..k atoms (empty tuple excluded).
struct TupleUniverse {
    std::size_t num_atoms = 0;
    int k = 0;

    // Sum over i=1..k of C(N,i), saturating at UINT64_MAX.
    [[nodiscard]] std::uint64_t count() const noexcept;
};

TupleUniverse all_tuples_up_to(const GroundProblem& p, int k);

// Every tuple of size <= k, the empty one included. Only for small N.
TupleSet materialize(const GroundProblem& p, int k);

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) noexcept;

// Seen-tuple table H of one search.
class NoveltyTable {
public:
    virtual ~NoveltyTable() = default;

    // Marks every tracked tuple true in s; true iff one of them was unseen.
    // With delta (the atoms that flipped from the parent), only tuples
    // containing a newly true atom are examined.
    virtual bool register_state(const State& s, const std::vector<AtomId>* delta) = 0;
    bool register_state(const State& s) { return register_state(s, nullptr); }

    [[nodiscard]] virtual std::size_t seen_count() const = 0;
    [[nodiscard]] virtual std::uint64_t tracked_count() const = 0;
};

std::unique_ptr<NoveltyTable> make_table(const TupleSet& explicit_set, std::size_t num_atoms);
std::unique_ptr<NoveltyTable> make_table(const TupleUniverse& universe);

// Tuple file: one tuple per line, atoms joined by '&'; '#' starts a comment.
TupleSet parse_tuples(std::string_view text, const GroundProblem& p);
std::string format_tuple(const AtomTuple& t, const GroundProblem& p);
std::string format_tuples(const TupleSet& T, const GroundProblem& p);

}  // namespace iwkit
