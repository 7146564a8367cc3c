#include "iwkit/novelty.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "iwkit/errors.hpp"

namespace iwkit {

AtomTuple make_tuple(std::vector<AtomId> atoms) {
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    return atoms;
}

bool holds(const AtomTuple& t, const State& s) { return s.contains_all(t); }

std::size_t TupleHash::operator()(const AtomTuple& t) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull ^ t.size();
    for (AtomId a : t) {
        h ^= a;
        h *= 0x100000001b3ull;
        h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
}

TupleSet::TupleSet(std::vector<AtomTuple> tuples) {
    for (auto& t : tuples) insert(std::move(t));
}

bool TupleSet::insert(AtomTuple t) {
    t = make_tuple(std::move(t));
    if (!index_.insert(t).second) return false;
    max_size_ = std::max(max_size_, t.size());
    tuples_.push_back(std::move(t));
    return true;
}

__extension__ using u128 = unsigned __int128;

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) noexcept {
    if (k > n) return 0;
    k = std::min(k, n - k);
    u128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > std::numeric_limits<std::uint64_t>::max())
            return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(r);
}

std::uint64_t TupleUniverse::count() const noexcept {
    std::uint64_t total = 0;
    for (int i = 1; i <= k; ++i) {
        std::uint64_t c = binomial(num_atoms, static_cast<std::uint64_t>(i));
        if (total > std::numeric_limits<std::uint64_t>::max() - c)
            return std::numeric_limits<std::uint64_t>::max();
        total += c;
    }
    return total;
}

TupleUniverse all_tuples_up_to(const GroundProblem& p, int k) {
    if (k < 0 || static_cast<std::size_t>(k) > p.num_atoms())
        throw contract_violation("tuple size out of range");
    return {p.num_atoms(), k};
}

namespace {

// Calls f on every combination of `pool` with size in [lo, hi], each as a
// sorted vector extended by `fixed` (pool and fixed are disjoint).
template <typename F>
void combinations(const std::vector<AtomId>& pool, std::size_t lo, std::size_t hi,
                  const AtomTuple& fixed, F&& f) {
    AtomTuple cur;
    auto emit = [&] {
        AtomTuple t = cur;
        t.insert(t.end(), fixed.begin(), fixed.end());
        std::sort(t.begin(), t.end());
        f(t);
    };
    auto rec = [&](auto&& self, std::size_t start) -> void {
        if (cur.size() >= lo) emit();
        if (cur.size() == hi) return;
        for (std::size_t i = start; i < pool.size(); ++i) {
            cur.push_back(pool[i]);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
}

std::vector<AtomId> new_atoms(const State& s, const std::vector<AtomId>& delta) {
    std::vector<AtomId> out;
    for (AtomId a : delta)
        if (s.contains(a)) out.push_back(a);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

class ExplicitTable final : public NoveltyTable {
public:
    ExplicitTable(const TupleSet& T, std::size_t num_atoms)
        : tuples_(T.tuples()), seen_(T.count(), 0), by_atom_(num_atoms) {
        for (std::size_t i = 0; i < tuples_.size(); ++i) {
            for (AtomId a : tuples_[i]) {
                if (a >= num_atoms) throw contract_violation("tuple atom outside the problem");
                by_atom_[a].push_back(i);
            }
        }
    }

    bool register_state(const State& s, const std::vector<AtomId>* delta) override {
        bool novel = false;
        auto visit = [&](std::size_t i) {
            if (!seen_[i] && holds(tuples_[i], s)) {
                seen_[i] = 1;
                ++seen_count_;
                novel = true;
            }
        };
        if (!delta) {
            for (std::size_t i = 0; i < tuples_.size(); ++i) visit(i);
        } else {
            for (AtomId a : new_atoms(s, *delta))
                for (std::size_t i : by_atom_[a]) visit(i);
        }
        return novel;
    }

    std::size_t seen_count() const override { return seen_count_; }
    std::uint64_t tracked_count() const override { return tuples_.size(); }

private:
    std::vector<AtomTuple> tuples_;
    std::vector<char> seen_;
    std::vector<std::vector<std::size_t>> by_atom_;
    std::size_t seen_count_ = 0;
};

// Flat arrays for k <= 2: atom a at a, pair (i<j) at i*N+j.
class DenseTable final : public NoveltyTable {
public:
    DenseTable(std::size_t n, int k)
        : n_(n), k_(k), atoms_(n, 0), pairs_(k >= 2 ? n * n : 0, false), universe_{n, k} {}

    bool register_state(const State& s, const std::vector<AtomId>* delta) override {
        bool novel = false;
        std::vector<AtomId> all = s.atoms();
        std::vector<AtomId> fresh = delta ? new_atoms(s, *delta) : all;
        for (AtomId a : fresh) {
            if (!atoms_[a]) {
                atoms_[a] = 1;
                ++seen_;
                novel = true;
            }
        }
        if (k_ < 2) return novel;
        for (AtomId d : fresh) {
            for (AtomId x : all) {
                if (x == d) continue;
                // A pair of two fresh atoms is handled once, from its smaller member.
                if (x < d && std::binary_search(fresh.begin(), fresh.end(), x)) continue;
                std::size_t key = x < d ? x * n_ + d : d * n_ + x;
                if (!pairs_[key]) {
                    pairs_[key] = true;
                    ++seen_;
                    novel = true;
                }
            }
        }
        return novel;
    }

    std::size_t seen_count() const override { return seen_; }
    std::uint64_t tracked_count() const override { return universe_.count(); }

private:
    std::size_t n_;
    int k_;
    std::vector<char> atoms_;
    std::vector<bool> pairs_;
    TupleUniverse universe_;
    std::size_t seen_ = 0;
};

class HashedTable final : public NoveltyTable {
public:
    explicit HashedTable(const TupleUniverse& u) : u_(u) {}

    bool register_state(const State& s, const std::vector<AtomId>* delta) override {
        bool novel = false;
        std::vector<AtomId> all = s.atoms();
        auto mark = [&](const AtomTuple& t) {
            if (seen_.insert(t).second) novel = true;
        };
        const auto k = static_cast<std::size_t>(u_.k);
        if (!delta) {
            combinations(all, 1, k, {}, mark);
            return novel;
        }
        std::vector<AtomId> fresh = new_atoms(s, *delta);
        for (AtomId d : fresh) {
            std::vector<AtomId> pool;
            for (AtomId x : all) {
                if (x == d) continue;
                if (x < d && std::binary_search(fresh.begin(), fresh.end(), x)) continue;
                pool.push_back(x);
            }
            combinations(pool, 0, k - 1, AtomTuple{d}, mark);
        }
        return novel;
    }

    std::size_t seen_count() const override { return seen_.size(); }
    std::uint64_t tracked_count() const override { return u_.count(); }

private:
    TupleUniverse u_;
    std::unordered_set<AtomTuple, TupleHash> seen_;
};

}  // namespace

TupleSet materialize(const GroundProblem& p, int k) {
    TupleSet T;
    T.insert({});
    std::vector<AtomId> all(p.num_atoms());
    for (AtomId a = 0; a < all.size(); ++a) all[a] = a;
    combinations(all, 1, static_cast<std::size_t>(k), {}, [&](const AtomTuple& t) { T.insert(t); });
    return T;
}

std::unique_ptr<NoveltyTable> make_table(const TupleSet& explicit_set, std::size_t num_atoms) {
    return std::make_unique<ExplicitTable>(explicit_set, num_atoms);
}

std::unique_ptr<NoveltyTable> make_table(const TupleUniverse& u) {
    constexpr std::size_t kDenseLimit = 8192;
    if (u.k <= 2 && u.num_atoms <= kDenseLimit)
        return std::make_unique<DenseTable>(u.num_atoms, u.k);
    return std::make_unique<HashedTable>(u);
}

TupleSet parse_tuples(std::string_view text, const GroundProblem& p) {
    TupleSet T;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto c = line.find('#'); c != std::string::npos) line.resize(c);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        AtomTuple t;
        std::size_t start = 0;
        for (;;) {
            std::size_t amp = line.find('&', start);
            std::string part = line.substr(start, amp == std::string::npos ? amp : amp - start);
            const AtomId* id = p.find_atom(part);
            if (part.find_first_not_of(" \t\r") == std::string::npos)
                throw parse_error("empty atom in tuple", lineno, static_cast<int>(start) + 1);
            if (!id)
                throw parse_error("unknown atom '" + part + "'", lineno,
                                  static_cast<int>(start) + 1);
            t.push_back(*id);
            if (amp == std::string::npos) break;
            start = amp + 1;
        }
        T.insert(std::move(t));
    }
    return T;
}

std::string format_tuple(const AtomTuple& t, const GroundProblem& p) {
    std::string out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) out += " & ";
        out += p.atom_name(t[i]);
    }
    return out;
}

std::string format_tuples(const TupleSet& T, const GroundProblem& p) {
    std::string out;
    for (const auto& t : T.tuples()) {
        if (t.empty()) continue;
        out += format_tuple(t, p) + "\n";
    }
    return out;
}

}  // namespace iwkit
