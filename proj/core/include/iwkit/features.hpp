#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "iwkit/strips.hpp"

namespace iwkit {

enum class FeatureKind { Boolean, Numerical };

using FeatureValuation = std::vector<std::int64_t>;

struct ValuationHash {
    std::size_t operator()(const FeatureValuation& v) const noexcept;
};

// Bit i holds "p" for a Boolean feature i and "n=0" for a numerical one.
using BooleanValuation = std::uint32_t;

// Term in a query literal: fixed object, named variable (?x) or wildcard (_).
struct Term {
    enum class Type { Object, Variable, Wildcard } type = Type::Wildcard;
    std::string name;
};

struct QueryLiteral {
    enum class Type { Atom, NotAtom, NotEqual } type = Type::Atom;
    std::string predicate;
    std::vector<Term> terms;  // two terms for NotEqual
};

using Query = std::vector<QueryLiteral>;

struct Expr {
    enum class Op { Count, Nonzero, ChainCount, Distance, Builtin, Sum, Ref };
    Op op = Op::Count;
    Query query;                  // Count; Distance targets (cells_of) use `targets_query`
    std::vector<Expr> children;   // Nonzero, Sum
    std::string name;             // predicate (ChainCount, Distance pos), builtin, or reference
    std::string relation;         // ChainCount pred / Distance adjacency
    std::string seed;             // ChainCount seed object
    bool upward = true;           // ChainCount direction
    std::vector<std::string> objects;  // Distance fixed targets; Builtin arguments
    bool targets_from_query = false;
    Query targets_query;
    Query zero_if;                // Distance: value is 0 while this query has a match
};

struct FeatureDef {
    std::string name;
    FeatureKind kind = FeatureKind::Numerical;
    bool quadratic = false;  // exempt from the linear-time audit
    Expr expr;
};

class FeatureSet {
public:
    FeatureSet() = default;
    explicit FeatureSet(std::vector<FeatureDef> defs) : defs_(std::move(defs)) {}

    [[nodiscard]] std::size_t size() const noexcept { return defs_.size(); }
    [[nodiscard]] const FeatureDef& operator[](std::size_t i) const { return defs_[i]; }
    [[nodiscard]] const std::vector<FeatureDef>& defs() const noexcept { return defs_; }
    [[nodiscard]] int find(std::string_view name) const;
    void add(FeatureDef d);

    // Features listed by name, in that order.
    [[nodiscard]] FeatureSet select(const std::vector<std::string>& names) const;

private:
    std::vector<FeatureDef> defs_;
};

// Bundle format, one declaration per line:
//   feature NAME bool|num [quadratic] = EXPR
FeatureSet parse_features(std::string_view text);
FeatureDef parse_feature_line(std::string_view line);

struct EvalStats {
    std::uint64_t atom_visits = 0;
};

struct BuiltinContext {
    const GroundProblem* problem = nullptr;
    std::vector<ObjectId> args;
};

using BuiltinFn = std::function<std::int64_t(const BuiltinContext&, const State&, EvalStats*)>;

struct BuiltinInfo {
    FeatureKind kind;
    std::size_t arity;  // number of object arguments
    BuiltinFn fn;
};

// Process-wide registry. Registration is not thread-safe; do it before searching.
void register_builtin(const std::string& name, BuiltinInfo info);
const BuiltinInfo* find_builtin(std::string_view name);

class CompiledExpr;

// A FeatureSet bound to one problem: names resolved, static distances cached.
class FeatureEvaluator {
public:
    FeatureEvaluator(FeatureSet phi, const GroundProblem& p);
    ~FeatureEvaluator();
    FeatureEvaluator(FeatureEvaluator&&) noexcept;
    FeatureEvaluator& operator=(FeatureEvaluator&&) noexcept;

    [[nodiscard]] const FeatureSet& features() const noexcept { return phi_; }
    [[nodiscard]] const GroundProblem& problem() const noexcept { return *problem_; }
    [[nodiscard]] std::size_t size() const noexcept { return phi_.size(); }

    [[nodiscard]] std::int64_t evaluate(std::size_t feature, const State& s,
                                        EvalStats* stats = nullptr) const;
    [[nodiscard]] FeatureValuation valuation(const State& s) const;
    [[nodiscard]] BooleanValuation boolean_valuation(const State& s) const;

private:
    FeatureSet phi_;
    const GroundProblem* problem_;
    std::vector<std::unique_ptr<CompiledExpr>> compiled_;
};

FeatureValuation valuation(const FeatureEvaluator& phi, const State& s);
BooleanValuation boolean_projection(const FeatureSet& phi, const FeatureValuation& v);
std::string format_valuation(const FeatureValuation& v);

}  // namespace iwkit
