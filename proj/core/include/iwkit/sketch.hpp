#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iwkit/features.hpp"

namespace iwkit {

enum class Cond { True, False, Zero, Positive };  // p, !p, n=0, n>0
enum class Effect { SetTrue, SetFalse, BoolUnknown, Inc, Dec, NumUnknown };

struct Rule {
    std::vector<std::pair<std::size_t, Cond>> conditions;
    std::vector<std::pair<std::size_t, Effect>> effects;

    [[nodiscard]] const Effect* effect_on(std::size_t feature) const;
};

struct SketchFeature {
    std::string name;
    FeatureKind kind;
};

struct Sketch {
    std::vector<SketchFeature> features;
    std::vector<Rule> rules;

    [[nodiscard]] std::size_t num_features() const noexcept { return features.size(); }
    [[nodiscard]] int find(std::string_view name) const;
    [[nodiscard]] std::vector<std::string> feature_names() const;
};

// features { H: bool; n: num; }
// rules { { !H, n>0 } => { H, n-- }; { H } => { !H }; }
Sketch parse_sketch(std::string_view text);
std::string to_text(const Sketch& sk);
std::string to_text(const Sketch& sk, const Rule& r);

// Features of `bundle` in the sketch's order, with kinds checked.
FeatureEvaluator bind(const Sketch& sk, const FeatureSet& bundle, const GroundProblem& p);

bool pair_satisfies(const Sketch& sk, const Rule& r, const FeatureValuation& from,
                    const FeatureValuation& to);
// True iff (from, to) is compatible with some rule, i.e. to precedes from.
bool relation(const Sketch& sk, const FeatureValuation& from, const FeatureValuation& to);

struct PolicyEdge {
    BooleanValuation from;
    BooleanValuation to;
    std::size_t rule;
};

struct PolicyGraph {
    std::vector<FeatureKind> kinds;
    std::vector<Rule> rules;  // edge labels are the effects of rules[edge.rule]
    std::vector<PolicyEdge> edges;

    [[nodiscard]] std::size_t num_vertices() const noexcept { return std::size_t{1} << kinds.size(); }
};

PolicyGraph build_policy_graph(const Sketch& sk, std::size_t max_features = 16);

// Tarjan over the given edges; components listed with sorted vertices,
// ordered by their smallest vertex.
std::vector<std::vector<BooleanValuation>> strongly_connected_components(
    std::size_t num_vertices, const std::vector<PolicyEdge>& edges,
    const std::vector<char>* alive = nullptr);

struct SieveStep {
    std::vector<BooleanValuation> component;
    std::size_t feature;
    std::vector<std::size_t> removed;  // edge indices into PolicyGraph::edges
};

struct SieveResult {
    bool accepted = false;
    std::vector<SieveStep> trace;
};

// With a seed, each round picks a random eligible (component, feature)
// pair instead of the first one.
SieveResult sieve(const PolicyGraph& g, std::optional<unsigned> seed = std::nullopt);

std::string format_boolean_valuation(const Sketch& sk, BooleanValuation v);
std::string format_trace(const Sketch& sk, const SieveResult& r);

}  // namespace iwkit
