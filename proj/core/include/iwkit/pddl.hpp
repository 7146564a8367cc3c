#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace iwkit {

struct AtomAst {
    std::string predicate;
    std::vector<std::string> args;  // variables keep their leading '?'
    bool operator==(const AtomAst&) const = default;
};

struct LiteralAst {
    AtomAst atom;
    bool negated = false;
    bool operator==(const LiteralAst&) const = default;
};

struct PredicateDecl {
    std::string name;
    std::vector<std::string> params;
    bool operator==(const PredicateDecl&) const = default;
};

struct ActionSchema {
    std::string name;
    std::vector<std::string> params;
    std::vector<AtomAst> pre;
    std::vector<AtomAst> add;
    std::vector<AtomAst> del;
    bool operator==(const ActionSchema&) const = default;
};

struct DomainAst {
    std::string name;
    std::vector<std::string> requirements;
    std::vector<PredicateDecl> predicates;
    std::vector<ActionSchema> actions;
    bool operator==(const DomainAst&) const = default;

    [[nodiscard]] const PredicateDecl* predicate(std::string_view n) const;
};

struct ProblemAst {
    std::string name;
    std::string domain;
    std::vector<std::string> objects;
    std::vector<AtomAst> init;
    std::vector<LiteralAst> goal;
    bool operator==(const ProblemAst&) const = default;
};

// Throws parse_error on syntax errors and semantic_error on undeclared
// predicates, arity mismatches and unbound variables.
DomainAst parse_domain(std::string_view text);

// Structural parse plus object checks; predicate checks need the domain.
ProblemAst parse_problem(std::string_view text);
ProblemAst parse_problem(std::string_view text, const DomainAst& domain);

std::string to_pddl(const DomainAst& d);
std::string to_pddl(const ProblemAst& p);

std::string read_file(const std::string& path);

}  // namespace iwkit
