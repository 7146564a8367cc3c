#pragma once

#include <string_view>

#include "iwkit/pddl.hpp"
#include "iwkit/strips.hpp"

namespace iwkit {

// Instantiates every schema over the problem objects. Instances with a
// static precondition missing from the initial state are dropped.
GroundProblem ground(const DomainAst& domain, const ProblemAst& problem);

// Parse both texts and ground them.
GroundProblem load_problem(std::string_view domain_text, std::string_view problem_text);
GroundProblem load_problem_files(const std::string& domain_path, const std::string& problem_path);

}  // namespace iwkit
