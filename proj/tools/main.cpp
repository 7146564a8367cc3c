#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "iwkit/domains.hpp"
#include "iwkit/errors.hpp"
#include "iwkit/features.hpp"
#include "iwkit/grounder.hpp"
#include "iwkit/novelty.hpp"
#include "iwkit/oracle.hpp"
#include "iwkit/pddl.hpp"
#include "iwkit/search.hpp"
#include "iwkit/siw.hpp"
#include "iwkit/sketch.hpp"

namespace {

using namespace iwkit;
using json = nlohmann::json;

constexpr int kOk = 0;
constexpr int kNo = 1;
constexpr int kUsage = 2;

// Input error detected after argument parsing.
struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProblemArgs {
    std::string domain;
    std::string problem;
    std::size_t max_states = kDefaultStateCap;
};

struct SolveArgs {
    ProblemArgs in;
    std::string alg;
    std::optional<int> k;
    std::string tuples;
    std::string features;
    std::string sketch;
    std::uint64_t max_nodes = 0;
    bool json = false;
};

struct SieveArgs {
    std::string features;
    std::string sketch;
    bool trace = false;
};

struct OracleArgs {
    ProblemArgs in;
    std::string tuples;
    std::string features;
    std::string sketch;
    std::string route = "envelope";
    int k = 1;
    int k_cap = 2;
};

struct GenArgs {
    std::string family;
    std::string params;
    std::string out;
};

void add_problem_options(CLI::App* cmd, ProblemArgs& a) {
    cmd->add_option("--domain", a.domain, "domain PDDL file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--problem", a.problem, "problem PDDL file")->required()->check(CLI::ExistingFile);
}

GroundProblem load(const ProblemArgs& a) { return load_problem_files(a.domain, a.problem); }

FeatureSet load_features(const std::string& path) {
    if (path.empty()) throw usage_error("--features is required");
    return parse_features(read_file(path));
}

Sketch load_sketch(const std::string& path) {
    if (path.empty()) throw usage_error("--sketch is required");
    return parse_sketch(read_file(path));
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

struct Report {
    std::string algorithm;
    int k = -1;
    std::uint64_t expanded = 0;
    std::uint64_t generated = 0;
    std::size_t segments = 0;
    double wall_ms = 0.0;
    std::string verdict;
    std::string outcome;
    std::vector<ActionId> plan;
    bool solved = false;
};

void emit(const GroundProblem& p, const Report& r, bool as_json) {
    if (as_json) {
        json plan = json::array();
        for (ActionId a : r.plan) plan.push_back(p.action_name(a));
        json j{{"algorithm", r.algorithm},
               {"k", r.k},
               {"expanded", r.expanded},
               {"generated", r.generated},
               {"plan_length", r.solved ? json(r.plan.size()) : json(nullptr)},
               {"segments", r.segments},
               {"wall_ms", r.wall_ms},
               {"verdict", r.verdict},
               {"outcome", r.outcome},
               {"plan", plan}};
        std::cout << j.dump(2) << "\n";
        return;
    }
    if (r.solved) std::cout << format_plan(p, r.plan);
    std::cout << "; algorithm=" << r.algorithm << "\n"
              << "; k=" << r.k << "\n"
              << "; expanded=" << r.expanded << "\n"
              << "; generated=" << r.generated << "\n"
              << "; plan_length=" << (r.solved ? std::to_string(r.plan.size()) : "none") << "\n"
              << "; segments=" << r.segments << "\n"
              << "; wall_ms=" << r.wall_ms << "\n"
              << "; verdict=" << r.verdict << "\n"
              << "; outcome=" << r.outcome << "\n";
}

void take(Report& rep, const SearchResult& r) {
    rep.k = r.k;
    rep.expanded = r.stats.expanded;
    rep.generated = r.stats.generated;
    rep.outcome = to_string(r.outcome);
    rep.solved = r.solved();
    rep.plan = r.plan;
    if (!r.diagnostic.empty()) std::cerr << r.diagnostic << "\n";
}

int run_solve(const SolveArgs& a) {
    const auto p = load(a.in);
    const auto goal = goal_test(p);
    SearchOptions opts;
    opts.max_generated = a.max_nodes;
    Report rep;
    rep.algorithm = a.alg;
    const auto start = std::chrono::steady_clock::now();

    if (a.alg == "bfs") {
        take(rep, bfs_optimal(p, goal, opts));
    } else if (a.alg == "iw") {
        take(rep, iw(p, goal, opts, a.k.value_or(-1)));
    } else if (a.alg == "iwk") {
        if (!a.k) throw usage_error("--alg iwk needs --k");
        take(rep, iw_k(p, *a.k, goal, opts));
    } else if (a.alg == "iwt") {
        if (a.tuples.empty()) throw usage_error("--alg iwt needs --tuples");
        auto T = parse_tuples(read_file(a.tuples), p);
        take(rep, iw_t(p, T, goal, opts));
        rep.k = static_cast<int>(T.size());
    } else if (a.alg == "iwphi") {
        FeatureEvaluator phi(load_features(a.features), p);
        take(rep, iw_phi(p, phi, goal, opts));
    } else if (a.alg == "siwr") {
        auto sk = load_sketch(a.sketch);
        auto phi = bind(sk, load_features(a.features), p);
        SiwOptions so;
        so.k_max = a.k.value_or(2);
        so.search = opts;
        auto r = siw_r(p, sk, phi, so);
        rep.k = 0;
        for (const auto& seg : r.segments) rep.k = std::max(rep.k, seg.k);
        rep.expanded = r.total.expanded;
        rep.generated = r.total.generated;
        rep.segments = r.segments.size();
        rep.outcome = to_string(r.status);
        rep.solved = r.solved();
        rep.plan = r.plan;
        if (!r.diagnostic.empty()) std::cerr << r.diagnostic << "\n";
    } else if (a.alg == "policy") {
        auto sk = load_sketch(a.sketch);
        auto phi = bind(sk, load_features(a.features), p);
        auto r = a.max_nodes ? run_policy(p, sk, phi, a.max_nodes) : run_policy(p, sk, phi);
        rep.k = 0;
        rep.expanded = r.plan.size();
        rep.outcome = to_string(r.outcome);
        rep.solved = r.solved();
        rep.plan = r.plan;
        if (!r.diagnostic.empty()) std::cerr << r.diagnostic << "\n";
    } else {
        throw usage_error("unknown algorithm " + a.alg);
    }
    rep.wall_ms = elapsed_ms(start);
    rep.verdict = rep.solved ? "solved" : "unsolved";
    emit(p, rep, a.json);
    return rep.solved ? kOk : kNo;
}

// Checks that every sketch feature exists in the bundle with the same kind.
void check_kinds(const Sketch& sk, const FeatureSet& fs) {
    for (const auto& f : sk.features) {
        const int i = fs.find(f.name);
        if (i < 0) throw semantic_error("feature " + f.name + " is not defined in the feature file");
        if (fs[static_cast<std::size_t>(i)].kind != f.kind)
            throw semantic_error("feature " + f.name + " has a different kind in the feature file");
    }
}

int run_sieve(const SieveArgs& a) {
    auto sk = load_sketch(a.sketch);
    check_kinds(sk, load_features(a.features));
    auto res = sieve(build_policy_graph(sk));
    if (a.trace) std::cout << format_trace(sk, res);
    else std::cout << (res.accepted ? "ACCEPT" : "REJECT") << "\n";
    return res.accepted ? kOk : kNo;
}

int print_verdict(const EnvelopeReport& r) {
    std::cout << to_string(r.verdict) << "\n";
    if (!r.detail.empty()) std::cerr << r.detail << "\n";
    return r.holds() ? kOk : kNo;
}

int run_oracle(const std::string& which, const OracleArgs& a) {
    const auto p = load(a.in);
    if (which == "width") {
        auto w = effective_width(p, a.k_cap);
        if (w.bounded) std::cout << "width " << w.k << " optimal " << w.optimal << "\n";
        else std::cout << "unbounded up to " << a.k_cap << "\n";
        if (!w.detail.empty()) std::cerr << w.detail << "\n";
        return w.bounded ? kOk : kNo;
    }
    const auto space = enumerate(p, a.in.max_states);
    if (which == "admissible" || which == "envelope") {
        if (a.tuples.empty()) throw usage_error("--tuples is required");
        auto T = parse_tuples(read_file(a.tuples), p);
        if (which == "envelope") return print_verdict(is_cost_envelope(space, opt_states(space, T)));
        if (a.route == "strict") return print_verdict(is_admissible_strict(space, T));
        if (a.route != "envelope" && a.route != "direct") throw usage_error("unknown route " + a.route);
        return print_verdict(is_admissible(space, T,
                                           a.route == "direct" ? AdmissibilityRoute::Direct
                                                               : AdmissibilityRoute::Envelope));
    }
    if (which == "lower-bound") {
        const bool lb = lower_bound_witness(space, a.k);
        std::cout << (lb ? "true" : "false") << "\n";
        return lb ? kOk : kNo;
    }
    auto sk = load_sketch(a.sketch);
    auto phi = bind(sk, load_features(a.features), p);
    if (which == "feature-acyclic") {
        const bool ok = is_feature_acyclic_on(space, sk, phi);
        std::cout << (ok ? "true" : "false") << "\n";
        return ok ? kOk : kNo;
    }
    auto w = sketch_width_on(space, sk, phi, a.k_cap);
    if (w.bounded) std::cout << "width " << w.width << " subproblems " << w.subproblems << "\n";
    else std::cout << "unbounded up to " << a.k_cap << "\n";
    if (!w.bounded && w.worst) std::cerr << "worst subproblem root " << render_state(space, *w.worst) << "\n";
    if (!w.detail.empty()) std::cerr << w.detail << "\n";
    return w.bounded ? kOk : kNo;
}

int run_gen(const GenArgs& a) {
    auto b = generate(parse_instance_spec(a.family, a.params));
    write_bundle(b, a.out);
    std::cout << a.out << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Width-based planning toolkit"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "search for a plan");
    add_problem_options(solve, solve_args.in);
    solve->add_option("--alg", solve_args.alg, "search algorithm")
        ->required()
        ->check(CLI::IsMember({"bfs", "iw", "iwk", "iwt", "iwphi", "siwr", "policy"}));
    solve->add_option("--k", solve_args.k, "width bound")->check(CLI::NonNegativeNumber);
    solve->add_option("--tuples", solve_args.tuples, "tuple set file")->check(CLI::ExistingFile);
    solve->add_option("--features", solve_args.features, "feature file")->check(CLI::ExistingFile);
    solve->add_option("--sketch", solve_args.sketch, "sketch file")->check(CLI::ExistingFile);
    solve->add_option("--max-nodes", solve_args.max_nodes, "generated-node limit (0 = none)");
    solve->add_flag("--json", solve_args.json, "print stats as JSON");

    SieveArgs sieve_args;
    auto* sieve_cmd = app.add_subcommand("sieve", "termination check for a sketch");
    sieve_cmd->add_option("--features", sieve_args.features, "feature file")->required()->check(CLI::ExistingFile);
    sieve_cmd->add_option("--sketch", sieve_args.sketch, "sketch file")->required()->check(CLI::ExistingFile);
    sieve_cmd->add_flag("--trace", sieve_args.trace, "print every sieve step");

    OracleArgs oracle_args;
    auto* oracle = app.add_subcommand("oracle", "exact checks on the enumerated state space");
    oracle->require_subcommand(1);
    std::string oracle_kind;
    for (const char* name : {"admissible", "envelope", "lower-bound", "width", "sketch-width", "feature-acyclic"}) {
        auto* sub = oracle->add_subcommand(name);
        add_problem_options(sub, oracle_args.in);
        sub->add_option("--max-states", oracle_args.in.max_states, "enumeration limit");
        sub->callback([&oracle_kind, name] { oracle_kind = name; });
        const std::string n = name;
        if (n == "admissible" || n == "envelope")
            sub->add_option("--tuples", oracle_args.tuples, "tuple set file")->required()->check(CLI::ExistingFile);
        if (n == "admissible")
            sub->add_option("--route", oracle_args.route, "envelope, direct or strict")
                ->check(CLI::IsMember({"envelope", "direct", "strict"}));
        if (n == "lower-bound") sub->add_option("--k", oracle_args.k, "tuple size")->check(CLI::NonNegativeNumber);
        if (n == "width" || n == "sketch-width")
            sub->add_option("--k-cap", oracle_args.k_cap, "largest width tried")->check(CLI::NonNegativeNumber);
        if (n == "sketch-width" || n == "feature-acyclic") {
            sub->add_option("--features", oracle_args.features, "feature file")->required()->check(CLI::ExistingFile);
            sub->add_option("--sketch", oracle_args.sketch, "sketch file")->required()->check(CLI::ExistingFile);
        }
    }

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "write a generated instance bundle");
    gen->add_option("--family", gen_args.family, "instance family")->required()->check(CLI::IsMember(families()));
    gen->add_option("--params", gen_args.params, "key=value,... parameters");
    gen->add_option("--out", gen_args.out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (solve->parsed()) return run_solve(solve_args);
        if (sieve_cmd->parsed()) return run_sieve(sieve_args);
        if (oracle->parsed()) return run_oracle(oracle_kind, oracle_args);
        if (gen->parsed()) return run_gen(gen_args);
    } catch (const cap_exceeded& e) {
        std::cerr << "limit reached: " << e.what() << "\n";
        return kNo;
    } catch (const contract_violation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
