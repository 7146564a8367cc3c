#include "iwkit/pddl.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "iwkit/errors.hpp"
#include "iwkit/sexpr.hpp"

namespace iwkit {

namespace {

[[noreturn]] void fail(const SExpr& at, const std::string& msg) {
    throw parse_error(msg, at.line, at.column);
}

[[noreturn]] void semantic(const SExpr& at, const std::string& msg) {
    throw semantic_error(std::to_string(at.line) + ":" + std::to_string(at.column) + ": " + msg);
}

bool is_variable(const std::string& s) { return s.size() > 1 && s[0] == '?'; }

bool is_symbol(const std::string& s) {
    if (s.empty() || s[0] == ':' || s[0] == '?') return false;
    return s.find_first_of("?,&") == std::string::npos;
}

const std::string& symbol(const SExpr& e, const char* what) {
    if (e.is_list || e.atom.empty()) fail(e, std::string("expected ") + what);
    return e.atom;
}

AtomAst read_atom(const SExpr& e) {
    if (!e.is_list || e.items.empty()) fail(e, "expected an atom");
    AtomAst a;
    a.predicate = symbol(e.items[0], "predicate name");
    if (a.predicate == "and" || a.predicate == "not" || !is_symbol(a.predicate))
        fail(e.items[0], "expected predicate name, got '" + a.predicate + "'");
    for (std::size_t i = 1; i < e.items.size(); ++i) a.args.push_back(symbol(e.items[i], "term"));
    return a;
}

// (and x y ...), a single x, or () as the empty conjunction.
std::vector<const SExpr*> conjuncts(const SExpr& e) {
    std::vector<const SExpr*> out;
    if (!e.is_list) fail(e, "expected a conjunction");
    if (e.items.empty()) return out;
    if (e.head_is("and")) {
        for (std::size_t i = 1; i < e.items.size(); ++i) out.push_back(&e.items[i]);
    } else {
        out.push_back(&e);
    }
    return out;
}

struct Positioned {
    AtomAst atom;
    const SExpr* at;
};

void check_atom(const DomainAst& d, const AtomAst& a, const SExpr& at) {
    const PredicateDecl* decl = d.predicate(a.predicate);
    if (!decl) semantic(at, "undeclared predicate '" + a.predicate + "'");
    if (decl->params.size() != a.args.size())
        semantic(at, "arity mismatch for '" + a.predicate + "': expected " +
                         std::to_string(decl->params.size()) + ", got " +
                         std::to_string(a.args.size()));
}

void expect_define(const SExpr& top, const char* kind, std::string& name) {
    if (!top.head_is("define")) fail(top, "expected (define ...)");
    if (top.items.size() < 2 || !top.items[1].head_is(kind) || top.items[1].items.size() != 2)
        fail(top, std::string("expected (") + kind + " NAME)");
    name = symbol(top.items[1].items[1], "name");
}

ActionSchema read_action(const SExpr& e, const DomainAst& d) {
    ActionSchema a;
    if (e.items.size() < 2) fail(e, "action without a name");
    a.name = symbol(e.items[1], "action name");
    bool seen_params = false, seen_pre = false, seen_eff = false;
    std::vector<Positioned> body;
    for (std::size_t i = 2; i < e.items.size(); i += 2) {
        const SExpr& key = e.items[i];
        if (i + 1 >= e.items.size()) fail(key, "missing value for " + to_string(key));
        const SExpr& val = e.items[i + 1];
        if (key.is_atom(":parameters")) {
            if (seen_params) fail(key, "duplicate :parameters");
            seen_params = true;
            if (!val.is_list) fail(val, "expected parameter list");
            for (const auto& p : val.items) {
                const std::string& v = symbol(p, "parameter");
                if (v == "-") fail(p, "typed parameters are not supported");
                if (!is_variable(v)) fail(p, "parameter must start with '?'");
                if (std::find(a.params.begin(), a.params.end(), v) != a.params.end())
                    semantic(p, "duplicate parameter " + v);
                a.params.push_back(v);
            }
        } else if (key.is_atom(":precondition")) {
            if (seen_pre) fail(key, "duplicate :precondition");
            seen_pre = true;
            for (const SExpr* c : conjuncts(val)) {
                if (c->head_is("not")) fail(*c, "negative preconditions are not supported");
                a.pre.push_back(read_atom(*c));
                body.push_back({a.pre.back(), c});
            }
        } else if (key.is_atom(":effect")) {
            if (seen_eff) fail(key, "duplicate :effect");
            seen_eff = true;
            for (const SExpr* c : conjuncts(val)) {
                if (c->head_is("not")) {
                    if (c->items.size() != 2) fail(*c, "malformed (not ...)");
                    a.del.push_back(read_atom(c->items[1]));
                    body.push_back({a.del.back(), &c->items[1]});
                } else {
                    a.add.push_back(read_atom(*c));
                    body.push_back({a.add.back(), c});
                }
            }
        } else {
            fail(key, "unknown action field " + to_string(key));
        }
    }
    for (const auto& [atom, at] : body) {
        check_atom(d, atom, *at);
        for (const auto& arg : atom.args) {
            if (!is_variable(arg))
                semantic(*at, "constant '" + arg + "' in schema " + a.name +
                                  " (constants are not supported)");
            if (std::find(a.params.begin(), a.params.end(), arg) == a.params.end())
                semantic(*at, "unbound variable " + arg + " in schema " + a.name);
        }
    }
    return a;
}

}  // namespace

const PredicateDecl* DomainAst::predicate(std::string_view n) const {
    for (const auto& p : predicates)
        if (p.name == n) return &p;
    return nullptr;
}

DomainAst parse_domain(std::string_view text) {
    SExpr top = read_sexpr(text);
    DomainAst d;
    expect_define(top, "domain", d.name);
    bool seen_preds = false;
    for (std::size_t i = 2; i < top.items.size(); ++i) {
        const SExpr& sec = top.items[i];
        if (!sec.is_list || sec.items.empty()) fail(sec, "expected a domain section");
        const std::string& head = symbol(sec.items[0], "section keyword");
        if (head == ":requirements") {
            for (std::size_t j = 1; j < sec.items.size(); ++j) {
                const std::string& r = symbol(sec.items[j], "requirement");
                if (r != ":strips")
                    fail(sec.items[j], "unsupported requirement " + r);
                d.requirements.push_back(r);
            }
        } else if (head == ":predicates") {
            if (seen_preds) fail(sec, "duplicate :predicates");
            seen_preds = true;
            for (std::size_t j = 1; j < sec.items.size(); ++j) {
                const SExpr& pe = sec.items[j];
                if (!pe.is_list || pe.items.empty()) fail(pe, "expected predicate declaration");
                PredicateDecl p;
                p.name = symbol(pe.items[0], "predicate name");
                if (!is_symbol(p.name)) fail(pe.items[0], "bad predicate name");
                if (d.predicate(p.name)) semantic(pe, "duplicate predicate " + p.name);
                for (std::size_t k = 1; k < pe.items.size(); ++k) {
                    const std::string& v = symbol(pe.items[k], "parameter");
                    if (v == "-") fail(pe.items[k], "typed predicates are not supported");
                    if (!is_variable(v)) fail(pe.items[k], "parameter must start with '?'");
                    p.params.push_back(v);
                }
                d.predicates.push_back(std::move(p));
            }
        } else if (head == ":action") {
            d.actions.push_back(read_action(sec, d));
            for (std::size_t j = 0; j + 1 < d.actions.size(); ++j)
                if (d.actions[j].name == d.actions.back().name)
                    semantic(sec, "duplicate action " + d.actions.back().name);
        } else if (head == ":types" || head == ":constants" || head == ":functions") {
            fail(sec, head + " is outside the supported STRIPS subset");
        } else {
            fail(sec, "unknown domain section " + head);
        }
    }
    return d;
}

namespace {

ProblemAst parse_problem_impl(std::string_view text, const DomainAst* domain) {
    SExpr top = read_sexpr(text);
    ProblemAst p;
    expect_define(top, "problem", p.name);
    std::vector<Positioned> ground;
    bool seen_goal = false, seen_domain = false;
    for (std::size_t i = 2; i < top.items.size(); ++i) {
        const SExpr& sec = top.items[i];
        if (!sec.is_list || sec.items.empty()) fail(sec, "expected a problem section");
        const std::string& head = symbol(sec.items[0], "section keyword");
        if (head == ":domain") {
            if (sec.items.size() != 2) fail(sec, "expected (:domain NAME)");
            p.domain = symbol(sec.items[1], "domain name");
            seen_domain = true;
        } else if (head == ":objects") {
            for (std::size_t j = 1; j < sec.items.size(); ++j) {
                const std::string& o = symbol(sec.items[j], "object");
                if (o == "-") fail(sec.items[j], "typed objects are not supported");
                if (!is_symbol(o)) fail(sec.items[j], "bad object name " + o);
                if (std::find(p.objects.begin(), p.objects.end(), o) != p.objects.end())
                    semantic(sec.items[j], "duplicate object " + o);
                p.objects.push_back(o);
            }
        } else if (head == ":init") {
            for (std::size_t j = 1; j < sec.items.size(); ++j) {
                const SExpr& a = sec.items[j];
                if (a.head_is("not")) fail(a, "negative literals are not allowed in :init");
                p.init.push_back(read_atom(a));
                ground.push_back({p.init.back(), &a});
            }
        } else if (head == ":goal") {
            if (seen_goal) fail(sec, "duplicate :goal");
            seen_goal = true;
            if (sec.items.size() != 2) fail(sec, "expected (:goal FORMULA)");
            for (const SExpr* c : conjuncts(sec.items[1])) {
                LiteralAst lit;
                const SExpr* at = c;
                if (c->head_is("not")) {
                    if (c->items.size() != 2) fail(*c, "malformed (not ...)");
                    lit.negated = true;
                    at = &c->items[1];
                }
                lit.atom = read_atom(*at);
                p.goal.push_back(lit);
                ground.push_back({lit.atom, at});
            }
        } else if (head == ":requirements") {
            continue;
        } else {
            fail(sec, "unknown problem section " + head);
        }
    }
    if (!seen_domain) fail(top, "missing (:domain NAME)");
    for (const auto& [atom, at] : ground) {
        for (const auto& arg : atom.args)
            if (std::find(p.objects.begin(), p.objects.end(), arg) == p.objects.end())
                semantic(*at, "undeclared object '" + arg + "'");
        if (domain) check_atom(*domain, atom, *at);
    }
    if (domain && domain->name != p.domain)
        throw semantic_error("problem refers to domain '" + p.domain + "' but domain is '" +
                             domain->name + "'");
    return p;
}

std::string atom_text(const AtomAst& a) {
    std::string out = "(" + a.predicate;
    for (const auto& x : a.args) out += " " + x;
    return out + ")";
}

}  // namespace

ProblemAst parse_problem(std::string_view text) { return parse_problem_impl(text, nullptr); }

ProblemAst parse_problem(std::string_view text, const DomainAst& domain) {
    return parse_problem_impl(text, &domain);
}

std::string to_pddl(const DomainAst& d) {
    std::ostringstream os;
    os << "(define (domain " << d.name << ")\n";
    if (!d.requirements.empty()) {
        os << "  (:requirements";
        for (const auto& r : d.requirements) os << " " << r;
        os << ")\n";
    }
    os << "  (:predicates";
    for (const auto& p : d.predicates) {
        os << " (" << p.name;
        for (const auto& v : p.params) os << " " << v;
        os << ")";
    }
    os << ")\n";
    for (const auto& a : d.actions) {
        os << "  (:action " << a.name << "\n    :parameters (";
        for (std::size_t i = 0; i < a.params.size(); ++i) os << (i ? " " : "") << a.params[i];
        os << ")\n    :precondition (and";
        for (const auto& x : a.pre) os << " " << atom_text(x);
        os << ")\n    :effect (and";
        for (const auto& x : a.add) os << " " << atom_text(x);
        for (const auto& x : a.del) os << " (not " << atom_text(x) << ")";
        os << "))\n";
    }
    os << ")\n";
    return os.str();
}

std::string to_pddl(const ProblemAst& p) {
    std::ostringstream os;
    os << "(define (problem " << p.name << ")\n  (:domain " << p.domain << ")\n  (:objects";
    for (const auto& o : p.objects) os << " " << o;
    os << ")\n  (:init";
    for (const auto& a : p.init) os << "\n    " << atom_text(a);
    os << ")\n  (:goal (and";
    for (const auto& l : p.goal) {
        if (l.negated)
            os << "\n    (not " << atom_text(l.atom) << ")";
        else
            os << "\n    " << atom_text(l.atom);
    }
    os << "))\n)\n";
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace iwkit
