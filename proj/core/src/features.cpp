#include "iwkit/features.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "iwkit/errors.hpp"

namespace iwkit {

std::size_t ValuationHash::operator()(const FeatureValuation& v) const noexcept {
    std::uint64_t h = 0x84222325cbf29ce4ull ^ v.size();
    for (auto x : v) {
        h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
}

int FeatureSet::find(std::string_view name) const {
    for (std::size_t i = 0; i < defs_.size(); ++i)
        if (defs_[i].name == name) return static_cast<int>(i);
    return -1;
}

void FeatureSet::add(FeatureDef d) {
    if (find(d.name) >= 0) throw semantic_error("duplicate feature " + d.name);
    defs_.push_back(std::move(d));
}

FeatureSet FeatureSet::select(const std::vector<std::string>& names) const {
    FeatureSet out;
    for (const auto& n : names) {
        int i = find(n);
        if (i < 0) throw semantic_error("feature '" + n + "' is not defined");
        out.add(defs_[static_cast<std::size_t>(i)]);
    }
    return out;
}

// ---------------------------------------------------------------- parsing

namespace {

struct Token {
    enum class Type { Ident, Var, Punct, End } type;
    std::string text;  // identifiers are lower-cased
    int column;
    std::string raw;   // as written; feature names keep their case
};

std::vector<Token> tokenize(std::string_view line, int lineno) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto ident_char = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    };
    while (i < line.size()) {
        char c = line[i];
        int col = static_cast<int>(i) + 1;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '#') {
            break;
        } else if (c == '!' && i + 1 < line.size() && line[i + 1] == '=') {
            out.push_back({Token::Type::Punct, "!=", col, ""});
            i += 2;
        } else if (std::string_view("(),&!=").find(c) != std::string_view::npos) {
            out.push_back({Token::Type::Punct, std::string(1, c), col, ""});
            ++i;
        } else if (c == '?') {
            std::size_t j = i + 1;
            while (j < line.size() && ident_char(line[j])) ++j;
            if (j == i + 1) throw parse_error("empty variable name", lineno, col);
            out.push_back({Token::Type::Var, std::string(line.substr(i, j - i)), col, ""});
            i = j;
        } else if (ident_char(c)) {
            std::size_t j = i;
            std::string s;
            while (j < line.size() && ident_char(line[j]))
                s += static_cast<char>(std::tolower(static_cast<unsigned char>(line[j++])));
            out.push_back({Token::Type::Ident, s, col, std::string(line.substr(i, j - i))});
            i = j;
        } else {
            throw parse_error(std::string("unexpected character '") + c + "'", lineno, col);
        }
    }
    out.push_back({Token::Type::End, "", static_cast<int>(line.size()) + 1, ""});
    return out;
}

class LineParser {
public:
    LineParser(std::string_view line, int lineno) : toks_(tokenize(line, lineno)), line_(lineno) {}

    FeatureDef definition() {
        expect_ident("feature");
        FeatureDef d;
        if (peek().type != Token::Type::Ident) error("expected feature name");
        d.name = next().raw;
        std::string kind = ident("feature kind");
        if (kind == "bool")
            d.kind = FeatureKind::Boolean;
        else if (kind == "num")
            d.kind = FeatureKind::Numerical;
        else
            error("feature kind must be 'bool' or 'num'");
        if (peek().type == Token::Type::Ident && peek().text == "quadratic") {
            next();
            d.quadratic = true;
        }
        expect("=");
        d.expr = expr();
        if (peek().type != Token::Type::End) error("unexpected '" + peek().text + "'");
        return d;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void error(const std::string& msg) const {
        throw parse_error(msg, line_, peek().column);
    }

    void expect(const char* p) {
        if (peek().type != Token::Type::Punct || peek().text != p)
            error(std::string("expected '") + p + "'");
        next();
    }
    bool accept(const char* p) {
        if (peek().type == Token::Type::Punct && peek().text == p) {
            next();
            return true;
        }
        return false;
    }
    void expect_ident(const char* word) {
        if (peek().type != Token::Type::Ident || peek().text != word)
            error(std::string("expected '") + word + "'");
        next();
    }
    std::string ident(const char* what) {
        if (peek().type != Token::Type::Ident) error(std::string("expected ") + what);
        return next().text;
    }

    Term term() {
        const Token& t = peek();
        if (t.type == Token::Type::Var) {
            next();
            return {Term::Type::Variable, t.text};
        }
        if (t.type == Token::Type::Ident) {
            next();
            if (t.text == "_") return {Term::Type::Wildcard, ""};
            return {Term::Type::Object, t.text};
        }
        error("expected a term");
    }

    QueryLiteral literal() {
        QueryLiteral lit;
        bool negated = accept("!");
        if (!negated && (peek().type == Token::Type::Var ||
                         (peek().type == Token::Type::Ident && toks_[pos_ + 1].text == "!="))) {
            lit.type = QueryLiteral::Type::NotEqual;
            lit.terms.push_back(term());
            expect("!=");
            lit.terms.push_back(term());
            return lit;
        }
        lit.type = negated ? QueryLiteral::Type::NotAtom : QueryLiteral::Type::Atom;
        lit.predicate = ident("predicate");
        if (accept("(")) {
            if (!accept(")")) {
                do {
                    lit.terms.push_back(term());
                } while (accept(","));
                expect(")");
            }
        }
        return lit;
    }

    Query query() {
        Query q;
        do {
            q.push_back(literal());
        } while (accept("&"));
        // Variables must be introduced by a positive literal before use elsewhere.
        std::vector<std::string> bound;
        for (const auto& lit : q) {
            for (const auto& t : lit.terms) {
                if (t.type != Term::Type::Variable) continue;
                bool known = std::find(bound.begin(), bound.end(), t.name) != bound.end();
                if (lit.type == QueryLiteral::Type::Atom) {
                    if (!known) bound.push_back(t.name);
                } else if (!known) {
                    error("variable " + t.name + " must appear in an earlier positive literal");
                }
            }
        }
        if (q.front().type != QueryLiteral::Type::Atom)
            error("a pattern must start with a positive atom");
        return q;
    }

    Expr expr() {
        Expr e;
        if (peek().type != Token::Type::Ident) error("expected expression");
        const std::string raw = peek().raw;
        std::string head = ident("expression");
        if (!accept("(")) {
            e.op = Expr::Op::Ref;
            e.name = raw;
            return e;
        }
        if (head == "count") {
            e.op = Expr::Op::Count;
            e.query = query();
        } else if (head == "nonzero") {
            e.op = Expr::Op::Nonzero;
            e.children.push_back(expr());
        } else if (head == "sum") {
            e.op = Expr::Op::Sum;
            do {
                e.children.push_back(expr());
            } while (accept(","));
        } else if (head == "chain_count") {
            e.op = Expr::Op::ChainCount;
            e.relation = ident("binary predicate");
            expect(",");
            e.seed = ident("seed object");
            expect(",");
            std::string dir = ident("direction");
            if (dir == "up" || dir == "upward")
                e.upward = true;
            else if (dir == "down" || dir == "downward")
                e.upward = false;
            else
                error("direction must be 'up' or 'down'");
        } else if (head == "distance") {
            e.op = Expr::Op::Distance;
            e.name = ident("position predicate");
            expect(",");
            e.relation = ident("adjacency predicate");
            expect(",");
            std::string spec = ident("target spec");
            expect("(");
            if (spec == "cells") {
                do {
                    e.objects.push_back(ident("object"));
                } while (accept(","));
            } else if (spec == "cells_of") {
                e.targets_from_query = true;
                e.targets_query = query();
            } else {
                error("target spec must be cells(...) or cells_of(...)");
            }
            expect(")");
            if (accept(",")) {
                expect_ident("zero_if");
                expect("(");
                e.zero_if = query();
                expect(")");
            }
        } else if (head == "builtin") {
            e.op = Expr::Op::Builtin;
            e.name = ident("builtin name");
            while (accept(",")) e.objects.push_back(ident("object"));
        } else {
            error("unknown expression '" + head + "'");
        }
        expect(")");
        return e;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    int line_;
};

FeatureKind kind_of(const Expr& e, const FeatureSet& known) {
    switch (e.op) {
        case Expr::Op::Nonzero: return FeatureKind::Boolean;
        case Expr::Op::Builtin: {
            const BuiltinInfo* b = find_builtin(e.name);
            if (!b) throw semantic_error("unregistered builtin '" + e.name + "'");
            if (b->arity != e.objects.size())
                throw semantic_error("builtin '" + e.name + "' takes " +
                                     std::to_string(b->arity) + " arguments");
            return b->kind;
        }
        case Expr::Op::Ref: {
            int i = known.find(e.name);
            if (i < 0) throw semantic_error("unknown feature '" + e.name + "'");
            return known[static_cast<std::size_t>(i)].kind;
        }
        default: return FeatureKind::Numerical;
    }
}

// Replaces references by the definitions they name and checks operand kinds.
void resolve(Expr& e, const FeatureSet& known) {
    if (e.op == Expr::Op::Ref) {
        int i = known.find(e.name);
        if (i < 0) throw semantic_error("unknown feature '" + e.name + "'");
        e = known[static_cast<std::size_t>(i)].expr;
        return;
    }
    for (auto& c : e.children) {
        FeatureKind k = kind_of(c, known);
        resolve(c, known);
        if (k != FeatureKind::Numerical)
            throw semantic_error("operand of nonzero/sum must be numerical");
    }
}

}  // namespace

FeatureDef parse_feature_line(std::string_view line) { return LineParser(line, 1).definition(); }

FeatureSet parse_features(std::string_view text) {
    FeatureSet phi;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        FeatureDef d = LineParser(line, lineno).definition();
        FeatureKind k;
        try {
            k = kind_of(d.expr, phi);
            resolve(d.expr, phi);
        } catch (const semantic_error& e) {
            throw semantic_error("line " + std::to_string(lineno) + ": " + e.what());
        }
        if (k != d.kind)
            throw semantic_error("line " + std::to_string(lineno) + ": feature " + d.name +
                                 " is declared " +
                                 (d.kind == FeatureKind::Boolean ? "bool" : "num") +
                                 " but its definition is not");
        phi.add(std::move(d));
    }
    return phi;
}

// ---------------------------------------------------------------- builtins

namespace {

std::map<std::string, BuiltinInfo, std::less<>>& registry();

// Object directly above `base` in an on/2 chain, or -1.
std::vector<std::int64_t> above_map(const GroundProblem& p, const State& s, EvalStats* st) {
    std::vector<std::int64_t> above(p.objects.size(), -1);
    int on = p.find_predicate("on");
    if (on < 0) throw semantic_error("builtin needs predicate 'on'");
    auto [lo, hi] = p.predicate_range(static_cast<std::uint32_t>(on));
    for (AtomId a = lo; a < hi; ++a) {
        if (st) ++st->atom_visits;
        if (!s.contains(a)) continue;
        const auto& args = p.atoms[a].args;
        above[args[1]] = args[0];
    }
    return above;
}

std::int64_t hanoi_smaller_top(const BuiltinContext& ctx, const State& s, EvalStats* st) {
    const GroundProblem& p = *ctx.problem;
    auto above = above_map(p, s, st);
    auto top = [&](ObjectId peg) {
        std::int64_t cur = peg;
        std::size_t steps = 0;
        while (above[static_cast<std::size_t>(cur)] >= 0) {
            cur = above[static_cast<std::size_t>(cur)];
            if (++steps > above.size()) throw semantic_error("cycle in on/2 chain");
        }
        return static_cast<ObjectId>(cur);
    };
    int smaller = p.find_predicate("smaller");
    if (smaller < 0) throw semantic_error("builtin needs predicate 'smaller'");
    // An empty peg's top is the peg itself, which no disk is larger than.
    const AtomId* a = p.find_atom(static_cast<std::uint32_t>(smaller), {top(ctx.args[0]), top(ctx.args[1])});
    return a && s.contains(*a) ? 1 : 0;
}

std::int64_t marbles_first_box(const BuiltinContext& ctx, const State& s, EvalStats* st) {
    const GroundProblem& p = *ctx.problem;
    int ontable = p.find_predicate("ontable");
    int in = p.find_predicate("in");
    if (ontable < 0 || in < 0) throw semantic_error("builtin needs predicates 'ontable' and 'in'");
    std::int64_t first = -1;
    auto [lo, hi] = p.predicate_range(static_cast<std::uint32_t>(ontable));
    for (AtomId a = lo; a < hi; ++a) {
        if (st) ++st->atom_visits;
        if (!s.contains(a)) continue;
        ObjectId b = p.atoms[a].args[0];
        if (first < 0 || b < first) first = b;
    }
    if (first < 0) return 0;
    std::int64_t n = 0;
    auto [ilo, ihi] = p.predicate_range(static_cast<std::uint32_t>(in));
    for (AtomId a = ilo; a < ihi; ++a) {
        if (st) ++st->atom_visits;
        if (s.contains(a) && p.atoms[a].args[1] == static_cast<ObjectId>(first)) ++n;
    }
    return n;
}

std::map<std::string, BuiltinInfo, std::less<>>& registry() {
    static std::map<std::string, BuiltinInfo, std::less<>> r = {
        {"hanoi_smaller_top", {FeatureKind::Boolean, 2, hanoi_smaller_top}},
        {"marbles_first_box", {FeatureKind::Numerical, 0, marbles_first_box}},
    };
    return r;
}

}  // namespace

void register_builtin(const std::string& name, BuiltinInfo info) { registry()[name] = std::move(info); }

const BuiltinInfo* find_builtin(std::string_view name) {
    auto& r = registry();
    auto it = r.find(name);
    return it == r.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------- evaluation

namespace {

struct VecHash {
    std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept {
        std::uint64_t h = 1469598103934665603ull;
        for (auto x : v) {
            h ^= x;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

struct ProblemIndex {
    const GroundProblem* p;
    std::unordered_map<std::vector<std::uint32_t>, AtomId, VecHash> atom_of;

    explicit ProblemIndex(const GroundProblem& gp) : p(&gp) {
        for (const auto& a : gp.atoms) {
            std::vector<std::uint32_t> key{a.predicate};
            key.insert(key.end(), a.args.begin(), a.args.end());
            atom_of.emplace(std::move(key), a.atom_id);
        }
    }

    std::uint32_t predicate(const std::string& name, int arity) const {
        int i = p->find_predicate(name);
        if (i < 0) throw semantic_error("unknown predicate '" + name + "'");
        if (arity >= 0 && p->predicates[static_cast<std::size_t>(i)].arity != arity)
            throw semantic_error("predicate '" + name + "' has arity " +
                                 std::to_string(p->predicates[static_cast<std::size_t>(i)].arity));
        return static_cast<std::uint32_t>(i);
    }

    ObjectId object(const std::string& name) const {
        int i = p->find_object(name);
        if (i < 0) throw semantic_error("unknown object '" + name + "'");
        return static_cast<ObjectId>(i);
    }
};

constexpr int kWild = -1;

struct CTerm {
    enum Kind { Obj, Var, Wild } kind;
    std::uint32_t value;  // object id or variable slot
};

struct CLiteral {
    QueryLiteral::Type type;
    std::uint32_t predicate = 0;
    std::vector<CTerm> terms;
};

struct CQuery {
    std::vector<CLiteral> lits;
    std::size_t num_vars = 0;
    std::uint32_t focus = 0;  // variable slot reported by cells_of
};

CQuery compile_query(const Query& q, const ProblemIndex& idx, bool need_focus) {
    CQuery out;
    std::vector<std::string> names;
    auto slot = [&](const std::string& n) {
        auto it = std::find(names.begin(), names.end(), n);
        if (it != names.end()) return static_cast<std::uint32_t>(it - names.begin());
        names.push_back(n);
        return static_cast<std::uint32_t>(names.size() - 1);
    };
    bool have_focus = false;
    for (std::size_t li = 0; li < q.size(); ++li) {
        const auto& lit = q[li];
        CLiteral c;
        c.type = lit.type;
        if (lit.type != QueryLiteral::Type::NotEqual)
            c.predicate = idx.predicate(lit.predicate, static_cast<int>(lit.terms.size()));
        for (std::size_t ti = 0; ti < lit.terms.size(); ++ti) {
            const auto& t = lit.terms[ti];
            switch (t.type) {
                case Term::Type::Object:
                    c.terms.push_back({CTerm::Obj, idx.object(t.name)});
                    break;
                case Term::Type::Variable: {
                    auto s = slot(t.name);
                    if (!have_focus) {
                        out.focus = s;
                        have_focus = true;
                    }
                    c.terms.push_back({CTerm::Var, s});
                    break;
                }
                case Term::Type::Wildcard:
                    c.terms.push_back({CTerm::Wild, 0});
                    break;
            }
        }
        out.lits.push_back(std::move(c));
    }
    if (need_focus && !have_focus) {
        // Without a named variable, the last argument of the first pattern is the cell.
        auto& first = out.lits.front();
        if (first.terms.empty() || first.terms.back().kind != CTerm::Wild)
            throw semantic_error("cells_of needs a variable or a trailing '_' argument");
        first.terms.back() = {CTerm::Var, slot("?__cell")};
        out.focus = first.terms.back().value;
    }
    out.num_vars = names.size();
    return out;
}

class QueryRunner {
public:
    QueryRunner(const CQuery& q, const ProblemIndex& idx, const State& s, EvalStats* st)
        : q_(q), idx_(idx), s_(s), st_(st), binding_(q.num_vars, kWild) {}

    // Calls f(binding) for every solution; f returns false to stop early.
    template <typename F>
    void run(F&& f) {
        stop_ = false;
        rec(0, f);
    }

private:
    template <typename F>
    void rec(std::size_t li, F& f) {
        if (stop_) return;
        if (li == q_.lits.size()) {
            if (!f(binding_)) stop_ = true;
            return;
        }
        const CLiteral& lit = q_.lits[li];
        if (lit.type == QueryLiteral::Type::NotEqual) {
            if (value(lit.terms[0]) != value(lit.terms[1])) rec(li + 1, f);
            return;
        }
        bool ground = std::all_of(lit.terms.begin(), lit.terms.end(),
                                  [&](const CTerm& t) { return value(t) >= 0; });
        if (ground) {
            std::vector<std::uint32_t> key{lit.predicate};
            for (const auto& t : lit.terms) key.push_back(static_cast<std::uint32_t>(value(t)));
            if (st_) ++st_->atom_visits;
            auto it = idx_.atom_of.find(key);
            bool truth = it != idx_.atom_of.end() && s_.contains(it->second);
            if (truth == (lit.type == QueryLiteral::Type::Atom)) rec(li + 1, f);
            return;
        }
        auto [lo, hi] = idx_.p->predicate_range(lit.predicate);
        bool any = false;
        for (AtomId a = lo; a < hi && !stop_; ++a) {
            if (st_) ++st_->atom_visits;
            if (!s_.contains(a)) continue;
            const auto& args = idx_.p->atoms[a].args;
            std::vector<std::pair<std::uint32_t, std::int64_t>> undo;
            bool ok = true;
            for (std::size_t i = 0; i < lit.terms.size() && ok; ++i) {
                const CTerm& t = lit.terms[i];
                if (t.kind == CTerm::Wild) continue;
                std::int64_t v = value(t);
                if (v >= 0) {
                    ok = v == static_cast<std::int64_t>(args[i]);
                } else {
                    undo.emplace_back(t.value, binding_[t.value]);
                    binding_[t.value] = args[i];
                }
            }
            if (ok) {
                if (lit.type == QueryLiteral::Type::Atom) {
                    rec(li + 1, f);
                } else {
                    any = true;
                }
            }
            for (auto it = undo.rbegin(); it != undo.rend(); ++it) binding_[it->first] = it->second;
            if (any) break;
        }
        if (lit.type == QueryLiteral::Type::NotAtom && !any) rec(li + 1, f);
    }

    std::int64_t value(const CTerm& t) const {
        if (t.kind == CTerm::Obj) return t.value;
        if (t.kind == CTerm::Var) return binding_[t.value];
        return kWild;
    }

    const CQuery& q_;
    const ProblemIndex& idx_;
    const State& s_;
    EvalStats* st_;
    std::vector<std::int64_t> binding_;
    bool stop_ = false;
};

}  // namespace

class CompiledExpr {
public:
    CompiledExpr(const Expr& e, std::shared_ptr<const ProblemIndex> idx) : op_(e.op), idx_(std::move(idx)) {
        const GroundProblem& p = *idx_->p;
        switch (e.op) {
            case Expr::Op::Count:
                query_ = compile_query(e.query, *idx_, false);
                break;
            case Expr::Op::Nonzero:
            case Expr::Op::Sum:
                for (const auto& c : e.children)
                    children_.push_back(std::make_unique<CompiledExpr>(c, idx_));
                break;
            case Expr::Op::ChainCount:
                predicate_ = idx_->predicate(e.relation, 2);
                seed_ = idx_->object(e.seed);
                upward_ = e.upward;
                break;
            case Expr::Op::Distance: {
                predicate_ = idx_->predicate(e.name, 1);
                std::uint32_t adj = idx_->predicate(e.relation, 2);
                if (!p.predicates[adj].is_static)
                    throw semantic_error("adjacency predicate '" + e.relation + "' is not static");
                build_distances(p, adj);
                if (e.targets_from_query) {
                    targets_query_ = compile_query(e.targets_query, *idx_, true);
                    has_targets_query_ = true;
                } else {
                    for (const auto& o : e.objects) fixed_targets_.push_back(idx_->object(o));
                }
                if (!e.zero_if.empty()) {
                    zero_if_ = compile_query(e.zero_if, *idx_, false);
                    has_zero_if_ = true;
                }
                break;
            }
            case Expr::Op::Builtin: {
                const BuiltinInfo* b = find_builtin(e.name);
                if (!b) throw semantic_error("unregistered builtin '" + e.name + "'");
                if (b->arity != e.objects.size())
                    throw semantic_error("builtin '" + e.name + "' takes " +
                                         std::to_string(b->arity) + " arguments");
                builtin_ = b->fn;
                ctx_.problem = &p;
                for (const auto& o : e.objects) ctx_.args.push_back(idx_->object(o));
                break;
            }
            case Expr::Op::Ref:
                throw semantic_error("unresolved feature reference '" + e.name + "'");
        }
    }

    std::int64_t eval(const State& s, EvalStats* st) const {
        switch (op_) {
            case Expr::Op::Count: {
                std::int64_t n = 0;
                QueryRunner(query_, *idx_, s, st).run([&](const auto&) {
                    ++n;
                    return true;
                });
                return n;
            }
            case Expr::Op::Nonzero: return children_[0]->eval(s, st) != 0 ? 1 : 0;
            case Expr::Op::Sum: {
                std::int64_t n = 0;
                for (const auto& c : children_) n += c->eval(s, st);
                return n;
            }
            case Expr::Op::ChainCount: return chain(s, st);
            case Expr::Op::Distance: return distance(s, st);
            case Expr::Op::Builtin: return builtin_(ctx_, s, st);
            case Expr::Op::Ref: break;
        }
        return 0;
    }

private:
    std::int64_t chain(const State& s, EvalStats* st) const {
        const GroundProblem& p = *idx_->p;
        std::vector<std::int64_t> next(p.objects.size(), -1);
        auto [lo, hi] = p.predicate_range(predicate_);
        for (AtomId a = lo; a < hi; ++a) {
            if (st) ++st->atom_visits;
            if (!s.contains(a)) continue;
            const auto& args = p.atoms[a].args;
            if (upward_)
                next[args[1]] = args[0];
            else
                next[args[0]] = args[1];
        }
        std::int64_t n = 0;
        std::int64_t cur = next[seed_];
        while (cur >= 0) {
            if (++n > static_cast<std::int64_t>(next.size()))
                throw semantic_error("chain_count: cycle through " + p.objects[seed_]);
            cur = next[static_cast<std::size_t>(cur)];
        }
        return n;
    }

    void build_distances(const GroundProblem& p, std::uint32_t adj) {
        const std::size_t n = p.objects.size();
        std::vector<std::vector<std::uint32_t>> edges(n);
        auto [lo, hi] = p.predicate_range(adj);
        for (AtomId a = lo; a < hi; ++a)
            if (p.init.contains(a)) edges[p.atoms[a].args[0]].push_back(p.atoms[a].args[1]);
        dist_.assign(n * n, -1);
        n_ = n;
        for (std::size_t src = 0; src < n; ++src) {
            if (edges[src].empty()) continue;
            std::queue<std::uint32_t> q;
            dist_[src * n + src] = 0;
            q.push(static_cast<std::uint32_t>(src));
            while (!q.empty()) {
                auto u = q.front();
                q.pop();
                for (auto v : edges[u]) {
                    if (dist_[src * n + v] >= 0) continue;
                    dist_[src * n + v] = dist_[src * n + u] + 1;
                    q.push(v);
                }
            }
        }
    }

    std::int64_t distance(const State& s, EvalStats* st) const {
        if (has_zero_if_) {
            bool hit = false;
            QueryRunner(zero_if_, *idx_, s, st).run([&](const auto&) {
                hit = true;
                return false;
            });
            if (hit) return 0;
        }
        const GroundProblem& p = *idx_->p;
        std::int64_t pos = -1;
        auto [lo, hi] = p.predicate_range(predicate_);
        for (AtomId a = lo; a < hi; ++a) {
            if (st) ++st->atom_visits;
            if (!s.contains(a)) continue;
            if (pos >= 0) return 0;  // ambiguous position
            pos = p.atoms[a].args[0];
        }
        if (pos < 0) return 0;
        std::int64_t best = -1;
        auto consider = [&](std::int64_t target) {
            std::int64_t d = dist_[static_cast<std::size_t>(pos) * n_ + static_cast<std::size_t>(target)];
            if (static_cast<std::size_t>(pos) == static_cast<std::size_t>(target)) d = 0;
            if (d >= 0 && (best < 0 || d < best)) best = d;
        };
        if (has_targets_query_) {
            QueryRunner(targets_query_, *idx_, s, st).run([&](const std::vector<std::int64_t>& b) {
                consider(b[targets_query_.focus]);
                return best != 0;
            });
        } else {
            for (auto t : fixed_targets_) consider(t);
        }
        return best < 0 ? 0 : best;
    }

    Expr::Op op_;
    std::shared_ptr<const ProblemIndex> idx_;
    CQuery query_;
    std::vector<std::unique_ptr<CompiledExpr>> children_;
    std::uint32_t predicate_ = 0;
    ObjectId seed_ = 0;
    bool upward_ = true;
    std::vector<std::int64_t> dist_;
    std::size_t n_ = 0;
    std::vector<ObjectId> fixed_targets_;
    CQuery targets_query_;
    bool has_targets_query_ = false;
    CQuery zero_if_;
    bool has_zero_if_ = false;
    BuiltinFn builtin_;
    BuiltinContext ctx_;
};

FeatureEvaluator::FeatureEvaluator(FeatureSet phi, const GroundProblem& p)
    : phi_(std::move(phi)), problem_(&p) {
    auto idx = std::make_shared<const ProblemIndex>(p);
    for (const auto& d : phi_.defs()) {
        try {
            compiled_.push_back(std::make_unique<CompiledExpr>(d.expr, idx));
        } catch (const semantic_error& e) {
            throw semantic_error("feature " + d.name + ": " + e.what());
        }
    }
}

FeatureEvaluator::~FeatureEvaluator() = default;
FeatureEvaluator::FeatureEvaluator(FeatureEvaluator&&) noexcept = default;
FeatureEvaluator& FeatureEvaluator::operator=(FeatureEvaluator&&) noexcept = default;

std::int64_t FeatureEvaluator::evaluate(std::size_t feature, const State& s, EvalStats* stats) const {
    return compiled_.at(feature)->eval(s, stats);
}

FeatureValuation FeatureEvaluator::valuation(const State& s) const {
    FeatureValuation v(compiled_.size());
    for (std::size_t i = 0; i < compiled_.size(); ++i) v[i] = compiled_[i]->eval(s, nullptr);
    return v;
}

BooleanValuation FeatureEvaluator::boolean_valuation(const State& s) const {
    return boolean_projection(phi_, valuation(s));
}

FeatureValuation valuation(const FeatureEvaluator& phi, const State& s) { return phi.valuation(s); }

BooleanValuation boolean_projection(const FeatureSet& phi, const FeatureValuation& v) {
    if (v.size() != phi.size()) throw contract_violation("valuation length does not match features");
    if (v.size() > 32) throw contract_violation("too many features for a Boolean valuation");
    BooleanValuation bits = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        bool b = phi[i].kind == FeatureKind::Boolean ? v[i] != 0 : v[i] == 0;
        if (b) bits |= BooleanValuation{1} << i;
    }
    return bits;
}

std::string format_valuation(const FeatureValuation& v) {
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(v[i]);
    }
    return out + ")";
}

}  // namespace iwkit
