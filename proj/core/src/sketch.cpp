#include "iwkit/sketch.hpp"

#include <algorithm>
#include <cctype>
#include <random>

#include "iwkit/errors.hpp"

namespace iwkit {

const Effect* Rule::effect_on(std::size_t feature) const {
    for (const auto& [f, e] : effects)
        if (f == feature) return &e;
    return nullptr;
}

int Sketch::find(std::string_view name) const {
    for (std::size_t i = 0; i < features.size(); ++i)
        if (features[i].name == name) return static_cast<int>(i);
    return -1;
}

std::vector<std::string> Sketch::feature_names() const {
    std::vector<std::string> out;
    for (const auto& f : features) out.push_back(f.name);
    return out;
}

namespace {

struct Tok {
    std::string text;
    bool ident;
    int line, col;
};

std::vector<Tok> lex(std::string_view text) {
    std::vector<Tok> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto adv = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            adv(1);
        } else if (c == '#' || (c == '/' && i + 1 < text.size() && text[i + 1] == '/')) {
            while (i < text.size() && text[i] != '\n') adv(1);
        } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
                ++j;
            out.push_back({std::string(text.substr(i, j - i)), true, line, col});
            adv(j - i);
        } else {
            static const char* multi[] = {"=>", "++", "--"};
            bool done = false;
            for (const char* m : multi) {
                if (text.substr(i, 2) == m) {
                    out.push_back({m, false, line, col});
                    adv(2);
                    done = true;
                    break;
                }
            }
            if (done) continue;
            if (std::string_view("{};:,!=>?").find(c) == std::string_view::npos)
                throw parse_error(std::string("unexpected character '") + c + "'", line, col);
            out.push_back({std::string(1, c), false, line, col});
            adv(1);
        }
    }
    out.push_back({"", false, line, col});
    return out;
}

class SketchParser {
public:
    explicit SketchParser(std::string_view text) : toks_(lex(text)) {}

    Sketch parse() {
        Sketch sk;
        keyword("features");
        expect("{");
        while (!accept("}")) {
            SketchFeature f;
            f.name = ident("feature name");
            if (sk.find(f.name) >= 0) error("feature '" + f.name + "' declared twice");
            expect(":");
            std::string kind = ident("kind");
            if (kind == "bool")
                f.kind = FeatureKind::Boolean;
            else if (kind == "num")
                f.kind = FeatureKind::Numerical;
            else
                error("kind must be 'bool' or 'num'");
            expect(";");
            sk.features.push_back(std::move(f));
        }
        keyword("rules");
        expect("{");
        while (!accept("}")) {
            sk.rules.push_back(rule(sk));
            expect(";");
        }
        if (!at_end()) error("unexpected '" + peek().text + "' after rules block");
        return sk;
    }

private:
    const Tok& peek() const { return toks_[pos_]; }
    bool at_end() const { return pos_ + 1 >= toks_.size(); }
    const Tok& next() { return toks_[at_end() ? pos_ : pos_++]; }
    [[noreturn]] void error(const std::string& msg) const {
        throw parse_error(msg, peek().line, peek().col);
    }
    bool accept(const char* p) {
        if (!peek().ident && peek().text == p) {
            next();
            return true;
        }
        return false;
    }
    void expect(const char* p) {
        if (!accept(p)) error(std::string("expected '") + p + "'");
    }
    void keyword(const char* w) {
        if (!peek().ident || peek().text != w) error(std::string("expected '") + w + "'");
        next();
    }
    std::string ident(const char* what) {
        if (!peek().ident) error(std::string("expected ") + what);
        return next().text;
    }

    std::size_t feature(const Sketch& sk, const std::string& name) {
        int i = sk.find(name);
        if (i < 0) {
            --pos_;
            error("undeclared feature '" + name + "'");
        }
        return static_cast<std::size_t>(i);
    }

    Rule rule(const Sketch& sk) {
        Rule r;
        expect("{");
        if (!accept("}")) {
            do {
                bool neg = accept("!");
                std::size_t f = feature(sk, ident("feature"));
                FeatureKind kind = sk.features[f].kind;
                Cond c;
                if (neg) {
                    if (kind != FeatureKind::Boolean) error("'!' applies to Boolean features");
                    c = Cond::False;
                } else if (accept("=")) {
                    if (kind != FeatureKind::Numerical || ident("0") != "0")
                        error("'=0' applies to numerical features");
                    c = Cond::Zero;
                } else if (accept(">")) {
                    if (kind != FeatureKind::Numerical || ident("0") != "0")
                        error("'>0' applies to numerical features");
                    c = Cond::Positive;
                } else {
                    if (kind != FeatureKind::Boolean)
                        error("numerical condition needs '=0' or '>0'");
                    c = Cond::True;
                }
                for (const auto& [g, _] : r.conditions)
                    if (g == f) error("feature '" + sk.features[f].name + "' conditioned twice");
                r.conditions.emplace_back(f, c);
            } while (accept(","));
            expect("}");
        }
        expect("=>");
        expect("{");
        if (!accept("}")) {
            do {
                bool neg = accept("!");
                std::size_t f = feature(sk, ident("feature"));
                FeatureKind kind = sk.features[f].kind;
                Effect e;
                if (neg) {
                    if (kind != FeatureKind::Boolean) error("'!' applies to Boolean features");
                    e = Effect::SetFalse;
                } else if (accept("?")) {
                    e = kind == FeatureKind::Boolean ? Effect::BoolUnknown : Effect::NumUnknown;
                } else if (accept("++")) {
                    if (kind != FeatureKind::Numerical) error("'++' applies to numerical features");
                    e = Effect::Inc;
                } else if (accept("--")) {
                    if (kind != FeatureKind::Numerical) error("'--' applies to numerical features");
                    e = Effect::Dec;
                } else {
                    if (kind != FeatureKind::Boolean)
                        error("numerical effect needs '++', '--' or '?'");
                    e = Effect::SetTrue;
                }
                if (r.effect_on(f)) error("feature '" + sk.features[f].name + "' affected twice");
                r.effects.emplace_back(f, e);
            } while (accept(","));
            expect("}");
        }
        return r;
    }

    std::vector<Tok> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

Sketch parse_sketch(std::string_view text) { return SketchParser(text).parse(); }

std::string to_text(const Sketch& sk, const Rule& r) {
    std::string out = "{ ";
    for (std::size_t i = 0; i < r.conditions.size(); ++i) {
        const auto& [f, c] = r.conditions[i];
        if (i) out += ", ";
        const std::string& n = sk.features[f].name;
        switch (c) {
            case Cond::True: out += n; break;
            case Cond::False: out += "!" + n; break;
            case Cond::Zero: out += n + "=0"; break;
            case Cond::Positive: out += n + ">0"; break;
        }
    }
    out += r.conditions.empty() ? "} => { " : " } => { ";
    for (std::size_t i = 0; i < r.effects.size(); ++i) {
        const auto& [f, e] = r.effects[i];
        if (i) out += ", ";
        const std::string& n = sk.features[f].name;
        switch (e) {
            case Effect::SetTrue: out += n; break;
            case Effect::SetFalse: out += "!" + n; break;
            case Effect::BoolUnknown:
            case Effect::NumUnknown: out += n + "?"; break;
            case Effect::Inc: out += n + "++"; break;
            case Effect::Dec: out += n + "--"; break;
        }
    }
    return out + (r.effects.empty() ? "}" : " }");
}

std::string to_text(const Sketch& sk) {
    std::string out = "features {";
    for (const auto& f : sk.features)
        out += " " + f.name + ": " + (f.kind == FeatureKind::Boolean ? "bool" : "num") + ";";
    out += " }\nrules {\n";
    for (const auto& r : sk.rules) out += "  " + to_text(sk, r) + ";\n";
    return out + "}\n";
}

FeatureEvaluator bind(const Sketch& sk, const FeatureSet& bundle, const GroundProblem& p) {
    FeatureSet phi = bundle.select(sk.feature_names());
    for (std::size_t i = 0; i < sk.features.size(); ++i)
        if (phi[i].kind != sk.features[i].kind)
            throw semantic_error("feature '" + sk.features[i].name +
                                 "' has a different kind in the bundle");
    return FeatureEvaluator(std::move(phi), p);
}

bool pair_satisfies(const Sketch& sk, const Rule& r, const FeatureValuation& from,
                    const FeatureValuation& to) {
    for (const auto& [f, c] : r.conditions) {
        bool ok = false;
        switch (c) {
            case Cond::True: ok = from[f] != 0; break;
            case Cond::False: ok = from[f] == 0; break;
            case Cond::Zero: ok = from[f] == 0; break;
            case Cond::Positive: ok = from[f] > 0; break;
        }
        if (!ok) return false;
    }
    for (std::size_t f = 0; f < sk.features.size(); ++f) {
        const Effect* e = r.effect_on(f);
        if (!e) {
            if (from[f] != to[f]) return false;
            continue;
        }
        switch (*e) {
            case Effect::SetTrue:
                if (to[f] == 0) return false;
                break;
            case Effect::SetFalse:
                if (to[f] != 0) return false;
                break;
            case Effect::Dec:
                if (!(from[f] > to[f])) return false;
                break;
            case Effect::Inc:
                if (!(from[f] < to[f])) return false;
                break;
            case Effect::BoolUnknown:
            case Effect::NumUnknown: break;
        }
    }
    return true;
}

bool relation(const Sketch& sk, const FeatureValuation& from, const FeatureValuation& to) {
    for (const auto& r : sk.rules)
        if (pair_satisfies(sk, r, from, to)) return true;
    return false;
}

PolicyGraph build_policy_graph(const Sketch& sk, std::size_t max_features) {
    const std::size_t nf = sk.features.size();
    if (nf > max_features || nf > 30)
        throw cap_exceeded("policy graph over " + std::to_string(nf) + " features exceeds cap of " +
                           std::to_string(max_features));
    PolicyGraph g;
    for (const auto& f : sk.features) g.kinds.push_back(f.kind);
    g.rules = sk.rules;
    const BooleanValuation nv = BooleanValuation{1} << nf;
    for (std::size_t ri = 0; ri < sk.rules.size(); ++ri) {
        const Rule& r = sk.rules[ri];
        for (BooleanValuation v = 0; v < nv; ++v) {
            auto bit = [&](std::size_t f) { return (v >> f) & 1u; };
            bool ok = true;
            for (const auto& [f, c] : r.conditions) {
                // Bit f is "p" for Boolean features and "n=0" for numerical ones.
                if ((c == Cond::True || c == Cond::Zero) && !bit(f)) ok = false;
                if ((c == Cond::False || c == Cond::Positive) && bit(f)) ok = false;
            }
            for (const auto& [f, e] : r.effects)
                if (e == Effect::Dec && bit(f)) ok = false;  // cannot decrease from zero
            if (!ok) continue;
            BooleanValuation fixed = 0;
            std::vector<std::size_t> free;
            for (std::size_t f = 0; f < nf; ++f) {
                const Effect* e = r.effect_on(f);
                BooleanValuation b = bit(f);
                if (e) {
                    switch (*e) {
                        case Effect::SetTrue: b = 1; break;
                        case Effect::SetFalse: b = 0; break;
                        case Effect::Inc: b = 0; break;
                        case Effect::Dec:
                        case Effect::BoolUnknown:
                        case Effect::NumUnknown: free.push_back(f); continue;
                    }
                }
                fixed |= b << f;
            }
            for (std::size_t m = 0; m < (std::size_t{1} << free.size()); ++m) {
                BooleanValuation to = fixed;
                for (std::size_t i = 0; i < free.size(); ++i)
                    if ((m >> i) & 1u) to |= BooleanValuation{1} << free[i];
                g.edges.push_back({v, to, ri});
            }
        }
    }
    return g;
}

std::vector<std::vector<BooleanValuation>> strongly_connected_components(
    std::size_t n, const std::vector<PolicyEdge>& edges, const std::vector<char>* alive) {
    std::vector<std::vector<std::uint32_t>> out(n);
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (!alive || (*alive)[i]) out[edges[i].from].push_back(edges[i].to);

    // Iterative Tarjan.
    std::vector<std::int64_t> index(n, -1), low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<std::uint32_t> stack;
    std::vector<std::vector<BooleanValuation>> comps;
    std::int64_t counter = 0;
    struct Frame {
        std::uint32_t v;
        std::size_t next;
    };
    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            Frame& fr = call.back();
            if (fr.next < out[fr.v].size()) {
                std::uint32_t w = out[fr.v][fr.next++];
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[fr.v] = std::min(low[fr.v], index[w]);
                }
                continue;
            }
            std::uint32_t v = fr.v;
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            if (low[v] == index[v]) {
                std::vector<BooleanValuation> comp;
                std::uint32_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp.push_back(w);
                } while (w != v);
                std::sort(comp.begin(), comp.end());
                comps.push_back(std::move(comp));
            }
        }
    }
    std::sort(comps.begin(), comps.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return comps;
}

SieveResult sieve(const PolicyGraph& g, std::optional<unsigned> seed) {
    SieveResult res;
    const std::size_t n = g.num_vertices();
    std::vector<char> alive(g.edges.size(), 1);
    std::mt19937 rng(seed.value_or(0));
    for (;;) {
        auto comps = strongly_connected_components(n, g.edges, &alive);
        std::vector<std::int64_t> comp_of(n, -1);
        for (std::size_t c = 0; c < comps.size(); ++c)
            for (auto v : comps[c]) comp_of[v] = static_cast<std::int64_t>(c);

        // Live edges inside each component; a component is cyclic if it has any.
        std::vector<std::vector<std::size_t>> inner(comps.size());
        for (std::size_t i = 0; i < g.edges.size(); ++i) {
            if (!alive[i]) continue;
            const auto& e = g.edges[i];
            if (comp_of[e.from] == comp_of[e.to])
                inner[static_cast<std::size_t>(comp_of[e.from])].push_back(i);
        }
        std::vector<std::pair<std::size_t, std::size_t>> candidates;
        bool cyclic = false;
        for (std::size_t c = 0; c < comps.size(); ++c) {
            if (inner[c].empty()) continue;
            cyclic = true;
            for (std::size_t f = 0; f < g.kinds.size(); ++f) {
                if (g.kinds[f] != FeatureKind::Numerical) continue;
                bool dec = false, blocked = false;
                for (auto ei : inner[c]) {
                    const Effect* e = g.rules[g.edges[ei].rule].effect_on(f);
                    if (!e) continue;
                    if (*e == Effect::Dec) dec = true;
                    if (*e == Effect::Inc || *e == Effect::NumUnknown) blocked = true;
                }
                if (dec && !blocked) candidates.emplace_back(c, f);
            }
        }
        if (!cyclic) {
            res.accepted = true;
            return res;
        }
        if (candidates.empty()) {
            res.accepted = false;
            return res;
        }
        auto [c, f] = seed ? candidates[std::uniform_int_distribution<std::size_t>(
                                 0, candidates.size() - 1)(rng)]
                           : candidates.front();
        SieveStep step{comps[c], f, {}};
        for (auto ei : inner[c]) {
            const Effect* e = g.rules[g.edges[ei].rule].effect_on(f);
            if (e && *e == Effect::Dec) {
                alive[ei] = 0;
                step.removed.push_back(ei);
            }
        }
        res.trace.push_back(std::move(step));
    }
}

std::string format_boolean_valuation(const Sketch& sk, BooleanValuation v) {
    std::string out = "[";
    for (std::size_t f = 0; f < sk.features.size(); ++f) {
        if (f) out += ",";
        bool b = (v >> f) & 1u;
        const std::string& n = sk.features[f].name;
        if (sk.features[f].kind == FeatureKind::Boolean)
            out += (b ? "" : "!") + n;
        else
            out += n + (b ? "=0" : ">0");
    }
    return out + "]";
}

std::string format_trace(const Sketch& sk, const SieveResult& r) {
    std::string out;
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
        const auto& st = r.trace[i];
        out += "step " + std::to_string(i) + ": remove Dec(" + sk.features[st.feature].name +
               ") edges=" + std::to_string(st.removed.size()) + " component={";
        for (std::size_t j = 0; j < st.component.size(); ++j) {
            if (j) out += " ";
            out += format_boolean_valuation(sk, st.component[j]);
        }
        out += "}\n";
    }
    out += r.accepted ? "ACCEPT\n" : "REJECT\n";
    return out;
}

}  // namespace iwkit
