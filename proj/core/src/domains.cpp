#include "iwkit/domains.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "iwkit/errors.hpp"
#include "iwkit/grounder.hpp"

namespace iwkit {

const std::string& Bundle::sketch(std::string_view name) const {
    for (const auto& [n, text] : sketches)
        if (n == name) return text;
    throw std::out_of_range("bundle has no sketch '" + std::string(name) + "'");
}

const std::string& Bundle::tuple_set(std::string_view name) const {
    for (const auto& [n, text] : tuples)
        if (n == name) return text;
    throw std::out_of_range("bundle has no tuple set '" + std::string(name) + "'");
}

std::string cell_name(Cell c) { return "c_" + std::to_string(c.x) + "_" + std::to_string(c.y); }

namespace {

std::string join(const std::vector<std::string>& xs, const std::string& sep = " ") {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
    return out;
}

std::string problem_text(const std::string& name, const std::string& domain,
                         const std::vector<std::string>& objects,
                         const std::vector<std::string>& init,
                         const std::vector<std::string>& goal) {
    std::string out = "(define (problem " + name + ")\n  (:domain " + domain + ")\n";
    out += "  (:objects " + join(objects) + ")\n  (:init";
    for (const auto& a : init) out += "\n    " + a;
    out += ")\n  (:goal (and";
    for (const auto& g : goal) out += "\n    " + g;
    return out + ")))\n";
}

std::string atom(const std::string& pred, std::initializer_list<std::string> args) {
    std::string out = "(" + pred;
    for (const auto& a : args) out += " " + a;
    return out + ")";
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// ---------------------------------------------------------------- blocks

const char* kBlocksDomain = R"((define (domain blocksworld)
  (:requirements :strips)
  (:predicates (on ?x ?y) (ontable ?x) (clear ?x) (hold ?x) (handempty))
  (:action pickup
    :parameters (?x)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (hold ?x) (not (clear ?x)) (not (ontable ?x)) (not (handempty))))
  (:action putdown
    :parameters (?x)
    :precondition (and (hold ?x))
    :effect (and (clear ?x) (ontable ?x) (handempty) (not (hold ?x))))
  (:action stack
    :parameters (?x ?y)
    :precondition (and (hold ?x) (clear ?y))
    :effect (and (on ?x ?y) (clear ?x) (handempty) (not (hold ?x)) (not (clear ?y))))
  (:action unstack
    :parameters (?x ?y)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (hold ?x) (clear ?y) (not (on ?x ?y)) (not (clear ?x)) (not (handempty)))))
)";

// Init atoms for towers listed bottom to top, plus an optional held block.
std::vector<std::string> tower_atoms(const Towers& towers, const std::string& held) {
    std::vector<std::string> init;
    for (const auto& t : towers) {
        if (t.empty()) continue;
        init.push_back(atom("ontable", {t.front()}));
        for (std::size_t i = 1; i < t.size(); ++i) init.push_back(atom("on", {t[i], t[i - 1]}));
        init.push_back(atom("clear", {t.back()}));
    }
    init.push_back(held.empty() ? "(handempty)" : atom("hold", {held}));
    return init;
}

const char* kClearSketch = R"(features { H: bool; n: num; }
rules {
  { !H, n>0 } => { H, n-- };
  { H } => { !H };
}
)";

}  // namespace

Bundle blocks_clear(int above, int extra, bool hold) {
    require(above >= 0 && extra >= 0, "blocks-clear: counts must be non-negative");
    Bundle b;
    b.family = "blocks-clear";
    b.domain = kBlocksDomain;
    std::vector<std::string> tower{"x"};
    for (int i = above; i >= 1; --i) tower.push_back("b" + std::to_string(i));
    Towers towers{tower};
    std::vector<std::string> objects{"x"};
    for (int i = 1; i <= above; ++i) objects.push_back("b" + std::to_string(i));
    for (int i = 1; i <= extra; ++i) {
        objects.push_back("e" + std::to_string(i));
        towers.push_back({"e" + std::to_string(i)});
    }
    if (hold) objects.push_back("y");
    b.problem = problem_text("clear-" + std::to_string(above), "blocksworld", objects,
                             tower_atoms(towers, hold ? "y" : ""), {"(clear x)"});
    b.features =
        "feature H bool = nonzero(count(hold(_)))\n"
        "feature n num = chain_count(on, x, up)\n";
    b.sketches.emplace_back("clear_policy", kClearSketch);

    std::string T = "# clear the blocks above x from the top down\n";
    if (above == 0) {
        T += "clear(x)\n";
    } else {
        T += "clear(b1)\n";
        if (hold) T += "ontable(y)\n";
        for (int i = 1; i <= above; ++i) {
            T += "hold(b" + std::to_string(i) + ")\n";
            if (i < above) T += "ontable(b" + std::to_string(i) + ")\n";
        }
    }
    b.tuples.emplace_back("clear", T);
    return b;
}

Bundle blocks_on(int above_x, int above_y) {
    require(above_x >= 0 && above_y >= 0, "blocks-on: counts must be non-negative");
    Bundle b;
    b.family = "blocks-on";
    b.domain = kBlocksDomain;
    std::vector<std::string> tx{"x"}, ty{"y"}, objects{"x", "y"};
    for (int i = above_x; i >= 1; --i) tx.push_back("a" + std::to_string(i));
    for (int i = above_y; i >= 1; --i) ty.push_back("c" + std::to_string(i));
    for (int i = 1; i <= above_x; ++i) objects.push_back("a" + std::to_string(i));
    for (int i = 1; i <= above_y; ++i) objects.push_back("c" + std::to_string(i));
    b.problem = problem_text("on-" + std::to_string(above_x) + "-" + std::to_string(above_y),
                             "blocksworld", objects, tower_atoms({tx, ty}, ""), {"(on x y)"});
    b.features =
        "feature H bool = nonzero(count(hold(_)))\n"
        "feature nx num = chain_count(on, x, up)\n"
        "feature ny num = chain_count(on, y, up)\n";

    std::string T = "# clear x, then y, then stack\n";
    if (above_x == 0) {
        T += "clear(x)\n";
    } else {
        T += "clear(a1)\n";
        for (int i = 1; i <= above_x; ++i)
            T += "hold(a" + std::to_string(i) + ")\nontable(a" + std::to_string(i) + ")\n";
    }
    for (int i = 1; i <= above_y; ++i)
        T += "hold(c" + std::to_string(i) + ") & clear(x)\nontable(c" + std::to_string(i) +
             ") & clear(x)\n";
    T += "hold(x) & clear(y)\non(x,y)\n";
    b.tuples.emplace_back("on", T);
    return b;
}

Bundle blocks(const Towers& init, const Towers& goal) {
    Bundle b;
    b.family = "blocks";
    b.domain = kBlocksDomain;
    std::vector<std::string> objects;
    for (const auto& t : init)
        for (const auto& x : t) {
            require(std::find(objects.begin(), objects.end(), x) == objects.end(),
                    "blocks: block '" + x + "' listed twice");
            objects.push_back(x);
        }
    require(!objects.empty(), "blocks: no blocks");
    std::vector<std::string> g;
    for (const auto& t : goal) {
        if (t.empty()) continue;
        for (const auto& x : t)
            require(std::find(objects.begin(), objects.end(), x) != objects.end(),
                    "blocks: goal block '" + x + "' not in the initial towers");
        g.push_back(atom("ontable", {t.front()}));
        for (std::size_t i = 1; i < t.size(); ++i) g.push_back(atom("on", {t[i], t[i - 1]}));
    }
    b.problem = problem_text("blocks-" + std::to_string(objects.size()), "blocksworld", objects,
                             tower_atoms(init, ""), g);
    b.features = "feature H bool = nonzero(count(hold(_)))\n";
    return b;
}

namespace {

// ---------------------------------------------------------------- grids

void check_cell(Cell c, int w, int h, const std::string& what) {
    require(c.x >= 1 && c.x <= w && c.y >= 1 && c.y <= h, what + " outside the grid");
}

std::vector<std::string> grid_cells(int w, int h) {
    std::vector<std::string> out;
    for (int y = 1; y <= h; ++y)
        for (int x = 1; x <= w; ++x) out.push_back(cell_name({x, y}));
    return out;
}

std::vector<std::string> grid_adjacency(int w, int h, const std::string& pred) {
    std::vector<std::string> out;
    for (int y = 1; y <= h; ++y)
        for (int x = 1; x <= w; ++x) {
            const std::string c = cell_name({x, y});
            if (x > 1) out.push_back(atom(pred, {c, cell_name({x - 1, y})}));
            if (x < w) out.push_back(atom(pred, {c, cell_name({x + 1, y})}));
            if (y > 1) out.push_back(atom(pred, {c, cell_name({x, y - 1})}));
            if (y < h) out.push_back(atom(pred, {c, cell_name({x, y + 1})}));
        }
    return out;
}

const char* kGridDomain = R"((define (domain grid)
  (:requirements :strips)
  (:predicates (pos ?c) (adjacent ?c ?d))
  (:action move
    :parameters (?from ?to)
    :precondition (and (pos ?from) (adjacent ?from ?to))
    :effect (and (pos ?to) (not (pos ?from)))))
)";

const char* kGrid2Domain = R"((define (domain grid2)
  (:requirements :strips)
  (:predicates (hpos ?h) (vpos ?v) (hadj ?h ?g) (vadj ?v ?u))
  (:action move_h
    :parameters (?from ?to)
    :precondition (and (hpos ?from) (hadj ?from ?to))
    :effect (and (hpos ?to) (not (hpos ?from))))
  (:action move_v
    :parameters (?from ?to)
    :precondition (and (vpos ?from) (vadj ?from ?to))
    :effect (and (vpos ?to) (not (vpos ?from)))))
)";

const char* kDistanceSketch = R"(features { d: num; }
rules {
  { d>0 } => { d-- };
}
)";

}  // namespace

Bundle grid(int width, int height, Cell start, Cell goal) {
    require(width >= 1 && height >= 1, "grid: size must be positive");
    check_cell(start, width, height, "grid: start");
    check_cell(goal, width, height, "grid: goal");
    Bundle b;
    b.family = "grid";
    b.domain = kGridDomain;
    auto init = grid_adjacency(width, height, "adjacent");
    init.insert(init.begin(), atom("pos", {cell_name(start)}));
    b.problem = problem_text("grid-" + std::to_string(width) + "x" + std::to_string(height), "grid",
                             grid_cells(width, height), init, {atom("pos", {cell_name(goal)})});
    b.features = "feature d num = distance(pos, adjacent, cells(" + cell_name(goal) + "))\n";
    b.sketches.emplace_back("grid_policy", kDistanceSketch);
    return b;
}

Bundle grid2(int width, int height, Cell start, Cell goal) {
    require(width >= 1 && height >= 1, "grid2: size must be positive");
    check_cell(start, width, height, "grid2: start");
    check_cell(goal, width, height, "grid2: goal");
    Bundle b;
    b.family = "grid2";
    b.domain = kGrid2Domain;
    std::vector<std::string> objects, init;
    auto h = [](int x) { return "h" + std::to_string(x); };
    auto v = [](int y) { return "v" + std::to_string(y); };
    for (int x = 1; x <= width; ++x) objects.push_back(h(x));
    for (int y = 1; y <= height; ++y) objects.push_back(v(y));
    init.push_back(atom("hpos", {h(start.x)}));
    init.push_back(atom("vpos", {v(start.y)}));
    for (int x = 1; x < width; ++x) {
        init.push_back(atom("hadj", {h(x), h(x + 1)}));
        init.push_back(atom("hadj", {h(x + 1), h(x)}));
    }
    for (int y = 1; y < height; ++y) {
        init.push_back(atom("vadj", {v(y), v(y + 1)}));
        init.push_back(atom("vadj", {v(y + 1), v(y)}));
    }
    b.problem = problem_text("grid2-" + std::to_string(width) + "x" + std::to_string(height),
                             "grid2", objects, init,
                             {atom("hpos", {h(goal.x)}), atom("vpos", {v(goal.y)})});
    b.features = "feature d num quadratic = sum(distance(hpos, hadj, cells(" + h(goal.x) +
                 ")), distance(vpos, vadj, cells(" + v(goal.y) + ")))\n";
    b.sketches.emplace_back("grid_policy", kDistanceSketch);
    return b;
}

namespace {

// ---------------------------------------------------------------- delivery

const char* kDeliveryDomain = R"((define (domain delivery)
  (:requirements :strips)
  (:predicates (pos ?c) (ppos ?p ?c) (holding ?p) (empty)
               (adjacent ?c ?d) (package ?p) (cell ?c))
  (:action move
    :parameters (?from ?to)
    :precondition (and (pos ?from) (adjacent ?from ?to))
    :effect (and (pos ?to) (not (pos ?from))))
  (:action pick
    :parameters (?p ?c)
    :precondition (and (package ?p) (cell ?c) (pos ?c) (ppos ?p ?c) (empty))
    :effect (and (holding ?p) (not (ppos ?p ?c)) (not (empty))))
  (:action drop
    :parameters (?p ?c)
    :precondition (and (package ?p) (cell ?c) (pos ?c) (holding ?p))
    :effect (and (ppos ?p ?c) (empty) (not (holding ?p)))))
)";

std::string delivery_sketch(const std::string& rules) {
    return "features { H: bool; p: num; t: num; u: num; }\nrules {\n" + rules + "}\n";
}

const char* kR1 = "  { H } => { !H, p?, t? };\n";
const char* kR2 = "  { !H } => { H, p?, t? };\n";
const char* kR4 = "  { u>0 } => { u--, H?, p?, t? };\n";
const char* kR6 = "  { !H, p>0 } => { p--, t? };\n";
const char* kR7 = "  { H, t>0 } => { t--, p? };\n";

}  // namespace

Bundle delivery(int width, int height, Cell agent, Cell target, const std::vector<Cell>& packages) {
    require(width >= 1 && height >= 1, "delivery: size must be positive");
    require(!packages.empty(), "delivery: at least one package");
    check_cell(agent, width, height, "delivery: agent");
    check_cell(target, width, height, "delivery: target");
    for (auto c : packages) check_cell(c, width, height, "delivery: package");
    Bundle b;
    b.family = "delivery";
    b.domain = kDeliveryDomain;
    auto objects = grid_cells(width, height);
    std::vector<std::string> init{atom("pos", {cell_name(agent)}), "(empty)"};
    std::vector<std::string> goal;
    for (std::size_t i = 0; i < packages.size(); ++i) {
        const std::string p = "p" + std::to_string(i + 1);
        objects.push_back(p);
        init.push_back(atom("ppos", {p, cell_name(packages[i])}));
        init.push_back(atom("package", {p}));
        goal.push_back(atom("ppos", {p, cell_name(target)}));
    }
    for (const auto& c : grid_cells(width, height)) init.push_back(atom("cell", {c}));
    for (const auto& a : grid_adjacency(width, height, "adjacent")) init.push_back(a);
    b.problem = problem_text("delivery-" + std::to_string(width) + "x" + std::to_string(height) +
                                 "-" + std::to_string(packages.size()),
                             "delivery", objects, init, goal);
    const std::string t = cell_name(target);
    b.features =
        "feature H bool = nonzero(count(holding(_)))\n"
        "feature p num = distance(pos, adjacent, cells_of(ppos(_, ?c) & ?c != " + t +
        "), zero_if(holding(_)))\n"
        "feature t num = distance(pos, adjacent, cells(" + t + "))\n"
        "feature u num = count(package(?p) & !ppos(?p, " + t + "))\n";
    b.sketches.emplace_back("delivery_policy", delivery_sketch("  { !H, p>0 } => { p--, t? };\n"
                                                               "  { !H, p=0 } => { H };\n"
                                                               "  { H, t>0 } => { t-- };\n"
                                                               "  { H, t=0, u>0 } => { !H, u--, p? };\n"));
    b.sketches.emplace_back("r0", delivery_sketch(""));
    b.sketches.emplace_back("r1", delivery_sketch(kR1));
    b.sketches.emplace_back("r2", delivery_sketch(kR2));
    b.sketches.emplace_back("r3", delivery_sketch(std::string(kR1) + kR2));
    b.sketches.emplace_back("r4", delivery_sketch(kR4));
    b.sketches.emplace_back("r5", delivery_sketch(std::string(kR2) + kR4));
    b.sketches.emplace_back("r6", delivery_sketch(kR6));
    b.sketches.emplace_back("r7", delivery_sketch(kR7));
    b.sketches.emplace_back("r8", delivery_sketch(std::string(kR2) + kR4 + kR6 + kR7));
    return b;
}

namespace {

// ---------------------------------------------------------------- marbles

const char* kMarblesDomain = R"((define (domain marbles)
  (:requirements :strips)
  (:predicates (ontable ?b) (in ?r ?b) (cnt ?b ?k) (succ ?k ?j)
               (box ?b) (marble ?r) (zero ?k))
  (:action remove_marble
    :parameters (?r ?b ?k ?j)
    :precondition (and (marble ?r) (box ?b) (succ ?j ?k) (in ?r ?b) (cnt ?b ?k))
    :effect (and (cnt ?b ?j) (not (in ?r ?b)) (not (cnt ?b ?k))))
  (:action remove_box
    :parameters (?b ?k)
    :precondition (and (box ?b) (zero ?k) (ontable ?b) (cnt ?b ?k))
    :effect (and (not (ontable ?b)))))
)";

}  // namespace

Bundle marbles(const std::vector<int>& boxes) {
    require(!boxes.empty(), "marbles: at least one box");
    require(boxes.size() <= 32, "marbles: at most 32 boxes");
    int most = 0;
    for (int m : boxes) {
        require(m >= 0, "marbles: negative marble count");
        most = std::max(most, m);
    }
    Bundle b;
    b.family = "marbles";
    b.domain = kMarblesDomain;
    std::vector<std::string> objects, init, goal;
    for (int k = 0; k <= most; ++k) objects.push_back("n" + std::to_string(k));
    init.push_back("(zero n0)");
    for (int k = 1; k <= most; ++k)
        init.push_back(atom("succ", {"n" + std::to_string(k - 1), "n" + std::to_string(k)}));
    int marble = 0;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const std::string box = "b" + std::to_string(i + 1);
        objects.push_back(box);
        init.push_back(atom("box", {box}));
        init.push_back(atom("ontable", {box}));
        init.push_back(atom("cnt", {box, "n" + std::to_string(boxes[i])}));
        goal.push_back("(not (ontable " + box + "))");
        for (int j = 0; j < boxes[i]; ++j) {
            const std::string r = "m" + std::to_string(++marble);
            objects.push_back(r);
            init.push_back(atom("marble", {r}));
            init.push_back(atom("in", {r, box}));
        }
    }
    b.problem = problem_text("marbles-" + std::to_string(boxes.size()), "marbles", objects, init, goal);
    b.features =
        "feature n num = count(ontable(_))\n"
        "feature m num = builtin(marbles_first_box)\n";
    b.sketches.emplace_back("marbles_policy", R"(features { n: num; m: num; }
rules {
  { m>0 } => { m-- };
  { m=0, n>0 } => { n--, m? };
}
)");
    return b;
}

namespace {

// ---------------------------------------------------------------- hanoi

std::string hanoi_domain(bool flip) {
    std::string out = "(define (domain hanoi)\n  (:requirements :strips)\n";
    out += flip ? "  (:predicates (on ?x ?y) (clear ?x) (smaller ?x ?y) (e) (ne))\n"
                : "  (:predicates (on ?x ?y) (clear ?x) (smaller ?x ?y))\n";
    auto action = [](const std::string& name, const std::string& have, const std::string& give) {
        std::string pre = "(smaller ?d ?to) (on ?d ?from) (clear ?d) (clear ?to)";
        std::string eff = "(on ?d ?to) (clear ?from) (not (on ?d ?from)) (not (clear ?to))";
        if (!have.empty()) {
            pre += " (" + have + ")";
            eff += " (" + give + ") (not (" + have + "))";
        }
        return "  (:action " + name + "\n    :parameters (?d ?from ?to)\n    :precondition (and " +
               pre + ")\n    :effect (and " + eff + "))\n";
    };
    if (flip) {
        out += action("move_e", "e", "ne");
        out += action("move_ne", "ne", "e");
    } else {
        out += action("move", "", "");
    }
    return out + ")\n";
}

}  // namespace

Bundle hanoi(int disks, int from, int to, bool flip) {
    require(disks >= 1, "hanoi: at least one disk");
    require(from >= 1 && from <= 3 && to >= 1 && to <= 3 && from != to,
            "hanoi: pegs are 1..3 and must differ");
    Bundle b;
    b.family = "hanoi";
    b.domain = hanoi_domain(flip);
    auto peg = [](int i) { return "peg" + std::to_string(i); };
    auto disk = [](int i) { return "d" + std::to_string(i); };
    std::vector<std::string> objects{peg(1), peg(2), peg(3)}, init, goal;
    for (int i = 1; i <= disks; ++i) objects.push_back(disk(i));
    init.push_back(atom("on", {disk(disks), peg(from)}));
    goal.push_back(atom("on", {disk(disks), peg(to)}));
    for (int i = 1; i < disks; ++i) {
        init.push_back(atom("on", {disk(i), disk(i + 1)}));
        goal.push_back(atom("on", {disk(i), disk(i + 1)}));
    }
    init.push_back(atom("clear", {disk(1)}));
    for (int j = 1; j <= 3; ++j)
        if (j != from) init.push_back(atom("clear", {peg(j)}));
    if (flip) init.push_back("(e)");
    for (int i = 1; i <= disks; ++i) {
        for (int j = i + 1; j <= disks; ++j) init.push_back(atom("smaller", {disk(i), disk(j)}));
        for (int j = 1; j <= 3; ++j) init.push_back(atom("smaller", {disk(i), peg(j)}));
    }
    b.problem = problem_text("hanoi-" + std::to_string(disks), "hanoi", objects, init, goal);
    b.features = "feature p12 bool = builtin(hanoi_smaller_top, peg1, peg2)\n"
                 "feature p13 bool = builtin(hanoi_smaller_top, peg1, peg3)\n"
                 "feature p23 bool = builtin(hanoi_smaller_top, peg2, peg3)\n";
    if (flip) {
        b.features = "feature q bool = nonzero(count(e))\n" + b.features;
        b.sketches.emplace_back("hanoi_policy", R"(features { q: bool; p12: bool; p13: bool; p23: bool; }
rules {
  # smallest disk: 1 -> 3, 2 -> 1, 3 -> 2
  { q, p12, p13 } => { !q, p12?, !p13, !p23 };
  { q, !p12, p23 } => { !q, p12, p13, p23? };
  { q, !p13, !p23 } => { !q, !p12, p13?, p23 };
  # the other disk
  { !q, p12, p13, p23 } => { q, !p23 };
  { !q, p12, p13, !p23 } => { q, p23 };
  { !q, !p12, p13, p23 } => { q, !p13 };
  { !q, !p12, !p13, p23 } => { q, p13 };
  { !q, p12, !p13, !p23 } => { q, !p12 };
  { !q, !p12, !p13, !p23 } => { q, p12 };
}
)");
    }
    return b;
}

namespace {

int to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        int x = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument("");
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("parameter '" + key + "' must be an integer, got '" + v + "'");
    }
}

Cell to_cell(const std::string& key, const std::string& v) {
    auto colon = v.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("parameter '" + key + "' must look like X:Y");
    return {to_int(key, v.substr(0, colon)), to_int(key, v.substr(colon + 1))};
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    return out;
}

class Params {
public:
    Params(const InstanceSpec& spec, std::set<std::string> allowed) : spec_(spec) {
        for (const auto& [k, v] : spec.params)
            if (!allowed.count(k))
                throw std::invalid_argument(spec.family + ": unknown parameter '" + k + "'");
    }
    bool has(const std::string& k) const { return spec_.params.count(k) > 0; }
    const std::string& str(const std::string& k) const {
        auto it = spec_.params.find(k);
        if (it == spec_.params.end())
            throw std::invalid_argument(spec_.family + ": missing parameter '" + k + "'");
        return it->second;
    }
    int num(const std::string& k, int fallback) const { return has(k) ? to_int(k, str(k)) : fallback; }
    Cell cell(const std::string& k, Cell fallback) const { return has(k) ? to_cell(k, str(k)) : fallback; }

private:
    const InstanceSpec& spec_;
};

Towers to_towers(const std::string& s) {
    Towers out;
    for (const auto& t : split(s, '/')) {
        auto blocks = split(t, '-');
        for (const auto& x : blocks)
            if (x.empty()) throw std::invalid_argument("blocks: empty block name in '" + s + "'");
        out.push_back(blocks);
    }
    return out;
}

}  // namespace

InstanceSpec parse_instance_spec(std::string_view family, std::string_view params) {
    InstanceSpec spec;
    spec.family = std::string(family);
    for (const auto& kv : split(std::string(params), ',')) {
        if (kv.empty()) continue;
        auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw std::invalid_argument("parameter '" + kv + "' must look like key=value");
        spec.params[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    return spec;
}

const std::vector<std::string>& families() {
    static const std::vector<std::string> f{"blocks-clear", "blocks-on", "blocks", "grid",
                                            "grid2",        "delivery",  "marbles", "hanoi"};
    return f;
}

Bundle generate(const InstanceSpec& spec) {
    const std::string& f = spec.family;
    if (f == "blocks-clear") {
        Params p(spec, {"above", "extra", "hold"});
        return blocks_clear(p.num("above", 3), p.num("extra", 0), p.num("hold", 0) != 0);
    }
    if (f == "blocks-on") {
        Params p(spec, {"above_x", "above_y"});
        return blocks_on(p.num("above_x", 1), p.num("above_y", 1));
    }
    if (f == "blocks") {
        Params p(spec, {"init", "goal"});
        return blocks(to_towers(p.has("init") ? p.str("init") : "a-b-c"),
                      to_towers(p.has("goal") ? p.str("goal") : "c-b-a"));
    }
    if (f == "grid" || f == "grid2") {
        Params p(spec, {"w", "h", "start", "goal"});
        int w = p.num("w", 3), h = p.num("h", 3);
        Cell s = p.cell("start", {1, 1}), g = p.cell("goal", {w, h});
        return f == "grid" ? grid(w, h, s, g) : grid2(w, h, s, g);
    }
    if (f == "delivery") {
        Params p(spec, {"w", "h", "agent", "target", "packages"});
        int w = p.num("w", 3), h = p.num("h", 3);
        std::vector<Cell> pk;
        if (p.has("packages"))
            for (const auto& c : split(p.str("packages"), '/')) pk.push_back(to_cell("packages", c));
        else
            pk.push_back({w, h});
        return delivery(w, h, p.cell("agent", {1, 1}), p.cell("target", {1, 1}), pk);
    }
    if (f == "marbles") {
        Params p(spec, {"boxes"});
        std::vector<int> boxes;
        for (const auto& c : split(p.has("boxes") ? p.str("boxes") : "2", '/'))
            boxes.push_back(to_int("boxes", c));
        return marbles(boxes);
    }
    if (f == "hanoi") {
        Params p(spec, {"disks", "from", "to", "flip"});
        return hanoi(p.num("disks", 3), p.num("from", 1), p.num("to", 3), p.num("flip", 1) != 0);
    }
    throw std::invalid_argument("unknown family '" + f + "'");
}

void write_bundle(const Bundle& b, const std::string& directory) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    auto put = [&](const std::string& name, const std::string& text) {
        std::ofstream out(fs::path(directory) / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + (fs::path(directory) / name).string());
        out << text;
    };
    put("domain.pddl", b.domain);
    put("problem.pddl", b.problem);
    put("features.feat", b.features);
    for (const auto& [name, text] : b.sketches) put(name + ".sketch", text);
    for (const auto& [name, text] : b.tuples) put(name + ".tuples", text);
}

Instance load(const Bundle& b) {
    return {load_problem(b.domain, b.problem), parse_features(b.features)};
}

}  // namespace iwkit
