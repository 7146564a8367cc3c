#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "iwkit/features.hpp"
#include "iwkit/strips.hpp"

namespace iwkit {

// Everything a generator emits for one instance.
struct Bundle {
    std::string family;
    std::string domain;    // PDDL
    std::string problem;   // PDDL
    std::string features;  // feature bundle
    std::vector<std::pair<std::string, std::string>> sketches;  // name -> text
    std::vector<std::pair<std::string, std::string>> tuples;    // name -> text

    [[nodiscard]] const std::string& sketch(std::string_view name) const;
    [[nodiscard]] const std::string& tuple_set(std::string_view name) const;
};

struct Cell {
    int x = 1;
    int y = 1;
};

[[nodiscard]] std::string cell_name(Cell c);

// Tower x with `above` blocks b1..bL on it (b1 on top), `extra` blocks on the
// table, and optionally a block y held by the gripper. Goal: clear(x).
Bundle blocks_clear(int above, int extra = 0, bool hold = false);

// Towers a1..aL on x and c1..cM on y. Goal: on(x, y).
Bundle blocks_on(int above_x, int above_y);

// Towers are listed bottom to top.
using Towers = std::vector<std::vector<std::string>>;
Bundle blocks(const Towers& init, const Towers& goal);

Bundle grid(int width, int height, Cell start, Cell goal);
Bundle grid2(int width, int height, Cell start, Cell goal);
Bundle delivery(int width, int height, Cell agent, Cell target, const std::vector<Cell>& packages);

// One entry per box: its number of marbles.
Bundle marbles(const std::vector<int>& boxes);

// Pegs are peg1..peg3; disk d1 is the smallest. Without `flip` the
// alternation atoms e/ne are left out.
Bundle hanoi(int disks, int from = 1, int to = 3, bool flip = true);

struct InstanceSpec {
    std::string family;
    std::map<std::string, std::string> params;
};

// "key=value,key=value"
InstanceSpec parse_instance_spec(std::string_view family, std::string_view params);
Bundle generate(const InstanceSpec& spec);

[[nodiscard]] const std::vector<std::string>& families();

void write_bundle(const Bundle& b, const std::string& directory);

struct Instance {
    GroundProblem problem;
    FeatureSet features;
};

Instance load(const Bundle& b);

}  // namespace iwkit
