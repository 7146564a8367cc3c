#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace iwkit {

// Parenthesized expression tree. Atoms are lower-cased on read.
struct SExpr {
    bool is_list = false;
    std::string atom;
    std::vector<SExpr> items;
    int line = 0;
    int column = 0;

    [[nodiscard]] bool is_atom(std::string_view s) const { return !is_list && atom == s; }
    [[nodiscard]] bool head_is(std::string_view s) const {
        return is_list && !items.empty() && items.front().is_atom(s);
    }
};

// Reads exactly one top-level expression; trailing non-comment text is an error.
SExpr read_sexpr(std::string_view text);

std::string to_string(const SExpr& e);

}  // namespace iwkit
