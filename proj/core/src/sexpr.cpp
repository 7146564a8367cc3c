#include "iwkit/sexpr.hpp"

#include <cctype>

#include "iwkit/errors.hpp"

namespace iwkit {

namespace {

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    SExpr read_top() {
        skip();
        if (at_end()) throw parse_error("empty input", line_, col_);
        SExpr e = read();
        skip();
        if (!at_end()) throw parse_error("unexpected text after expression", line_, col_);
        return e;
    }

private:
    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip() {
        while (!at_end()) {
            char c = peek();
            if (c == ';') {
                while (!at_end() && peek() != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    SExpr read() {
        SExpr e;
        e.line = line_;
        e.column = col_;
        char c = peek();
        if (c == ')') throw parse_error("unexpected ')'", line_, col_);
        if (c == '(') {
            if (++depth_ > kMaxDepth) throw parse_error("nesting too deep", line_, col_);
            e.is_list = true;
            advance();
            for (;;) {
                skip();
                if (at_end()) throw parse_error("unterminated list opened here", e.line, e.column);
                if (peek() == ')') {
                    advance();
                    --depth_;
                    break;
                }
                e.items.push_back(read());
            }
            return e;
        }
        while (!at_end()) {
            c = peek();
            if (c == '(' || c == ')' || c == ';' || std::isspace(static_cast<unsigned char>(c)))
                break;
            if (static_cast<unsigned char>(c) < 0x20)
                throw parse_error("control character in symbol", line_, col_);
            e.atom += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            advance();
        }
        return e;
    }

    std::string_view text_;
    static constexpr int kMaxDepth = 256;
    std::size_t pos_ = 0;
    int depth_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace

SExpr read_sexpr(std::string_view text) { return Reader(text).read_top(); }

std::string to_string(const SExpr& e) {
    if (!e.is_list) return e.atom;
    std::string out = "(";
    for (std::size_t i = 0; i < e.items.size(); ++i) {
        if (i) out += ' ';
        out += to_string(e.items[i]);
    }
    return out + ")";
}

}  // namespace iwkit
