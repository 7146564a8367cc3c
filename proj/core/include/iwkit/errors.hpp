#pragma once

#include <stdexcept>
#include <string>

namespace iwkit {

// Malformed input text. Line and column are 1-based; 0 means unknown.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& what, int line, int column)
        : std::runtime_error(format(what, line, column)), line_(line), column_(column) {}

    [[nodiscard]] int line() const noexcept { return line_; }
    [[nodiscard]] int column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, int line, int column) {
        if (line <= 0) return what;
        return std::to_string(line) + ":" + std::to_string(column) + ": " + what;
    }
    int line_;
    int column_;
};

// Well-formed input that refers to something undeclared or inconsistent.
class semantic_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller broke a documented precondition.
class contract_violation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// A configured state or node limit was hit.
class cap_exceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace iwkit
