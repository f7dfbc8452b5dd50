#pragma once

#include <stdexcept>
#include <string>

namespace mdtw {

/// Malformed textual input (schema, graph, .td, datalog). Carries a 1-based
/// line and column when known (0 otherwise).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line = 0, int column = 0)
        : std::runtime_error(format(what, line, column)), line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, int line, int column) {
        if (line <= 0) return what;
        return "line " + std::to_string(line) + ":" + std::to_string(column) + ": " + what;
    }

    int line_;
    int column_;
};

/// A well-formed input that violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A brute-force oracle was asked to enumerate beyond its configured cap.
class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mdtw
