#pragma once

#include <stdexcept>
#include <string>

namespace linmso {

// Bad user input: malformed files, undeclared symbols, invalid decompositions.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Syntax error with a source location (1-based).
class ParseError : public InputError {
public:
    ParseError(const std::string& msg, int line, int col)
        : InputError(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
          line_(line), col_(col) {}

    int line() const { return line_; }
    int column() const { return col_; }

private:
    int line_;
    int col_;
};

// Instance exceeds a configured size guard.
class TooLargeError : public InputError {
public:
    using InputError::InputError;
};

// A violated internal invariant. Indicates a bug, not bad input.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace linmso
