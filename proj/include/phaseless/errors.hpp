#pragma once

#include <stdexcept>
#include <string>

namespace phaseless {

/// Malformed input file. `line` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// A search (witness / seed) ran out of its configured budget.
class SearchBudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace phaseless
