#pragma once

#include <stdexcept>
#include <string>

namespace classex {

// Bad inputs: malformed files, out-of-range parameters, inconsistent shapes.
// The CLI maps this to exit code 2.
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// Reported numerical failures (non-convergence, degenerate data).
// The CLI maps this to exit code 1.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace classex
