#pragma once

#include <stdexcept>
#include <string>

namespace adoptnet {

// Bad user input: parameters out of range, malformed files, unknown names.
// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A computation that cannot proceed: singular or indefinite system matrix,
// unstable step size, rank-deficient regression.  The CLI maps this to exit
// code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace adoptnet
