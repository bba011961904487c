#pragma once

#include <stdexcept>
#include <string>

namespace hvacgrid {

// Caller passed a value outside an operation's domain.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Operation called on an object that is not in the right state for it
// (uninitialized environment, stale network cache, untrained agent).
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A simulated slot broke a physical invariant (power balance, SOC range, bounds).
class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {
inline void require(bool ok, const std::string& msg) {
    if (!ok) throw InputError(msg);
}
}  // namespace detail

}  // namespace hvacgrid
