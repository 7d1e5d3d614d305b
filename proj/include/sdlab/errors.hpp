#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sdlab {

// Bad table / kernel parameters.
class InvalidParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Near-grazing collision. Callers resample the initial condition.
class TangencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Collision within the corner tolerance of a junction between pieces.
class CornerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An excursion or run exceeded its iteration budget.
class IterationCapError : public std::runtime_error {
public:
    IterationCapError(const std::string& what, std::uint64_t cap)
        : std::runtime_error(what), cap_(cap) {}
    std::uint64_t cap() const noexcept { return cap_; }

private:
    std::uint64_t cap_;
};

// Too few samples in the tail to estimate a tail constant.
class InsufficientTailError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed config file or flag. Message names the offending field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sdlab
