// Exception types shared by every qcae module.
#pragma once

#include <stdexcept>
#include <string>

namespace qcae {

/// Invalid or inconsistent configuration (bad spec, missing weights, wrong shapes).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// An argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Qubit or symbol index out of range.
struct IndexError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// Gate or operation outside the supported set.
struct UnsupportedError : std::logic_error {
    using std::logic_error::logic_error;
};

/// Input for which the operation has no well-defined result (e.g. normalizing a zero vector).
struct DegenerateInputError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Training produced a non-finite loss.
struct DivergenceError : std::runtime_error {
    DivergenceError(const std::string& what, long step) : std::runtime_error(what), step(step) {}
    long step;
};

}  // namespace qcae
