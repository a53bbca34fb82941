#pragma once

#include <stdexcept>
#include <string>

namespace collat {

/// Argument outside the mathematical domain of an operation (t < 0, t > T, a <= 0).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Inconsistent or malformed input: bad grid, bad correlation, dangling id, schema violation.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Unknown curve, driver or currency id.
class LookupError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// A model hypothesis does not hold (e.g. non-positive inner spot).
class HypothesisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested mode exists in the model but is not implemented for these inputs.
class UnsupportedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Not enough samples or degenerate path for a statistic.
class StatisticsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace collat
