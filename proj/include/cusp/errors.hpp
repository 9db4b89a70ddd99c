#pragma once

#include <stdexcept>
#include <string>

namespace cusp {

// Precondition violated: out-of-range index, s below the cusp start, bad grid.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Valid request that this library does not model (e.g. fiber curvature of a surface).
class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Numerical machinery gave up: step-size underflow, non-finite values.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The band scan found an edge pattern that implies a root was skipped.
class RefinementError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// A declared potential tail failed pointwise verification.
class ClassificationError : public std::runtime_error {
public:
    ClassificationError(const std::string& what, double max_deviation)
        : std::runtime_error(what), max_deviation_(max_deviation) {}

    [[nodiscard]] double max_deviation() const noexcept { return max_deviation_; }

private:
    double max_deviation_;
};

} // namespace cusp
