#pragma once

#include <stdexcept>
#include <string>

namespace gkflow {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Input violates a structural precondition (I^2 != -1, non-invertible form, ...).
class InvalidStructureError : public Error {
public:
    using Error::Error;
};

/// Operation needs an invertible metric but the point is flagged degenerate.
class DegenerateMetricError : public Error {
public:
    using Error::Error;
};

/// Dirac subspace meets its conjugate; carries the intersection dimension.
class NondegeneracyError : public Error {
public:
    NondegeneracyError(const std::string& what, int intersection_dim)
        : Error(what), intersection_dim_(intersection_dim) {}
    [[nodiscard]] int intersection_dim() const noexcept { return intersection_dim_; }

private:
    int intersection_dim_;
};

/// A sample point lies too close to an excluded analytic set.
class ExclusionError : public Error {
public:
    using Error::Error;
};

/// A flow trajectory left the chart domain or hit the stiffness bound.
class EscapeError : public Error {
public:
    using Error::Error;
};

/// A field or quadrature produced NaN/Inf.
class NonFiniteError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration or expression text.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace gkflow
