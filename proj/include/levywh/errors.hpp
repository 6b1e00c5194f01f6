#ifndef LEVYWH_ERRORS_HPP
#define LEVYWH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace levywh {

// Base class for all numerical/domain failures raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Argument hit (or came too close to) a pole of the evaluated function.
class PoleError : public Error {
public:
    using Error::Error;
};

// Input violates a documented precondition or model invariant.
class DomainError : public Error {
public:
    using Error::Error;
};

// An iteration (series, Newton, bisection) failed to reach its target.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Adaptive quadrature could not meet the requested accuracy.
class QuadratureError : public Error {
public:
    using Error::Error;
};

// Two continuation paths approached within the collision tolerance.
class CollisionError : public Error {
public:
    using Error::Error;
};

// ODE step size underflowed during continuation.
class StiffnessError : public Error {
public:
    using Error::Error;
};

// No usable tail expansion for the requested parameter regime.
class RegimeError : public Error {
public:
    using Error::Error;
};

// A computed error estimate exceeds the promised tolerance.
class AccuracyError : public Error {
public:
    using Error::Error;
};

// An integral had to be cut off before its integrand decayed.
class TruncationError : public Error {
public:
    using Error::Error;
};

} // namespace levywh

#endif
