#pragma once

#include <stdexcept>
#include <string>

namespace dhflow {

// Base for all recoverable failures raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class CheckpointError : public Error {
public:
    using Error::Error;
};

// A field violates the constraint u in N or <nu, psi> = 0.
class ConstraintError : public Error {
public:
    using Error::Error;
};

// Nearest-point projection undefined (|y| below threshold).
class DegenerateProjection : public Error {
public:
    using Error::Error;
};

// A right-hand-side term produced a non-finite value.
class NonFiniteError : public Error {
public:
    NonFiniteError(const std::string& term)
        : Error("non-finite value in term '" + term + "'"), term_(term) {}
    const std::string& term() const { return term_; }

private:
    std::string term_;
};

// The CFL step fell below the configured floor.
class BlowUpSignal : public Error {
public:
    BlowUpSignal(double t, double dt)
        : Error("time step floor reached at t=" + std::to_string(t)), t_(t), dt_(dt) {}
    double t() const { return t_; }
    double dt() const { return dt_; }

private:
    double t_;
    double dt_;
};

}  // namespace dhflow
