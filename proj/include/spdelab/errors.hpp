#pragma once

#include <stdexcept>
#include <string>

namespace spdelab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of an operation (negative time, bad window, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Sizes of fields, coefficient vectors or time grids do not match.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// The resolvent equation w - phi(w)/n = u could not be bracketed.
class ResolventError : public Error {
public:
    using Error::Error;
};

/// The implicit reaction substep is ill-posed for the requested time step.
class StepSizeError : public Error {
public:
    StepSizeError(const std::string& what, double suggested_step)
        : Error(what), suggested_step_(suggested_step) {}
    double suggested_step() const { return suggested_step_; }

private:
    double suggested_step_;
};

/// A path handed to a certification routine does not solve the mild equation.
class NotASolutionError : public Error {
public:
    using Error::Error;
};

/// A finite partition has an atom of zero weight or references a missing atom.
class PartitionError : public Error {
public:
    using Error::Error;
};

/// A control has energy on a noise mode with zero variance.
class NotInH0Error : public Error {
public:
    using Error::Error;
};

/// The Picard map failed to contract on a frozen noise realization.
class ContractionFailure : public Error {
public:
    ContractionFailure(const std::string& what, double measured_ratio)
        : Error(what), measured_ratio_(measured_ratio) {}
    double measured_ratio() const { return measured_ratio_; }

private:
    double measured_ratio_;
};

}  // namespace spdelab
