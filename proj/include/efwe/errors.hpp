#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace efwe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (x <= 0, q >= 1, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Root finder called on an interval without a sign change.
class BracketError : public Error {
public:
    using Error::Error;
};

/// A user callback returned NaN.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// An iterative method ran out of budget before meeting its tolerance.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, double estimate, double error_bound)
        : Error(what), estimate_(estimate), error_bound_(error_bound) {}

    double estimate() const noexcept { return estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double estimate_;
    double error_bound_;
};

/// Requested probability is at or below F(0+) = 1 - exp(-lambda), so no
/// positive quantile exists.
class BelowSupportError : public DomainError {
public:
    BelowSupportError(const std::string& what, double threshold)
        : DomainError(what), threshold_(threshold) {}

    double threshold() const noexcept { return threshold_; }

private:
    double threshold_;
};

/// Strict inverse-transform sampling drew a uniform inside the origin mass.
class DefectError : public Error {
public:
    DefectError(const std::string& what, double defect_mass)
        : Error(what), defect_mass_(defect_mass) {}

    double defect_mass() const noexcept { return defect_mass_; }

private:
    double defect_mass_;
};

class NoInteriorModeError : public Error {
public:
    using Error::Error;
};

/// Information matrix is singular or not positive definite.
class ConditioningError : public Error {
public:
    ConditioningError(const std::string& what, std::vector<double> eigenvalues)
        : Error(what), eigenvalues_(std::move(eigenvalues)) {}

    const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }

private:
    std::vector<double> eigenvalues_;
};

class DegenerateDataError : public Error {
public:
    using Error::Error;
};

/// Base for dataset ingestion failures. `row()` is the 1-based line number,
/// or 0 when the failure is not tied to a line.
class DataError : public Error {
public:
    DataError(const std::string& what, std::size_t row = 0) : Error(what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class MissingFileError : public DataError {
public:
    using DataError::DataError;
};

class ParseError : public DataError {
public:
    using DataError::DataError;
};

class NonpositiveValueError : public DataError {
public:
    using DataError::DataError;
};

}  // namespace efwe
