#pragma once

#include <stdexcept>
#include <string>

namespace cloe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// (jωE − A) could not be factored: jω is numerically a pole.
class SingularPencil : public Error {
public:
    explicit SingularPencil(double omega);
    SingularPencil(double omega, const std::string& what);
    double omega() const noexcept { return omega_; }

private:
    double omega_;
};

class InvalidRange : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Malformed model, sample or trace file. Carries line (1-based, 0 if unknown) and field context.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0, std::string field = {});
    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

class DuplicateFrequency : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

class CoincidentPoints : public Error {
public:
    using Error::Error;
};

class NotConjugateClosed : public Error {
public:
    using Error::Error;
};

/// The pencil carries no dynamics (constant data); no descriptor realization is built.
class RankZero : public Error {
public:
    using Error::Error;
};

class GridExhausted : public Error {
public:
    using Error::Error;
};

class ZeroDenominator : public Error {
public:
    using Error::Error;
};

class BudgetTooSmall : public Error {
public:
    using Error::Error;
};

} // namespace cloe
