#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace knncp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text or binary layout.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A cell that parsed but violates the data invariants (NaN, Inf).
class ValidationError : public Error {
public:
    ValidationError(std::size_t row, std::size_t col, const std::string& what)
        : Error(what), row_(row), col_(col) {}
    std::size_t row() const noexcept { return row_; }
    std::size_t col() const noexcept { return col_; }

private:
    std::size_t row_;
    std::size_t col_;
};

class TooFewObservations : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class NotEnoughNeighbors : public Error {
public:
    using Error::Error;
};

/// A null variance of R_w or R_diff at time t; the scan statistic is not defined there.
class DegenerateVariance : public Error {
public:
    DegenerateVariance(std::size_t t, const std::string& what) : Error(what), t_(t) {}
    std::size_t t() const noexcept { return t_; }

private:
    std::size_t t_;
};

class DegenerateDenominator : public Error {
public:
    using Error::Error;
};

class IntegerOverflow : public Error {
public:
    using Error::Error;
};

class NoRoot : public Error {
public:
    using Error::Error;
};

class UnknownFamily : public Error {
public:
    using Error::Error;
};

} // namespace knncp
