#pragma once

#include <stdexcept>
#include <string>

namespace spp {

enum class ErrorKind {
    domain,
    range,
    insufficient_data,
    degenerate_model,
    fit_failure,
    validation,
    io,
};

/// Base of every error thrown by the library. `kind()` lets callers map
/// failures onto exit codes without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

struct RangeError : Error {
    explicit RangeError(const std::string& what) : Error(ErrorKind::range, what) {}
};

struct InsufficientDataError : Error {
    explicit InsufficientDataError(const std::string& what)
        : Error(ErrorKind::insufficient_data, what) {}
};

struct DegenerateModelError : Error {
    explicit DegenerateModelError(const std::string& what)
        : Error(ErrorKind::degenerate_model, what) {}
};

struct FitFailure : Error {
    explicit FitFailure(const std::string& what) : Error(ErrorKind::fit_failure, what) {}
};

/// Configuration problem; `field()` is the dotted path of the offending key.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(ErrorKind::validation, field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace spp
