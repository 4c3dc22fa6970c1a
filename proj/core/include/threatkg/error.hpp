#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tkg {

// Base class for all library errors. The CLI maps subclasses onto exit
// codes: DomainError -> 1, IoError -> 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Data and validation problems: rule violations, unknown vocabulary,
// inconsistent dimensions, malformed input lines.
class DomainError : public Error {
public:
    using Error::Error;
};

// Filesystem and file-structure problems: missing files, unwritable paths,
// truncated or corrupt checkpoints.
class IoError : public Error {
public:
    using Error::Error;
};

// Malformed line in a text input; carries the 1-based line number.
class ParseError : public DomainError {
public:
    ParseError(std::size_t line, const std::string& what)
        : DomainError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Non-finite value encountered in a numeric pass; names the offending tensor.
class NumericError : public DomainError {
public:
    NumericError(std::string tensor, const std::string& what)
        : DomainError(what + " (tensor: " + tensor + ")"), tensor_(std::move(tensor)) {}

    const std::string& tensor() const noexcept { return tensor_; }

private:
    std::string tensor_;
};

}  // namespace tkg
