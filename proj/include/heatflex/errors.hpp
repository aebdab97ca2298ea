#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace heatflex {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration or command usage.
class ConfigError : public Error {
public:
    using Error::Error;
};

class UsageError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Input data failed validation. Everything below maps to exit code 2 in the CLI.
class DataError : public Error {
public:
    using Error::Error;
};

class SchemaError : public DataError {
public:
    using DataError::DataError;
};

class ParseError : public DataError {
public:
    ParseError(std::size_t row, const std::string& what)
        : DataError("row " + std::to_string(row) + ": " + what), row_(row), detail_(what) {}

    /// 1-based data row (the header is row 0).
    std::size_t row() const noexcept { return row_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t row_;
    std::string detail_;
};

class DuplicateKeyError : public DataError {
public:
    using DataError::DataError;
};

class ValidationError : public DataError {
public:
    using DataError::DataError;
};

/// A physical quantity outside the domain of a formula.
class DomainError : public DataError {
public:
    using DataError::DataError;
};

class MissingParamsError : public DataError {
public:
    using DataError::DataError;
};

}  // namespace heatflex
