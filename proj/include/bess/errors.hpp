#pragma once

#include <stdexcept>
#include <string>

namespace bess {

// Broad failure class; the CLI maps it to an exit code.
enum class ErrorKind { config, data, runtime };

// Base of every error thrown by the library. Carries the module that raised it.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string module, const std::string& message)
        : std::runtime_error("[" + module + "] " + message), kind_(kind), module_(std::move(module)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& module() const noexcept { return module_; }

private:
    ErrorKind kind_;
    std::string module_;
};

class ConfigError : public Error {
public:
    ConfigError(std::string module, const std::string& message)
        : Error(ErrorKind::config, std::move(module), message) {}
};

// Price or table ingestion failures (bad rows, coverage gaps).
class IngestionError : public Error {
public:
    IngestionError(std::string module, const std::string& message)
        : Error(ErrorKind::data, std::move(module), message) {}
};

// Input outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    DomainError(std::string module, const std::string& message)
        : Error(ErrorKind::runtime, std::move(module), message) {}
};

// Requested power cannot be produced by the cell (negative discriminant).
class InfeasiblePowerError : public DomainError {
public:
    using DomainError::DomainError;
};

class SetpointError : public DomainError {
public:
    using DomainError::DomainError;
};

// Accumulated losses pushed SOH to or below zero.
class BatteryExpiredError : public DomainError {
public:
    using DomainError::DomainError;
};

// Believed SOH at or below end of life; no problem may be assembled.
class StringRetiredError : public DomainError {
public:
    using DomainError::DomainError;
};

class OracleScopeError : public DomainError {
public:
    using DomainError::DomainError;
};

class InternalError : public Error {
public:
    InternalError(std::string module, const std::string& message)
        : Error(ErrorKind::runtime, std::move(module), message) {}
};

}  // namespace bess
