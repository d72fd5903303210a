#pragma once

#include <stdexcept>
#include <string>

namespace cardgen {

// Base class for all library failures. Subclasses pick the CLI exit code:
// ConfigError/ValidationError/UsageError map to 2, everything else to 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input document (paper export, audit file, cassette, ...).
class ParseError : public Error {
public:
    using Error::Error;
};

// Invalid configuration value or precondition (overlap >= chunk_size, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Schema/template files that violate their invariants.
class ValidationError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// Bad command-line usage.
class UsageError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// A remote or scripted provider misbehaved at the wire level
// (dimension mismatch, unknown label, undecodable payload).
class ProtocolError : public Error {
public:
    using Error::Error;
};

// Provider call failed. `retryable` marks transport/5xx failures that the
// retry policy may re-attempt.
class ProviderError : public Error {
public:
    explicit ProviderError(const std::string& what, bool retryable = false)
        : Error(what), retryable_(retryable) {}
    bool retryable() const { return retryable_; }

private:
    bool retryable_ = false;
};

// Provider returned a refusal or empty assistant content.
class EmptyResponseError : public ProviderError {
public:
    explicit EmptyResponseError(const std::string& what) : ProviderError(what, false) {}
};

// Card assembly is missing an answer for a schema question.
class AssemblyError : public Error {
public:
    using Error::Error;
};

// A metric computation failed for one question; recorded per question,
// never fatal for the batch.
class EvalError : public Error {
public:
    using Error::Error;
};

}  // namespace cardgen
