#pragma once

#include <stdexcept>
#include <string>

namespace a11y {

// Base for every error the engine raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad rule ids, invalid config values, unknown use cases.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Input text is not valid UTF-8.
class EncodingError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

// Template rendering referenced a placeholder with no value.
class TemplateError : public Error {
public:
    using Error::Error;
};

// Network-level failure (timeout, refused connection). Retryable.
class TransportError : public Error {
public:
    using Error::Error;
};

// The provider answered with a non-2xx status or a malformed envelope.
class ProviderError : public Error {
public:
    ProviderError(int status, std::string body)
        : Error("provider returned HTTP " + std::to_string(status) + ": " + body),
          status_(status),
          body_(std::move(body)) {}

    int status() const noexcept { return status_; }
    const std::string& body() const noexcept { return body_; }

private:
    int status_;
    std::string body_;
};

class FixtureNotFound : public Error {
public:
    explicit FixtureNotFound(std::string key)
        : Error("no replay fixture for prompt hash " + key), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class CancelledError : public Error {
public:
    CancelledError() : Error("request cancelled") {}
};

// Selection larger than the configured prompt character budget.
class BudgetError : public Error {
public:
    using Error::Error;
};

// Unbalanced annotation sentinels and similar structural problems in text
// the engine itself produced.
class FormatError : public Error {
public:
    using Error::Error;
};

class EvaluationError : public Error {
public:
    using Error::Error;
};

// A file the engine had to read or write was not accessible.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace a11y
