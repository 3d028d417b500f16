#pragma once

#include <stdexcept>
#include <string>

namespace verbatim {

// Base for all toolkit errors so callers can catch one type.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

// corpus
struct EmptyBody : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(std::string file, std::size_t line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what),
          file(std::move(file)),
          line(line) {}
    std::string file;
    std::size_t line;
};

struct DuplicateId : Error {
    using Error::Error;
};

struct CategoryDateViolation : Error {
    using Error::Error;
};

// tokenization
struct TextTooShort : Error {
    using Error::Error;
};

// attack templates
struct TemplateError : Error {
    using Error::Error;
};

// metrics
struct EmptyExpected : Error {
    using Error::Error;
};

struct BackendUnavailable : Error {
    using Error::Error;
};

// provider transport. request_id identifies the failed request for audit.
struct ProviderError : Error {
    ProviderError(const std::string& what, std::string request_id)
        : Error(what + " [request " + request_id + "]"), request_id(std::move(request_id)) {}
    std::string request_id;
};

struct Timeout : ProviderError {
    using ProviderError::ProviderError;
};

struct RateLimited : ProviderError {
    using ProviderError::ProviderError;
};

struct AuthError : ProviderError {
    using ProviderError::ProviderError;
};

struct MalformedResponse : ProviderError {
    using ProviderError::ProviderError;
};

struct InvalidBehavior : Error {
    using Error::Error;
};

// filter probe
struct InsufficientSamples : Error {
    using Error::Error;
};

// runner
struct ManifestMismatch : Error {
    using Error::Error;
};

// report
struct MissingModelSize : Error {
    using Error::Error;
};

}  // namespace verbatim
