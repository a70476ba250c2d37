#pragma once
#include <stdexcept>
#include <string>

namespace jointcq {

// Base for all library errors. Subclasses map 1:1 onto C API status codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Network failure after all retries were exhausted.
class TransportError : public Error {
public:
    using Error::Error;
};

// Non-2xx endpoint response; keeps the status and body for diagnostics.
class EndpointError : public Error {
public:
    EndpointError(int status, const std::string& body)
        : Error("endpoint returned status " + std::to_string(status) + ": " + body),
          status_(status) {}
    int status() const { return status_; }

private:
    int status_;
};

// Replay-mode cache miss. Replay never falls back to the network.
class ReplayMissError : public Error {
public:
    using Error::Error;
};

class ZeroVectorError : public Error {
public:
    using Error::Error;
};

class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

class MissingTemplateError : public Error {
public:
    using Error::Error;
};

// Joint generator output without a claims header.
class MalformedOutputError : public Error {
public:
    using Error::Error;
};

// Claim and query counts disagree and neither section is a no-content literal.
class CountMismatchError : public Error {
public:
    using Error::Error;
};

class InsufficientPoolError : public Error {
public:
    using Error::Error;
};

class InsufficientSamplesError : public Error {
public:
    using Error::Error;
};

class LengthMismatchError : public Error {
public:
    using Error::Error;
};

class QuotaNotReachedError : public Error {
public:
    QuotaNotReachedError(std::int64_t accepted, std::int64_t quota)
        : Error("quota not reached: " + std::to_string(accepted) + "/" + std::to_string(quota)),
          accepted_(accepted), quota_(quota) {}
    std::int64_t accepted() const { return accepted_; }
    std::int64_t quota() const { return quota_; }

private:
    std::int64_t accepted_;
    std::int64_t quota_;
};

} // namespace jointcq
