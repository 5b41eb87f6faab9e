#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace swarm {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text. `position` is a 0-based character offset into the input.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& message, std::size_t position)
        : Error(message + " at position " + std::to_string(position)), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class UnknownParameter : public Error {
public:
    explicit UnknownParameter(const std::string& name)
        : Error("unknown parameter " + name), name_(name) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class OutOfRange : public Error {
public:
    using Error::Error;
};

class UnboundIdentifier : public Error {
public:
    explicit UnboundIdentifier(const std::string& name)
        : Error("unbound identifier " + name), name_(name) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

/// A compute backend could not be created or failed at dispatch/transfer time.
class BackendError : public Error {
public:
    using Error::Error;
};

class BackendUnavailable : public BackendError {
public:
    using BackendError::BackendError;
};

}  // namespace swarm
