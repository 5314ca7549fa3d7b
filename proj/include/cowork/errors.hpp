#pragma once

#include <stdexcept>
#include <string>

namespace cowork {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidCell : public Error {
public:
    using Error::Error;
};

class NoPath : public Error {
public:
    using Error::Error;
};

class UnknownPlace : public Error {
public:
    using Error::Error;
};

class UnknownTransition : public Error {
public:
    using Error::Error;
};

class NotEnabled : public Error {
public:
    using Error::Error;
};

class UnknownCandidate : public Error {
public:
    using Error::Error;
};

class EmptyWindow : public Error {
public:
    using Error::Error;
};

class MissingProjection : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Scenario file could not be parsed. Carries the 1-based line (0 when
/// unknown) and the dotted field path that failed.
class ParseError : public Error {
public:
    ParseError(std::string field, int line, const std::string& what)
        : Error(format(field, line, what)), field_(std::move(field)), line_(line) {}

    const std::string& field() const noexcept { return field_; }
    int line() const noexcept { return line_; }

private:
    static std::string format(const std::string& field, int line, const std::string& what) {
        std::string msg = "parse error";
        if (line > 0) msg += " at line " + std::to_string(line);
        if (!field.empty()) msg += " (" + field + ")";
        return msg + ": " + what;
    }

    std::string field_;
    int line_;
};

}  // namespace cowork
