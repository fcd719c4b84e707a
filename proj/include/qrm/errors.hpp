#pragma once

#include <stdexcept>
#include <string>

namespace qrm {

// Every failure raised by the library carries a short machine-readable kind
// so the CLI can report it as JSON.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error("domain_error", what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error("config_error", what) {}
};

struct UsageError : Error {
    explicit UsageError(const std::string& what) : Error("usage_error", what) {}
};

struct ConversionError : Error {
    explicit ConversionError(const std::string& what) : Error("conversion_error", what) {}
};

struct ParseError : Error {
    ParseError(const std::string& what, long line)
        : Error("parse_error", what), line_(line) {}
    long line() const noexcept { return line_; }

private:
    long line_;
};

class NumericalFault : public Error {
public:
    NumericalFault(const std::string& what, long step)
        : Error("numerical_fault", what), step_(step) {}
    long step() const noexcept { return step_; }

private:
    long step_;
};

} // namespace qrm
