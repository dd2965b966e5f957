#pragma once

#include <stdexcept>
#include <string>

namespace lsx {

enum class ErrorKind {
    invalid_argument,
    domain,
    window_undefined,
    asymptotic_domain,
    embedding_failure,
    not_positive_definite,
    model,
    config,
    io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Structured failure raised by every module. Out-of-domain input never
/// propagates as NaN; it surfaces as one of these.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised on config schema violations; carries the JSON path of the field.
class ConfigError : public Error {
public:
    ConfigError(std::string path, const std::string& what)
        : Error(ErrorKind::config, path.empty() ? what : path + ": " + what),
          path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace lsx
