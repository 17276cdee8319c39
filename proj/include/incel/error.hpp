#pragma once

#include <stdexcept>
#include <string>

namespace incel {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite input, singular inverse, non-SPD tensor, failed factorization.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Inverted element or non-positive geometry Jacobian.
class MeshError : public Error {
public:
    MeshError(const std::string& what, int element = -1) : Error(what), element_(element) {}
    int element() const noexcept { return element_; }

private:
    int element_;
};

/// Invalid run configuration or scenario description. `line` is 1-based, 0 if unknown.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace incel
