#pragma once

#include <stdexcept>
#include <string>

namespace wxmood {

// Bad configuration or usage. CLI exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input data violates its documented format or contract. CLI exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A synthetic tag token already occurs in the corpus text.
class TagCollisionError : public DataError {
public:
    using DataError::DataError;
};

// An iterative solver hit its iteration cap. CLI exit code 3.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

} // namespace wxmood
