#pragma once

#include <stdexcept>
#include <string>

namespace dlab {

/// Argument outside the domain of an operation (time off the horizon, h <= 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Two paths (or a path and a measure) live on different time grids.
class GridMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid model, problem or experiment configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A functional returned a non-finite value while being differentiated.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& what, double t, double h)
        : std::runtime_error(what), t_(t), h_(h) {}

    double time() const noexcept { return t_; }
    double bump() const noexcept { return h_; }

private:
    double t_;
    double h_;
};

}  // namespace dlab
