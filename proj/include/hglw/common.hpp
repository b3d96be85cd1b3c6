#pragma once

#include <stdexcept>
#include <string>

namespace hglw {

// Thrown when an argument violates a documented precondition (dimension
// mismatch, bad tolerance, malformed input).
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown for parameters outside their mathematical domain (|v| >= 1,
// epsilon outside (0,1), t past a collapse time).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Superluminal boost request.
struct CausalityError : DomainError {
    using DomainError::DomainError;
};

// Evaluation past a singular/collapse time; carries the singular time.
struct SingularTimeError : DomainError {
    SingularTimeError(const std::string& what, double t_star_)
        : DomainError(what), t_star(t_star_) {}
    double t_star;
};

// Scenario/configuration file problems. Maps to process exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Diagnostics asked for a quantity that does not exist on this state
// (empty concentration tube, insufficient tube mass).
struct EmptyTubeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace hglw
