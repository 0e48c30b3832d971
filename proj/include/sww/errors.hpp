#pragma once

#include <stdexcept>
#include <string>

namespace sww {

// Bad input: violated preconditions, malformed configs, invalid geometry.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// An iterative solve stalled or diverged (Newton, trace solve, DN solve).
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// The requested computation exceeds what the configured resolution supports
// (spectral tail blow-up, near-boundary evaluation, unresolved quadrature).
struct ResolutionError : std::runtime_error {
    explicit ResolutionError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sww
