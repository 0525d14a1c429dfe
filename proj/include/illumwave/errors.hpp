#ifndef ILLUMWAVE_ERRORS_HPP
#define ILLUMWAVE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ilw {

// Bad or inconsistent user input (configs, CLI usage). CLI maps these to exit 1.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Mathematically invalid request: degenerate ray, off-mantle sample, out-of-patch
// parameter. CLI maps these to exit 2.
struct DomainError : std::domain_error {
    explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

// Coordinate inversion did not converge.
struct InversionError : std::runtime_error {
    explicit InversionError(const std::string& msg) : std::runtime_error(msg) {}
};

// A finite-difference stencil left the admissible region.
struct StencilError : std::runtime_error {
    explicit StencilError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite field value during time stepping.
struct InstabilityError : std::runtime_error {
    explicit InstabilityError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ilw

#endif
