#pragma once

#include <stdexcept>
#include <string>

namespace mudflow {

/// Input outside the operation's domain (negative shear rate, profile
/// leaving the admissible set, mismatched grids, ...).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// An iterative procedure failed to converge or produced non-finite values.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The interface left the configured admissibility neighborhood during
/// time stepping; the simulation cannot be continued.
struct GuardBreachError : NumericError {
    using NumericError::NumericError;
};

/// Configuration file problems (JSON parse failure or validation).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Filesystem failures while writing results.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace mudflow
