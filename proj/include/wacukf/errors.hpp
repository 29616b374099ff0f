#pragma once

#include <stdexcept>

namespace wacukf {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidParameterError : Error { using Error::Error; };
struct DimensionError : Error { using Error::Error; };
struct InvalidSpecError : Error { using Error::Error; };
struct ControllabilityError : Error { using Error::Error; };
struct PrecompensationInfeasibleError : Error { using Error::Error; };
struct NumericalError : Error { using Error::Error; };
struct CovarianceNotPsdError : Error { using Error::Error; };
struct InnovationSingularError : Error { using Error::Error; };
struct ConnectivityError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

/// Raised when a simulation produces a non-finite estimate; carries the step index.
struct DivergenceError : Error {
    DivergenceError(const std::string& what, long step) : Error(what), step_index(step) {}
    long step_index;
};

} // namespace wacukf
