#pragma once

#include <stdexcept>
#include <string>

namespace rydgate {

// Violated mathematical precondition (non-Hermitian input, bad dimensions, ...).
struct ContractViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numerical failure inside an otherwise well-posed computation.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Integrator step size underflowed: problem too stiff for the requested tolerance.
struct StiffProblemError : NumericalError {
    using NumericalError::NumericalError;
};

// Amplitudes became non-finite during propagation.
struct DivergenceError : NumericalError {
    using NumericalError::NumericalError;
};

// Invalid experiment configuration. Mapped to exit code 2 by the CLI.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rydgate
