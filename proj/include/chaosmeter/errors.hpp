#pragma once

#include <stdexcept>
#include <string>

namespace chaosmeter {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A rate parameter hit a removable singularity (a = 0, theta = 0, ...) with
/// the limit branch disabled.
struct DegenerateRate : Error {
    using Error::Error;
};

/// A covariance matrix failed a positive-definiteness requirement.
struct NotPositiveDefinite : Error {
    using Error::Error;
};

/// Covariance matrices do not commute within tolerance; the closed-form
/// Fisher information formula does not apply.
struct NonCommuting : Error {
    using Error::Error;
};

/// Fixed-step integrator would be unstable at the requested step size.
struct StepTooLarge : Error {
    using Error::Error;
};

/// A state coordinate left the finite range during simulation.
struct NonFinite : Error {
    using Error::Error;
};

/// Too few samples for the requested estimator.
struct InsufficientSamples : Error {
    using Error::Error;
};

/// Regression design matrix is singular (all abscissae equal, or < 3 points).
struct DegenerateDesign : Error {
    using Error::Error;
};

/// Ladder closure or ladder parameters are inconsistent.
struct InvalidClosure : Error {
    using Error::Error;
};

/// Log-log plotting requires strictly positive data.
struct NonPositiveData : Error {
    using Error::Error;
};

/// Experiment configuration failed validation.
struct InvalidConfig : Error {
    using Error::Error;
};

}  // namespace chaosmeter
