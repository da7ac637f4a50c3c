#pragma once

#include <stdexcept>
#include <string>

namespace hipdyn {

/// Root of the library's exception family.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operand dimensions do not agree.
struct DimMismatch : Error {
    using Error::Error;
};

/// A pivot fell below the singularity threshold during factorization.
struct SingularMatrix : Error {
    using Error::Error;
};

/// An iterative kernel hit its iteration cap before meeting its tolerance.
struct NoConvergence : Error {
    using Error::Error;
};

/// A matrix required to be Hermitian (within tolerance) is not.
/// Raised by the positivity test on its input.
struct HermitianityViolated : Error {
    using Error::Error;
};

/// A reference observable passed to an observable-transport routine
/// failed its Hermiticity precondition.
struct NotHermitian : Error {
    using Error::Error;
};

/// Exact polynomial inversion requires a constant nonzero determinant.
struct NonConstantDeterminant : Error {
    using Error::Error;
};

/// The integrator exhausted its step budget before reaching the target time.
struct StepLimitExceeded : Error {
    using Error::Error;
};

/// A trajectory lookup asked for a time that was never sampled.
struct MissingSample : Error {
    using Error::Error;
};

/// A scenario configuration failed validation; the message names the field.
struct InvalidConfig : Error {
    using Error::Error;
};

/// A library-level precondition was violated by the caller.
struct InvalidArgument : Error {
    using Error::Error;
};

} // namespace hipdyn
