#pragma once

#include <stdexcept>
#include <string>

namespace qptomo {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shapes of operands disagree (mode counts, matrix sizes, probe lengths).
struct DimensionMismatch : Error {
    using Error::Error;
};

// A form whose stored matrices break the symmetric/Hermitian contract,
// or whose entries are not finite.
struct InvalidForm : Error {
    using Error::Error;
};

// The exponent evaluated to a complex number beyond roundoff; the stored
// matrices no longer satisfy the reality constraints.
struct NonRealExponent : Error {
    using Error::Error;
};

// The quadratic part of the exponent is not negative definite, so the
// phase-space integral diverges.
struct NotIntegrable : Error {
    using Error::Error;
};

// Normalization constant underflowed or came out non-finite.
struct ZeroWeight : Error {
    using Error::Error;
};

// A square system with a vanishing pivot.
struct SingularSystem : Error {
    using Error::Error;
};

// Probe geometry leads to an unusably conditioned or rank-deficient system.
struct IllConditioned : Error {
    using Error::Error;
};

// Parameter outside its allowed range (q not in (0,1), negative nbar, ...).
struct DomainError : Error {
    using Error::Error;
};

// Truncated Fock representation cannot hold the requested state to tolerance.
struct CutoffTooSmall : Error {
    using Error::Error;
};

// Inverting the probe weights would amplify truncation noise beyond the
// requested tolerance.
struct AmplificationOverflow : Error {
    using Error::Error;
};

// Probe records disagree on the probe-independent quadratic output blocks.
struct QuadraticInconsistency : Error {
    using Error::Error;
};

// Independently recovered conjugate partners disagree.
struct ConjugateMismatch : Error {
    using Error::Error;
};

// A closed-form solver was handed records from a different probe set.
struct WrongProbeSet : Error {
    using Error::Error;
};

// Malformed or type-inconsistent serialized input.
struct ParseError : Error {
    using Error::Error;
};

}  // namespace qptomo
