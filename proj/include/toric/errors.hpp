#pragma once

#include <stdexcept>
#include <string>

namespace toric {

// Base class for all library errors. The CLI maps ValidationError-derived
// types to exit code 2 and InternalError-derived types to exit code 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct InternalError : Error {
    using Error::Error;
};

struct RankDeficientError : ValidationError {
    using ValidationError::ValidationError;
};

// L_A != Z^d; carries the finite lattice index (0 when rank deficient).
struct LatticeNotGeneratedError : ValidationError {
    long index;
    explicit LatticeNotGeneratedError(long idx)
        : ValidationError("point configuration does not generate Z^d (lattice index " +
                          std::to_string(idx) + ")"),
          index(idx) {}
};

struct NotInLatticeError : ValidationError {
    using ValidationError::ValidationError;
};

struct NotSaturatedError : ValidationError {
    using ValidationError::ValidationError;
};

struct ZeroInputError : ValidationError {
    using ValidationError::ValidationError;
};

struct ZeroVectorError : ValidationError {
    using ValidationError::ValidationError;
};

struct ZeroTorusCoordinateError : ValidationError {
    using ValidationError::ValidationError;
};

struct NotOnOrbitError : ValidationError {
    using ValidationError::ValidationError;
};

struct NotFullDimensionalError : ValidationError {
    using ValidationError::ValidationError;
};

struct NotHypersurfaceError : ValidationError {
    using ValidationError::ValidationError;
};

struct CannotLiftError : InternalError {
    using InternalError::InternalError;
};

struct DegenerateArrangementError : InternalError {
    using InternalError::InternalError;
};

struct MassImbalanceError : InternalError {
    using InternalError::InternalError;
};

// The interval refinement budget could not separate a symbolically nonzero
// value from 0. Signals an internal bug, never a data problem.
struct PrecisionExhaustedError : InternalError {
    using InternalError::InternalError;
};

}  // namespace toric
