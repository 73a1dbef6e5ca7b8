#pragma once

#include <stdexcept>
#include <string>

namespace coclab {

// Dimension / argument mismatches (caller bugs, CLI exit code 2).
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// sigma_k ~ sigma_{k+1}: the requested singular subspace is not well defined.
struct DegenerateGapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Subspace pair is not transverse enough for an oblique projector.
struct TransversalityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input that should be normalized is not (unit vectors, subharmonic rescale).
struct NormalizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numeric range would be exceeded (CLI exit code 3).
struct RangeLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// No global chart vector found for the section lift.
struct LiftError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Grid too coarse to resolve argument increments.
struct RefineGridError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace coclab
