#pragma once

#include <stdexcept>
#include <string>

namespace iets {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed arguments: dimension mismatches, zero polynomials where nonzero
// is required, empty inputs.
struct InputError : Error {
    using Error::Error;
};

// Exact-mode operation invoked on float coefficients or vice versa.
struct ModeError : Error {
    using Error::Error;
};

// Divisor is not monic (+-1) in the requested variable.
struct UnsupportedDivisorError : Error {
    using Error::Error;
};

// Univariate slice of a branch-defining polynomial vanished identically.
struct BranchError : Error {
    using Error::Error;
};

// Seed search exhausted the given radius.
struct NoSeedError : Error {
    using Error::Error;
};

// Input file or JSON payload did not match the expected schema.
struct ParseError : Error {
    using Error::Error;
};

// Contour counting could not produce a conclusive integer.
struct RegionError : Error {
    using Error::Error;
};

} // namespace iets
