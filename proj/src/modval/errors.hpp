#pragma once

#include <stdexcept>

namespace modval {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Incompatible tensor-factor structure, or vector/matrix sizes that do not
// match the declared shape.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Composite dimension exceeds the supported limit.
class DimensionLimitError : public Error {
public:
    using Error::Error;
};

// Eigenvalues too close together for a Lagrange interpolation to be stable.
class DegenerateSpectrumError : public Error {
public:
    using Error::Error;
};

// Pre- and post-selection are (numerically) orthogonal, so conditional
// values are undefined.
class OrthogonalSelectionError : public Error {
public:
    using Error::Error;
};

// A matrix asserted to be Hermitian is not.
class NotHermitianError : public Error {
public:
    using Error::Error;
};

// Anything else that violates an operation's domain: couplings where a
// conversion is undefined, invalid meter amplitudes, unknown basis labels.
class DomainError : public Error {
public:
    using Error::Error;
};

} // namespace modval
