#pragma once

#include <stdexcept>
#include <string>

namespace otmix {

// Base type for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Two sequences disagree on their embedding dimension.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// Matrix or vector shapes are inconsistent for the requested operation.
class ShapeMismatch : public Error {
public:
    using Error::Error;
};

// Two alignments that should pair up have different lengths.
class LengthMismatch : public Error {
public:
    using Error::Error;
};

// An alignment target or token id lies outside the valid range.
class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

// Malformed input file. The message carries the offending line number.
class FormatError : public Error {
public:
    using Error::Error;
};

// Every row of the sequence has zero norm, so norm-based masses are undefined.
class AllZeroSequence : public Error {
public:
    using Error::Error;
};

// Numerical failure inside a solver or gradient routine.
class NumericalError : public Error {
public:
    using Error::Error;
};

// A gradient was requested at a point where it does not exist,
// e.g. an aligned pair at (near-)zero distance.
class DegenerateGradient : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Scaling factors left representable range, typically because the
// regularization weight is far too small for the cost scale.
class NumericalUnderflow : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace otmix
