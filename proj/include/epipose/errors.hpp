#pragma once

#include <stdexcept>
#include <string>

namespace epipose {

// Base class for every error this library throws on a contract violation.
// Catching epipose::Error at a boundary (e.g. the CLI) is enough to map any
// library failure to a diagnostic message.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An input value violates a documented precondition (negative weight,
// non-positive focal length, malformed option, ...).
struct InvalidInput : Error {
  using Error::Error;
};

// Fewer usable data points than the operation needs (e.g. < 8 correspondences
// with strictly positive weight for the eight-point solve).
struct InsufficientData : Error {
  using Error::Error;
};

// The data admits no unique solution: rank-deficient design matrix from a
// coplanar / coincident configuration, repeated points in normalization, a
// fundamental matrix with a collapsed spectrum, ...
struct DegenerateConfiguration : Error {
  using Error::Error;
};

// A matrix that must be canonicalized is (numerically) all zeros.
struct ZeroMatrix : Error {
  using Error::Error;
};

// A requested derivative does not exist at the evaluation point.
struct GradientUndefined : Error {
  using Error::Error;
};

// Triangulation produced a point with (numerically) zero homogeneous scale.
struct PointAtInfinity : Error {
  using Error::Error;
};

// A requested epipolar line has zero direction: the query point sits on an
// epipole of the fundamental matrix.
struct EpipoleDegenerate : Error {
  using Error::Error;
};

// No decomposition candidate places any point in front of both cameras.
struct NoValidPose : Error {
  using Error::Error;
};

// A matrix handed to a rotation routine is not orthonormal with det +1
// within tolerance.
struct InvalidRotation : Error {
  using Error::Error;
};

// Robust estimation finished without a consensus set of usable size.
struct NoConsensus : Error {
  using Error::Error;
};

// A weight-prediction step drove every weight to zero (or non-finite).
struct WeightCollapse : Error {
  using Error::Error;
};

// A learned-model file is unreadable or its layer shapes do not chain.
struct ModelLoadError : Error {
  using Error::Error;
};

// Trajectory alignment is impossible (too few poses, or zero spread).
struct DegenerateAlignment : Error {
  using Error::Error;
};

// Scene synthesis could not satisfy the visibility constraints within the
// retry budget.
struct GenerationFailed : Error {
  using Error::Error;
};

// A camera pair with (numerically) zero baseline where one is required.
struct ZeroBaseline : Error {
  using Error::Error;
};

// A text or binary input file does not conform to its format. Messages
// carry the offending path and, where applicable, the 1-based line number.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace epipose
