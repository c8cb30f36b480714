#pragma once

#include <stdexcept>
#include <string>

namespace holovar {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An eigenvalue sits inside the exclusion zone around -1, so the principal
// logarithm (and square root) is not defined there.
struct BranchCutError : Error {
  using Error::Error;
};

// The polar factor of the input is rank-deficient.
struct SingularProjectionError : Error {
  using Error::Error;
};

// A tuple claimed variety membership but its relation residual is too large.
struct OffVarietyError : Error {
  using Error::Error;
};

// Resampling hit the attempt ceiling without producing a valid point.
struct SamplingExhaustedError : Error {
  using Error::Error;
};

// A multi-start optimization ran out of restarts without converging.
struct NoConvergenceError : Error {
  using Error::Error;
};

// The twist extracted from a fixed-point witness is not close to any central
// element; signals a non-generic point or an optimizer artifact.
struct NonCentralTwistError : Error {
  using Error::Error;
};

struct NormalizationFailedError : Error {
  using Error::Error;
};

// The lifted relation defect is not close to any central element.
struct NonCentralObstructionError : Error {
  using Error::Error;
};

struct AlreadyOrientableError : Error {
  using Error::Error;
};

// Exhaustive enumeration would exceed the configured size guard.
struct SearchTooLargeError : Error {
  using Error::Error;
};

struct SchemaMismatchError : Error {
  using Error::Error;
};

struct InvalidElementError : Error {
  using Error::Error;
};

}  // namespace holovar
