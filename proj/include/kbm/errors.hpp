// SPDX-License-Identifier: Apache-2.0
//
// kbm error types. Numeric failures are exceptions so the CLI can map them
// to exit codes (2 = certification/validation failure, 1 = internal error).

#pragma once

#include <stdexcept>
#include <string>

namespace kbm {

// Precondition violations (bad arguments, invalid configuration).
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A certification step failed: truncation ceiling, tail control,
// winding not integral, singular block where invertibility was claimed.
struct CertificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TruncationCeilingError : CertificationError {
  using CertificationError::CertificationError;
};

struct TailControlError : CertificationError {
  using CertificationError::CertificationError;
};

struct SingularBlockError : CertificationError {
  using CertificationError::CertificationError;
};

struct WindingError : CertificationError {
  using CertificationError::CertificationError;
};

struct ConvergenceError : CertificationError {
  using CertificationError::CertificationError;
};

}  // namespace kbm
