#pragma once

#include <stdexcept>
#include <string>

namespace gsopt {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Caller handed in something that violates an operation's contract.
struct ValidationError : Error {
  using Error::Error;
};

/// Fluorescence normalization collapsed (c0_hat <= c1_hat); re-measure.
struct NormalizationError : Error {
  using Error::Error;
};

/// A value could not be matched against a lookup table.
struct LookupError : Error {
  using Error::Error;
};

/// Internal numerical failure (ill-conditioned system, broken table, ...).
struct NumericalError : Error {
  using Error::Error;
};

}  // namespace gsopt
