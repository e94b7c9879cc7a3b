#pragma once

#include <stdexcept>
#include <string>

namespace wfp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed capture or trace file input.
struct ParseError : Error {
  using Error::Error;
};

/// Handshake-end marker could not be located in a conversation.
struct TailorError : Error {
  using Error::Error;
};

/// Violated featurization precondition (empty trace, clock anomaly, ...).
struct FeaturizeError : Error {
  using Error::Error;
};

/// Training cannot proceed (single class, non-finite value, ...).
struct FitError : Error {
  using Error::Error;
};

/// Experiment harness failure (bad fold spec, unsupported model, ...).
struct EvalError : Error {
  using Error::Error;
};

/// Invalid caller-supplied parameter.
struct InvalidParam : Error {
  using Error::Error;
};

}  // namespace wfp
