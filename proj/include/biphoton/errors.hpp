#pragma once

#include <stdexcept>
#include <string>

namespace biphoton {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when the Fresnel kernel would alias on the given grids; the message
// spells out the admissible step so callers can fix their configuration.
struct SamplingViolation : Error {
  using Error::Error;
};

struct InvalidDistance : Error {
  using Error::Error;
};

struct GridMismatch : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct GeometryError : Error {
  using Error::Error;
};

struct QuadratureFailure : Error {
  using Error::Error;
};

struct InvalidModel : Error {
  using Error::Error;
};

struct InsufficientSamples : Error {
  using Error::Error;
};

struct AllZeroSpectrum : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

} // namespace biphoton
