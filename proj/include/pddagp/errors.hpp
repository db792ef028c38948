#pragma once

#include <stdexcept>
#include <string>

namespace pddagp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonFiniteError : Error { using Error::Error; };
struct NotSquareError : Error { using Error::Error; };
struct NonHermitianError : Error { using Error::Error; };
struct SpectrumBelowOneError : Error { using Error::Error; };
struct NotPositiveDefiniteError : Error { using Error::Error; };
struct NonPsdError : Error { using Error::Error; };
struct DimensionMismatchError : Error { using Error::Error; };
struct DegenerateGeometryError : Error { using Error::Error; };
struct AlreadyNormalizedError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct NumericalBreakdownError : Error { using Error::Error; };
struct InsufficientPointsError : Error { using Error::Error; };
struct InternalError : Error { using Error::Error; };

}  // namespace pddagp
