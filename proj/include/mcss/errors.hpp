#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include "mcss/types.hpp"

namespace mcss {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidMatrix : Error { using Error::Error; };
struct DimMismatch : Error { using Error::Error; };
struct NotPsd : Error { using Error::Error; };
struct InvalidSensor : Error { using Error::Error; };
struct InvalidBudget : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct Unbounded : Error { using Error::Error; };
struct Undefined : Error { using Error::Error; };
struct InvalidScalar : Error { using Error::Error; };
struct InsufficientSamples : Error { using Error::Error; };
struct InvalidRefinement : Error { using Error::Error; };
struct HypothesisViolated : Error { using Error::Error; };
struct RangeViolation : Error { using Error::Error; };
struct TrivialLowerScale : Error { using Error::Error; };
struct GenerationFailed : Error { using Error::Error; };
struct NumericalError : Error { using Error::Error; };

/// Fixed-point iteration ran out of budget; keeps the last iterate so callers
/// can inspect how far it got.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& msg, Matrix last, double residual, int iterations)
      : Error(msg), last_(std::move(last)), residual_(residual), iterations_(iterations) {}

  const Matrix& last_iterate() const { return last_; }
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  Matrix last_;
  double residual_;
  int iterations_;
};

}  // namespace mcss
