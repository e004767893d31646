#pragma once

#include <stdexcept>
#include <string>

namespace ginprod {

/// Raised when a numerical procedure cannot deliver its accuracy contract
/// (integrator panel budget exhausted, contour truncation not met, QR
/// iteration not converged, ...). Argument errors use std::invalid_argument.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ginprod
