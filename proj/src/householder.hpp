#pragma once

#include <cmath>

namespace ginprod::detail {

struct Reflector {
  double beta = 0.0;
  double tau = 0.0;
};

// Householder reflector I - tau v v^T with v = (1, x[1..n-1]) mapping
// (alpha, x[1..]) to (beta, 0, ...). x[1..] is overwritten with v.
inline Reflector make_reflector(double alpha, double* x, int n) {
  double xnorm = 0.0;
  for (int i = 1; i < n; ++i) xnorm = std::hypot(xnorm, x[i]);
  if (xnorm == 0.0) {
    for (int i = 1; i < n; ++i) x[i] = 0.0;
    return {alpha, 0.0};
  }
  const double beta = -std::copysign(std::hypot(alpha, xnorm), alpha);
  const double scale = 1.0 / (alpha - beta);
  for (int i = 1; i < n; ++i) x[i] *= scale;
  return {beta, (beta - alpha) / beta};
}

}  // namespace ginprod::detail
