#pragma once

#include <vector>

#include "ginprod/matrix.hpp"

namespace ginprod {

// One real eigenvalue x of a matrix product, stored as log|x| and sign so
// that products of many factors cannot overflow. sign == 0 means x == 0.
struct LogReal {
  double log_abs = 0.0;
  int sign = 1;
};

struct ProductEigenvalues {
  std::vector<LogReal> reals;
  int complex_pairs = 0;
};

// Real eigenvalues of A[0] * A[1] * ... * A[m-1] by the periodic QR
// algorithm: the factors are reduced to Hessenberg-triangular form and
// iterated with implicit double shifts without ever forming the product.
// Consumes the factors. Throws NumericFailure if an eigenvalue fails to
// deflate within max_sweeps iterations.
ProductEigenvalues product_eigenvalues(std::vector<SquareMatrix> factors, double tol,
                                       int max_sweeps);

}  // namespace ginprod
