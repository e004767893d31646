#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ginprod {

// Dense real square matrix, row-major.
struct SquareMatrix {
  int dim = 0;
  std::vector<double> values;

  SquareMatrix() = default;
  explicit SquareMatrix(int n) : dim(n), values(static_cast<std::size_t>(n) * n, 0.0) {
    if (n < 0) throw std::invalid_argument("SquareMatrix: negative dimension");
  }

  static SquareMatrix identity(int n) {
    SquareMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(int i, int j) { return values[static_cast<std::size_t>(i) * dim + j]; }
  double operator()(int i, int j) const {
    return values[static_cast<std::size_t>(i) * dim + j];
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::fabs(v));
    return m;
  }

  bool operator==(const SquareMatrix&) const = default;
};

inline SquareMatrix multiply(const SquareMatrix& a, const SquareMatrix& b) {
  if (a.dim != b.dim) throw std::invalid_argument("multiply: dimension mismatch");
  const int n = a.dim;
  SquareMatrix c(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

inline SquareMatrix transpose(const SquareMatrix& a) {
  SquareMatrix t(a.dim);
  for (int i = 0; i < a.dim; ++i) {
    for (int j = 0; j < a.dim; ++j) t(j, i) = a(i, j);
  }
  return t;
}

}  // namespace ginprod
