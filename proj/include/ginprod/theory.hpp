#pragma once

#include <vector>

namespace ginprod::theory {

// Limiting quantities of the critical regime m = alpha * N:
//   c(alpha)  limiting fraction E_N / N of real eigenvalues,
//   s(alpha)  the variance-reduction integral,
//   r(alpha)  limiting ratio V_N / E_N = 2 - 2 s / c.

struct TheoryPoint {
  double alpha = 0.0;
  double c = 0.0;
  double s = 0.0;
  double r = 0.0;
};

struct DensityCurve {
  std::vector<double> lambdas;
  std::vector<double> values;
  double alpha = 0.0;
};

double c_closed(double alpha);

// 1 - c(alpha), accurate when c is close to 1.
double c_complement(double alpha);

double c_integral(double alpha);

// Leading-order prediction for 1 - c(alpha) at large alpha (alpha >= 20).
double c_tail_residual(double alpha);

double s_direct(double alpha);
double s_alt(double alpha);

// 1 - s(alpha), accurate when s is close to 1.
double s_complement(double alpha);

double r_ratio(double alpha);

TheoryPoint theory_point(double alpha);

// Limiting density of rescaled real eigenvalues on (-1, 1).
double density_limit(double lambda, double alpha);

// Uniform grid on [-1, 1]; grid_points must be odd and >= 3. The endpoints
// carry the one-sided limit from inside the support.
DensityCurve density_curve(double alpha, int grid_points);

double trapezoid_mass(const DensityCurve& curve);

// Integral of lambda^(2k) against the limiting density, k >= 0 real.
double density_even_moment(double alpha, double k);

}  // namespace ginprod::theory
