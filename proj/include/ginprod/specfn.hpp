#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace ginprod::specfn {

/// Error function. Cody's rational Chebyshev approximations; absolute error
/// below 1e-15 on the whole real line.
double erf(double x);

/// Complementary error function, computed directly in the tail so that the
/// relative error stays small for large positive x (underflows to 0 past
/// x ~ 26.5).
double erfc(double x);

/// Principal branch of log Gamma(z): analytic continuation from the positive
/// real axis with the branch cut along the negative real axis. Lanczos
/// (g = 7, 9 terms) for Re z >= 1/2, reflection otherwise.
/// Throws std::domain_error at the poles z = 0, -1, -2, ...
std::complex<double> log_gamma(std::complex<double> z);

/// Real log Gamma for x > 0. Thread-safe replacement for std::lgamma.
double log_gamma(double x);

struct QuadratureRule {
  std::vector<double> nodes;    // strictly increasing, interior to [a, b]
  std::vector<double> weights;  // all positive
  int order = 0;

  template <class F>
  double apply(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

/// Gauss-Legendre rule of the given order mapped to [a, b].
QuadratureRule gauss_legendre(int order, double a, double b);

/// Adaptive integral over [a, b]. Panels are refined by bisection, worst
/// panel first, until the summed error estimate drops below tol. Only interior
/// nodes are evaluated, so integrable endpoint singularities are fine.
/// Throws NumericFailure once the panel budget is exhausted.
double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 int max_panels = 10000);

/// integrate() over the unit interval.
double integrate_unit(const std::function<double(double)>& f, double tol);

}  // namespace ginprod::specfn
