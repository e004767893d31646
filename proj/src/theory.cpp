#include "ginprod/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ginprod/specfn.hpp"

namespace ginprod::theory {

namespace {

constexpr double kIntegralTol = 1e-11;
// erfc(kTailArg) < 1e-16, so Gaussian mass beyond it is negligible.
constexpr double kTailArg = 5.9;
// Below this alpha the closed form for c has no cancellation to speak of.
constexpr double kClosedFormSwitch = 4.0;

void require_positive(double alpha, const char* who) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument(std::string(who) + ": alpha must be positive and finite");
  }
}

// Smallest K with erfc((2K - 1) a) below the tail threshold.
long truncation_index(double a) {
  return std::max(1L, static_cast<long>(std::ceil((kTailArg / a + 1.0) / 2.0)));
}

// erf(hi) - erf(lo) for 0 <= lo < hi without cancellation in the tail.
double erf_diff(double lo, double hi) {
  if (lo >= 0.5) return specfn::erfc(lo) - specfn::erfc(hi);
  return specfn::erf(hi) - specfn::erf(lo);
}

// Sum over k of Pr(2k - 1 <= X <= 2k + 1)^2 with X ~ Normal(0, 4t/alpha).
double s_direct_integrand(double t, double alpha) {
  const double a = std::sqrt(alpha / (8.0 * t));
  const long K = truncation_index(a);
  const double p0 = specfn::erf(a);
  double tail = 0.0;
  for (long k = K; k >= 1; --k) {
    const double p = 0.5 * erf_diff((2.0 * k - 1.0) * a, (2.0 * k + 1.0) * a);
    tail += p * p;
  }
  return p0 * p0 + 2.0 * tail;
}

// 1 minus the s_direct integrand, written so that nothing cancels once the
// central probability is close to 1.
double s_complement_integrand(double t, double alpha) {
  const double a = std::sqrt(alpha / (8.0 * t));
  const long K = truncation_index(a);
  double tail = 0.0;
  for (long k = K; k >= 1; --k) {
    const double p = 0.5 * erf_diff((2.0 * k - 1.0) * a, (2.0 * k + 1.0) * a);
    tail += p * p;
  }
  return specfn::erfc(a) * (1.0 + specfn::erf(a)) - 2.0 * tail;
}

// (1/2) sum_k e_k (e_k - e_{k+1}) with e_k = erf((2k - 1) a).
double s_alt_integrand(double t, double alpha) {
  const double a = std::sqrt(alpha / (8.0 * t));
  const long K = truncation_index(a);
  double sum = 0.0;
  for (long k = -K; k <= K; ++k) {
    const double x0 = (2.0 * k - 1.0) * a;
    const double x1 = (2.0 * k + 1.0) * a;
    double diff;  // e_k - e_{k+1}
    if (x0 >= 0.0) {
      diff = -erf_diff(x0, x1);
    } else if (x1 <= 0.0) {
      diff = -erf_diff(-x1, -x0);
    } else {
      diff = specfn::erf(x0) - specfn::erf(x1);
    }
    sum += specfn::erf(x0) * diff;
  }
  return 0.5 * sum;
}

}  // namespace

double c_closed(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("c_closed: alpha must be nonnegative and finite");
  }
  if (alpha == 0.0) return 0.0;
  if (alpha >= kClosedFormSwitch) return 1.0 - c_complement(alpha);
  const double x = std::sqrt(alpha / 8.0);
  return (1.0 + alpha / 4.0) * specfn::erf(x) - alpha / 4.0 +
         std::sqrt(alpha / (2.0 * std::numbers::pi)) * std::exp(-alpha / 8.0);
}

double c_complement(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("c_complement: alpha must be nonnegative and finite");
  }
  if (alpha < kClosedFormSwitch) return 1.0 - c_closed(alpha);
  const double x = std::sqrt(alpha / 8.0);
  return (1.0 + alpha / 4.0) * specfn::erfc(x) -
         std::sqrt(alpha / (2.0 * std::numbers::pi)) * std::exp(-alpha / 8.0);
}

double c_integral(double alpha) {
  require_positive(alpha, "c_integral");
  return specfn::integrate_unit(
      [alpha](double t) { return specfn::erf(std::sqrt(alpha / (8.0 * t))); }, kIntegralTol);
}

double c_tail_residual(double alpha) {
  if (!(alpha >= 20.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("c_tail_residual: alpha must be >= 20");
  }
  return 16.0 * std::sqrt(2.0 / std::numbers::pi) * std::exp(-alpha / 8.0) /
         std::pow(alpha, 1.5);
}

double s_direct(double alpha) {
  require_positive(alpha, "s_direct");
  // The exact value is below 1; quadrature rounding can overshoot by an ulp.
  return std::min(1.0, specfn::integrate_unit(
                           [alpha](double t) { return s_direct_integrand(t, alpha); },
                           kIntegralTol));
}

double s_complement(double alpha) {
  require_positive(alpha, "s_complement");
  if (alpha < kClosedFormSwitch) return 1.0 - s_direct(alpha);
  // 1 - s is comparable to 1 - c, which sets the scale for the tolerance.
  const double scale = std::max(c_complement(alpha), 1e-300);
  return specfn::integrate_unit([alpha](double t) { return s_complement_integrand(t, alpha); },
                                1e-10 * scale);
}

double s_alt(double alpha) {
  require_positive(alpha, "s_alt");
  return std::min(1.0, specfn::integrate_unit(
                           [alpha](double t) { return s_alt_integrand(t, alpha); },
                           kIntegralTol));
}

double r_ratio(double alpha) {
  require_positive(alpha, "r_ratio");
  if (alpha >= kClosedFormSwitch) {
    return 2.0 * (s_complement(alpha) - c_complement(alpha)) / c_closed(alpha);
  }
  return 2.0 - 2.0 * s_direct(alpha) / c_closed(alpha);
}

TheoryPoint theory_point(double alpha) {
  require_positive(alpha, "theory_point");
  TheoryPoint p;
  p.alpha = alpha;
  p.c = c_closed(alpha);
  p.s = s_direct(alpha);
  p.r = r_ratio(alpha);
  return p;
}

double density_limit(double lambda, double alpha) {
  require_positive(alpha, "density_limit");
  const double x = std::fabs(lambda);
  if (x >= 1.0 || x == 0.0) return 0.0;
  return x * specfn::erf(std::sqrt(alpha / 8.0) / x) / c_closed(alpha);
}

DensityCurve density_curve(double alpha, int grid_points) {
  require_positive(alpha, "density_curve");
  if (grid_points < 3 || grid_points % 2 == 0) {
    throw std::invalid_argument("density_curve: grid_points must be odd and >= 3");
  }
  DensityCurve curve;
  curve.alpha = alpha;
  curve.lambdas.resize(grid_points);
  curve.values.resize(grid_points);
  const int half = grid_points / 2;
  const double c = c_closed(alpha);
  const double b = std::sqrt(alpha / 8.0);
  for (int i = 0; i < grid_points; ++i) {
    const int offset = i - half;
    const double lambda = static_cast<double>(offset) / half;
    const double x = std::fabs(lambda);
    curve.lambdas[i] = lambda;
    // The density jumps to 0 at |lambda| = 1; the grid end points take the
    // limit from inside so that the trapezoid rule sees the support only.
    curve.values[i] = x == 0.0 ? 0.0 : x * specfn::erf(b / x) / c;
  }
  return curve;
}

double trapezoid_mass(const DensityCurve& curve) {
  double mass = 0.0;
  for (std::size_t i = 1; i < curve.lambdas.size(); ++i) {
    mass += 0.5 * (curve.values[i] + curve.values[i - 1]) *
            (curve.lambdas[i] - curve.lambdas[i - 1]);
  }
  return mass;
}

double density_even_moment(double alpha, double k) {
  require_positive(alpha, "density_even_moment");
  if (!(k >= 0.0)) throw std::invalid_argument("density_even_moment: k must be >= 0");
  const double num = specfn::integrate_unit(
      [alpha, k](double t) { return std::pow(t, k) * specfn::erf(std::sqrt(alpha / (8.0 * t))); },
      kIntegralTol);
  return num / c_closed(alpha);
}

}  // namespace ginprod::theory
