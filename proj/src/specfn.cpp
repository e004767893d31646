#include "ginprod/specfn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>

#include "ginprod/errors.hpp"

namespace ginprod::specfn {

namespace {

// W. J. Cody, "Rational Chebyshev approximations for the error function",
// Math. Comp. 23 (1969). Coefficients from the netlib CALERF packet.
constexpr std::array<double, 5> kA = {3.16112374387056560e00, 1.13864154151050156e02,
                                      3.77485237685302021e02, 3.20937758913846947e03,
                                      1.85777706184603153e-1};
constexpr std::array<double, 4> kB = {2.36012909523441209e01, 2.44024637934444173e02,
                                      1.28261652607737228e03, 2.84423683343917062e03};
constexpr std::array<double, 9> kC = {5.64188496988670089e-1, 8.88314979438837594e00,
                                      6.61191906371416295e01, 2.98635138197400131e02,
                                      8.81952221241769090e02, 1.71204761263407058e03,
                                      2.05107837782607147e03, 1.23033935479799725e03,
                                      2.15311535474403846e-8};
constexpr std::array<double, 8> kD = {1.57449261107098347e01, 1.17693950891312499e02,
                                      5.37181101862009858e02, 1.62138957456669019e03,
                                      3.29079923573345963e03, 4.36261909014324716e03,
                                      3.43936767414372164e03, 1.23033935480374942e03};
constexpr std::array<double, 6> kP = {3.05326634961232344e-1, 3.60344899949804439e-1,
                                      1.25781726111229246e-1, 1.60837851487422766e-2,
                                      6.58749161529837803e-4, 1.63153871373020978e-2};
constexpr std::array<double, 5> kQ = {2.56852019228982242e00, 1.87295284992346047e00,
                                      5.27905102951428412e-1, 6.05183413124413191e-2,
                                      2.33520497626869185e-3};

constexpr double kInvSqrtPi = 5.6418958354775628695e-1;
constexpr double kThresh = 0.46875;
constexpr double kXSmall = 1.11e-16;
constexpr double kXBig = 26.543;

// erf(y) for |y| <= kThresh.
double erf_small(double y) {
  const double ysq = std::fabs(y) > kXSmall ? y * y : 0.0;
  double num = kA[4] * ysq;
  double den = ysq;
  for (int i = 0; i < 3; ++i) {
    num = (num + kA[i]) * ysq;
    den = (den + kB[i]) * ysq;
  }
  return y * (num + kA[3]) / (den + kB[3]);
}

// exp(-y^2) with the argument split so that the rounding error of y*y does
// not get amplified.
double exp_minus_square(double y) {
  const double ysq = std::trunc(y * 16.0) / 16.0;
  const double del = (y - ysq) * (y + ysq);
  return std::exp(-ysq * ysq) * std::exp(-del);
}

// erfc(y) for y > kThresh.
double erfc_large(double y) {
  if (y <= 4.0) {
    double num = kC[8] * y;
    double den = y;
    for (int i = 0; i < 7; ++i) {
      num = (num + kC[i]) * y;
      den = (den + kD[i]) * y;
    }
    return exp_minus_square(y) * (num + kC[7]) / (den + kD[7]);
  }
  if (y >= kXBig) return 0.0;
  const double ysq = 1.0 / (y * y);
  double num = kP[5] * ysq;
  double den = ysq;
  for (int i = 0; i < 4; ++i) {
    num = (num + kP[i]) * ysq;
    den = (den + kQ[i]) * ysq;
  }
  double r = ysq * (num + kP[4]) / (den + kQ[4]);
  r = (kInvSqrtPi - r) / y;
  return exp_minus_square(y) * r;
}

// Lanczos approximation, g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

std::complex<double> lanczos_log_gamma(std::complex<double> z) {
  z -= 1.0;
  std::complex<double> sum = kLanczos[0];
  for (int i = 1; i < 9; ++i) sum += kLanczos[i] / (z + static_cast<double>(i));
  const std::complex<double> t = z + kLanczosG + 0.5;
  return kHalfLog2Pi + (z + 0.5) * std::log(t) - t + std::log(sum);
}

double lanczos_log_gamma(double x) {
  x -= 1.0;
  double sum = kLanczos[0];
  for (int i = 1; i < 9; ++i) sum += kLanczos[i] / (x + i);
  const double t = x + kLanczosG + 0.5;
  return kHalfLog2Pi + (x + 0.5) * std::log(t) - t + std::log(sum);
}

// Legendre P_n(x) and its derivative.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  if (n == 0) return {1.0, 0.0};
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace

double erf(double x) {
  const double y = std::fabs(x);
  if (y <= kThresh) return erf_small(x);
  const double r = (0.5 - erfc_large(y)) + 0.5;
  return x < 0 ? -r : r;
}

double erfc(double x) {
  const double y = std::fabs(x);
  if (y <= kThresh) return 1.0 - erf_small(x);
  const double r = erfc_large(y);
  return x < 0 ? 2.0 - r : r;
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma: real argument must be positive");
  if (x < 0.5) return lanczos_log_gamma(x + 1.0) - std::log(x);
  return lanczos_log_gamma(x);
}

std::complex<double> log_gamma(std::complex<double> z) {
  using std::numbers::pi;
  if (z.real() >= 0.5) return lanczos_log_gamma(z);

  if (std::fabs(z.imag()) < 1e-14 && z.real() <= 0.0 &&
      std::fabs(z.real() - std::round(z.real())) < 1e-14) {
    throw std::domain_error("log_gamma: pole at a nonpositive integer");
  }
  if (z.imag() < 0.0) return std::conj(log_gamma(std::conj(z)));

  // Upper half plane: log Gamma(z) + log Gamma(1 - z) = log pi - S(z) where
  // S(z) = -i pi z + i pi / 2 - log 2 + log1p(-exp(2 pi i z)) is the branch of
  // log sin(pi z) that is analytic for Im z > 0 and real on (0, 1).
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> w = std::exp(2.0 * pi * i * z);
  // log1p for complex arguments; |w| <= 1 here.
  const std::complex<double> one_minus_w = 1.0 - w;
  std::complex<double> log1p_mw;
  if (std::abs(w) < 1e-4) {
    // Series: -w - w^2/2 - w^3/3 - w^4/4.
    log1p_mw = -w * (1.0 + w * (0.5 + w * (1.0 / 3.0 + w * 0.25)));
  } else {
    log1p_mw = std::log(one_minus_w);
  }
  const std::complex<double> log_sin = -i * pi * z + i * (pi / 2) - std::log(2.0) + log1p_mw;
  return std::log(pi) - log_sin - lanczos_log_gamma(1.0 - z);
}

QuadratureRule gauss_legendre(int order, double a, double b) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  if (!(a < b)) throw std::invalid_argument("gauss_legendre: need a < b");

  QuadratureRule rule;
  rule.order = order;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const int n = order;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      auto [p, d] = legendre(n, x);
      dp = d;
      const double dx = p / d;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Root i is the i-th largest; place it symmetrically.
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.nodes[i] = mid - half * x;
    rule.weights[n - 1 - i] = half * w;
    rule.weights[i] = half * w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = mid;
  return rule;
}

namespace {

struct Panel {
  double a;
  double b;
  double coarse;  // rule applied to the whole panel
  double fine;    // rule applied to the two halves
  double left;    // fine contribution of [a, mid]
  double right;   // fine contribution of [mid, b]
  double error() const { return std::fabs(fine - coarse); }
  bool operator<(const Panel& o) const { return error() < o.error(); }
};

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 int max_panels) {
  if (!(a < b)) throw std::invalid_argument("integrate: need a < b");
  if (!(tol > 0.0)) throw std::invalid_argument("integrate: tol must be positive");

  static const QuadratureRule base = gauss_legendre(10, -1.0, 1.0);
  auto apply = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double s = 0.0;
    for (int i = 0; i < base.order; ++i) s += base.weights[i] * f(mid + half * base.nodes[i]);
    return s * half;
  };
  auto make_panel = [&](double lo, double hi, double coarse) {
    const double mid = 0.5 * (lo + hi);
    const double l = apply(lo, mid);
    const double r = apply(mid, hi);
    return Panel{lo, hi, coarse, l + r, l, r};
  };

  std::priority_queue<Panel> queue;
  queue.push(make_panel(a, b, apply(a, b)));
  double total = queue.top().fine;
  double err = queue.top().error();
  int panels = 1;
  while (!(err <= tol)) {
    if (!std::isfinite(err) || !std::isfinite(total)) {
      throw NumericFailure("integrate: non-finite integrand or error estimate");
    }
    if (panels >= max_panels) {
      throw NumericFailure("integrate: panel budget exhausted (error estimate " +
                           std::to_string(err) + ")");
    }
    const Panel p = queue.top();
    queue.pop();
    const double mid = 0.5 * (p.a + p.b);
    if (!(p.a < mid && mid < p.b)) {
      throw NumericFailure("integrate: panel cannot be bisected further");
    }
    Panel lp = make_panel(p.a, mid, p.left);
    Panel rp = make_panel(mid, p.b, p.right);
    total += lp.fine + rp.fine - p.fine;
    err += lp.error() + rp.error() - p.error();
    queue.push(lp);
    queue.push(rp);
    ++panels;
    // Re-sum periodically so the running totals do not drift.
    if (panels % 256 == 0) {
      auto copy = queue;
      total = 0.0;
      err = 0.0;
      while (!copy.empty()) {
        total += copy.top().fine;
        err += copy.top().error();
        copy.pop();
      }
    }
  }
  return total;
}

double integrate_unit(const std::function<double(double)>& f, double tol) {
  return integrate(f, 0.0, 1.0, tol);
}

}  // namespace ginprod::specfn
