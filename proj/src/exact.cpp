#include "ginprod/exact.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ginprod/errors.hpp"
#include "ginprod/specfn.hpp"

namespace ginprod::exact {

namespace {

using cplx = std::complex<double>;

void validate(const BjkRequest& req) {
  if (!(req.j >= 1.0) || !std::isfinite(req.j)) {
    throw std::invalid_argument("b_coeff: j must be >= 1");
  }
  if (!(req.k > 0.0) || !std::isfinite(req.k)) {
    throw std::invalid_argument("b_coeff: k must be > 0");
  }
  if (req.m < 1) throw std::invalid_argument("b_coeff: m must be >= 1");
}

// log of the integrand (G(j-1/2+s) G(k-s) / (G(j-1/2) G(k)))^m / s.
class Integrand {
 public:
  explicit Integrand(const BjkRequest& req)
      : a_(req.j - 0.5),
        k_(req.k),
        m_(req.m),
        norm_(specfn::log_gamma(req.j - 0.5) + specfn::log_gamma(req.k)) {}

  cplx log_value(cplx s) const {
    return static_cast<double>(m_) *
               (specfn::log_gamma(a_ + s) + specfn::log_gamma(k_ - s) - norm_) -
           std::log(s);
  }

  // log |integrand| on the real segment (1/2 - j, 0); convex there.
  double log_abs_real(double sigma) const {
    return m_ * (specfn::log_gamma(a_ + sigma) + specfn::log_gamma(k_ - sigma) - norm_) -
           std::log(-sigma);
  }

  double strip_lo() const { return -a_; }

 private:
  double a_;
  double k_;
  int m_;
  double norm_;
};

double saddle_offset(const Integrand& f) {
  // Golden-section search; the function blows up at both ends of the strip.
  const double width = -f.strip_lo();
  double lo = f.strip_lo() + 1e-12 * width;
  double hi = -1e-12 * width;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = f.log_abs_real(x1);
  double f2 = f.log_abs_real(x2);
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * width; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f.log_abs_real(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f.log_abs_real(x2);
    }
  }
  return 0.5 * (lo + hi);
}

// Gaussian width of the integrand along the vertical line through sigma:
// log|f| is harmonic, so its vertical curvature is minus the horizontal one.
double vertical_scale(const Integrand& f, double sigma) {
  const double room = std::min(-sigma, sigma - f.strip_lo());
  const double h = 1e-3 * room;
  const double d2 =
      (f.log_abs_real(sigma + h) - 2.0 * f.log_abs_real(sigma) + f.log_abs_real(sigma - h)) /
      (h * h);
  if (!(d2 > 0.0) || !std::isfinite(d2)) return room;
  return 1.0 / std::sqrt(d2);
}

double edge_log_ratio(const Integrand& f, double sigma, double height) {
  return f.log_value(cplx(sigma, height)).real() - f.log_abs_real(sigma);
}

void check_strip(const BjkRequest& req, double offset) {
  if (!(offset > 0.5 - req.j && offset < 0.0)) {
    throw std::invalid_argument("b_coeff: contour offset " + std::to_string(offset) +
                                " outside the strip (1/2 - j, 0)");
  }
}

}  // namespace

ContourSpec contour_at(const BjkRequest& req, double offset) {
  validate(req);
  check_strip(req, offset);
  const Integrand f(req);
  ContourSpec spec;
  spec.offset = offset;
  spec.scale = vertical_scale(f, offset);
  const double target = std::log(kEdgeRatio) - std::log(100.0);
  double height = spec.scale;
  while (edge_log_ratio(f, offset, height) > target) {
    height *= 1.5;
    if (height > 1e6) {
      throw NumericFailure("b_coeff: integrand does not decay along the contour");
    }
  }
  spec.half_height = height;
  return spec;
}

ContourSpec default_contour(const BjkRequest& req) {
  validate(req);
  return contour_at(req, saddle_offset(Integrand(req)));
}

ContourResult b_coeff_detailed(const BjkRequest& req, const ContourSpec& contour) {
  validate(req);
  check_strip(req, contour.offset);
  if (!(contour.half_height > 0.0) || contour.panels < 1 || contour.nodes_per_panel < 1) {
    throw std::invalid_argument("b_coeff: invalid contour quadrature controls");
  }
  const Integrand f(req);
  const double sigma = contour.offset;
  const double log_peak = f.log_abs_real(sigma);
  if (edge_log_ratio(f, sigma, contour.half_height) >= std::log(kEdgeRatio)) {
    throw NumericFailure("b_coeff: truncation bound not met at half height " +
                         std::to_string(contour.half_height));
  }
  const double scale = contour.scale > 0.0 ? contour.scale : vertical_scale(f, sigma);
  const double u_max = std::asinh(contour.half_height / scale);

  const specfn::QuadratureRule rule = specfn::gauss_legendre(contour.nodes_per_panel, -1.0, 1.0);
  const double panel = u_max / contour.panels;
  cplx sum = 0.0;
  for (int p = 0; p < contour.panels; ++p) {
    const double mid = (p + 0.5) * panel;
    cplx part = 0.0;
    for (int i = 0; i < rule.order; ++i) {
      const double u = mid + 0.5 * panel * rule.nodes[i];
      const double y = scale * std::sinh(u);
      const double jac = scale * std::cosh(u);
      const cplx up = std::exp(f.log_value(cplx(sigma, y)) - log_peak);
      const cplx down = std::exp(f.log_value(cplx(sigma, -y)) - log_peak);
      part += rule.weights[i] * jac * (up + down);
    }
    sum += 0.5 * panel * part;
  }
  // ds = i dy, so -(1/2 pi i) \int f ds = -(1/2 pi) \int f dy.
  const double factor = -std::exp(log_peak) / (2.0 * std::numbers::pi);
  ContourResult out;
  out.value = factor * sum.real();
  out.imag_residual = std::fabs(factor * sum.imag());
  out.log_peak = log_peak;
  out.contour = contour;
  out.contour.scale = scale;
  return out;
}

double b_coeff(const BjkRequest& req, const ContourSpec& contour) {
  return b_coeff_detailed(req, contour).value;
}

double b_coeff(const BjkRequest& req) { return b_coeff(req, default_contour(req)); }

double b_asymptotic(double t, int l, double alpha) {
  if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("b_asymptotic: t must lie in (0, 1)");
  if (!(alpha > 0.0)) throw std::invalid_argument("b_asymptotic: alpha must be positive");
  return 0.5 * (1.0 + specfn::erf((2.0 * l + 1.0) * std::sqrt(alpha / (8.0 * t))));
}

BTable::BTable(int m) : m_(m) {
  if (m < 1) throw std::invalid_argument("BTable: m must be >= 1");
}

double BTable::operator()(double j, double k) {
  const auto key = std::make_pair(j, k);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  const double v = b_coeff(BjkRequest{j, k, m_});
  cache_.emplace(key, v);
  return v;
}

namespace {

void check_size(int N, int m) {
  if (N < 2 || N % 2 != 0) throw std::invalid_argument("N must be even and >= 2");
  if (m < 1) throw std::invalid_argument("m must be >= 1");
}

double expected_from(BTable& b, int N) {
  const int h = N / 2;
  double diag = 0.0;
  for (int j = 0; j <= h - 1; ++j) diag += b(j + 1, j + 1);
  double off = 0.0;
  for (int j = 0; j <= h - 2; ++j) off += b(j + 2, j + 1);
  return 2.0 * diag - 2.0 * off;
}

// Sum of the two moment families with second-index shift kappa, scaled by
// (2/N)^(m kappa). kappa = k gives M_{2k}; kappa = k/m the rescaled moment.
double moment_from(BTable& b, int N, int m, double kappa) {
  const int h = N / 2;
  const double log_pref = m * kappa * std::log(2.0 / N);
  auto ratio = [&](double top, double bottom) {
    return std::exp(log_pref +
                    m * (specfn::log_gamma(top) - specfn::log_gamma(bottom)));
  };
  double first = 0.0;
  for (int j = 0; j <= h - 1; ++j) {
    first += b(j + 1, j + kappa + 1) * ratio(j + kappa + 1, j + 1);
    first += b(j + kappa + 1, j + 1) * ratio(j + kappa + 0.5, j + 0.5);
  }
  double second = 0.0;
  for (int j = 0; j <= h - 2; ++j) {
    second += b(j + 2, j + kappa + 1) * ratio(j + kappa + 1, j + 1);
    second += b(j + kappa + 2, j + 1) * ratio(j + kappa + 1.5, j + 1.5);
  }
  return first - second;
}

void check_order(int order) {
  if (order < 0) throw std::invalid_argument("moment order must be >= 0");
}

}  // namespace

double expected_real_count(int N, int m) {
  check_size(N, m);
  BTable b(m);
  return expected_from(b, N);
}

double variance_real_count(int N, int m) {
  check_size(N, m);
  BTable b(m);
  const int h = N / 2;
  const double e = expected_from(b, N);
  double s1 = 0.0;
  for (int p = 0; p <= h - 1; ++p) {
    for (int q = 0; q <= h - 1; ++q) s1 += b(p + 1, q + 1) * b(q + 1, p + 1);
  }
  double s2 = 0.0;
  for (int p = 0; p <= h - 2; ++p) {
    for (int q = 0; q <= h - 2; ++q) s2 += b(q + 2, p + 1) * b(p + 2, q + 1);
  }
  double s3 = 0.0;
  for (int p = 0; p <= h - 2; ++p) {
    for (int q = 0; q <= h - 1; ++q) s3 += b(q + 1, p + 1) * b(p + 2, q + 1);
  }
  return 2.0 * e - 2.0 * (2.0 * s1 + 2.0 * s2 - 4.0 * s3);
}

double moment(int N, int m, int order) {
  check_size(N, m);
  check_order(order);
  if (order % 2 == 1) return 0.0;
  BTable b(m);
  return moment_from(b, N, m, order / 2);
}

double rescaled_moment(int N, int m, int order) {
  check_size(N, m);
  check_order(order);
  if (order % 2 == 1) return 0.0;
  BTable b(m);
  return moment_from(b, N, m, static_cast<double>(order / 2) / m);
}

ExactReport exact_report(int N, int m, int max_moment) {
  check_size(N, m);
  check_order(max_moment);
  ExactReport r;
  r.N = N;
  r.m = m;
  r.expected_count = expected_real_count(N, m);
  r.variance = variance_real_count(N, m);
  BTable b(m);
  for (int order = 0; order <= max_moment; ++order) {
    r.moments.emplace_back(order, order % 2 == 1 ? 0.0 : moment_from(b, N, m, order / 2));
  }
  return r;
}

}  // namespace ginprod::exact
