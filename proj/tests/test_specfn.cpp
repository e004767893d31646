#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "ginprod/errors.hpp"
#include "ginprod/specfn.hpp"

using namespace ginprod;
using ld = long double;

namespace {

// Maclaurin series of erf in extended precision. The terms alternate and
// eventually decrease, so the first neglected term bounds the remainder.
ld erf_series(ld x) {
  ld term = x;
  ld sum = x;
  for (int n = 1; n < 400; ++n) {
    term *= -x * x / n;
    const ld add = term / (2 * n + 1);
    sum += add;
    if (std::fabs(add) < 1e-22L * std::fabs(sum) && n > x * x) break;
  }
  return sum * 2 / std::sqrt(std::numbers::pi_v<ld>);
}

// Continued fraction for erfc, evaluated bottom-up; accurate for x >= 2.
ld erfc_cf(ld x) {
  ld f = x;
  for (int n = 3000; n >= 1; --n) f = x + (n / 2.0L) / f;
  return std::exp(-x * x) / (std::sqrt(std::numbers::pi_v<ld>) * f);
}

// log Gamma by upward shift plus Stirling series, principal branch for
// Im z >= 0 (sum of principal logs of z + k is analytic there).
std::complex<ld> log_gamma_oracle(std::complex<ld> z) {
  std::complex<ld> shift = 0;
  while (std::abs(z) < 40 || z.real() < 10) {
    shift += std::log(z);
    z += 1;
  }
  const ld pi = std::numbers::pi_v<ld>;
  const std::complex<ld> z2 = 1.0L / (z * z);
  const std::complex<ld> series =
      (1.0L / 12 - z2 * (1.0L / 360 - z2 * (1.0L / 1260 - z2 * (1.0L / 1680 - z2 / 1188.0L)))) / z;
  return (z - 0.5L) * std::log(z) - z + 0.5L * std::log(2 * pi) + series - shift;
}

}  // namespace

TEST_CASE("erf basic values") {
  CHECK(specfn::erf(0.0) == 0.0);
  CHECK(specfn::erf(-0.7) == -specfn::erf(0.7));
  CHECK(std::fabs(specfn::erf(1.0) - 0.8427007929497149) <= 1e-15);
  CHECK(std::fabs(specfn::erfc(1.0) - 0.15729920705028513) <= 1e-15);
  CHECK(specfn::erfc(0.0) == 1.0);
  CHECK(specfn::erfc(30.0) == 0.0);
}

TEST_CASE("erf against the series oracle") {
  // The series cancels badly past |x| ~ 2.5; use the continued fraction there.
  for (double x = -6.0; x <= 6.0; x += 0.01) {
    const ld ax = std::fabs(x);
    const ld mag = ax <= 2.0L ? erf_series(ax) : 1.0L - erfc_cf(ax);
    const double ref = static_cast<double>(x < 0 ? -mag : mag);
    INFO("x = ", x);
    CHECK(std::fabs(specfn::erf(x) - ref) <= 1e-15);
  }
}

TEST_CASE("erfc relative accuracy in the tail") {
  for (double x = 2.0; x <= 26.0; x += 0.05) {
    const ld ref = erfc_cf(x);
    const ld rel = std::fabs((specfn::erfc(x) - ref) / ref);
    CHECK(rel <= 1e-12L);
  }
  for (double x = 0.0; x <= 2.0; x += 0.01) {
    const ld ref = 1.0L - erf_series(x);
    CHECK(std::fabs((specfn::erfc(x) - ref) / ref) <= 1e-13L);
  }
  for (double x = -6.0; x <= 0.0; x += 0.05) {
    const ld ref = x < -2.0 ? 2.0L - erfc_cf(-x) : 1.0L - erf_series(x);
    CHECK(std::fabs((specfn::erfc(x) - ref) / ref) <= 1e-13L);
  }
}

TEST_CASE("erf and erfc complement and monotonicity") {
  double prev = -1.0;
  for (double lx = -8.0; lx <= 1.0; lx += 0.01) {
    const double x = std::pow(10.0, lx);
    CHECK(std::fabs(specfn::erf(x) + specfn::erfc(x) - 1.0) <= 1e-13);
    const double e = specfn::erf(x);
    if (x < 5.5) CHECK(e > prev);
    CHECK(e <= 1.0);
    prev = e;
  }
}

TEST_CASE("complex log gamma special values") {
  CHECK(std::abs(specfn::log_gamma(std::complex<double>(1.0, 0.0))) <= 1e-15);
  const double half = 0.5 * std::log(std::numbers::pi);
  CHECK(std::abs(specfn::log_gamma(std::complex<double>(0.5, 0.0)) - half) <= 1e-14);
  double fact = 1.0;
  for (int n = 1; n <= 20; ++n) {
    if (n > 1) fact *= (n - 1);
    const auto lg = specfn::log_gamma(std::complex<double>(n, 0.0));
    CHECK(std::fabs(std::exp(lg.real()) / fact - 1.0) <= 1e-12);
    CHECK(lg.imag() == doctest::Approx(0.0));
    CHECK(std::fabs(specfn::log_gamma(static_cast<double>(n)) - std::log(fact)) <= 1e-12 * (1 + std::log(fact)));
  }
}

TEST_CASE("complex log gamma recurrence") {
  const std::complex<double> z(2.5, 3.0);
  const auto lhs = specfn::log_gamma(z + 1.0);
  const auto rhs = specfn::log_gamma(z) + std::log(z);
  CHECK(std::abs(lhs - rhs) <= 1e-12);
  for (double x = -12.35; x <= 25.0; x += 0.7) {
    for (double y : {-40.0, -3.0, -0.2, 0.0, 0.01, 1.0, 7.5, 60.0}) {
      const std::complex<double> w(x, y);
      const auto d = specfn::log_gamma(w + 1.0) - specfn::log_gamma(w) - std::log(w);
      // On the negative real axis the upper-half-plane limit is used, while
      // std::log(w) picks +i pi: the recurrence holds modulo 2 pi i there.
      if (y == 0.0 && x < 0.0) {
        CHECK(std::fabs(d.real()) <= 1e-11);
        CHECK(std::fabs(std::remainder(d.imag(), 2 * std::numbers::pi)) <= 1e-11);
      } else {
        CHECK(std::abs(d) <= 1e-11 * (1.0 + std::abs(specfn::log_gamma(w))));
      }
    }
  }
}

TEST_CASE("complex log gamma against the Stirling oracle") {
  for (double x = -9.7; x <= 30.0; x += 0.45) {
    for (double y : {0.05, 0.5, 2.0, 9.0, 35.0, 200.0}) {
      for (double sy : {1.0, -1.0}) {
        const std::complex<double> z(x, sy * y);
        std::complex<ld> ref = log_gamma_oracle(std::complex<ld>(x, y));
        if (sy < 0) ref = std::conj(ref);
        const auto got = specfn::log_gamma(z);
        const ld err = std::abs(std::complex<ld>(got.real(), got.imag()) - ref);
        CHECK(err <= 1e-13L * std::max<ld>(1.0L, std::abs(ref)));
      }
    }
  }
}

TEST_CASE("complex log gamma poles") {
  CHECK_THROWS_AS(specfn::log_gamma(std::complex<double>(0.0, 0.0)), std::domain_error);
  CHECK_THROWS_AS(specfn::log_gamma(std::complex<double>(-3.0, 0.0)), std::domain_error);
  CHECK_NOTHROW(specfn::log_gamma(std::complex<double>(-3.0, 1e-6)));
}

TEST_CASE("Gauss-Legendre rules") {
  auto r2 = specfn::gauss_legendre(2, -1.0, 1.0);
  CHECK(std::fabs(r2.apply([](double x) { return x * x; }) - 2.0 / 3.0) <= 1e-15);
  auto r16 = specfn::gauss_legendre(16, 0.0, 1.0);
  CHECK(std::fabs(r16.apply([](double) { return 1.0; }) - 1.0) <= 1e-14);
  auto r32 = specfn::gauss_legendre(32, 0.0, 1.0);
  CHECK(std::fabs(r32.apply([](double t) { return t * t * t; }) - 0.25) <= 1e-14);

  for (int n : {1, 2, 3, 5, 8, 13, 20, 40}) {
    auto r = specfn::gauss_legendre(n, 0.0, 1.0);
    for (int i = 0; i < n; ++i) {
      CHECK(r.weights[i] > 0.0);
      CHECK(r.nodes[i] > 0.0);
      CHECK(r.nodes[i] < 1.0);
      if (i > 0) CHECK(r.nodes[i] > r.nodes[i - 1]);
    }
    for (int p = 0; p <= 2 * n - 1; ++p) {
      const double got = r.apply([p](double t) { return std::pow(t, p); });
      CHECK(std::fabs(got - 1.0 / (p + 1)) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(specfn::gauss_legendre(0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(specfn::gauss_legendre(4, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("adaptive integration") {
  CHECK(std::fabs(specfn::integrate_unit([](double) { return 1.0; }, 1e-12) - 1.0) <= 1e-13);
  CHECK(std::fabs(specfn::integrate_unit([](double t) { return 1.0 / std::sqrt(t); }, 1e-9) - 2.0) <=
        1e-8);
  bool touched_zero = false;
  specfn::integrate_unit(
      [&](double t) {
        if (t == 0.0) touched_zero = true;
        return std::log(t);
      },
      1e-10);
  CHECK_FALSE(touched_zero);
  CHECK(std::fabs(specfn::integrate(
                      [](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-12) -
                  2.0) <= 1e-12);
  CHECK_THROWS_AS(specfn::integrate_unit([](double t) { return 1.0 / t; }, 1e-12), NumericFailure);
}
