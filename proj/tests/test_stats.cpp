#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ginprod/exact.hpp"
#include "ginprod/ginibre.hpp"
#include "ginprod/stats.hpp"
#include "ginprod/theory.hpp"

using namespace ginprod;
using namespace ginprod::stats;

namespace {

std::vector<RealSpectrum> spectra_with_counts(const std::vector<int>& counts) {
  std::vector<RealSpectrum> out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    RealSpectrum s;
    s.sample_index = static_cast<long>(i);
    s.count = counts[i];
    s.lambdas.assign(counts[i], 0.0);
    out.push_back(s);
  }
  return out;
}

// Draws from the limiting density by rejection against a uniform envelope.
std::vector<double> sample_limit_density(double alpha, int n, std::mt19937_64& gen) {
  double peak = 0.0;
  for (int i = 1; i < 4000; ++i) peak = std::max(peak, theory::density_limit(-1.0 + i / 2000.0, alpha));
  peak *= 1.05;
  std::uniform_real_distribution<double> x(-1.0, 1.0), y(0.0, peak);
  std::vector<double> out;
  while (static_cast<int>(out.size()) < n) {
    const double v = x(gen);
    if (y(gen) < theory::density_limit(v, alpha)) out.push_back(v);
  }
  return out;
}

}  // namespace

TEST_CASE("summarize_counts on hand-checked inputs") {
  auto s = summarize_counts(spectra_with_counts({2, 2, 2}));
  CHECK(s.mean == 2.0);
  CHECK(s.variance == 0.0);
  CHECK(s.std_error_mean == 0.0);
  CHECK(s.var_over_mean == 0.0);

  s = summarize_counts(spectra_with_counts({0, 4}));
  CHECK(s.mean == 2.0);
  CHECK(s.variance == 8.0);
  CHECK(s.std_error_mean == doctest::Approx(2.0));
  CHECK(s.var_over_mean == 4.0);

  CHECK_THROWS_AS(summarize_counts(spectra_with_counts({2})), std::invalid_argument);
  CHECK_THROWS_AS(summarize_counts({}), std::invalid_argument);
}

TEST_CASE("summarize_counts is permutation invariant") {
  std::mt19937_64 gen(1);
  std::poisson_distribution<int> pois(13.0);
  std::vector<int> counts(501);
  for (int& c : counts) c = 2 * pois(gen);
  const auto a = summarize_counts(spectra_with_counts(counts));
  for (int rep = 0; rep < 5; ++rep) {
    std::shuffle(counts.begin(), counts.end(), gen);
    const auto b = summarize_counts(spectra_with_counts(counts));
    CHECK(a.mean == b.mean);
    CHECK(b.variance == doctest::Approx(a.variance).epsilon(1e-14));
  }
}

TEST_CASE("delta-method error of Var/Mean matches its replicate spread") {
  // Over many independent batches, the spread of the batch ratios is the
  // standard error the formula should predict.
  std::mt19937_64 gen(5);
  std::binomial_distribution<int> binom(25, 0.6);
  const int batches = 4000, size = 200;
  std::vector<double> ratios;
  double mean_se = 0.0;
  for (int b = 0; b < batches; ++b) {
    std::vector<long> c(size);
    for (long& x : c) x = 2 * binom(gen);
    const auto s = summarize(c);
    ratios.push_back(s.var_over_mean);
    mean_se += s.var_over_mean_se / batches;
  }
  double mu = 0.0;
  for (double r : ratios) mu += r / batches;
  double sd = 0.0;
  for (double r : ratios) sd += (r - mu) * (r - mu);
  sd = std::sqrt(sd / (batches - 1));
  CHECK(mean_se == doctest::Approx(sd).epsilon(0.05));
}

TEST_CASE("histogram conventions") {
  SUBCASE("single value") {
    const Histogram h = histogram({0.5}, 2, 0.0, 1.0);
    CHECK(h.counts == std::vector<long>{0, 1});
    CHECK(h.density == std::vector<double>{0.0, 2.0});
  }
  SUBCASE("empty input") {
    const Histogram h = histogram_lambda({}, 4, -1.0, 1.0);
    CHECK(h.empty());
    CHECK(h.counts == std::vector<long>(4, 0));
    CHECK(h.density == std::vector<double>(4, 0.0));
  }
  SUBCASE("edges, upper end and dropped values") {
    const Histogram h = histogram({-1.0, -0.5, 0.0, 0.999, 1.0, 1.0001, -1.2, std::nan("")}, 4, -1.0, 1.0);
    CHECK(h.counts == std::vector<long>{1, 1, 1, 2});
    CHECK(h.retained == 5);
    CHECK(h.dropped == 3);
  }
  SUBCASE("mass conservation") {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> d(0.0, 0.6);
    std::vector<double> v(10000);
    for (double& x : v) x = d(gen);
    for (int bins : {1, 7, 25, 100}) {
      const Histogram h = histogram(v, bins, -1.0, 1.0);
      long total = 0;
      double mass = 0.0;
      for (int i = 0; i < bins; ++i) {
        total += h.counts[i];
        mass += h.density[i] * (h.edges[i + 1] - h.edges[i]);
      }
      CHECK(total == h.retained);
      CHECK(h.retained + h.dropped == 10000);
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("bad ranges") {
    CHECK_THROWS_AS(histogram({}, 0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(histogram({}, 3, 1.0, 1.0), std::invalid_argument);
  }
}

TEST_CASE("compare_to_density") {
  const double alpha = 1.0;
  SUBCASE("histogram equal to the density at the centres") {
    Histogram h = histogram({0.1}, 10, -1.0, 1.0);
    for (int i = 0; i < 10; ++i) h.density[i] = theory::density_limit(-0.9 + 0.2 * i, alpha);
    CHECK(compare_to_density(h, alpha).sup_norm == doctest::Approx(0.0).epsilon(1e-15));
    const double before = compare_to_density(h, alpha).sup_norm;
    h.density[3] += 0.07;
    CHECK(compare_to_density(h, alpha).sup_norm >= before + 0.07 - 1e-15);
  }
  SUBCASE("samples drawn from the density itself") {
    std::mt19937_64 gen(11);
    const auto v = sample_limit_density(alpha, 200000, gen);
    // Wider range than the support: outer bins have no expected mass.
    const Histogram h = histogram(v, 30, -1.5, 1.5);
    const auto cmp = compare_to_density(h, alpha);
    CHECK(cmp.chi_square_bins == 20);
    CHECK(std::isfinite(cmp.chi_square));
    const double dof = cmp.chi_square_bins - 1;
    CHECK(std::fabs(cmp.chi_square - dof) < 5.0 * std::sqrt(2.0 * dof));
    CHECK(cmp.sup_norm < 0.03);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(compare_to_density(histogram({}, 3, -1.0, 1.0), alpha), std::invalid_argument);
  }
}

TEST_CASE("Monte Carlo counts agree with the exact moments") {
  SUBCASE("N = 50, alpha = 1") {
    SimulationConfig c;
    c.N = 50;
    c.m = 50;
    c.samples = 200;
    c.seed = 31337;
    const auto r = run_simulation(c);
    REQUIRE(r.excluded == 0);
    const auto s = summarize_counts(r.spectra);
    const double exact_fraction = exact::expected_real_count(50, 50) / 50.0;
    CHECK(std::fabs(s.mean / 50.0 - exact_fraction) <= 3.0 * s.std_error_mean / 50.0);
  }
  SUBCASE("N = 20, m = 1: Var/Mean near 2 - sqrt 2") {
    SimulationConfig c;
    c.N = 20;
    c.m = 1;
    c.samples = 10000;
    c.seed = 8;
    const auto s = summarize_counts(run_simulation(c).spectra);
    CHECK(std::fabs(s.var_over_mean - (2.0 - std::sqrt(2.0))) <= 3.0 * s.var_over_mean_se);
  }
}
