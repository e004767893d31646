#include "ginprod/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ginprod/specfn.hpp"
#include "ginprod/theory.hpp"

namespace ginprod::stats {

SummaryStats summarize(const std::vector<long>& counts) {
  if (counts.size() < 2) throw std::invalid_argument("summarize: need at least 2 samples");
  const long n = static_cast<long>(counts.size());
  // Integer sums are exact, so the result does not depend on the order.
  long long sum = 0;
  for (long c : counts) sum += c;
  const double mean = static_cast<double>(sum) / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (long c : counts) {
    const double d = c - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  SummaryStats s;
  s.samples = n;
  s.mean = mean;
  s.variance = m2 / (n - 1);
  s.std_error_mean = std::sqrt(s.variance / n);
  if (mean != 0.0) {
    s.var_over_mean = s.variance / mean;
    // R = V / M; first-order propagation with the sampling covariances of
    // the mean and the variance.
    const double mu2 = m2 / n, mu3 = m3 / n, mu4 = m4 / n;
    const double var_m = mu2 / n;
    const double var_v = std::max(0.0, (mu4 - mu2 * mu2 * (n - 3.0) / (n - 1.0)) / n);
    const double cov = mu3 / n;
    const double v = s.variance;
    const double var_r = var_v / (mean * mean) - 2.0 * v * cov / (mean * mean * mean) +
                         v * v * var_m / (mean * mean * mean * mean);
    s.var_over_mean_se = std::sqrt(std::max(0.0, var_r));
  } else {
    s.var_over_mean = std::nan("");
    s.var_over_mean_se = std::nan("");
  }
  return s;
}

SummaryStats summarize_counts(const std::vector<RealSpectrum>& spectra) {
  std::vector<long> counts;
  counts.reserve(spectra.size());
  for (const RealSpectrum& s : spectra) counts.push_back(s.count);
  return summarize(counts);
}

Histogram histogram(const std::vector<double>& values, int bins, double lo, double hi) {
  if (bins < 1) throw std::invalid_argument("histogram: bins must be >= 1");
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("histogram: need finite lo < hi");
  }
  Histogram h;
  h.edges.resize(bins + 1);
  const double width = (hi - lo) / bins;
  for (int i = 0; i <= bins; ++i) h.edges[i] = lo + i * width;
  h.edges[bins] = hi;
  h.counts.assign(bins, 0);
  for (double x : values) {
    if (!(x >= lo && x <= hi)) {
      ++h.dropped;
      continue;
    }
    int b = static_cast<int>(std::floor((x - lo) / width));
    b = std::clamp(b, 0, bins - 1);
    // Guard the floor against rounding near an edge.
    while (b > 0 && x < h.edges[b]) --b;
    while (b < bins - 1 && x >= h.edges[b + 1]) ++b;
    ++h.counts[b];
    ++h.retained;
  }
  h.density.assign(bins, 0.0);
  if (h.retained > 0) {
    for (int i = 0; i < bins; ++i) {
      h.density[i] = h.counts[i] / (static_cast<double>(h.retained) * (h.edges[i + 1] - h.edges[i]));
    }
  }
  return h;
}

Histogram histogram_lambda(const std::vector<RealSpectrum>& spectra, int bins, double lo,
                           double hi) {
  std::vector<double> values;
  for (const RealSpectrum& s : spectra) values.insert(values.end(), s.lambdas.begin(), s.lambdas.end());
  return histogram(values, bins, lo, hi);
}

DensityComparison compare_to_density(const Histogram& h, double alpha) {
  if (h.empty()) throw std::invalid_argument("compare_to_density: empty histogram");
  if (!(alpha > 0.0)) throw std::invalid_argument("compare_to_density: alpha must be positive");
  DensityComparison out;
  const auto rho = [alpha](double x) { return theory::density_limit(x, alpha); };
  for (std::size_t i = 0; i + 1 < h.edges.size(); ++i) {
    const double a = h.edges[i];
    const double b = h.edges[i + 1];
    out.sup_norm = std::max(out.sup_norm, std::fabs(h.density[i] - rho(0.5 * (a + b))));
    // The limiting density lives on (-1, 1).
    const double ia = std::max(a, -1.0);
    const double ib = std::min(b, 1.0);
    if (!(ia < ib)) continue;
    const double mass = specfn::integrate(rho, ia, ib, 1e-12);
    if (!(mass > 0.0)) continue;
    const double expected = h.retained * mass;
    const double diff = h.counts[i] - expected;
    out.chi_square += diff * diff / expected;
    ++out.chi_square_bins;
  }
  return out;
}

}  // namespace ginprod::stats
