#pragma once

#include <vector>

#include "ginprod/ginibre.hpp"

namespace ginprod::stats {

struct SummaryStats {
  long samples = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased, divisor samples - 1
  double std_error_mean = 0.0;
  double var_over_mean = 0.0;
  double var_over_mean_se = 0.0;  // delta-method standard error
};

struct Histogram {
  std::vector<double> edges;
  std::vector<long> counts;
  std::vector<double> density;  // integrates to 1 over the retained values
  long retained = 0;
  long dropped = 0;  // values outside [lo, hi]
  bool empty() const { return retained == 0; }
};

struct DensityComparison {
  double sup_norm = 0.0;
  double chi_square = 0.0;
  int chi_square_bins = 0;  // bins with positive expected mass
};

// Throws std::invalid_argument for fewer than 2 values.
SummaryStats summarize(const std::vector<long>& counts);
SummaryStats summarize_counts(const std::vector<RealSpectrum>& spectra);

// Uniform bins on [lo, hi]; bins are left-closed, the last one also
// right-closed.
Histogram histogram_lambda(const std::vector<RealSpectrum>& spectra, int bins, double lo,
                           double hi);
Histogram histogram(const std::vector<double>& values, int bins, double lo, double hi);

// Sup-norm distance between the histogram density and the limiting density
// at the bin centres, plus Pearson's statistic of the counts against the
// limiting bin masses. Bins of zero expected mass are left out of the sum.
DensityComparison compare_to_density(const Histogram& h, double alpha);

}  // namespace ginprod::stats
