#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ginprod/matrix.hpp"
#include "ginprod/rng.hpp"

namespace ginprod {

// X_1 * ... * X_m represented as exp(log_scale) * matrix.
struct ScaledProduct {
  SquareMatrix matrix;
  double log_scale = 0.0;
};

struct RealSpectrum {
  long sample_index = 0;
  int count = 0;
  std::vector<double> lambdas;  // rescaled real eigenvalues, ascending
  int complex_pairs = 0;

  bool operator==(const RealSpectrum&) const = default;
};

enum class ProductMethod {
  periodic,  // periodic QR on the factors; never forms the product
  direct,    // form the renormalized product, then real Schur
};

struct SimulationConfig {
  int N = 2;
  int m = 1;
  long samples = 1;
  std::uint64_t seed = 0;
  int rescale_period = 1;
  double schur_tol = 1e-12;
  int schur_max_sweeps = 300;
  ProductMethod method = ProductMethod::periodic;
  int threads = 1;
};

struct SimulationResult {
  std::vector<RealSpectrum> spectra;  // ordered by sample_index
  long excluded = 0;
  std::vector<long> excluded_indices;
};

// N x N matrix of independent Normal(0, 1/N) entries, filled row by row.
SquareMatrix sample_ginibre(int N, RngStream& stream);

// X_1 ... X_m drawn in order from the stream. Every `period` factors the
// running product is divided by the power of two nearest its largest entry.
ScaledProduct product_scaled(int N, int m, RngStream& stream, int period);

// Same with caller-supplied factors: factor(j) returns X_j, j = 1..m.
ScaledProduct product_scaled(int N, int m, const std::function<SquareMatrix(int)>& factor,
                             int period);

// Real eigenvalues of exp(log_scale) * T from a real Schur form T, rescaled
// to lambda = sign(x) |x|^(1/m).
RealSpectrum extract_real_spectrum(const SquareMatrix& T, double log_scale, int m);

// The spectrum of sample `index`: deterministic in (config.seed, index).
// Throws NumericFailure, naming the sample, if the eigensolver fails.
RealSpectrum simulate_sample(const SimulationConfig& config, long index);

// All samples; failed samples are excluded and counted. Results do not
// depend on config.threads.
SimulationResult run_simulation(const SimulationConfig& config);

void validate(const SimulationConfig& config);

}  // namespace ginprod
