#include "ginprod/ginibre.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>

#include "ginprod/errors.hpp"
#include "ginprod/periodic_schur.hpp"
#include "ginprod/schur.hpp"

namespace ginprod {

namespace {

double rescale(double log_abs, int sign, int m) {
  if (sign == 0) return 0.0;
  return sign * std::exp(log_abs / m);
}

// Divide by the largest power of two not above the largest entry. Exact, so
// the period never changes the represented product.
void renormalize(ScaledProduct& p) {
  const double mx = p.matrix.max_abs();
  if (mx == 0.0) throw NumericFailure("product_scaled: zero matrix in the product");
  const int e = std::ilogb(mx);  // scaled maximum lands in [1, 2)
  for (double& v : p.matrix.values) v = std::ldexp(v, -e);
  p.log_scale += e * std::numbers::ln2;
}

}  // namespace

void validate(const SimulationConfig& c) {
  if (c.N < 2 || c.N % 2 != 0) throw std::invalid_argument("N must be even and >= 2");
  if (c.m < 1) throw std::invalid_argument("m must be >= 1");
  if (c.samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (c.rescale_period < 1) throw std::invalid_argument("rescale_period must be >= 1");
  if (!(c.schur_tol > 0.0 && c.schur_tol <= 1e-6)) {
    throw std::invalid_argument("schur_tol must lie in (0, 1e-6]");
  }
  if (c.schur_max_sweeps < 1) throw std::invalid_argument("schur_max_sweeps must be >= 1");
  if (c.threads < 1) throw std::invalid_argument("threads must be >= 1");
}

SquareMatrix sample_ginibre(int N, RngStream& stream) {
  if (N < 1) throw std::invalid_argument("sample_ginibre: N must be positive");
  SquareMatrix X(N);
  const double sd = 1.0 / std::sqrt(static_cast<double>(N));
  for (double& v : X.values) v = sd * stream.normal();
  return X;
}

ScaledProduct product_scaled(int N, int m, const std::function<SquareMatrix(int)>& factor,
                             int period) {
  if (m < 1) throw std::invalid_argument("product_scaled: m must be >= 1");
  if (period < 1) throw std::invalid_argument("product_scaled: period must be >= 1");
  ScaledProduct p;
  for (int j = 1; j <= m; ++j) {
    SquareMatrix X = factor(j);
    if (X.dim != N) throw std::invalid_argument("product_scaled: factor has wrong dimension");
    p.matrix = j == 1 ? std::move(X) : multiply(p.matrix, X);
    if (j % period == 0) renormalize(p);
  }
  if (p.matrix.max_abs() == 0.0) throw NumericFailure("product_scaled: zero matrix");
  return p;
}

ScaledProduct product_scaled(int N, int m, RngStream& stream, int period) {
  return product_scaled(N, m, [&](int) { return sample_ginibre(N, stream); }, period);
}

RealSpectrum extract_real_spectrum(const SquareMatrix& T, double log_scale, int m) {
  if (m < 1) throw std::invalid_argument("extract_real_spectrum: m must be >= 1");
  RealSpectrum out;
  const int n = T.dim;
  auto push = [&](double x) {
    if (x == 0.0) {
      out.lambdas.push_back(0.0);
    } else {
      out.lambdas.push_back(rescale(std::log(std::fabs(x)) + log_scale, x > 0 ? 1 : -1, m));
    }
  };
  for (int k = 0; k < n;) {
    if (k + 1 < n && T(k + 1, k) != 0.0) {
      // Work with the block divided by its largest entry.
      double a = T(k, k), b = T(k, k + 1), c = T(k + 1, k), d = T(k + 1, k + 1);
      const double s = std::max({std::fabs(a), std::fabs(b), std::fabs(c), std::fabs(d)});
      a /= s;
      b /= s;
      c /= s;
      d /= s;
      const double tr = a + d;
      const double det = a * d - b * c;
      const double disc = tr * tr - 4.0 * det;
      if (disc < 0.0) {
        ++out.complex_pairs;
      } else {
        const double mu1 = 0.5 * (tr + std::copysign(std::sqrt(disc), tr));
        const double mu2 = mu1 == 0.0 ? 0.0 : det / mu1;
        const double ls = log_scale + std::log(s);
        for (double mu : {mu1, mu2}) {
          if (mu == 0.0) {
            out.lambdas.push_back(0.0);
          } else {
            out.lambdas.push_back(rescale(std::log(std::fabs(mu)) + ls, mu > 0 ? 1 : -1, m));
          }
        }
      }
      k += 2;
    } else {
      push(T(k, k));
      ++k;
    }
  }
  std::sort(out.lambdas.begin(), out.lambdas.end());
  out.count = static_cast<int>(out.lambdas.size());
  return out;
}

RealSpectrum simulate_sample(const SimulationConfig& config, long index) {
  RngStream stream(config.seed, static_cast<std::uint64_t>(index));
  RealSpectrum spec;
  try {
    if (config.method == ProductMethod::direct) {
      const ScaledProduct p = product_scaled(config.N, config.m, stream, config.rescale_period);
      const SquareMatrix T =
          real_schur_form(p.matrix, config.schur_tol, config.schur_max_sweeps);
      spec = extract_real_spectrum(T, p.log_scale, config.m);
    } else {
      std::vector<SquareMatrix> factors;
      factors.reserve(config.m);
      for (int j = 0; j < config.m; ++j) factors.push_back(sample_ginibre(config.N, stream));
      const ProductEigenvalues ev =
          product_eigenvalues(std::move(factors), config.schur_tol, config.schur_max_sweeps);
      for (const LogReal& x : ev.reals) spec.lambdas.push_back(rescale(x.log_abs, x.sign, config.m));
      std::sort(spec.lambdas.begin(), spec.lambdas.end());
      spec.count = static_cast<int>(spec.lambdas.size());
      spec.complex_pairs = ev.complex_pairs;
    }
  } catch (const NumericFailure& e) {
    throw NumericFailure("sample " + std::to_string(index) + " (seed " +
                         std::to_string(config.seed) + "): " + e.what());
  }
  spec.sample_index = index;
  return spec;
}

SimulationResult run_simulation(const SimulationConfig& config) {
  validate(config);
  const long n = config.samples;
  std::vector<std::optional<RealSpectrum>> slots(n);
  std::atomic<long> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;

  auto worker = [&] {
    for (long i = next++; i < n; i = next++) {
      try {
        slots[i] = simulate_sample(config, i);
      } catch (const NumericFailure&) {
        // Leave the slot empty; counted below.
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        next = n;
      }
    }
  };

  const int threads = static_cast<int>(std::min<long>(config.threads, n));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (fatal) std::rethrow_exception(fatal);

  SimulationResult result;
  result.spectra.reserve(n);
  for (long i = 0; i < n; ++i) {
    if (slots[i]) {
      result.spectra.push_back(std::move(*slots[i]));
    } else {
      ++result.excluded;
      result.excluded_indices.push_back(i);
    }
  }
  return result;
}

}  // namespace ginprod
