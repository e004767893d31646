// Acceptance run: one PASS/FAIL line per criterion, tolerances and time
// budgets pinned below. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "ginprod/exact.hpp"
#include "ginprod/ginibre.hpp"
#include "ginprod/schur.hpp"
#include "ginprod/stats.hpp"
#include "ginprod/theory.hpp"

using namespace ginprod;

namespace {

constexpr std::uint64_t kSeed = 20240101;

int worker_threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void criterion(int id, double budget_seconds, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs <= budget_seconds;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("criterion %2d: %s  %s [%.2f s of %.0f s%s]\n", id, pass ? "PASS" : "FAIL",
              o.detail.c_str(), secs, budget_seconds, in_time ? "" : ", over budget");
  std::fflush(stdout);
}

// Shared N = m = 50, 200-sample run for the variance and histogram checks.
const SimulationResult& fig_run() {
  static const SimulationResult r = [] {
    SimulationConfig c;
    c.N = 50;
    c.m = 50;
    c.samples = 200;
    c.seed = kSeed;
    c.threads = worker_threads();
    return run_simulation(c);
  }();
  return r;
}

}  // namespace

int main() {
  criterion(1, 1.0, [] {
    const double r = theory::r_ratio(1.0);
    return Outcome{std::fabs(r - 0.45) <= 0.01, fmt("r(1) = %.6f, target 0.45 +- 0.01", r)};
  });

  criterion(2, 5.0, [] {
    const double r = theory::r_ratio(1e-4);
    const double limit = 2.0 - std::sqrt(2.0);
    const double gap = std::fabs(r - limit);
    return Outcome{gap <= 2e-2, fmt("r(1e-4) = %.6f, |r - (2 - sqrt 2)| = %.2e <= 2e-2", r, gap)};
  });

  criterion(3, 30.0, [] {
    double worst_c = 0.0, worst_s = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double alpha = std::pow(10.0, -3.0 + 6.0 * i / 19.0);
      worst_c = std::max(worst_c, std::fabs(theory::c_closed(alpha) - theory::c_integral(alpha)));
      worst_s = std::max(worst_s, std::fabs(theory::s_direct(alpha) - theory::s_alt(alpha)));
    }
    return Outcome{worst_c <= 1e-9 && worst_s <= 1e-8,
                   fmt("max |c_closed - c_integral| = %.2e <= 1e-9, max |s_direct - s_alt| = %.2e <= 1e-8",
                       worst_c, worst_s)};
  });

  criterion(4, 60.0, [] {
    const double E = exact::expected_real_count(4, 500);
    const double V = exact::variance_real_count(4, 500);
    return Outcome{std::fabs(E - 4.0) <= 1e-3 && V / E <= 1e-2,
                   fmt("E_4(500) = %.9f (|E - 4| <= 1e-3), V/E = %.2e <= 1e-2", E, V / E)};
  });

  criterion(5, 120.0, [] {
    const double E = exact::expected_real_count(2, 1);
    SimulationConfig c;
    c.N = 2;
    c.m = 1;
    c.samples = 1000000;
    c.seed = kSeed;
    c.threads = worker_threads();
    const SimulationResult r = run_simulation(c);
    const stats::SummaryStats s = stats::summarize_counts(r.spectra);
    const double z = (s.mean - E) / s.std_error_mean;
    const bool ok = r.excluded == 0 && std::fabs(z) <= 3.0 && std::fabs(E - 1.4142) <= 1e-4 &&
                    std::fabs(s.mean - 1.4142) <= 0.01;
    return Outcome{ok, fmt("exact E_2(1) = %.8f, MC mean = %.5f +- %.5f (z = %+.2f, |z| <= 3)", E,
                           s.mean, s.std_error_mean, z)};
  });

  criterion(6, 300.0, [] {
    bool ok = true;
    std::string detail;
    for (double alpha : {0.2, 1.0, 5.0}) {
      const double c = theory::c_closed(alpha);
      const double d50 =
          std::fabs(exact::expected_real_count(50, static_cast<int>(std::lround(alpha * 50))) / 50.0 - c);
      const double d100 =
          std::fabs(exact::expected_real_count(100, static_cast<int>(std::lround(alpha * 100))) / 100.0 - c);
      ok = ok && d50 <= 0.05 && d100 < d50;
      detail += fmt("alpha=%g: |E/N - c| %.4f (N=50) -> %.4f (N=100); ", alpha, d50, d100);
    }
    detail += "need N=50 gap <= 0.05 and shrinking";
    return Outcome{ok, detail};
  });

  criterion(7, 30.0, [] {
    const int N = 200, m = 200;
    double worst = 0.0;
    for (double t : {0.2, 0.5, 0.8}) {
      const int j = static_cast<int>(std::lround(t * N / 2));
      for (int l : {-1, 0, 1}) {
        const double b = exact::b_coeff({double(j), double(j + l), m});
        worst = std::max(worst, std::fabs(b - exact::b_asymptotic(t, l, 1.0)));
      }
    }
    return Outcome{worst <= 2e-2, fmt("max |b - b_asymptotic| over t in {0.2,0.5,0.8}, l in {-1,0,1} = %.2e <= 2e-2", worst)};
  });

  criterion(8, 120.0, [] {
    const SimulationResult& r = fig_run();
    const stats::SummaryStats s = stats::summarize_counts(r.spectra);
    const double ve = exact::variance_real_count(50, 50) / exact::expected_real_count(50, 50);
    const double r1 = theory::r_ratio(1.0);
    const double z = (s.var_over_mean - ve) / s.var_over_mean_se;
    const bool ok = r.excluded == 0 && std::fabs(z) <= 3.0 && std::fabs(ve - r1) <= 0.08;
    return Outcome{ok, fmt("MC Var/Mean = %.4f +- %.4f vs exact V/E = %.5f (z = %+.2f); |V/E - r(1)| = %.4f <= 0.08",
                           s.var_over_mean, s.var_over_mean_se, ve, z, std::fabs(ve - r1))};
  });

  criterion(9, 120.0, [] {
    const SimulationResult& r = fig_run();
    const stats::Histogram h = stats::histogram_lambda(r.spectra, 25, -1.0, 1.0);
    const stats::DensityComparison cmp = stats::compare_to_density(h, 1.0);
    const double mass = theory::trapezoid_mass(theory::density_curve(1.0, 2001));
    const bool ok = r.excluded == 0 && cmp.sup_norm <= 0.12 && std::fabs(mass - 1.0) <= 1e-6;
    return Outcome{ok, fmt("histogram sup-norm to rho_1 = %.4f <= 0.12 (chi2 = %.1f on %d bins); trapezoid mass - 1 = %.1e",
                           cmp.sup_norm, cmp.chi_square, cmp.chi_square_bins, mass - 1.0)};
  });

  criterion(10, 300.0, [] {
    std::vector<std::string> broken;

    // Contour-offset invariance.
    double worst_offset = 0.0;
    for (double j : {1.0, 2.0, 3.0, 5.0}) {
      for (double k : {1.0, 2.0, 3.5, 6.0}) {
        for (int m : {1, 2, 5, 10}) {
          const exact::BjkRequest req{j, k, m};
          const double ref = exact::b_coeff(req);
          for (double offset : {-0.1, -0.2, -0.35}) {
            const double v = exact::b_coeff(req, exact::contour_at(req, offset));
            worst_offset = std::max(worst_offset, std::fabs(v - ref));
          }
        }
      }
    }
    if (worst_offset > 1e-8) broken.push_back("contour offset");

    // Parity and conjugate-pair bookkeeping.
    for (int N : {2, 4, 10, 50}) {
      for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        SimulationConfig c;
        c.N = N;
        c.m = N;
        c.samples = N == 50 ? 10 : 100;
        c.seed = seed;
        c.threads = worker_threads();
        const SimulationResult r = run_simulation(c);
        for (const RealSpectrum& s : r.spectra) {
          if (s.count % 2 != 0 || s.count + 2 * s.complex_pairs != N) {
            broken.push_back("parity N=" + std::to_string(N));
            break;
          }
        }
        if (r.excluded != 0) broken.push_back("excluded samples N=" + std::to_string(N));
      }
    }

    // Positive-scalar count invariance.
    for (long i = 0; i < 50; ++i) {
      RngStream s(kSeed, i);
      const ScaledProduct p = product_scaled(12, 6, s, 1);
      const int base = extract_real_spectrum(real_schur_form(p.matrix), 0.0, 6).count;
      for (double k : {1e-6, 1e6}) {
        SquareMatrix scaled = p.matrix;
        for (double& v : scaled.values) v *= k;
        if (extract_real_spectrum(real_schur_form(scaled), 0.0, 6).count != base) {
          broken.push_back("scalar invariance");
        }
      }
    }

    // Renormalization-period neutrality.
    for (ProductMethod method : {ProductMethod::direct, ProductMethod::periodic}) {
      SimulationConfig c;
      c.N = 10;
      c.m = 30;
      c.samples = 30;
      c.seed = kSeed;
      c.method = method;
      const SimulationResult ref = run_simulation(c);
      for (int period : {5, 50}) {
        c.rescale_period = period;
        const SimulationResult r = run_simulation(c);
        for (std::size_t i = 0; i < r.spectra.size(); ++i) {
          bool same = r.spectra[i].count == ref.spectra[i].count;
          for (int q = 0; same && q < r.spectra[i].count; ++q) {
            same = std::fabs(r.spectra[i].lambdas[q] - ref.spectra[i].lambdas[q]) <= 1e-8;
          }
          if (!same) {
            broken.push_back("period neutrality");
            break;
          }
        }
      }
    }

    // Determinism across thread counts.
    {
      SimulationConfig c;
      c.N = 20;
      c.m = 20;
      c.samples = 40;
      c.seed = kSeed;
      c.threads = 1;
      const SimulationResult one = run_simulation(c);
      for (int t : {2, 5}) {
        c.threads = t;
        if (!(run_simulation(c).spectra == one.spectra)) broken.push_back("thread determinism");
      }
    }

    std::string detail = fmt("contour offsets max dev %.1e <= 1e-8; parity; scalar 1e-6/1e6; periods 1/5/50; threads 1/2/5", worst_offset);
    if (!broken.empty()) {
      detail += "; broken:";
      for (const auto& b : broken) detail += " " + b;
    }
    return Outcome{broken.empty(), detail};
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures;
}
