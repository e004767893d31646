#include "ginprod/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <thread>
#include <unistd.h>

#include "ginprod/errors.hpp"
#include "ginprod/exact.hpp"
#include "ginprod/stats.hpp"
#include "ginprod/theory.hpp"

#ifndef GINPROD_VERSION
#define GINPROD_VERSION "unknown"
#endif

namespace ginprod::cli {

namespace {

RunManifest manifest(std::string command, std::uint64_t seed = 0) {
  RunManifest m;
  m.command = std::move(command);
  m.seed = seed;
  m.tool_version = GINPROD_VERSION;
  return m;
}

void param(RunManifest& m, std::string key, std::string value) {
  m.parameters.emplace_back(std::move(key), std::move(value));
}

std::string method_name(ProductMethod m) {
  return m == ProductMethod::periodic ? "periodic" : "direct";
}

void describe_config(RunManifest& man, const SimulationConfig& c) {
  param(man, "N", std::to_string(c.N));
  param(man, "m", std::to_string(c.m));
  param(man, "samples", std::to_string(c.samples));
  param(man, "method", method_name(c.method));
  param(man, "rescale_period", std::to_string(c.rescale_period));
  param(man, "schur_tol", number(c.schur_tol));
  param(man, "schur_max_sweeps", std::to_string(c.schur_max_sweeps));
}

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

std::string number(double x) { return fmt::format("{}", x); }

std::string Csv::render() const {
  std::string out;
  out += fmt::format("# ginprod {}\n", manifest.command);
  out += fmt::format("# tool_version: {}\n", manifest.tool_version);
  out += fmt::format("# seed: {}\n", manifest.seed);
  out += fmt::format("# excluded_samples: {}\n", manifest.excluded_samples);
  for (const auto& [k, v] : manifest.parameters) out += fmt::format("# {}: {}\n", k, v);
  out += fmt::format("{}\n", fmt::join(header, ","));
  for (const auto& row : rows) out += fmt::format("{}\n", fmt::join(row, ","));
  return out;
}

int resolve_m(int N, std::optional<double> alpha, std::optional<int> m) {
  require(alpha.has_value() != m.has_value(), "give exactly one of --alpha and --m");
  if (m) {
    require(*m >= 1, "--m must be >= 1");
    return *m;
  }
  require(*alpha > 0.0 && std::isfinite(*alpha), "--alpha must be positive");
  const double scaled = std::round(*alpha * N);
  require(scaled < 1e9, "--alpha is too large");
  return std::max(1, static_cast<int>(scaled));
}

Csv theory_table(double alpha_min, double alpha_max, int steps) {
  require(alpha_min > 0.0 && alpha_min < alpha_max && std::isfinite(alpha_max),
          "need 0 < alpha_min < alpha_max");
  require(steps >= 2, "--steps must be >= 2");
  Csv csv;
  csv.manifest = manifest("theory");
  param(csv.manifest, "alpha_min", number(alpha_min));
  param(csv.manifest, "alpha_max", number(alpha_max));
  param(csv.manifest, "steps", std::to_string(steps));
  param(csv.manifest, "grid", "log-spaced");
  // c rounds to 1 in double once alpha is in the hundreds; the complement
  // column keeps the approach to 1 visible.
  csv.header = {"alpha", "c", "s", "r", "one_minus_c"};
  const double ratio = std::log(alpha_max / alpha_min);
  for (int i = 0; i < steps; ++i) {
    double alpha = alpha_min * std::exp(ratio * i / (steps - 1));
    if (i == steps - 1) alpha = alpha_max;
    const theory::TheoryPoint p = theory::theory_point(alpha);
    csv.rows.push_back({number(alpha), number(p.c), number(p.s), number(p.r),
                        number(theory::c_complement(alpha))});
  }
  return csv;
}

Csv density_table(double alpha, int grid_points) {
  const theory::DensityCurve curve = theory::density_curve(alpha, grid_points);
  Csv csv;
  csv.manifest = manifest("density");
  param(csv.manifest, "alpha", number(alpha));
  param(csv.manifest, "grid_points", std::to_string(grid_points));
  param(csv.manifest, "trapezoid_mass", number(theory::trapezoid_mass(curve)));
  csv.header = {"lambda", "rho"};
  for (std::size_t i = 0; i < curve.lambdas.size(); ++i) {
    csv.rows.push_back({number(curve.lambdas[i]), number(curve.values[i])});
  }
  return csv;
}

Csv exact_table(int N, int m, int max_moment) {
  require(N >= 2 && N % 2 == 0, "--n must be even and >= 2");
  require(max_moment >= 0 && max_moment % 2 == 0, "--max-moment must be even and >= 0");
  const exact::ExactReport r = exact::exact_report(N, m, max_moment);
  Csv csv;
  csv.manifest = manifest("exact");
  param(csv.manifest, "N", std::to_string(N));
  param(csv.manifest, "m", std::to_string(m));
  param(csv.manifest, "max_moment", std::to_string(max_moment));
  csv.header = {"quantity", "value"};
  csv.rows.push_back({"E", number(r.expected_count)});
  csv.rows.push_back({"V", number(r.variance)});
  csv.rows.push_back({"V/E", number(r.variance / r.expected_count)});
  for (const auto& [order, value] : r.moments) {
    csv.rows.push_back({fmt::format("M_{}", order), number(value)});
  }
  return csv;
}

SimulateOutput simulate_tables(const SimulationConfig& config, int bins,
                               std::optional<double> alpha) {
  require(bins >= 1, "--bins must be >= 1");
  const SimulationResult result = run_simulation(config);
  constexpr double lo = -1.0;
  constexpr double hi = 1.0;
  SimulateOutput out;
  out.excluded = result.excluded;

  RunManifest man = manifest("simulate", config.seed);
  man.excluded_samples = result.excluded;
  if (alpha) param(man, "alpha", number(*alpha));
  describe_config(man, config);

  out.counts.manifest = man;
  out.counts.header = {"sample", "count"};
  for (const RealSpectrum& s : result.spectra) {
    out.counts.rows.push_back({std::to_string(s.sample_index), std::to_string(s.count)});
  }

  const stats::Histogram h = stats::histogram_lambda(result.spectra, bins, lo, hi);
  out.histogram.manifest = man;
  param(out.histogram.manifest, "bins", std::to_string(bins));
  param(out.histogram.manifest, "range", fmt::format("[{}, {}]", lo, hi));
  param(out.histogram.manifest, "retained", std::to_string(h.retained));
  param(out.histogram.manifest, "dropped_outside_range", std::to_string(h.dropped));
  param(out.histogram.manifest, "density", "count / (retained * bin width)");
  out.histogram.header = {"lambda_lo", "lambda_hi", "count", "density"};
  for (int i = 0; i < bins; ++i) {
    out.histogram.rows.push_back({number(h.edges[i]), number(h.edges[i + 1]),
                                  std::to_string(h.counts[i]), number(h.density[i])});
  }
  return out;
}

Csv compare_table(const SimulationConfig& config, double alpha) {
  const SimulationResult result = run_simulation(config);
  if (result.excluded > 0) {
    throw NumericFailure(fmt::format("{} samples failed in the eigensolver", result.excluded));
  }
  const stats::SummaryStats s = stats::summarize_counts(result.spectra);
  const double E = exact::expected_real_count(config.N, config.m);
  const double V = exact::variance_real_count(config.N, config.m);
  const theory::TheoryPoint t = theory::theory_point(alpha);

  Csv csv;
  csv.manifest = manifest("compare", config.seed);
  param(csv.manifest, "alpha", number(alpha));
  describe_config(csv.manifest, config);
  param(csv.manifest, "variance_estimator", "unbiased (divisor samples - 1)");
  csv.header = {"quantity", "value"};
  auto row = [&](const char* name, double v) { csv.rows.push_back({name, number(v)}); };
  row("mc_mean", s.mean);
  row("mc_mean_se", s.std_error_mean);
  row("mc_var", s.variance);
  row("mc_var_over_mean", s.var_over_mean);
  row("mc_var_over_mean_se", s.var_over_mean_se);
  row("exact_E", E);
  row("exact_V", V);
  row("exact_V_over_E", V / E);
  row("mc_mean_over_N", s.mean / config.N);
  row("exact_E_over_N", E / config.N);
  row("theory_c", t.c);
  row("theory_r", t.r);
  row("z_mean", (s.mean - E) / s.std_error_mean);
  row("z_var_over_mean", (s.var_over_mean - V / E) / s.var_over_mean_se);
  return csv;
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content << std::flush;
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += fmt::format(".tmp.{}", static_cast<long>(::getpid()));
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::invalid_argument("cannot open output file " + path);
    f << content;
    f.close();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("failed writing " + path);
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot move output into place: " + path);
  }
}

namespace {

int default_threads() {
  if (const char* env = std::getenv("GINPROD_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 4096) return static_cast<int>(v);
    throw std::invalid_argument("GINPROD_THREADS must be a positive integer");
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

struct SimFlags {
  int N = 0;
  std::optional<double> alpha;
  std::optional<int> m;
  long samples = 200;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string method = "periodic";
  int rescale_period = 1;
  double schur_tol = 1e-12;
  int max_sweeps = 300;

  void add_to(CLI::App* app) {
    app->add_option("--n", N, "matrix size (even)")->required();
    app->add_option("--alpha", alpha, "m = round(alpha N)");
    app->add_option("--m", m, "number of factors");
    app->add_option("--samples", samples, "number of independent products");
    app->add_option("--seed", seed, "64-bit seed");
    app->add_option("--threads", threads, "worker threads (default: $GINPROD_THREADS or all cores)");
    app->add_option("--method", method, "periodic or direct")
        ->check(CLI::IsMember({"periodic", "direct"}));
    app->add_option("--rescale-period", rescale_period, "direct method: renormalize every k factors");
    app->add_option("--schur-tol", schur_tol, "deflation tolerance");
    app->add_option("--max-sweeps", max_sweeps, "QR iterations allowed per eigenvalue");
  }

  SimulationConfig config() const {
    SimulationConfig c;
    c.N = N;
    require(N >= 2 && N % 2 == 0, "--n must be even and >= 2");
    c.m = resolve_m(N, alpha, m);
    c.samples = samples;
    c.seed = seed;
    c.threads = threads > 0 ? threads : default_threads();
    c.method = method == "direct" ? ProductMethod::direct : ProductMethod::periodic;
    c.rescale_period = rescale_period;
    c.schur_tol = schur_tol;
    c.schur_max_sweeps = max_sweeps;
    validate(c);
    return c;
  }
};

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Real eigenvalues of products of real Gaussian matrices"};
  app.set_version_flag("--version", GINPROD_VERSION);
  app.require_subcommand(1);

  double alpha_min = 1e-3, alpha_max = 1e3;
  int steps = 61;
  std::string out = "-";
  auto* theory_cmd = app.add_subcommand("theory", "limiting c, s, r on a log-spaced alpha grid");
  theory_cmd->add_option("--alpha-min", alpha_min);
  theory_cmd->add_option("--alpha-max", alpha_max);
  theory_cmd->add_option("--steps", steps);
  theory_cmd->add_option("--out", out, "output file, - for stdout");

  double alpha = 1.0;
  int grid_points = 401;
  auto* density_cmd = app.add_subcommand("density", "limiting density of the rescaled eigenvalues");
  density_cmd->add_option("--alpha", alpha);
  density_cmd->add_option("--grid-points", grid_points, "odd number of points on [-1, 1]");
  density_cmd->add_option("--out", out);

  int exact_N = 0;
  std::optional<double> exact_alpha;
  std::optional<int> exact_m;
  int max_moment = 4;
  auto* exact_cmd = app.add_subcommand("exact", "finite-N mean, variance and moments");
  exact_cmd->add_option("--n", exact_N)->required();
  exact_cmd->add_option("--m", exact_m);
  exact_cmd->add_option("--alpha", exact_alpha);
  exact_cmd->add_option("--max-moment", max_moment);
  exact_cmd->add_option("--out", out);

  SimFlags sim;
  int bins = 25;
  std::string out_counts, out_hist;
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo counts and eigenvalue histogram");
  sim.add_to(simulate_cmd);
  simulate_cmd->add_option("--bins", bins, "histogram bins on [-1, 1]");
  simulate_cmd->add_option("--out-counts", out_counts);
  simulate_cmd->add_option("--out-hist", out_hist);

  SimFlags cmp;
  auto* compare_cmd = app.add_subcommand("compare", "Monte Carlo against exact and limiting values");
  cmp.add_to(compare_cmd);
  compare_cmd->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadArguments;
  }

  try {
    if (*theory_cmd) {
      write_output(out, theory_table(alpha_min, alpha_max, steps).render());
    } else if (*density_cmd) {
      write_output(out, density_table(alpha, grid_points).render());
    } else if (*exact_cmd) {
      require(exact_N >= 2 && exact_N % 2 == 0, "--n must be even and >= 2");
      const int m = resolve_m(exact_N, exact_alpha, exact_m);
      write_output(out, exact_table(exact_N, m, max_moment).render());
    } else if (*simulate_cmd) {
      require(!out_counts.empty() || !out_hist.empty(), "give --out-counts and/or --out-hist");
      require(!(out_counts == "-" && out_hist == "-"), "only one output may go to stdout");
      const SimulationConfig c = sim.config();
      const SimulateOutput r = simulate_tables(c, bins, sim.alpha);
      if (r.excluded > 0) {
        throw NumericFailure(fmt::format("{} of {} samples failed in the eigensolver",
                                         r.excluded, c.samples));
      }
      if (!out_counts.empty()) write_output(out_counts, r.counts.render());
      if (!out_hist.empty()) write_output(out_hist, r.histogram.render());
    } else if (*compare_cmd) {
      const SimulationConfig c = cmp.config();
      const double a = cmp.alpha ? *cmp.alpha : static_cast<double>(c.m) / c.N;
      write_output(out, compare_table(c, a).render());
    }
  } catch (const NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadArguments;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadArguments;
  }
  return kOk;
}

}  // namespace ginprod::cli
