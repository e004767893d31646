#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ginprod/ginibre.hpp"

namespace ginprod::cli {

enum ExitCode : int { kOk = 0, kBadArguments = 1, kNumericFailure = 2 };

struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::uint64_t seed = 0;
  std::string tool_version;
  long excluded_samples = 0;
};

// '#' manifest lines, one header row, then data rows.
struct Csv {
  RunManifest manifest;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string render() const;
};

// Numbers in CSV cells: shortest text that reads back to the same double.
std::string number(double x);

// Exactly one of alpha and m; m = max(1, round(alpha N)).
int resolve_m(int N, std::optional<double> alpha, std::optional<int> m);

Csv theory_table(double alpha_min, double alpha_max, int steps);
Csv density_table(double alpha, int grid_points);
Csv exact_table(int N, int m, int max_moment);

struct SimulateOutput {
  Csv counts;
  Csv histogram;
  long excluded = 0;
};
SimulateOutput simulate_tables(const SimulationConfig& config, int bins,
                               std::optional<double> alpha);

// MC statistics next to the exact and limiting values, with z-scores.
Csv compare_table(const SimulationConfig& config, double alpha);

// Writes through a temporary file in the same directory and renames it, so
// a failed run never leaves a partial file. "-" means standard output.
void write_output(const std::string& path, const std::string& content);

// Entry point of the ginprod executable; returns the process exit code.
int run(int argc, const char* const* argv);

}  // namespace ginprod::cli
