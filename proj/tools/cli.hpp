#pragma once

// Batch front-end of the mfe tool. One INI file describes one run:
//
//   [run]      command, output_dir, seed
//   [problem]  variant, lambda, measure, measure_param, measure_file,
//              side_length, resolution, dealias
//   [initial]  preset (zero|cos|bubble|random|file), amplitude, scale, sign,
//              center_x1, center_x2, max_mode, file
//   [solver]   method and every SolverOptions field
//   [continuation] lambdas (comma list) or lambda_start/lambda_stop/lambda_step
//   [blowup]   source (bubble-family|continuation), scales, radii, threshold,
//              lambda_factor
//   [tm]       scales, lambdas, bracket, direction (auto|+|-), slope_tol
//   [quantize] support, weights, masses, first_masses

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mfe/field.hpp"
#include "mfe/meanfield.hpp"
#include "mfe/solver.hpp"

namespace mfe::cli {

inline const std::vector<std::string> kCommands{"solve",      "minimize", "continue",         "blowup-scan",
                                                "tm-sweep",   "quantize", "check-assumptions"};

struct InitialConfig {
  std::string preset = "zero";
  double amplitude = 1.0;
  double scale = 10.0;
  Side sign = Side::Plus;
  std::optional<Point> center;
  int max_mode = 4;
  std::string file;
};

struct BlowupConfig {
  std::string source = "bubble-family";
  std::vector<double> scales{10.0, 20.0, 40.0};
  std::vector<double> radii;  // empty: default_radii
  double threshold = 4.0;  // a bubble's far-field minimum sits near -2.9 on the 2 pi torus
  // bubble-family: lambda = lambda_factor * int rho, so factor 1 makes
  // lambda e^v / int e^v the unit Liouville density rho
  double lambda_factor = 1.0;
};

struct TmConfig {
  std::vector<double> scales{4.0, 8.0, 16.0, 32.0};
  std::vector<double> lambdas;
  std::optional<std::pair<double, double>> bracket;
  std::string direction = "auto";
  double slope_tol = 0.05;
};

struct QuantizeConfig {
  std::vector<double> support;
  std::vector<double> weights;
  std::vector<double> masses;
  std::vector<double> first_masses;
};

struct RunConfig {
  std::string command;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  std::optional<ProblemSpec> problem;
  InitialConfig initial;
  std::string method = "newton";
  SolverOptions solver;
  std::vector<double> lambdas;
  BlowupConfig blowup;
  TmConfig tm;
  QuantizeConfig quantize;
  // flattened key = value pairs as read, for the manifest
  std::vector<std::pair<std::string, std::string>> raw;
};

struct Loaded {
  RunConfig config;
  std::vector<std::string> violations;
};

// Parses and validates without running anything. Throws IoError when the
// file cannot be read, ConfigError when it is not INI at all.
Loaded load_config(const std::filesystem::path& path);

// Executes a validated config. Exit codes: 0 success, 2 analytic outcome
// reported as data, 1 error. Always leaves manifest.json in the output
// directory once execution started.
int run(const RunConfig& config);

int main_entry(int argc, char** argv);

// SHA-256 of a file as lowercase hex.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace mfe::cli
