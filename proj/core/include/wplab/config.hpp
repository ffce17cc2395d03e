#pragma once

#include "wplab/experiments.hpp"
#include "wplab/scenario.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace wplab {

enum class ExperimentKind { main, perturbed, breakdown, superposition_diff, superposition_same, interaction, growth, audit };

ExperimentKind parse_experiment_kind(const std::string& id);
std::string to_string(ExperimentKind kind);

/// A parsed run configuration. Keys live in INI sections:
///   [run]         experiment, name, dim, ladder, Lambda, beta, T, dt, snapshots, correction, workers
///   [potential]   id (bump | rotation | constant_diagonal | quadratic) and its parameters
///   [packet1]     x0, xi0, mode, envelope, width     ([packet2] likewise)
///   [grid]        half_width, points, padding, profile_points, profile_half_width
///   [interaction] gamma
///   [perturbed]   gamma0, width
///   [breakdown]   threshold
///   [growth]      samples, dt
///   [output]      dir
/// Vectors are whitespace or comma separated.
struct SimConfig {
  ExperimentKind experiment = ExperimentKind::main;
  Scenario scenario;
  std::string potential_id = "bump";
  /// Resolved potential parameters (defaults filled in), in echo order.
  std::vector<std::pair<std::string, double>> potential_params;
  std::vector<double> ladder;
  std::size_t workers = 1;
  double gamma = 0.25;
  double gamma0 = 0.5;
  double perturbation_width = 0.5;
  double breakdown_threshold = 0.5;
  std::size_t growth_samples = 64;
  double growth_dt = 1e-3;
  std::filesystem::path output_dir = "out";
  /// Resolved configuration in canonical form, echoed into every artifact directory.
  std::string echo;
};

/// Throws ConfigError for malformed or inconsistent input.
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::filesystem::path& path);

/// Canonical INI text of every resolved key.
std::string render_config(const SimConfig& cfg);

struct PointEstimate {
  double eps = 0.0;
  GridSpec grid{};
  std::size_t steps = 0;
  double memory_bytes = 0.0;
  double runtime_seconds = 0.0;
  std::string resolution_violation;  // empty when the resolution rule holds
};

struct ValidationReport {
  std::vector<PointEstimate> points;
  std::vector<std::string> warnings;
  std::vector<std::string> errors;
  double memory_budget_bytes = 2.0 * 1024.0 * 1024.0 * 1024.0;

  bool ok() const { return errors.empty(); }
};

/// Dry run: scenario checks, potential audit, per-point grid, memory and runtime estimates.
/// Throws ConfigError only for problems parse_config could not see.
ValidationReport validate_config(const SimConfig& cfg);
std::string render_validation(const ValidationReport& report);

/// Executes the configured experiment on `cfg.workers` threads.
ExperimentReport run_config(const SimConfig& cfg);

/// Runs, then writes the artifact directory. Returns the report.
ExperimentReport run_and_write(const SimConfig& cfg, const std::filesystem::path& dir);

}  // namespace wplab
