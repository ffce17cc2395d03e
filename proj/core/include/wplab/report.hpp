#pragma once

#include "wplab/experiments.hpp"

#include <filesystem>
#include <string>

namespace wplab {

/// Shortest decimal form that round-trips a double (17 significant digits).
std::string format_double(double v);

/// Columns: t, w_L2, w_Heps1, theta_L2, theta_Heps1, theta_L4_scaled, minus_mass, mass_drift, g_Heps1.
void write_series_csv(const ErrorSeries& series, const std::filesystem::path& path);
/// Columns: quantity, order, intercept, r_squared, rms_residual, points.
void write_fits_csv(const std::vector<FitRow>& fits, const std::filesystem::path& path);

/// File name stem for a ladder point: k = -log2(eps) when eps is a power of two, else the index.
std::string series_file_name(double eps, std::size_t index);

/// Writes config.echo, series_eps_<k>.csv, fits.csv, report.txt and, when present,
/// breakdown.csv and interaction.csv into `dir` (created if needed).
void write_experiment(const ExperimentReport& report, const std::filesystem::path& dir, const std::string& config_echo);

/// Human-readable gate summary, one "PASS name: detail" / "FAIL name: detail" line per gate.
std::string render_report(const ExperimentReport& report);

}  // namespace wplab
