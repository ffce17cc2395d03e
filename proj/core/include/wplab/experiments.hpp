#pragma once

#include "wplab/fit.hpp"
#include "wplab/interaction.hpp"
#include "wplab/profile.hpp"
#include "wplab/scenario.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace wplab {

/// Monitored norms of one run at the shared snapshot times.
struct ErrorSeries {
  double eps = 0.0;
  std::vector<double> t;
  std::vector<double> w_L2;
  std::vector<double> w_Heps1;
  std::vector<double> theta_L2;
  std::vector<double> theta_Heps1;
  std::vector<double> theta_L4_scaled;  // eps^{d/8} ||theta||_{L^4}
  std::vector<double> minus_mass;       // ||Pi_minus psi||_{L^2}
  std::vector<double> mass_drift;       // relative
  std::vector<double> g_Heps1;          // max over packets of ||g_j||_{H_eps^1}

  // Run metadata.
  GridSpec grid{};
  double dt = 0.0;
  std::size_t steps = 0;
  double max_profile_leak = 0.0;
  bool stopped_early = false;
  double wall_seconds = 0.0;

  std::size_t size() const { return t.size(); }
  bool all_finite() const;
};

double sup(const std::vector<double>& v);

/// Runs one ladder point end to end: trajectories, profiles, full system, optional correction.
/// `records` may be passed in to share trajectories across the ladder.
ErrorSeries run_series(const Scenario& scenario, double eps,
                       std::vector<std::shared_ptr<const TrajectoryRecord>> records = {});

/// Called once per finished ladder point (serialized across workers). Not thread-safe to set
/// while a ladder is running.
using ProgressCallback = std::function<void(const ErrorSeries&)>;
void set_progress_callback(ProgressCallback callback);

/// Runs the ladder on `workers` threads; the result is ordered like `eps_ladder`.
/// Trajectories are integrated once unless supplied.
std::vector<ErrorSeries> run_ladder(const Scenario& scenario, const std::vector<double>& eps_ladder,
                                    std::size_t workers = 1,
                                    std::vector<std::shared_ptr<const TrajectoryRecord>> records = {});

/// Parses "2^-2..2^-8" or a comma-separated list ("0.25, 2^-3").
std::vector<double> parse_ladder(const std::string& text);
std::vector<double> default_ladder(int dim);

struct Gate {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct FitRow {
  std::string quantity;
  LinearFit fit;
};

struct BreakdownRow {
  double eps = 0.0;
  std::optional<double> t_star;  // empty: NotReached before T
};

struct ExperimentReport {
  std::string experiment;
  std::string scenario;
  std::vector<ErrorSeries> series;
  std::vector<FitRow> fits;
  std::vector<Gate> gates;
  std::vector<std::string> notes;
  std::vector<BreakdownRow> breakdown;
  std::vector<InteractionReport> interaction;
  std::optional<GrowthReport> growth;

  bool passed() const;
  const Gate* find_gate(const std::string& name) const;
};

/// Mass, strict monotone decrease of sup ||w||_{H_eps^1}, theta order, bootstrap and decoupling gates.
ExperimentReport run_main_convergence(const Scenario& scenario, const std::vector<double>& eps_ladder,
                                      std::size_t workers = 1);

/// d = 3 smoke run on fewer than four ladder points: mass gate and finiteness only, no fits.
ExperimentReport run_smoke(const Scenario& scenario, const std::vector<double>& eps_ladder, std::size_t workers = 1);

/// Same study with eta^eps added to the data. gamma0 <= d/8 is run but flagged.
ExperimentReport run_perturbed_data(Scenario scenario, double gamma0, const std::vector<double>& eps_ladder,
                                    std::size_t workers = 1);

/// t*(eps) = first snapshot time with ||w||_{H_eps^1} > threshold, with log and log-log fits.
ExperimentReport run_breakdown_time(Scenario scenario, const std::vector<double>& eps_ladder, double threshold,
                                    std::size_t workers = 1);

/// Two-packet error series. Different modes require a positive energy-gap constant
/// (GammaError otherwise); identical phase-space points on one mode are rejected (ConfigError).
ExperimentReport run_superposition(const Scenario& scenario, const std::vector<double>& eps_ladder,
                                   std::size_t workers = 1, double gamma = 0.25);

/// Interaction interval of the two packet centres along the ladder: exact identity
/// |I| <= N max|J|, order of |I| against eps (>= 0.9 gamma when crossings occur) and,
/// for different modes, positivity of the separation acceleration on I.
ExperimentReport run_interaction(const Scenario& scenario, const std::vector<double>& eps_ladder, double gamma);

/// Profile growth functionals along the first packet's trajectory.
ExperimentReport run_growth(const Scenario& scenario, std::size_t samples, double dt);

/// Potential assumption audit on [-10, 10]^d plus, for different modes, the energy-gap constant.
ExperimentReport run_audit(const Scenario& scenario);

/// Bootstrap boundedness: max over the ladder of eps^{d/8} sup_t ||theta||_{L^4} <= 3 x median.
Gate bootstrap_diagnostics(const std::vector<ErrorSeries>& series);

/// Mass drift gate: relative drift <= 1e-8 max(1, T) for every run.
Gate mass_gate(const std::vector<ErrorSeries>& series, double T);

/// Strictly decreasing sup of a quantity along the ladder, compared at 1e-6 granularity.
Gate monotone_gate(const std::string& name, const std::vector<ErrorSeries>& series,
                   std::vector<double> ErrorSeries::*column);

/// sup_t ||Pi_minus psi|| <= sup_t ||w||_{H_eps^1} for every eps and decreasing along the ladder.
Gate decoupling_gate(const std::vector<ErrorSeries>& series);

/// Order fits of the sup norms: w_L2, w_Heps1, theta_L2, theta_Heps1, minus_mass.
std::vector<FitRow> standard_fits(const std::vector<ErrorSeries>& series);

}  // namespace wplab
