#pragma once

#include "wplab/classical.hpp"
#include "wplab/field.hpp"
#include "wplab/grid.hpp"
#include "wplab/potential.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wplab {

struct PacketSpec {
  Point x0;
  Point xi0;
  Mode mode = Mode::plus;
  Envelope envelope{};
  cplx amplitude{1.0, 0.0};

  PacketParams params() const { return {x0, xi0, envelope, mode, amplitude}; }
};

/// Deterministic smooth perturbation added to the initial data, scaled so that its
/// H_eps^1 norm equals eps^gamma0.
struct PerturbationSpec {
  double gamma0 = 0.5;
  Point center;
  double width = 0.5;
  /// Oscillation of the bump, in units of 1/eps.
  Point frequency;
};

/// Everything that defines one ladder point apart from eps.
struct Scenario {
  std::string name = "scenario";
  ModelPtr model;
  double Lambda = 0.0;
  std::optional<double> beta;
  double T = 1.0;
  double dt = 1e-3;
  std::size_t snapshots = 64;
  std::vector<PacketSpec> packets;
  std::optional<PerturbationSpec> perturbation;

  /// Add the eps g chi correction and track theta.
  bool correction = true;
  /// Profile (y) grid.
  std::size_t profile_points = 128;
  double profile_half_width = 12.0;
  /// Extra x-box room beyond the scaled profile box.
  double grid_padding = 0.25;
  /// Fixed x-grid instead of the eps-dependent default.
  std::optional<double> grid_half_width;
  std::optional<std::size_t> grid_points;

  TrajectoryOptions trajectory{};
  /// Stop the run at the first snapshot where ||w||_{H_eps^1} exceeds this.
  std::optional<double> stop_threshold;

  int dim() const { return model ? model->dim() : 0; }
};

/// Validates the ingredients that do not depend on eps; throws ConfigError.
void validate_scenario(const Scenario& s);

/// One trajectory per packet over [0, T].
std::vector<std::shared_ptr<const TrajectoryRecord>> scenario_trajectories(const Scenario& s);

/// Largest |xi(t)| over the trajectories.
double max_momentum(const std::vector<std::shared_ptr<const TrajectoryRecord>>& records);

/// Symmetric x-box containing every trajectory plus the scaled profile box and padding, with the
/// smallest power-of-two point count meeting the resolution rule. Overrides win when set.
GridSpec choose_grid(const Scenario& s, double eps, const std::vector<std::shared_ptr<const TrajectoryRecord>>& records);

/// inf over x of |E_1 - E_2 - (lambda_plus(x) - lambda_minus(x))| for packets on different modes,
/// sampled over `box` (random and lattice points) and along rays out to |x| = 1e6. Exactly 0 when the
/// samples straddle E_1 - E_2.
double energy_gap_constant(const MatrixPotentialModel& model, double E_plus, double E_minus, const AuditBox& box,
                           std::size_t samples = 20000);

namespace scenarios {

/// d-dimensional bump-coupling model with a single plus packet crossing the coupling region.
Scenario main_convergence(int dim);
/// Plus and minus packets with distinct energies (the energy-gap constant is positive).
Scenario superposition_different_modes();
/// Two plus packets on head-on crossing trajectories.
Scenario superposition_same_mode();
/// Single plus packet that escapes to infinity through the coupling region; run to large T.
Scenario breakdown();
/// Lambda = 0, V = diag(1, -1): the ansatz is exact.
Scenario constant_diagonal_control(int dim);

}  // namespace scenarios

}  // namespace wplab
