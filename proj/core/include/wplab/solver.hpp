#pragma once

#include "wplab/fft.hpp"
#include "wplab/field.hpp"
#include "wplab/potential.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace wplab {

/// exp(-i scale (V + nl_phase Id)) for a real symmetric V = rho0 Id + rho sz + omega sx,
/// in closed form. m = sqrt(rho^2 + omega^2) = 0 yields the pure phase.
Eigen::Matrix2cd pauli_exponential(const Eigen::Matrix2d& V, double nl_phase, double scale);

/// beta_c = 1 + d / 2
double critical_beta(int dim);

struct EvolutionConfig {
  double eps = 0.125;
  double Lambda = 0.0;
  /// Defaults to the critical exponent.
  std::optional<double> beta;
  /// Requested step; the effective step is min(eps / 20, dt) shrunk to hit the snapshots.
  double dt = 1e-3;
  double T = 1.0;
  /// Snapshots are evenly spaced on (0, T] (plus t = 0).
  std::size_t snapshots = 64;
  /// Relative L2 drift that aborts a run.
  double mass_drift_limit = 1e-7;

  double beta_or_critical(int dim) const { return beta.value_or(critical_beta(dim)); }
};

/// Uniform time stepping aligned with evenly spaced snapshots.
struct TimeGrid {
  std::size_t steps = 0;
  std::size_t stride = 1;  // steps between snapshots
  double dt = 0.0;
  double T = 0.0;

  std::size_t snapshot_count() const { return steps / stride; }
  double snapshot_time(std::size_t k) const { return double(k * stride) * dt; }
};

TimeGrid make_time_grid(double eps, double dt_user, double T, std::size_t snapshots);

/// Strang splitting for i eps psi_t = -(eps^2/2) Lap psi + V psi + Lambda eps^beta |psi|^2 psi.
class FullSystemStepper {
 public:
  FullSystemStepper(const MatrixPotentialModel& model, GridSpec grid, double eps, double Lambda, double beta,
                    double dt);

  void step(ComplexField& psi);
  const GridSpec& grid() const { return grid_; }
  double dt() const { return dt_; }

 private:
  GridSpec grid_;
  double eps_;
  double nl_coeff_;  // Lambda eps^{beta - 1}
  double dt_;
  Fft fft_;
  std::vector<cplx> kinetic_half_;
  // Potential substep factors per node: e^{-i rho0 tau}, cos(m tau), sin(m tau) rho/m, sin(m tau) omega/m.
  std::vector<cplx> phase0_;
  std::vector<double> cos_;
  std::vector<double> s_rho_;
  std::vector<double> s_omega_;
};

using SnapshotObserver = std::function<void(std::size_t index, double t, const ComplexField& field)>;

struct EvolutionSummary {
  TimeGrid time;
  double max_relative_mass_drift = 0.0;
};

/// Evolves a two-component psi0; `observer` sees the state at every snapshot, including t = 0.
/// Throws ResolutionError when the grid cannot carry wavenumbers up to xi_max and
/// MassDriftError when the relative L2 drift exceeds the configured limit.
EvolutionSummary evolve_full(const ComplexField& psi0, const MatrixPotentialModel& model,
                             const EvolutionConfig& config, double xi_max, const SnapshotObserver& observer);

/// Convenience form that stores every snapshot.
std::vector<FieldSnapshot> evolve_full(const ComplexField& psi0, const MatrixPotentialModel& model,
                                       const EvolutionConfig& config, double xi_max);

/// r(t, x) = sigma (-i / 2) grad alpha(x) . xi(t), sigma = +1 for a plus packet and -1 for a
/// minus packet. Stores grad alpha on the grid; r is assembled on demand.
class SourceTerm {
 public:
  SourceTerm(const MatrixPotentialModel& model, const GridSpec& grid, Mode packet_mode);

  /// out = r(t) * phi, with xi = xi(t).
  void apply(const ComplexField& phi, const Point& xi, ComplexField& out) const;
  /// sup_x |r(t, x)| for the given momentum.
  double sup_norm(const Point& xi) const;
  Mode packet_mode() const { return mode_; }
  /// True when grad alpha vanishes on the whole grid (no coupling, g stays zero).
  bool vanishes() const { return vanishes_; }

 private:
  GridSpec grid_;
  Mode mode_;
  std::vector<double> grad_alpha_;  // node-major, dim entries per node
  bool vanishes_ = true;
};

/// Strang splitting for i eps g_t = -(eps^2/2) Lap g + lambda(x) g + f(t), with the source
/// entering as a midpoint increment: K/2 P/2 [g += dt/(i eps) f(t + dt/2)] P/2 K/2.
class DrivenScalarStepper {
 public:
  DrivenScalarStepper(const MatrixPotentialModel& model, Mode potential_mode, GridSpec grid, double eps,
                      double dt);

  void step(ComplexField& g, const ComplexField* source_mid);
  const GridSpec& grid() const { return grid_; }

 private:
  void half_propagate(ComplexField& g, bool kinetic_first);

  GridSpec grid_;
  double eps_;
  double dt_;
  Fft fft_;
  std::vector<cplx> kinetic_half_;
  std::vector<cplx> potential_half_;
};

/// Source supplier for the driven equation: fills f(t) for the requested time.
using SourceFunction = std::function<void(double t, ComplexField& out)>;

/// Evolves g from g0 under the driven equation; the observer sees every snapshot.
EvolutionSummary evolve_driven_scalar(const ComplexField& g0, const MatrixPotentialModel& model, Mode potential_mode,
                                      const SourceFunction& source, const EvolutionConfig& config,
                                      const SnapshotObserver& observer);

/// Per-snapshot CSV row of the full evolution.
struct RunRow {
  double t = 0.0;
  double mass = 0.0;
  double minus_mass = 0.0;
  double h_eps1 = 0.0;
};

/// Columns t, mass, minus_mass, h_eps1.
void write_run_csv(const std::vector<RunRow>& rows, const std::filesystem::path& path);

}  // namespace wplab
