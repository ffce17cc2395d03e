#pragma once

#include "wplab/potential.hpp"
#include "wplab/types.hpp"

#include <filesystem>
#include <limits>
#include <vector>

namespace wplab {

enum class Integrator { dormand_prince, stormer_verlet };

struct TrajectoryOptions {
  Integrator integrator = Integrator::dormand_prince;
  /// Absolute and relative local error tolerance of the adaptive scheme.
  double tolerance = 1e-11;
  /// Upper bound on accepted steps. Keeps the cubic dense output accurate enough
  /// for phases S/eps at eps ~ 2^-9.
  double max_step = 5e-3;
  /// Fixed step of the Stormer-Verlet scheme.
  double verlet_step = 1e-3;
  std::size_t max_steps = 50'000'000;
};

struct QdotFit {
  double C = 0.0;
  /// +infinity when Qdot vanishes identically over the fit window.
  double kappa0 = std::numeric_limits<double>::infinity();
  double residual = 0.0;  // rms residual of the log-log fit
  bool degenerate = false;
  /// kappa0 > 2, the decay needed for the profile growth estimate.
  bool hypothesis_met = false;
};

struct EscapeDiagnostics {
  double energy_excess = 0.0;      // E_0 - lambda_infinity
  double min_speed_ratio = 0.0;    // min |x(t)| / t over samples with t >= T/2
  double final_virial = 0.0;       // d^2/dt^2 |x|^2 = 2|xi|^2 - 2 x.grad lambda at t = T
  bool escaping() const { return energy_excess > 0.0 && final_virial > 0.0; }
};

/// Sampled classical flow x' = xi, xi' = -grad lambda(x), S' = |xi|^2/2 - lambda(x)
/// with cubic Hermite dense output. Immutable once built.
class TrajectoryRecord {
 public:
  struct State {
    Point x;
    Point xi;
    double action = 0.0;
  };

  TrajectoryRecord() = default;

  Mode mode() const { return mode_; }
  int dim() const { return static_cast<int>(x_.empty() ? 0 : x_.front().size()); }
  const ModelPtr& model() const { return model_; }
  double final_time() const { return t_.empty() ? 0.0 : t_.back(); }
  /// Energy at t = 0.
  double energy() const { return energy_; }

  const std::vector<double>& t_samples() const { return t_; }
  const std::vector<Point>& x_samples() const { return x_; }
  const std::vector<Point>& xi_samples() const { return xi_; }
  const std::vector<double>& S_samples() const { return S_; }
  std::vector<double> energy_samples() const;
  std::vector<SymMat> Q_samples() const;

  /// Dense output; t is clamped to [0, T].
  State at(double t) const;
  /// Hess lambda_mode(x(t)).
  SymMat Q(double t) const;
  /// d/dt Q(t) = directional derivative of the Hessian along xi(t).
  SymMat Qdot(double t) const;

  /// Largest energy deviation |E(t_k) - E(0)| over the samples.
  double max_energy_drift() const;
  /// max_k |x(t_k)| and max_k |xi(t_k)|.
  double max_position() const;
  double max_momentum() const;

 private:
  friend TrajectoryRecord integrate_trajectory(ModelPtr, const Point&, const Point&, Mode, double,
                                               const TrajectoryOptions&);
  std::size_t interval(double t) const;

  ModelPtr model_;
  Mode mode_ = Mode::plus;
  double energy_ = 0.0;
  std::vector<double> t_;
  std::vector<Point> x_;
  std::vector<Point> xi_;
  std::vector<double> S_;
  std::vector<Point> force_;       // -grad lambda(x_k)
  std::vector<double> lagrangian_;  // |xi_k|^2/2 - lambda(x_k)
};

/// Throws GapViolation if the path meets the gap floor and StepFailure if the
/// adaptive controller underflows or the step budget is exhausted.
TrajectoryRecord integrate_trajectory(ModelPtr model, const Point& x0, const Point& xi0, Mode mode,
                                      double T, const TrajectoryOptions& options = {});

/// S at every sample time.
std::vector<double> action(const TrajectoryRecord& record);

/// Least-squares fit of log |Qdot| against log(1 + t) over the tail [T/2, T],
/// giving |Qdot| <= C (1 + t)^{-kappa0 - 1}. Throws FitError if T < 10.
QdotFit fit_qdot_decay(const TrajectoryRecord& record, std::size_t samples = 256);

EscapeDiagnostics escape_diagnostics(const TrajectoryRecord& record);

/// lambda(x) - lambda(x(t)) - grad lambda(x(t)).(x - x(t)) - <Q(t)(x - x(t)), x - x(t)>/2
double taylor_remainder(const MatrixPotentialModel& model, const TrajectoryRecord& record, double t,
                        const Point& x, Mode mode);

/// Columns: t, x_1..x_d, xi_1..xi_d, S, E, Q_norm, Qdot_norm (one row per accepted step).
void write_trajectory_csv(const TrajectoryRecord& record, const std::filesystem::path& path);

}  // namespace wplab
