#pragma once

#include "wplab/classical.hpp"
#include "wplab/fft.hpp"
#include "wplab/field.hpp"
#include "wplab/fit.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace wplab {

/// Time-dependent symmetric matrix Q(t) and its derivative driving the profile equation.
class QSource {
 public:
  virtual ~QSource() = default;
  virtual int dim() const = 0;
  virtual SymMat Q(double t) const = 0;
  virtual SymMat Qdot(double t) const = 0;
};

using QSourcePtr = std::shared_ptr<const QSource>;

/// Q(t) = Hess lambda along a classical trajectory.
class TrajectoryQSource final : public QSource {
 public:
  explicit TrajectoryQSource(std::shared_ptr<const TrajectoryRecord> record);
  int dim() const override { return record_->dim(); }
  SymMat Q(double t) const override { return record_->Q(t); }
  SymMat Qdot(double t) const override { return record_->Qdot(t); }

 private:
  std::shared_ptr<const TrajectoryRecord> record_;
};

/// Q given by closed-form callables; used for oracle studies.
class FunctionQSource final : public QSource {
 public:
  FunctionQSource(int dim, std::function<SymMat(double)> q, std::function<SymMat(double)> qdot);
  int dim() const override { return dim_; }
  SymMat Q(double t) const override { return q_(t); }
  SymMat Qdot(double t) const override { return qdot_(t); }

 private:
  int dim_;
  std::function<SymMat(double)> q_;
  std::function<SymMat(double)> qdot_;
};

QSourcePtr constant_q(const SymMat& q);

/// Default profile box: [-12, 12)^d.
inline constexpr double kProfileHalfWidth = 12.0;
GridSpec profile_grid(int dim, std::size_t points = 128, double half_width = kProfileHalfWidth);

/// Cells next to the faces that must stay (nearly) empty.
inline constexpr std::size_t kBoundaryCells = 10;
inline constexpr double kBoundaryLeakLimit = 1e-8;

/// Throws BoundaryLeak when the mass within kBoundaryCells of a face exceeds the limit.
void check_boundary_leak(const ComplexField& u, double t);

/// Strang splitting for i u_t = -Lap u / 2 + <Q(t) y, y> u / 2 + Lambda |u|^2 u.
/// Kinetic half steps are exact Fourier multipliers; the potential substep is an exact
/// pointwise phase with Q frozen at the step midpoint.
class ProfileStepper {
 public:
  ProfileStepper(GridSpec ygrid, QSourcePtr q, double Lambda);

  /// Advances u from t to t + dt.
  void step(ComplexField& u, double t, double dt);

  const GridSpec& grid() const { return grid_; }
  double Lambda() const { return Lambda_; }
  const QSourcePtr& q_source() const { return q_; }

 private:
  void ensure_kinetic(double dt);

  GridSpec grid_;
  QSourcePtr q_;
  double Lambda_;
  Fft fft_;
  std::vector<double> k2_;  // |k|^2 per node
  std::vector<cplx> kinetic_half_;
  double kinetic_dt_ = -1.0;
};

struct ProfileState {
  ComplexField u;
  double t = 0.0;
};

struct ProfileFunctionals {
  double mass = 0.0;
  double E = 0.0;
  double V = 0.0;
  double grad_norm = 0.0;  // ||grad u||
  double y_norm = 0.0;     // || |y| u ||
  /// M[k] = max over |alpha| + |beta| <= k of ||y^alpha d^beta u||, k = 0..6.
  std::array<double, 7> M{};
};

struct ProfileSolveOptions {
  double dt = 1e-3;
  /// States are returned every `record_every` steps (plus the initial state).
  std::size_t record_every = 1;
};

/// Evolves a over [0, T]. The number of steps is ceil(T / dt) rounded up to a multiple of
/// record_every, so recorded times are evenly spaced. Throws ConfigError for Lambda < 0 and
/// BoundaryLeak when mass reaches the box faces.
std::vector<ProfileState> solve_profile(const ComplexField& a, QSourcePtr q, double Lambda, double T,
                                        const ProfileSolveOptions& options = {});

ProfileFunctionals functionals(const ProfileState& state, const QSource& q, double Lambda,
                               bool with_momenta = true);

/// |centred dE/dt - (1/2) int <Qdot y, y>|u|^2| at every interior state. States must be
/// evenly spaced in time.
std::vector<double> energy_identity_residual(const std::vector<ProfileState>& states, const QSource& q,
                                             double Lambda);

struct GrowthRow {
  double t = 0.0;
  double leak = 0.0;  // boundary mass fraction
  ProfileFunctionals f;
};

struct GrowthReport {
  std::vector<GrowthRow> rows;
  bool hypothesis_met = true;  // from the Qdot decay fit, when one is supplied
  double sup_grad_norm = 0.0;  // empirical C_1
  /// Exponential growth rate of M_6: slope of log M_6 against t.
  LinearFit m6_exponential;
  /// Power-law growth of ||y u||: slope of log ||y u|| against log(1 + t).
  LinearFit y_power;
};

GrowthReport growth_study(const ComplexField& a, QSourcePtr q, double Lambda, double T,
                          std::size_t samples = 64, double dt = 1e-3,
                          std::optional<QdotFit> qdot_fit = std::nullopt);

/// Columns t, mass, E, V, M_1..M_6 (plus leak).
void write_growth_csv(const GrowthReport& report, const std::filesystem::path& path);

/// A profile solve advanced in lock-step with another integrator, in fixed increments h.
class ProfileTrack {
 public:
  ProfileTrack(const ComplexField& a, QSourcePtr q, double Lambda, double h);

  /// Steps until the internal clock reaches t, which must be a multiple of h ahead.
  const ComplexField& advance_to(double t);
  const ComplexField& u() const { return u_; }
  double t() const { return double(steps_) * h_; }
  double step_size() const { return h_; }

 private:
  ProfileStepper stepper_;
  ComplexField u_;
  double h_;
  std::size_t steps_ = 0;
};

}  // namespace wplab
