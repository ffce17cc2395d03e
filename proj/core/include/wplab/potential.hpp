#pragma once

#include "wplab/types.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace wplab {

/// Value, gradient and Hessian of a scalar function at one point.
struct Jet {
  double value = 0.0;
  Point grad;
  SymMat hess;

  static Jet zero(int dim) { return {0.0, Point::Zero(dim), SymMat::Zero(dim, dim)}; }
};

/// Smooth scalar function of x with analytic first and second derivatives.
class ScalarFunction {
 public:
  virtual ~ScalarFunction() = default;
  virtual Jet jet(const Point& x) const = 0;
  virtual double value(const Point& x) const { return jet(x).value; }
  virtual std::string describe() const = 0;
};

using ScalarFunctionPtr = std::shared_ptr<const ScalarFunction>;

namespace fn {

ScalarFunctionPtr constant(double c);
/// c <x - center>^{-p}
ScalarFunctionPtr bracket_power(double c, double p, Point center);
/// amplitude * exp(1 - 1/(1 - s)), s = |x - center|^2 / radius^2, zero for s >= 1.
/// Equals `amplitude` at the center; C-infinity with support in the closed ball.
ScalarFunctionPtr bump(double amplitude, double radius, Point center);
/// c |x|^2 / 2
ScalarFunctionPtr quadratic(double c);
ScalarFunctionPtr sum(ScalarFunctionPtr a, ScalarFunctionPtr b);
ScalarFunctionPtr product(ScalarFunctionPtr a, ScalarFunctionPtr b);
ScalarFunctionPtr cos_of(ScalarFunctionPtr f);
ScalarFunctionPtr sin_of(ScalarFunctionPtr f);

}  // namespace fn

/// Eigen-decomposition of V(x) in the half-angle gauge.
struct EigenData {
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  Eigen::Vector2d chi_plus;
  Eigen::Vector2d chi_minus;
  double gap = 0.0;
  /// Branch-resolved polarization angle atan2(omega, rho) (+ 2 pi k).
  double alpha = 0.0;

  double lambda(Mode m) const { return m == Mode::plus ? lambda_plus : lambda_minus; }
  const Eigen::Vector2d& chi(Mode m) const { return m == Mode::plus ? chi_plus : chi_minus; }
};

/// rho0, rho, omega at a point; enough to assemble V(x) without derivatives.
struct PotentialSample {
  double rho0 = 0.0;
  double rho = 0.0;
  double omega = 0.0;
};

struct AuditBox {
  Point lower;
  Point upper;
};

struct AuditReport {
  double min_gap_squared = 0.0;   // min rho^2 + omega^2 over samples and far-field probes
  double far_gap_squared = 0.0;   // min over far-field probes only
  double max_decay_ratio = 0.0;   // max <x>^p ||V - V_inf|| over the box samples
  double far_decay_ratio = 0.0;   // same quantity over far-field probes
  double max_offdiag_outside_support = 0.0;
  std::size_t samples = 0;
  bool gap_ok = false;
  bool long_range_ok = false;
  bool diagonal_outside_support_ok = false;
  std::vector<std::string> violations;

  bool passed() const { return gap_ok && long_range_ok && diagonal_outside_support_ok; }
};

/// V(x) = rho0(x) Id + [[rho, omega], [omega, -rho]](x) on R^d.
///
/// Immutable after construction and safe to share between threads.
class MatrixPotentialModel {
 public:
  MatrixPotentialModel(std::string name, int dim, ScalarFunctionPtr rho0, ScalarFunctionPtr rho,
                       ScalarFunctionPtr omega, double decay_exponent, Eigen::Matrix2d v_infinity,
                       double coupling_support_radius, double gap_floor = 1e-6);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  double decay_exponent() const { return decay_exponent_; }
  const Eigen::Matrix2d& v_infinity() const { return v_infinity_; }
  double coupling_support_radius() const { return support_radius_; }
  /// Configured delta_0: rho^2 + omega^2 at or below this is a hard GapViolation.
  double gap_floor() const { return gap_floor_; }
  /// Large-|x| limit of lambda_mode, read off V_infinity.
  double lambda_infinity(Mode m) const;

  PotentialSample sample(const Point& x) const;
  Eigen::Matrix2d eval_V(const Point& x) const;

  /// Throws GapViolation when rho^2 + omega^2 <= gap_floor(). When `alpha_ref`
  /// is given the returned angle is the 2 pi shift of atan2 closest to it.
  EigenData eigen(const Point& x, std::optional<double> alpha_ref = std::nullopt) const;
  double lambda(const Point& x, Mode m) const;

  Point grad_lambda(const Point& x, Mode m) const;
  SymMat hessian_lambda(const Point& x, Mode m) const;
  /// Gradient of alpha = atan2(omega, rho).
  Point grad_alpha(const Point& x) const;
  /// Row j holds d chi_mode / d x_j.
  FrameDerivative d_chi(const Point& x, Mode m) const;

  /// Hessian of lambda_mode differentiated along `direction` (d/dt Hess lambda(x + t v) at t = 0),
  /// by a central difference of the analytic Hessian.
  SymMat hessian_lambda_directional(const Point& x, const Point& direction, Mode m) const;

  /// Samples are drawn from a fixed-seed generator, so reports are reproducible.
  AuditReport assumption_audit(const AuditBox& box, std::size_t n_samples) const;

 private:
  double checked_gap_squared(double rho, double omega, const Point& x) const;

  std::string name_;
  int dim_;
  ScalarFunctionPtr rho0_;
  ScalarFunctionPtr rho_;
  ScalarFunctionPtr omega_;
  double decay_exponent_;
  Eigen::Matrix2d v_infinity_;
  double support_radius_;
  double gap_floor_;
};

using ModelPtr = std::shared_ptr<const MatrixPotentialModel>;

struct BumpCouplingParams {
  double rho0_amplitude = 0.5;   // c in rho0 = c <x>^{-p}
  double decay_exponent = 2.0;   // p
  double rho = 1.0;              // constant rho; sets delta_0 = rho^2
  double coupling_amplitude = 0.5;
  double coupling_radius = 1.5;
};

struct RotationParams {
  double decay_exponent = 1.0;
  double theta_amplitude = 1.0;
  double theta_radius = 1.5;
};

namespace models {

/// rho0 = c <x>^{-p}, rho constant, omega a compactly supported bump centred at 0.
ModelPtr bump_coupling(int dim, const BumpCouplingParams& params = {}, double gap_floor = 1e-6);
/// <x>^{-p} [[cos theta, sin theta], [sin theta, -cos theta]] with theta a compact bump.
/// Its gap closes at infinity; assumption_audit reports that.
ModelPtr rotation_example(int dim, const RotationParams& params = {}, double gap_floor = 1e-6);
/// lambda_plus = |x|^2 / 2, lambda_minus = |x|^2 / 2 - 2. For oracle tests only.
ModelPtr synthetic_quadratic(int dim);
/// V = diag(lambda_plus, lambda_minus) everywhere.
ModelPtr constant_diagonal(int dim, double lambda_plus, double lambda_minus);

}  // namespace models

}  // namespace wplab
