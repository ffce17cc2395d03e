#include "wplab/potential.hpp"

#include "wplab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace wplab {

namespace {

class Constant final : public ScalarFunction {
 public:
  explicit Constant(double c) : c_(c) {}
  Jet jet(const Point& x) const override {
    Jet j = Jet::zero(static_cast<int>(x.size()));
    j.value = c_;
    return j;
  }
  double value(const Point&) const override { return c_; }
  std::string describe() const override {
    std::ostringstream os;
    os << "const(" << c_ << ")";
    return os.str();
  }

 private:
  double c_;
};

class BracketPower final : public ScalarFunction {
 public:
  BracketPower(double c, double p, Point center) : c_(c), p_(p), center_(std::move(center)) {}

  Jet jet(const Point& x) const override {
    const int d = static_cast<int>(x.size());
    const Point r = x - center_;
    const double b2 = 1.0 + r.squaredNorm();
    const double f = c_ * std::pow(b2, -0.5 * p_);
    Jet j;
    j.value = f;
    j.grad = (-p_ * f / b2) * r;
    j.hess = (-p_ * f / b2) *
             (SymMat::Identity(d, d) - ((p_ + 2.0) / b2) * (r * r.transpose()));
    return j;
  }
  double value(const Point& x) const override {
    return c_ * std::pow(1.0 + (x - center_).squaredNorm(), -0.5 * p_);
  }
  std::string describe() const override {
    std::ostringstream os;
    os << c_ << "*<x>^-" << p_;
    return os.str();
  }

 private:
  double c_, p_;
  Point center_;
};

class Bump final : public ScalarFunction {
 public:
  Bump(double amplitude, double radius, Point center)
      : amplitude_(amplitude), radius_(radius), center_(std::move(center)) {}

  Jet jet(const Point& x) const override {
    const int d = static_cast<int>(x.size());
    Jet j = Jet::zero(d);
    const Point r = x - center_;
    const double r2 = radius_ * radius_;
    const double s = r.squaredNorm() / r2;
    if (s >= 1.0) return j;
    const double q = 1.0 / (1.0 - s);
    const double b = amplitude_ * std::exp(1.0 - q);
    const double db = -b * q * q;
    const double ddb = b * (q * q * q * q - 2.0 * q * q * q);
    j.value = b;
    j.grad = (2.0 * db / r2) * r;
    j.hess = (4.0 * ddb / (r2 * r2)) * (r * r.transpose()) +
             (2.0 * db / r2) * SymMat::Identity(d, d);
    return j;
  }
  double value(const Point& x) const override {
    const double s = (x - center_).squaredNorm() / (radius_ * radius_);
    if (s >= 1.0) return 0.0;
    return amplitude_ * std::exp(1.0 - 1.0 / (1.0 - s));
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "bump(" << amplitude_ << ", R=" << radius_ << ")";
    return os.str();
  }

 private:
  double amplitude_, radius_;
  Point center_;
};

class Quadratic final : public ScalarFunction {
 public:
  explicit Quadratic(double c) : c_(c) {}
  Jet jet(const Point& x) const override {
    const int d = static_cast<int>(x.size());
    return {0.5 * c_ * x.squaredNorm(), c_ * x, c_ * SymMat::Identity(d, d)};
  }
  std::string describe() const override {
    std::ostringstream os;
    os << c_ << "*|x|^2/2";
    return os.str();
  }

 private:
  double c_;
};

class Sum final : public ScalarFunction {
 public:
  Sum(ScalarFunctionPtr a, ScalarFunctionPtr b) : a_(std::move(a)), b_(std::move(b)) {}
  Jet jet(const Point& x) const override {
    Jet ja = a_->jet(x);
    const Jet jb = b_->jet(x);
    ja.value += jb.value;
    ja.grad += jb.grad;
    ja.hess += jb.hess;
    return ja;
  }
  double value(const Point& x) const override { return a_->value(x) + b_->value(x); }
  std::string describe() const override { return "(" + a_->describe() + " + " + b_->describe() + ")"; }

 private:
  ScalarFunctionPtr a_, b_;
};

class Product final : public ScalarFunction {
 public:
  Product(ScalarFunctionPtr a, ScalarFunctionPtr b) : a_(std::move(a)), b_(std::move(b)) {}
  Jet jet(const Point& x) const override {
    const Jet ja = a_->jet(x);
    const Jet jb = b_->jet(x);
    Jet j;
    j.value = ja.value * jb.value;
    j.grad = ja.grad * jb.value + jb.grad * ja.value;
    j.hess = ja.hess * jb.value + jb.hess * ja.value + ja.grad * jb.grad.transpose() +
             jb.grad * ja.grad.transpose();
    return j;
  }
  double value(const Point& x) const override { return a_->value(x) * b_->value(x); }
  std::string describe() const override { return a_->describe() + "*" + b_->describe(); }

 private:
  ScalarFunctionPtr a_, b_;
};

// cos(f) or sin(f) through the chain rule.
class Trig final : public ScalarFunction {
 public:
  Trig(ScalarFunctionPtr f, bool is_sin) : f_(std::move(f)), is_sin_(is_sin) {}
  Jet jet(const Point& x) const override {
    const Jet jf = f_->jet(x);
    const double c = std::cos(jf.value);
    const double s = std::sin(jf.value);
    // g = cos f: g' = -sin f f', g'' = -cos f f'f'^T - sin f f''
    // g = sin f: g' =  cos f f', g'' = -sin f f'f'^T + cos f f''
    const double v = is_sin_ ? s : c;
    const double d1 = is_sin_ ? c : -s;
    const double d2 = -v;
    Jet j;
    j.value = v;
    j.grad = d1 * jf.grad;
    j.hess = d2 * (jf.grad * jf.grad.transpose()) + d1 * jf.hess;
    return j;
  }
  double value(const Point& x) const override {
    const double a = f_->value(x);
    return is_sin_ ? std::sin(a) : std::cos(a);
  }
  std::string describe() const override {
    return std::string(is_sin_ ? "sin(" : "cos(") + f_->describe() + ")";
  }

 private:
  ScalarFunctionPtr f_;
  bool is_sin_;
};

}  // namespace

namespace fn {

ScalarFunctionPtr constant(double c) { return std::make_shared<Constant>(c); }
ScalarFunctionPtr bracket_power(double c, double p, Point center) {
  return std::make_shared<BracketPower>(c, p, std::move(center));
}
ScalarFunctionPtr bump(double amplitude, double radius, Point center) {
  return std::make_shared<Bump>(amplitude, radius, std::move(center));
}
ScalarFunctionPtr quadratic(double c) { return std::make_shared<Quadratic>(c); }
ScalarFunctionPtr sum(ScalarFunctionPtr a, ScalarFunctionPtr b) {
  return std::make_shared<Sum>(std::move(a), std::move(b));
}
ScalarFunctionPtr product(ScalarFunctionPtr a, ScalarFunctionPtr b) {
  return std::make_shared<Product>(std::move(a), std::move(b));
}
ScalarFunctionPtr cos_of(ScalarFunctionPtr f) { return std::make_shared<Trig>(std::move(f), false); }
ScalarFunctionPtr sin_of(ScalarFunctionPtr f) { return std::make_shared<Trig>(std::move(f), true); }

}  // namespace fn

MatrixPotentialModel::MatrixPotentialModel(std::string name, int dim, ScalarFunctionPtr rho0,
                                           ScalarFunctionPtr rho, ScalarFunctionPtr omega,
                                           double decay_exponent, Eigen::Matrix2d v_infinity,
                                           double coupling_support_radius, double gap_floor)
    : name_(std::move(name)),
      dim_(dim),
      rho0_(std::move(rho0)),
      rho_(std::move(rho)),
      omega_(std::move(omega)),
      decay_exponent_(decay_exponent),
      v_infinity_(std::move(v_infinity)),
      support_radius_(coupling_support_radius),
      gap_floor_(gap_floor) {
  if (dim_ < 1 || dim_ > kMaxDim) throw ConfigError("potential dimension must be 1, 2 or 3");
  if (!(decay_exponent_ > 0.0)) throw ConfigError("decay exponent p must be positive");
  if (!(support_radius_ > 0.0)) throw ConfigError("coupling support radius must be positive");
  if (std::abs(v_infinity_(0, 1) - v_infinity_(1, 0)) > 0.0)
    throw ConfigError("V_infinity must be symmetric");
}

double MatrixPotentialModel::lambda_infinity(Mode m) const {
  const double mean = 0.5 * (v_infinity_(0, 0) + v_infinity_(1, 1));
  const double half = 0.5 * (v_infinity_(0, 0) - v_infinity_(1, 1));
  return mean + sign(m) * std::hypot(half, v_infinity_(0, 1));
}

PotentialSample MatrixPotentialModel::sample(const Point& x) const {
  return {rho0_->value(x), rho_->value(x), omega_->value(x)};
}

Eigen::Matrix2d MatrixPotentialModel::eval_V(const Point& x) const {
  const PotentialSample s = sample(x);
  Eigen::Matrix2d v;
  v << s.rho0 + s.rho, s.omega, s.omega, s.rho0 - s.rho;
  return v;
}

double MatrixPotentialModel::checked_gap_squared(double rho, double omega, const Point& x) const {
  const double m2 = rho * rho + omega * omega;
  if (!(m2 > gap_floor_)) {
    std::ostringstream os;
    os << "rho^2 + omega^2 = " << m2 << " <= delta0 = " << gap_floor_ << " at x = ("
       << x.transpose() << ")";
    throw GapViolation(os.str());
  }
  return m2;
}

EigenData MatrixPotentialModel::eigen(const Point& x, std::optional<double> alpha_ref) const {
  const PotentialSample s = sample(x);
  const double m = std::sqrt(checked_gap_squared(s.rho, s.omega, x));
  double alpha = std::atan2(s.omega, s.rho);
  if (alpha_ref) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    alpha += two_pi * std::round((*alpha_ref - alpha) / two_pi);
  }
  const double c = std::cos(0.5 * alpha);
  const double sn = std::sin(0.5 * alpha);
  EigenData e;
  e.lambda_plus = s.rho0 + m;
  e.lambda_minus = s.rho0 - m;
  e.chi_plus = {c, sn};
  e.chi_minus = {-sn, c};
  e.gap = 2.0 * m;
  e.alpha = alpha;
  return e;
}

double MatrixPotentialModel::lambda(const Point& x, Mode m) const {
  const PotentialSample s = sample(x);
  return s.rho0 + sign(m) * std::sqrt(checked_gap_squared(s.rho, s.omega, x));
}

Point MatrixPotentialModel::grad_lambda(const Point& x, Mode m) const {
  const Jet r0 = rho0_->jet(x);
  const Jet r = rho_->jet(x);
  const Jet w = omega_->jet(x);
  const double mag = std::sqrt(checked_gap_squared(r.value, w.value, x));
  return r0.grad + (sign(m) / mag) * (r.value * r.grad + w.value * w.grad);
}

SymMat MatrixPotentialModel::hessian_lambda(const Point& x, Mode m) const {
  const Jet r0 = rho0_->jet(x);
  const Jet r = rho_->jet(x);
  const Jet w = omega_->jet(x);
  const double mag = std::sqrt(checked_gap_squared(r.value, w.value, x));
  const Point grad_mag = (r.value * r.grad + w.value * w.grad) / mag;
  const SymMat hess_mag = (r.grad * r.grad.transpose() + r.value * r.hess +
                           w.grad * w.grad.transpose() + w.value * w.hess -
                           grad_mag * grad_mag.transpose()) /
                          mag;
  SymMat h = r0.hess + sign(m) * hess_mag;
  return 0.5 * (h + h.transpose());
}

Point MatrixPotentialModel::grad_alpha(const Point& x) const {
  const Jet r = rho_->jet(x);
  const Jet w = omega_->jet(x);
  const double m2 = checked_gap_squared(r.value, w.value, x);
  return (r.value * w.grad - w.value * r.grad) / m2;
}

FrameDerivative MatrixPotentialModel::d_chi(const Point& x, Mode m) const {
  const EigenData e = eigen(x);
  const Point ga = 0.5 * grad_alpha(x);
  FrameDerivative d(dim_, 2);
  // d chi_+ = (grad alpha / 2) chi_-,   d chi_- = -(grad alpha / 2) chi_+
  const Eigen::Vector2d target = m == Mode::plus ? e.chi_minus : Eigen::Vector2d(-e.chi_plus);
  for (int j = 0; j < dim_; ++j) d.row(j) = ga(j) * target.transpose();
  return d;
}

SymMat MatrixPotentialModel::hessian_lambda_directional(const Point& x, const Point& direction,
                                                         Mode m) const {
  const double vnorm = direction.norm();
  if (vnorm == 0.0) return SymMat::Zero(dim_, dim_);
  const double h = 1e-3 * japanese_bracket(x) / vnorm;
  auto central = [&](double step) -> SymMat {
    return (hessian_lambda(x + step * direction, m) - hessian_lambda(x - step * direction, m)) /
           (2.0 * step);
  };
  // One Richardson level: O(h^4).
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

AuditReport MatrixPotentialModel::assumption_audit(const AuditBox& box, std::size_t n_samples) const {
  if (box.lower.size() != dim_ || box.upper.size() != dim_)
    throw ConfigError("audit box dimension does not match the model");
  AuditReport rep;
  rep.min_gap_squared = std::numeric_limits<double>::infinity();
  rep.far_gap_squared = std::numeric_limits<double>::infinity();

  std::mt19937_64 gen(0x5eed5eedULL);
  std::vector<std::uniform_real_distribution<double>> axis;
  for (int i = 0; i < dim_; ++i) axis.emplace_back(box.lower(i), box.upper(i));

  auto observe = [&](const Point& x, bool far) {
    const PotentialSample s = sample(x);
    const double g2 = s.rho * s.rho + s.omega * s.omega;
    rep.min_gap_squared = std::min(rep.min_gap_squared, g2);
    if (far) rep.far_gap_squared = std::min(rep.far_gap_squared, g2);
    Eigen::Matrix2d v;
    v << s.rho0 + s.rho, s.omega, s.omega, s.rho0 - s.rho;
    // Operator norm of the symmetric difference = largest |eigenvalue|.
    const Eigen::Matrix2d diff = v - v_infinity_;
    const double mean = 0.5 * (diff(0, 0) + diff(1, 1));
    const double rad = std::hypot(0.5 * (diff(0, 0) - diff(1, 1)), diff(0, 1));
    const double ratio = std::pow(japanese_bracket(x), decay_exponent_) * (std::abs(mean) + rad);
    if (far)
      rep.far_decay_ratio = std::max(rep.far_decay_ratio, ratio);
    else
      rep.max_decay_ratio = std::max(rep.max_decay_ratio, ratio);
    if (x.norm() > support_radius_)
      rep.max_offdiag_outside_support = std::max(rep.max_offdiag_outside_support, std::abs(s.omega));
    ++rep.samples;
  };

  Point x(dim_);
  for (std::size_t k = 0; k < n_samples; ++k) {
    for (int i = 0; i < dim_; ++i) x(i) = axis[i](gen);
    observe(x, false);
  }
  // Far-field probes along the axes and the main diagonal.
  std::vector<Point> directions;
  for (int i = 0; i < dim_; ++i) {
    Point e = Point::Zero(dim_);
    e(i) = 1.0;
    directions.push_back(e);
    directions.push_back(-e);
  }
  directions.push_back(Point::Constant(dim_, 1.0 / std::sqrt(double(dim_))));
  for (const Point& dir : directions)
    for (int k = 1; k <= 6; ++k) observe(std::pow(10.0, k) * dir, true);

  rep.gap_ok = rep.min_gap_squared > gap_floor_;
  rep.long_range_ok = rep.far_decay_ratio <= 10.0 * rep.max_decay_ratio + 1e-12;
  rep.diagonal_outside_support_ok = rep.max_offdiag_outside_support <= 1e-14;
  if (!rep.gap_ok) {
    std::ostringstream os;
    os << "gap: min rho^2+omega^2 = " << rep.min_gap_squared << " <= delta0 = " << gap_floor_;
    rep.violations.push_back(os.str());
  }
  if (!rep.long_range_ok) {
    std::ostringstream os;
    os << "long-range: <x>^p ||V - V_inf|| grows to " << rep.far_decay_ratio
       << " in the far field (box max " << rep.max_decay_ratio << ")";
    rep.violations.push_back(os.str());
  }
  if (!rep.diagonal_outside_support_ok) {
    std::ostringstream os;
    os << "diagonal outside K: max |omega| = " << rep.max_offdiag_outside_support
       << " for |x| > " << support_radius_;
    rep.violations.push_back(os.str());
  }
  return rep;
}

namespace models {

ModelPtr bump_coupling(int dim, const BumpCouplingParams& p, double gap_floor) {
  Eigen::Matrix2d vinf;
  vinf << p.rho, 0.0, 0.0, -p.rho;
  return std::make_shared<MatrixPotentialModel>(
      "bump-coupling", dim, fn::bracket_power(p.rho0_amplitude, p.decay_exponent, Point::Zero(dim)),
      fn::constant(p.rho), fn::bump(p.coupling_amplitude, p.coupling_radius, Point::Zero(dim)),
      p.decay_exponent, vinf, p.coupling_radius, gap_floor);
}

ModelPtr rotation_example(int dim, const RotationParams& p, double gap_floor) {
  auto envelope = fn::bracket_power(1.0, p.decay_exponent, Point::Zero(dim));
  auto theta = fn::bump(p.theta_amplitude, p.theta_radius, Point::Zero(dim));
  return std::make_shared<MatrixPotentialModel>(
      "example-1.2", dim, fn::constant(0.0), fn::product(envelope, fn::cos_of(theta)),
      fn::product(envelope, fn::sin_of(theta)), p.decay_exponent, Eigen::Matrix2d::Zero(),
      p.theta_radius, gap_floor);
}

ModelPtr synthetic_quadratic(int dim) {
  Eigen::Matrix2d vinf = Eigen::Matrix2d::Zero();
  // Not long range; only used where the audit is bypassed.
  return std::make_shared<MatrixPotentialModel>(
      "synthetic-quadratic", dim, fn::sum(fn::quadratic(1.0), fn::constant(-1.0)),
      fn::constant(1.0), fn::constant(0.0), 1.0, vinf, 1.0);
}

ModelPtr constant_diagonal(int dim, double lambda_plus, double lambda_minus) {
  Eigen::Matrix2d v;
  v << lambda_plus, 0.0, 0.0, lambda_minus;
  const double half = 0.5 * (lambda_plus - lambda_minus);
  return std::make_shared<MatrixPotentialModel>(
      "constant-diagonal", dim, fn::constant(0.5 * (lambda_plus + lambda_minus)),
      fn::constant(half), fn::constant(0.0), 1.0, v, 1.0,
      half > 0.0 ? std::min(1e-6, 0.5 * half * half) : 1e-6);
}

}  // namespace models

}  // namespace wplab
