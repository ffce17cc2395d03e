#include "wplab/classical.hpp"

#include "wplab/errors.hpp"
#include "wplab/fit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

namespace wplab {

namespace {

using State = Eigen::VectorXd;  // (x, xi, S)

struct Rhs {
  const MatrixPotentialModel& model;
  Mode mode;
  int d;

  State operator()(const State& y) const {
    const Point x = y.head(d);
    const Point xi = y.segment(d, d);
    State f(2 * d + 1);
    f.head(d) = xi;
    f.segment(d, d) = -model.grad_lambda(x, mode);
    f(2 * d) = 0.5 * xi.squaredNorm() - model.lambda(x, mode);
    return f;
  }
};

// Dormand-Prince 5(4) tableau; the field is autonomous so the nodes c_i are not needed.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

TrajectoryRecord integrate_trajectory(ModelPtr model, const Point& x0, const Point& xi0, Mode mode,
                                      double T, const TrajectoryOptions& opt) {
  if (!model) throw ConfigError("trajectory needs a potential model");
  const int d = model->dim();
  if (x0.size() != d || xi0.size() != d) throw ConfigError("initial point dimension mismatch");
  if (!(T >= 0.0) || !std::isfinite(T)) throw ConfigError("trajectory horizon must be finite and >= 0");
  if (!(opt.tolerance > 0.0) || !(opt.max_step > 0.0)) throw ConfigError("bad trajectory options");

  TrajectoryRecord rec;
  rec.model_ = model;
  rec.mode_ = mode;
  const Rhs rhs{*model, mode, d};

  State y(2 * d + 1);
  y.head(d) = x0;
  y.segment(d, d) = xi0;
  y(2 * d) = 0.0;
  State f = rhs(y);
  rec.energy_ = 0.5 * xi0.squaredNorm() + model->lambda(x0, mode);

  auto push = [&](double t, const State& s, const State& fs) {
    rec.t_.push_back(t);
    rec.x_.push_back(s.head(d));
    rec.xi_.push_back(s.segment(d, d));
    rec.S_.push_back(s(2 * d));
    rec.force_.push_back(fs.segment(d, d));
    rec.lagrangian_.push_back(fs(2 * d));
  };
  push(0.0, y, f);

  double t = 0.0;
  std::size_t steps = 0;
  if (opt.integrator == Integrator::stormer_verlet) {
    if (!(opt.verlet_step > 0.0)) throw ConfigError("Verlet step must be positive");
    while (t < T) {
      if (++steps > opt.max_steps) throw StepFailure("Verlet step budget exhausted");
      const double h = std::min(opt.verlet_step, T - t);
      State yn = y;
      const Point xi_half = y.segment(d, d) + 0.5 * h * f.segment(d, d);
      yn.head(d) = y.head(d) + h * xi_half;
      State fn = rhs(yn);
      yn.segment(d, d) = xi_half + 0.5 * h * fn.segment(d, d);
      fn = rhs(yn);
      yn(2 * d) = y(2 * d) + 0.5 * h * (f(2 * d) + fn(2 * d));
      t = (T - t <= h) ? T : t + h;
      y = yn;
      f = fn;
      push(t, y, f);
    }
    return rec;
  }

  const double tol = opt.tolerance;
  double h = std::min({opt.max_step, 1e-3, T > 0.0 ? T : 1.0});
  while (t < T) {
    if (++steps > opt.max_steps) throw StepFailure("adaptive step budget exhausted");
    if (h < 1e-14 * std::max(1.0, t)) throw StepFailure("adaptive step size underflow at t = " + std::to_string(t));
    const bool last = t + h >= T;
    if (last) h = T - t;
    const State k1 = f;
    const State k2 = rhs(y + h * (a21 * k1));
    const State k3 = rhs(y + h * (a31 * k1 + a32 * k2));
    const State k4 = rhs(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const State k5 = rhs(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const State k6 = rhs(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const State yn = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const State k7 = rhs(yn);
    const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double en = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
      const double sc = tol + tol * std::max(std::abs(y(i)), std::abs(yn(i)));
      en += (err(i) / sc) * (err(i) / sc);
    }
    en = std::sqrt(en / double(err.size()));
    if (!std::isfinite(en)) throw StepFailure("non-finite local error estimate");
    const double factor = en > 0.0 ? std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0) : 5.0;
    if (en <= 1.0) {
      t = last ? T : t + h;
      y = yn;
      f = k7;
      push(t, y, f);
    }
    h = std::min(opt.max_step, h * factor);
  }
  return rec;
}

std::size_t TrajectoryRecord::interval(double t) const {
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  if (it == t_.begin()) return 0;
  const auto k = static_cast<std::size_t>(it - t_.begin()) - 1;
  return std::min(k, t_.size() - 2);
}

TrajectoryRecord::State TrajectoryRecord::at(double t) const {
  if (t_.empty()) throw ConfigError("empty trajectory record");
  if (t_.size() == 1 || t <= t_.front()) return {x_.front(), xi_.front(), S_.front()};
  if (t >= t_.back()) return {x_.back(), xi_.back(), S_.back()};
  const std::size_t k = interval(t);
  const double h = t_[k + 1] - t_[k];
  const double s = (t - t_[k]) / h;
  const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
  const double h10 = s * (1.0 - s) * (1.0 - s);
  const double h01 = s * s * (3.0 - 2.0 * s);
  const double h11 = s * s * (s - 1.0);
  State out;
  out.x = h00 * x_[k] + h10 * h * xi_[k] + h01 * x_[k + 1] + h11 * h * xi_[k + 1];
  out.xi = h00 * xi_[k] + h10 * h * force_[k] + h01 * xi_[k + 1] + h11 * h * force_[k + 1];
  out.action = h00 * S_[k] + h10 * h * lagrangian_[k] + h01 * S_[k + 1] + h11 * h * lagrangian_[k + 1];
  return out;
}

SymMat TrajectoryRecord::Q(double t) const { return model_->hessian_lambda(at(t).x, mode_); }

SymMat TrajectoryRecord::Qdot(double t) const {
  const State s = at(t);
  return model_->hessian_lambda_directional(s.x, s.xi, mode_);
}

std::vector<double> TrajectoryRecord::energy_samples() const {
  std::vector<double> e(t_.size());
  for (std::size_t k = 0; k < t_.size(); ++k) e[k] = 0.5 * xi_[k].squaredNorm() + model_->lambda(x_[k], mode_);
  return e;
}

std::vector<SymMat> TrajectoryRecord::Q_samples() const {
  std::vector<SymMat> q;
  q.reserve(x_.size());
  for (const Point& x : x_) q.push_back(model_->hessian_lambda(x, mode_));
  return q;
}

double TrajectoryRecord::max_energy_drift() const {
  double m = 0.0;
  for (double e : energy_samples()) m = std::max(m, std::abs(e - energy_));
  return m;
}

double TrajectoryRecord::max_position() const {
  double m = 0.0;
  for (const Point& x : x_) m = std::max(m, x.norm());
  return m;
}

double TrajectoryRecord::max_momentum() const {
  double m = 0.0;
  for (const Point& xi : xi_) m = std::max(m, xi.norm());
  return m;
}

std::vector<double> action(const TrajectoryRecord& record) { return record.S_samples(); }

namespace {

double spectral_norm(const SymMat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<SymMat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

QdotFit fit_qdot_decay(const TrajectoryRecord& record, std::size_t samples) {
  const double T = record.final_time();
  if (T < 10.0) throw FitError("Qdot decay fit needs a record spanning T >= 10, got " + std::to_string(T));
  samples = std::max<std::size_t>(samples, 8);
  std::vector<double> lt;
  std::vector<double> lq;
  std::vector<double> ts;
  std::vector<double> qs;
  double qmax = 0.0;
  for (std::size_t j = 0; j < samples; ++j) {
    const double t = 0.5 * T + 0.5 * T * double(j) / double(samples - 1);
    const double q = spectral_norm(record.Qdot(t));
    qmax = std::max(qmax, q);
    ts.push_back(t);
    qs.push_back(q);
  }
  QdotFit fit;
  if (qmax <= 1e-13) {
    fit.degenerate = true;
    fit.C = qmax;
    fit.hypothesis_met = true;
    return fit;
  }
  for (std::size_t j = 0; j < ts.size(); ++j) {
    if (qs[j] > 1e-300) {
      lt.push_back(std::log(1.0 + ts[j]));
      lq.push_back(std::log(qs[j]));
    }
  }
  const LinearFit lf = least_squares(lt, lq);
  fit.kappa0 = -lf.slope - 1.0;
  fit.residual = lf.rms_residual;
  for (std::size_t j = 0; j < ts.size(); ++j)
    fit.C = std::max(fit.C, qs[j] * std::pow(1.0 + ts[j], fit.kappa0 + 1.0));
  fit.hypothesis_met = fit.kappa0 > 2.0;
  return fit;
}

EscapeDiagnostics escape_diagnostics(const TrajectoryRecord& record) {
  const auto& model = *record.model();
  EscapeDiagnostics e;
  e.energy_excess = record.energy() - model.lambda_infinity(record.mode());
  const double T = record.final_time();
  e.min_speed_ratio = std::numeric_limits<double>::infinity();
  const auto& t = record.t_samples();
  for (std::size_t k = 0; k < t.size(); ++k)
    if (t[k] >= 0.5 * T && t[k] > 0.0) e.min_speed_ratio = std::min(e.min_speed_ratio, record.x_samples()[k].norm() / t[k]);
  if (!std::isfinite(e.min_speed_ratio)) e.min_speed_ratio = 0.0;
  const Point& x = record.x_samples().back();
  const Point& xi = record.xi_samples().back();
  e.final_virial = 2.0 * xi.squaredNorm() - 2.0 * x.dot(model.grad_lambda(x, record.mode()));
  return e;
}

double taylor_remainder(const MatrixPotentialModel& model, const TrajectoryRecord& record, double t,
                        const Point& x, Mode mode) {
  const Point xc = record.at(t).x;
  const Point dx = x - xc;
  return model.lambda(x, mode) - model.lambda(xc, mode) - model.grad_lambda(xc, mode).dot(dx) -
         0.5 * dx.dot(model.hessian_lambda(xc, mode) * dx);
}

void write_trajectory_csv(const TrajectoryRecord& record, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open " + path.string());
  const int d = record.dim();
  os << "t";
  for (int i = 0; i < d; ++i) os << ",x_" << i + 1;
  for (int i = 0; i < d; ++i) os << ",xi_" << i + 1;
  os << ",S,E,Q_norm,Qdot_norm\n";
  os << std::setprecision(17);
  const auto e = record.energy_samples();
  const auto& t = record.t_samples();
  for (std::size_t k = 0; k < t.size(); ++k) {
    os << t[k];
    for (int i = 0; i < d; ++i) os << ',' << record.x_samples()[k](i);
    for (int i = 0; i < d; ++i) os << ',' << record.xi_samples()[k](i);
    os << ',' << record.S_samples()[k] << ',' << e[k] << ',' << spectral_norm(record.Q(t[k])) << ','
       << spectral_norm(record.Qdot(t[k])) << '\n';
  }
}

}  // namespace wplab
