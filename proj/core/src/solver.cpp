#include "wplab/solver.hpp"

#include "wplab/errors.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace wplab {

Eigen::Matrix2cd pauli_exponential(const Eigen::Matrix2d& V, double nl_phase, double scale) {
  const double rho0 = 0.5 * (V(0, 0) + V(1, 1));
  const double rho = 0.5 * (V(0, 0) - V(1, 1));
  const double omega = 0.5 * (V(0, 1) + V(1, 0));
  const double m = std::hypot(rho, omega);
  const cplx phase = std::polar(1.0, -scale * (rho0 + nl_phase));
  Eigen::Matrix2cd U;
  if (m == 0.0) {
    U.setIdentity();
    return phase * U;
  }
  const double c = std::cos(m * scale);
  const double s = std::sin(m * scale) / m;
  const cplx i(0.0, 1.0);
  U(0, 0) = c - i * s * rho;
  U(1, 1) = c + i * s * rho;
  U(0, 1) = -i * s * omega;
  U(1, 0) = -i * s * omega;
  return phase * U;
}

double critical_beta(int dim) { return 1.0 + 0.5 * double(dim); }

TimeGrid make_time_grid(double eps, double dt_user, double T, std::size_t snapshots) {
  if (!(eps > 0.0) || !(dt_user > 0.0) || !(T >= 0.0) || snapshots == 0)
    throw ConfigError("bad time stepping parameters");
  TimeGrid g;
  g.T = T;
  if (T == 0.0) return g;
  const double dt_max = std::min(eps / 20.0, dt_user);
  g.stride = static_cast<std::size_t>(std::ceil(T / double(snapshots) / dt_max - 1e-9));
  g.stride = std::max<std::size_t>(g.stride, 1);
  g.steps = g.stride * snapshots;
  g.dt = T / double(g.steps);
  return g;
}

namespace {

std::vector<double> squared_wavenumbers(const GridSpec& g) {
  std::vector<std::vector<double>> k;
  for (int a = 0; a < g.dim; ++a) k.push_back(g.wavenumbers(a));
  std::vector<double> k2(g.size(), 0.0);
  for (std::size_t i = 0; i < k2.size(); ++i) {
    const auto idx = g.unflatten(i);
    for (int a = 0; a < g.dim; ++a) k2[i] += k[a][idx[a]] * k[a][idx[a]];
  }
  return k2;
}

void apply_multiplier(std::span<cplx> v, const std::vector<cplx>& mult) {
  const std::size_t n = mult.size();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= mult[i % n];
}

}  // namespace

FullSystemStepper::FullSystemStepper(const MatrixPotentialModel& model, GridSpec grid, double eps, double Lambda,
                                     double beta, double dt)
    : grid_(grid), eps_(eps), nl_coeff_(Lambda * std::pow(eps, beta - 1.0)), dt_(dt), fft_(grid, 2) {
  if (Lambda < 0.0) throw ConfigError("Lambda must be >= 0 (focusing nonlinearity is not supported)");
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (model.dim() != grid.dim) throw ConfigError("potential and grid differ in dimension");
  const auto k2 = squared_wavenumbers(grid);
  const std::size_t n = grid.size();
  kinetic_half_.resize(n);
  for (std::size_t i = 0; i < n; ++i) kinetic_half_[i] = std::polar(1.0, -0.25 * eps * k2[i] * dt);
  const double tau = dt / eps;
  phase0_.resize(n);
  cos_.resize(n);
  s_rho_.resize(n);
  s_omega_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const PotentialSample p = model.sample(grid.position(i));
    const double m = std::hypot(p.rho, p.omega);
    phase0_[i] = std::polar(1.0, -p.rho0 * tau);
    cos_[i] = std::cos(m * tau);
    const double s = m > 0.0 ? std::sin(m * tau) / m : 0.0;
    s_rho_[i] = s * p.rho;
    s_omega_[i] = s * p.omega;
  }
}

void FullSystemStepper::step(ComplexField& psi) {
  if (!(psi.grid() == grid_) || psi.components() != 2) throw ConfigError("field does not match the stepper");
  auto v = psi.values();
  fft_.forward(v);
  apply_multiplier(v, kinetic_half_);
  fft_.backward(v);
  auto a = psi.component(0);
  auto b = psi.component(1);
  const cplx i1(0.0, 1.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const cplx pa = a[i];
    const cplx pb = b[i];
    const double dens = std::norm(pa) + std::norm(pb);
    const cplx ph = phase0_[i] * std::polar(1.0, -nl_coeff_ * dens * dt_);
    const cplx d0 = cos_[i] - i1 * s_rho_[i];
    const cplx d1 = cos_[i] + i1 * s_rho_[i];
    const cplx off = -i1 * s_omega_[i];
    a[i] = ph * (d0 * pa + off * pb);
    b[i] = ph * (off * pa + d1 * pb);
  }
  fft_.forward(v);
  apply_multiplier(v, kinetic_half_);
  fft_.backward(v);
}

EvolutionSummary evolve_full(const ComplexField& psi0, const MatrixPotentialModel& model,
                             const EvolutionConfig& config, double xi_max, const SnapshotObserver& observer) {
  if (psi0.components() != 2) throw ConfigError("full system needs a two-component field");
  if (!psi0.all_finite()) throw ConfigError("initial field is not finite");
  check_resolution(psi0.grid(), config.eps, xi_max);
  EvolutionSummary sum;
  sum.time = make_time_grid(config.eps, config.dt, config.T, config.snapshots);
  ComplexField psi = psi0;
  const double m0 = mass(psi);
  if (observer) observer(0, 0.0, psi);
  if (sum.time.steps == 0) return sum;
  FullSystemStepper stepper(model, psi0.grid(), config.eps, config.Lambda,
                            config.beta_or_critical(psi0.grid().dim), sum.time.dt);
  for (std::size_t n = 1; n <= sum.time.steps; ++n) {
    stepper.step(psi);
    if (n % sum.time.stride != 0) continue;
    const double drift = m0 > 0.0 ? std::abs(mass(psi) - m0) / m0 : 0.0;
    sum.max_relative_mass_drift = std::max(sum.max_relative_mass_drift, drift);
    if (drift > config.mass_drift_limit || !std::isfinite(drift)) {
      std::ostringstream os;
      os << "relative mass drift " << drift << " exceeds " << config.mass_drift_limit << " at t = "
         << double(n) * sum.time.dt;
      throw MassDriftError(os.str());
    }
    if (observer) observer(n / sum.time.stride, double(n) * sum.time.dt, psi);
  }
  return sum;
}

std::vector<FieldSnapshot> evolve_full(const ComplexField& psi0, const MatrixPotentialModel& model,
                                       const EvolutionConfig& config, double xi_max) {
  std::vector<FieldSnapshot> out;
  evolve_full(psi0, model, config, xi_max,
              [&](std::size_t, double t, const ComplexField& f) { out.push_back({f, config.eps, t}); });
  return out;
}

SourceTerm::SourceTerm(const MatrixPotentialModel& model, const GridSpec& grid, Mode packet_mode)
    : grid_(grid), mode_(packet_mode) {
  const std::size_t n = grid.size();
  const int d = grid.dim;
  grad_alpha_.assign(n * static_cast<std::size_t>(d), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Point ga = model.grad_alpha(grid.position(i));
    for (int a = 0; a < d; ++a) {
      grad_alpha_[i * d + a] = ga(a);
      if (ga(a) != 0.0) vanishes_ = false;
    }
  }
}

void SourceTerm::apply(const ComplexField& phi, const Point& xi, ComplexField& out) const {
  if (!(phi.grid() == grid_) || phi.components() != 1) throw ConfigError("source: field mismatch");
  if (!(out.grid() == grid_) || out.components() != 1) out = ComplexField(grid_, 1);
  const int d = grid_.dim;
  const cplx pref(0.0, -0.5 * sign(mode_));
  const auto p = phi.component(0);
  auto o = out.component(0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    double dot = 0.0;
    for (int a = 0; a < d; ++a) dot += grad_alpha_[i * d + a] * xi(a);
    o[i] = dot == 0.0 ? cplx{} : pref * dot * p[i];
  }
}

double SourceTerm::sup_norm(const Point& xi) const {
  const int d = grid_.dim;
  double m = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    double dot = 0.0;
    for (int a = 0; a < d; ++a) dot += grad_alpha_[i * d + a] * xi(a);
    m = std::max(m, 0.5 * std::abs(dot));
  }
  return m;
}

DrivenScalarStepper::DrivenScalarStepper(const MatrixPotentialModel& model, Mode potential_mode, GridSpec grid,
                                         double eps, double dt)
    : grid_(grid), eps_(eps), dt_(dt), fft_(grid, 1) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  const auto k2 = squared_wavenumbers(grid);
  const std::size_t n = grid.size();
  kinetic_half_.resize(n);
  potential_half_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    kinetic_half_[i] = std::polar(1.0, -0.25 * eps * k2[i] * dt);
    potential_half_[i] = std::polar(1.0, -0.5 * model.lambda(grid.position(i), potential_mode) * dt / eps);
  }
}

void DrivenScalarStepper::half_propagate(ComplexField& g, bool kinetic_first) {
  auto v = g.values();
  if (!kinetic_first) apply_multiplier(v, potential_half_);
  fft_.forward(v);
  apply_multiplier(v, kinetic_half_);
  fft_.backward(v);
  if (kinetic_first) apply_multiplier(v, potential_half_);
}

void DrivenScalarStepper::step(ComplexField& g, const ComplexField* source_mid) {
  if (!(g.grid() == grid_) || g.components() != 1) throw ConfigError("field does not match the stepper");
  half_propagate(g, true);
  if (source_mid) {
    const cplx c = cplx(0.0, -dt_ / eps_);  // dt / (i eps)
    auto v = g.values();
    const auto s = source_mid->values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += c * s[i];
  }
  half_propagate(g, false);
}

EvolutionSummary evolve_driven_scalar(const ComplexField& g0, const MatrixPotentialModel& model, Mode potential_mode,
                                      const SourceFunction& source, const EvolutionConfig& config,
                                      const SnapshotObserver& observer) {
  if (g0.components() != 1) throw ConfigError("driven equation needs a scalar field");
  EvolutionSummary sum;
  sum.time = make_time_grid(config.eps, config.dt, config.T, config.snapshots);
  ComplexField g = g0;
  if (observer) observer(0, 0.0, g);
  if (sum.time.steps == 0) return sum;
  DrivenScalarStepper stepper(model, potential_mode, g0.grid(), config.eps, sum.time.dt);
  ComplexField f(g0.grid(), 1);
  for (std::size_t n = 0; n < sum.time.steps; ++n) {
    if (source) source((double(n) + 0.5) * sum.time.dt, f);
    stepper.step(g, source ? &f : nullptr);
    if (!g.all_finite()) throw StepFailure("driven scalar evolution produced non-finite values");
    if ((n + 1) % sum.time.stride == 0 && observer)
      observer((n + 1) / sum.time.stride, double(n + 1) * sum.time.dt, g);
  }
  return sum;
}

void write_run_csv(const std::vector<RunRow>& rows, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open " + path.string());
  os << "t,mass,minus_mass,h_eps1\n" << std::setprecision(17);
  for (const RunRow& r : rows) os << r.t << ',' << r.mass << ',' << r.minus_mass << ',' << r.h_eps1 << '\n';
}

}  // namespace wplab
