#include "wplab/profile.hpp"

#include "wplab/errors.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace wplab {

TrajectoryQSource::TrajectoryQSource(std::shared_ptr<const TrajectoryRecord> record)
    : record_(std::move(record)) {
  if (!record_) throw ConfigError("null trajectory record");
}

FunctionQSource::FunctionQSource(int dim, std::function<SymMat(double)> q, std::function<SymMat(double)> qdot)
    : dim_(dim), q_(std::move(q)), qdot_(std::move(qdot)) {}

QSourcePtr constant_q(const SymMat& q) {
  const int d = static_cast<int>(q.rows());
  return std::make_shared<FunctionQSource>(
      d, [q](double) { return q; }, [d](double) -> SymMat { return SymMat::Zero(d, d); });
}

GridSpec profile_grid(int dim, std::size_t points, double half_width) {
  return GridSpec::uniform(dim, half_width, points);
}

void check_boundary_leak(const ComplexField& u, double t) {
  const double edge = boundary_mass_fraction(u, kBoundaryCells) * mass(u);
  if (edge > kBoundaryLeakLimit) {
    std::ostringstream os;
    os << "profile mass " << edge << " within " << kBoundaryCells << " cells of the y-box faces at t = " << t
       << " exceeds " << kBoundaryLeakLimit << "; enlarge the profile box or shorten T";
    throw BoundaryLeak(os.str());
  }
}

namespace {

// <Q y, y> at node i.
double quadratic_form(const SymMat& q, const GridSpec& g, std::size_t i) {
  const auto idx = g.unflatten(i);
  double y[kMaxDim];
  for (int a = 0; a < g.dim; ++a) y[a] = g.node(a, idx[a]);
  double s = 0.0;
  for (int a = 0; a < g.dim; ++a)
    for (int b = 0; b < g.dim; ++b) s += q(a, b) * y[a] * y[b];
  return s;
}

}  // namespace

ProfileStepper::ProfileStepper(GridSpec ygrid, QSourcePtr q, double Lambda)
    : grid_(ygrid), q_(std::move(q)), Lambda_(Lambda), fft_(ygrid, 1) {
  if (Lambda < 0.0) throw ConfigError("Lambda must be >= 0 (focusing nonlinearity is not supported)");
  if (!q_) throw ConfigError("profile solve needs a Q source");
  if (q_->dim() != grid_.dim) throw ConfigError("Q source and profile grid differ in dimension");
  const std::size_t n = grid_.size();
  k2_.assign(n, 0.0);
  std::vector<std::vector<double>> k;
  for (int a = 0; a < grid_.dim; ++a) k.push_back(grid_.wavenumbers(a));
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = grid_.unflatten(i);
    for (int a = 0; a < grid_.dim; ++a) k2_[i] += k[a][idx[a]] * k[a][idx[a]];
  }
}

void ProfileStepper::ensure_kinetic(double dt) {
  if (dt == kinetic_dt_) return;
  kinetic_half_.resize(k2_.size());
  for (std::size_t i = 0; i < k2_.size(); ++i) kinetic_half_[i] = std::polar(1.0, -0.25 * k2_[i] * dt);
  kinetic_dt_ = dt;
}

void ProfileStepper::step(ComplexField& u, double t, double dt) {
  if (!(u.grid() == grid_) || u.components() != 1) throw ConfigError("profile field does not match stepper grid");
  ensure_kinetic(dt);
  auto v = u.values();
  fft_.forward(v);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= kinetic_half_[i];
  fft_.backward(v);
  const SymMat q = q_->Q(t + 0.5 * dt);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double phase = 0.5 * quadratic_form(q, grid_, i) + Lambda_ * std::norm(v[i]);
    v[i] *= std::polar(1.0, -phase * dt);
  }
  fft_.forward(v);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= kinetic_half_[i];
  fft_.backward(v);
}

std::vector<ProfileState> solve_profile(const ComplexField& a, QSourcePtr q, double Lambda, double T,
                                        const ProfileSolveOptions& opt) {
  if (!(opt.dt > 0.0) || opt.record_every == 0) throw ConfigError("bad profile solve options");
  if (!(T >= 0.0)) throw ConfigError("profile horizon must be >= 0");
  ProfileStepper stepper(a.grid(), std::move(q), Lambda);
  check_boundary_leak(a, 0.0);
  const std::size_t every = opt.record_every;
  std::size_t steps = static_cast<std::size_t>(std::ceil(T / opt.dt - 1e-9));
  steps = ((steps + every - 1) / every) * every;
  const double dt = steps > 0 ? T / double(steps) : 0.0;
  std::vector<ProfileState> out;
  out.reserve(steps / every + 1);
  ComplexField u = a;
  out.push_back({u, 0.0});
  for (std::size_t n = 0; n < steps; ++n) {
    stepper.step(u, double(n) * dt, dt);
    if ((n + 1) % every == 0) {
      const double t = double(n + 1) * dt;
      check_boundary_leak(u, t);
      out.push_back({u, t});
    }
  }
  return out;
}

namespace {

struct MultiIndex {
  std::array<int, kMaxDim> e{0, 0, 0};
  int order = 0;
};

std::vector<MultiIndex> multi_indices(int dim, int max_order) {
  std::vector<MultiIndex> out;
  for (int a = 0; a <= max_order; ++a)
    for (int b = 0; b <= (dim > 1 ? max_order - a : 0); ++b)
      for (int c = 0; c <= (dim > 2 ? max_order - a - b : 0); ++c) out.push_back({{a, b, c}, a + b + c});
  return out;
}

// d^beta u for every |beta| <= max_order, from a single forward transform.
std::vector<ComplexField> derivatives(const ComplexField& u, const std::vector<MultiIndex>& betas) {
  const GridSpec& g = u.grid();
  Fft fft(g, 1);
  ComplexField hat = u;
  fft.forward(hat.values());
  std::vector<std::vector<double>> k;
  for (int a = 0; a < g.dim; ++a) k.push_back(g.wavenumbers(a));
  std::vector<ComplexField> out;
  for (const MultiIndex& beta : betas) {
    ComplexField f = hat;
    auto v = f.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto idx = g.unflatten(i);
      cplx m{1.0, 0.0};
      for (int a = 0; a < g.dim; ++a) {
        if (beta.e[a] == 0) continue;
        const bool nyquist = idx[a] == g.points[a] / 2;
        const double ka = (nyquist && beta.e[a] % 2 == 1) ? 0.0 : k[a][idx[a]];
        m *= std::pow(cplx(0.0, ka), beta.e[a]);
      }
      v[i] *= m;
    }
    fft.backward(v);
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

ProfileFunctionals functionals(const ProfileState& state, const QSource& q, double Lambda, bool with_momenta) {
  const ComplexField& u = state.u;
  const GridSpec& g = u.grid();
  const double dv = g.cell_volume();
  ProfileFunctionals f;
  f.mass = mass(u);
  const SymMat Q = q.Q(state.t);
  double pot = 0.0;
  double y2 = 0.0;
  double u4 = 0.0;
  for (std::size_t i = 0; i < u.points(); ++i) {
    const double a2 = std::norm(u.at(0, i));
    pot += quadratic_form(Q, g, i) * a2;
    y2 += g.position(i).squaredNorm() * a2;
    u4 += a2 * a2;
  }
  double grad2 = 0.0;
  for (int a = 0; a < g.dim; ++a) grad2 += mass(spectral_derivative(u, a, 1));
  f.grad_norm = std::sqrt(grad2);
  f.y_norm = std::sqrt(y2 * dv);
  f.V = 0.5 * y2 * dv;
  f.E = 0.5 * grad2 + 0.5 * Lambda * u4 * dv + 0.5 * pot * dv;
  if (!with_momenta) return f;

  const auto idx = multi_indices(g.dim, 6);
  const auto du = derivatives(u, idx);
  std::array<double, 7> by_order{};
  std::vector<double> ypow(kMaxDim * 7);
  for (std::size_t b = 0; b < idx.size(); ++b) {
    for (const MultiIndex& alpha : idx) {
      const int total = alpha.order + idx[b].order;
      if (total > 6) continue;
      double s = 0.0;
      for (std::size_t i = 0; i < u.points(); ++i) {
        const auto node = g.unflatten(i);
        double w = 1.0;
        for (int a = 0; a < g.dim; ++a) w *= std::pow(g.node(a, node[a]), alpha.e[a]);
        s += w * w * std::norm(du[b].at(0, i));
      }
      by_order[total] = std::max(by_order[total], std::sqrt(s * dv));
    }
  }
  double run = 0.0;
  for (int k = 0; k <= 6; ++k) {
    run = std::max(run, by_order[k]);
    f.M[k] = run;
  }
  return f;
}

std::vector<double> energy_identity_residual(const std::vector<ProfileState>& states, const QSource& q,
                                             double Lambda) {
  if (states.size() < 3) throw ConfigError("energy identity needs at least three states");
  std::vector<double> E;
  for (const auto& s : states) E.push_back(functionals(s, q, Lambda, false).E);
  std::vector<double> res;
  for (std::size_t k = 1; k + 1 < states.size(); ++k) {
    const double dEdt = (E[k + 1] - E[k - 1]) / (states[k + 1].t - states[k - 1].t);
    const ComplexField& u = states[k].u;
    const GridSpec& g = u.grid();
    const SymMat qd = q.Qdot(states[k].t);
    double s = 0.0;
    for (std::size_t i = 0; i < u.points(); ++i) s += quadratic_form(qd, g, i) * std::norm(u.at(0, i));
    res.push_back(std::abs(dEdt - 0.5 * s * g.cell_volume()));
  }
  return res;
}

GrowthReport growth_study(const ComplexField& a, QSourcePtr q, double Lambda, double T, std::size_t samples,
                          double dt, std::optional<QdotFit> qdot_fit) {
  if (samples < 2) throw ConfigError("growth study needs at least two samples");
  GrowthReport rep;
  if (qdot_fit) rep.hypothesis_met = qdot_fit->hypothesis_met;
  const QSource& qs = *q;
  ProfileStepper stepper(a.grid(), q, Lambda);
  std::size_t steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  steps = ((steps + samples - 1) / samples) * samples;
  const std::size_t every = steps / samples;
  const double h = steps > 0 ? T / double(steps) : 0.0;
  ComplexField u = a;
  auto record = [&](double t) {
    GrowthRow row;
    row.t = t;
    row.leak = boundary_mass_fraction(u, kBoundaryCells);
    row.f = functionals({u, t}, qs, Lambda, true);
    rep.sup_grad_norm = std::max(rep.sup_grad_norm, row.f.grad_norm);
    rep.rows.push_back(std::move(row));
  };
  record(0.0);
  for (std::size_t n = 0; n < steps; ++n) {
    stepper.step(u, double(n) * h, h);
    if ((n + 1) % every == 0) record(double(n + 1) * h);
  }
  std::vector<double> t;
  std::vector<double> lm;
  std::vector<double> lt;
  std::vector<double> ly;
  for (const auto& r : rep.rows) {
    t.push_back(r.t);
    lm.push_back(std::log(r.f.M[6]));
    lt.push_back(std::log(1.0 + r.t));
    ly.push_back(std::log(r.f.y_norm));
  }
  rep.m6_exponential = least_squares(t, lm);
  rep.y_power = least_squares(lt, ly);
  return rep;
}

void write_growth_csv(const GrowthReport& report, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open " + path.string());
  os << "t,mass,E,V,M_1,M_2,M_3,M_4,M_5,M_6,grad_norm,y_norm,leak\n" << std::setprecision(17);
  for (const auto& r : report.rows) {
    os << r.t << ',' << r.f.mass << ',' << r.f.E << ',' << r.f.V;
    for (int k = 1; k <= 6; ++k) os << ',' << r.f.M[k];
    os << ',' << r.f.grad_norm << ',' << r.f.y_norm << ',' << r.leak << '\n';
  }
}

ProfileTrack::ProfileTrack(const ComplexField& a, QSourcePtr q, double Lambda, double h)
    : stepper_(a.grid(), std::move(q), Lambda), u_(a), h_(h) {
  if (!(h > 0.0)) throw ConfigError("profile track step must be positive");
  check_boundary_leak(u_, 0.0);
}

const ComplexField& ProfileTrack::advance_to(double t) {
  const double target = t / h_;
  const auto n = static_cast<std::size_t>(std::llround(target));
  if (std::abs(target - double(n)) > 1e-6 || n < steps_)
    throw ConfigError("profile track cannot reach t = " + std::to_string(t) + " in steps of " + std::to_string(h_));
  while (steps_ < n) {
    stepper_.step(u_, double(steps_) * h_, h_);
    ++steps_;
  }
  return u_;
}

}  // namespace wplab
