#include "wplab/scenario.hpp"

#include "wplab/errors.hpp"

#include <cmath>
#include <random>

namespace wplab {

void validate_scenario(const Scenario& s) {
  if (!s.model) throw ConfigError("scenario has no potential model");
  const int d = s.model->dim();
  if (s.packets.empty() || s.packets.size() > 2) throw ConfigError("scenario needs one or two packets");
  for (const PacketSpec& p : s.packets) {
    if (p.x0.size() != d || p.xi0.size() != d) throw ConfigError("packet dimension does not match the potential");
    if (!(p.envelope.width > 0.0)) throw ConfigError("envelope width must be positive");
    if (p.envelope.kind == EnvelopeKind::hermite1 && d < 1) throw ConfigError("bad envelope");
  }
  if (s.Lambda < 0.0) throw ConfigError("Lambda = " + std::to_string(s.Lambda) +
                                        " < 0: the focusing case is excluded, Lambda must be >= 0");
  if (!(s.T > 0.0) || !std::isfinite(s.T)) throw ConfigError("T must be positive");
  if (!(s.dt > 0.0)) throw ConfigError("dt must be positive");
  if (s.snapshots == 0) throw ConfigError("snapshots must be positive");
  if (s.profile_points < 16 || !is_power_of_two(s.profile_points))
    throw ConfigError("profile points must be a power of two >= 16");
  if (!(s.profile_half_width > 0.0)) throw ConfigError("profile half-width must be positive");
  if (s.perturbation && s.perturbation->center.size() != d) throw ConfigError("perturbation centre dimension mismatch");
  if (s.perturbation && s.perturbation->frequency.size() != d)
    throw ConfigError("perturbation frequency dimension mismatch");
  if (s.grid_points && (*s.grid_points < 16 || !is_power_of_two(*s.grid_points)))
    throw ConfigError("grid points must be a power of two >= 16");
}

std::vector<std::shared_ptr<const TrajectoryRecord>> scenario_trajectories(const Scenario& s) {
  std::vector<std::shared_ptr<const TrajectoryRecord>> out;
  for (const PacketSpec& p : s.packets)
    out.push_back(std::make_shared<const TrajectoryRecord>(
        integrate_trajectory(s.model, p.x0, p.xi0, p.mode, s.T, s.trajectory)));
  return out;
}

double max_momentum(const std::vector<std::shared_ptr<const TrajectoryRecord>>& records) {
  double m = 0.0;
  for (const auto& r : records) m = std::max(m, r->max_momentum());
  return m;
}

GridSpec choose_grid(const Scenario& s, double eps, const std::vector<std::shared_ptr<const TrajectoryRecord>>& records) {
  const int d = s.dim();
  GridSpec g;
  g.dim = d;
  const double margin = s.profile_half_width * std::sqrt(eps) + s.grid_padding;
  const double h_max = max_resolved_spacing(eps, max_momentum(records));
  for (int a = 0; a < kMaxDim; ++a) {
    if (a >= d) {
      g.half_width[a] = 1.0;
      g.points[a] = 1;
      continue;
    }
    double reach = 0.0;
    for (const auto& r : records)
      for (const Point& x : r->x_samples()) reach = std::max(reach, std::abs(x(a)));
    const double L = s.grid_half_width.value_or(reach + margin);
    g.half_width[a] = L;
    g.points[a] = s.grid_points.value_or(
        std::max<std::size_t>(16, next_power_of_two(static_cast<std::size_t>(std::ceil(2.0 * L / h_max)))));
  }
  g.validate();
  return g;
}

double energy_gap_constant(const MatrixPotentialModel& model, double E_plus, double E_minus, const AuditBox& box,
                           std::size_t samples) {
  const int d = model.dim();
  const double target = E_plus - E_minus;
  double inf = std::numeric_limits<double>::infinity();
  bool below = false, above = false;
  auto probe = [&](const Point& x) {
    const EigenData e = model.eigen(x);
    inf = std::min(inf, std::abs(target - e.gap));
    below = below || e.gap <= target;
    above = above || e.gap >= target;
  };
  std::mt19937_64 rng(0x6a6d6d61ULL);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (std::size_t n = 0; n < samples; ++n) {
    Point x(d);
    for (int a = 0; a < d; ++a) x(a) = box.lower(a) + (box.upper(a) - box.lower(a)) * u01(rng);
    probe(x);
  }
  // Lattice through the box, so the coupling maximum at the centre is always hit.
  const std::size_t per_axis = d == 1 ? 4001 : (d == 2 ? 201 : 41);
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= per_axis;
  for (std::size_t flat = 0; flat < total; ++flat) {
    Point x(d);
    std::size_t rem = flat;
    for (int a = 0; a < d; ++a) {
      const double s = double(rem % per_axis) / double(per_axis - 1);
      rem /= per_axis;
      x(a) = box.lower(a) + (box.upper(a) - box.lower(a)) * s;
    }
    probe(x);
  }
  for (int k = 1; k <= 6; ++k) {
    const double r = std::pow(10.0, k);
    for (int a = 0; a < d; ++a) {
      Point x = Point::Zero(d);
      x(a) = r;
      probe(x);
      x(a) = -r;
      probe(x);
    }
    probe(Point::Constant(d, r / std::sqrt(double(d))));
  }
  // The gap is continuous on a connected domain: straddling the target means it is attained.
  if (below && above) return 0.0;
  return inf;
}

namespace scenarios {

namespace {

Point vec(int d, std::initializer_list<double> v) {
  Point p = Point::Zero(d);
  int i = 0;
  for (double x : v) {
    if (i < d) p(i) = x;
    ++i;
  }
  return p;
}

}  // namespace

Scenario main_convergence(int dim) {
  Scenario s;
  s.name = "main_d" + std::to_string(dim);
  s.model = models::bump_coupling(dim);
  s.Lambda = 1.0;
  s.T = 1.0;
  PacketSpec p;
  if (dim == 1) {
    p.x0 = vec(dim, {-0.9});
    p.xi0 = vec(dim, {1.2});
  } else {
    // Slower packet keeps the resolved grid at 512 points per axis down to eps = 2^-5.
    p.x0 = vec(dim, {-0.25, 0.1, -0.1});
    p.xi0 = vec(dim, {0.45, 0.1, 0.1});
  }
  p.mode = Mode::plus;
  s.packets = {p};
  return s;
}

Scenario superposition_different_modes() {
  Scenario s;
  s.name = "superposition_diff";
  s.model = models::bump_coupling(1);
  s.Lambda = 1.0;
  s.T = 1.0;
  PacketSpec p1;
  p1.x0 = vec(1, {-0.6});
  p1.xi0 = vec(1, {0.6});
  p1.mode = Mode::plus;
  PacketSpec p2;
  p2.x0 = vec(1, {0.6});
  p2.xi0 = vec(1, {-1.2});
  p2.mode = Mode::minus;
  s.packets = {p1, p2};
  return s;
}

Scenario superposition_same_mode() {
  Scenario s;
  s.name = "superposition_same";
  s.model = models::bump_coupling(1);
  s.Lambda = 1.0;
  s.T = 1.0;
  PacketSpec p1;
  p1.x0 = vec(1, {-0.6});
  p1.xi0 = vec(1, {1.0});
  PacketSpec p2;
  p2.x0 = vec(1, {0.6});
  p2.xi0 = vec(1, {-1.0});
  s.packets = {p1, p2};
  return s;
}

Scenario breakdown() {
  Scenario s;
  s.name = "breakdown";
  s.model = models::bump_coupling(1);
  s.Lambda = 1.0;
  s.T = 6.0;
  s.snapshots = 120;
  s.correction = false;
  s.stop_threshold = 0.5;
  // The escaping profile spreads freely; the y-box must hold it until T.
  s.profile_points = 256;
  s.profile_half_width = 32.0;
  PacketSpec p;
  p.x0 = vec(1, {-0.6});
  p.xi0 = vec(1, {1.0});
  s.packets = {p};
  return s;
}

Scenario constant_diagonal_control(int dim) {
  Scenario s;
  s.name = "constant_control_d" + std::to_string(dim);
  s.model = models::constant_diagonal(dim, 1.0, -1.0);
  s.Lambda = 0.0;
  s.T = 1.0;
  PacketSpec p;
  p.x0 = vec(dim, {-0.5, 0.0, 0.0});
  p.xi0 = vec(dim, {1.0, 0.0, 0.0});
  s.packets = {p};
  return s;
}

}  // namespace scenarios

}  // namespace wplab
