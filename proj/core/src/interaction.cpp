#include "wplab/interaction.hpp"

#include "wplab/errors.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace wplab {

double separation_acceleration(const TrajectoryRecord& rec1, const TrajectoryRecord& rec2, double t) {
  const auto s1 = rec1.at(t);
  const auto s2 = rec2.at(t);
  const Point dx = s1.x - s2.x;
  const Point dxi = s1.xi - s2.xi;
  const Point g1 = rec1.model()->grad_lambda(s1.x, rec1.mode());
  const Point g2 = rec2.model()->grad_lambda(s2.x, rec2.mode());
  return 2.0 * dxi.squaredNorm() - 2.0 * dx.dot(g1 - g2);
}

InteractionReport measure_interaction_interval(const TrajectoryRecord& rec1, const TrajectoryRecord& rec2,
                                               double eps, double gamma, double T, double Gamma) {
  if (!(gamma > 0.0 && gamma < 0.5)) throw ConfigError("interaction exponent gamma must lie in (0, 1/2)");
  if (!(eps > 0.0) || !(T > 0.0)) throw ConfigError("interaction interval needs eps > 0 and T > 0");
  if (T > rec1.final_time() + 1e-12 || T > rec2.final_time() + 1e-12)
    throw ConfigError("interaction horizon exceeds the trajectory records");
  InteractionReport rep;
  rep.eps = eps;
  rep.gamma = gamma;
  rep.Gamma = Gamma;
  const double r = std::pow(eps, gamma);
  // f < 0 exactly on I.
  auto f = [&](double t) { return (rec1.at(t).x - rec2.at(t).x).norm() - r; };
  auto refine = [&](double a, double b) {
    double fa = f(a);
    while (b - a > 1e-10) {
      const double m = 0.5 * (a + b);
      const double fm = f(m);
      if ((fm < 0.0) == (fa < 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    return 0.5 * (a + b);
  };

  const std::size_t n = std::max<std::size_t>(20000, static_cast<std::size_t>(std::ceil(T / 1e-3)));
  const double h = T / double(n);
  double prev_t = 0.0;
  double prev_f = f(0.0);
  std::optional<double> open;
  if (prev_f <= 0.0) open = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double t = k == n ? T : double(k) * h;
    const double ft = f(t);
    if ((prev_f <= 0.0) != (ft <= 0.0)) {
      const double c = refine(prev_t, t);
      if (open) {
        rep.intervals.emplace_back(*open, c);
        open.reset();
      } else {
        open = c;
      }
    }
    prev_t = t;
    prev_f = ft;
  }
  if (open) rep.intervals.emplace_back(*open, T);

  rep.min_zddot = std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : rep.intervals) {
    const double len = b - a;
    rep.measure_I += len;
    rep.max_J = std::max(rep.max_J, len);
    for (int j = 0; j <= 32; ++j) rep.min_zddot = std::min(rep.min_zddot, separation_acceleration(rec1, rec2, a + len * j / 32.0));
  }
  rep.N_intervals = rep.intervals.size();
  return rep;
}

}  // namespace wplab
