#pragma once

#include "wplab/classical.hpp"

#include <utility>
#include <vector>

namespace wplab {

struct InteractionReport {
  double eps = 0.0;
  double gamma = 0.0;
  double measure_I = 0.0;         // |I^eps(T)|
  std::size_t N_intervals = 0;    // maximal subintervals
  double max_J = 0.0;             // longest subinterval
  double Gamma = 0.0;             // energy-gap constant (different modes), 0 otherwise
  double min_zddot = 0.0;         // min of d^2/dt^2 |x_1 - x_2|^2 over I (+inf if I is empty)
  std::vector<std::pair<double, double>> intervals;

  /// measure_I <= N_intervals * max_J
  bool identity_holds() const { return measure_I <= double(N_intervals) * max_J; }
};

/// I = {t in [0, T] : |x_1(t) - x_2(t)| <= eps^gamma}, located by dense sampling and
/// bisection of every crossing to 1e-9 in time. Requires 0 < gamma < 1/2.
InteractionReport measure_interaction_interval(const TrajectoryRecord& rec1, const TrajectoryRecord& rec2,
                                               double eps, double gamma, double T, double Gamma = 0.0);

/// d^2/dt^2 |x_1 - x_2|^2 = 2|xi_1 - xi_2|^2 - 2 (x_1 - x_2).(grad lambda_1(x_1) - grad lambda_2(x_2)).
double separation_acceleration(const TrajectoryRecord& rec1, const TrajectoryRecord& rec2, double t);

}  // namespace wplab
