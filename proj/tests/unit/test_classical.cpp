#include "oracles.hpp"

#include "wplab/classical.hpp"
#include "wplab/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace wplab;

namespace {

Point p1(double a) {
  Point x(1);
  x << a;
  return x;
}

Point p2(double a, double b) {
  Point x(2);
  x << a, b;
  return x;
}

}  // namespace

TEST_CASE("constant eigenvalue: straight lines and linear action") {
  const auto m = models::constant_diagonal(2, 1.0, -1.0);
  const Point x0 = p2(-0.5, 0.2), xi0 = p2(1.0, -0.3);
  for (Mode mode : {Mode::plus, Mode::minus}) {
    const TrajectoryRecord r = integrate_trajectory(m, x0, xi0, mode, 3.0);
    const double lam = mode == Mode::plus ? 1.0 : -1.0;
    for (double t : {0.0, 0.37, 1.5, 2.999, 3.0}) {
      const auto s = r.at(t);
      CHECK((s.x - (x0 + xi0 * t)).norm() < 1e-12);
      CHECK((s.xi - xi0).norm() < 1e-12);
      CHECK(s.action == doctest::Approx(0.5 * xi0.squaredNorm() * t - lam * t).epsilon(1e-12));
    }
    CHECK(r.max_energy_drift() < 1e-14);
  }
}

TEST_CASE("harmonic eigenvalue: closed-form flow and action") {
  const auto m = models::synthetic_quadratic(1);
  const TrajectoryRecord r = integrate_trajectory(m, p1(1.0), p1(0.0), Mode::plus, 6.0);
  double worst_x = 0.0, worst_S = 0.0;
  for (int k = 0; k <= 600; ++k) {
    const double t = 0.01 * k;
    const auto s = r.at(t);
    worst_x = std::max(worst_x, std::abs(s.x(0) - std::cos(t)) + std::abs(s.xi(0) + std::sin(t)));
    worst_S = std::max(worst_S, std::abs(s.action + std::sin(2.0 * t) / 4.0));
  }
  CHECK(worst_x < 1e-8);
  CHECK(worst_S < 1e-8);
  const std::vector<double> S = action(r);
  CHECK(S.size() == r.t_samples().size());
  CHECK(S.back() == doctest::Approx(-std::sin(12.0) / 4.0).epsilon(1e-9));
}

TEST_CASE("energy is conserved to 1e-10 at tolerance 1e-12") {
  const auto m = models::bump_coupling(2);
  TrajectoryOptions opt;
  opt.tolerance = 1e-12;
  for (Mode mode : {Mode::plus, Mode::minus}) {
    const TrajectoryRecord r = integrate_trajectory(m, p2(-0.6, 0.3), p2(1.0, -0.4), mode, 10.0, opt);
    CHECK(r.max_energy_drift() <= 1e-10);
  }
}

TEST_CASE("time reversal returns to the initial point") {
  const auto m = models::bump_coupling(2);
  const Point x0 = p2(-0.7, 0.1), xi0 = p2(0.9, 0.2);
  const TrajectoryRecord fwd = integrate_trajectory(m, x0, xi0, Mode::plus, 4.0);
  const auto end = fwd.at(4.0);
  const TrajectoryRecord back = integrate_trajectory(m, end.x, -end.xi, Mode::plus, 4.0);
  const auto home = back.at(4.0);
  CHECK((home.x - x0).norm() < 1e-8);
  CHECK((home.xi + xi0).norm() < 1e-8);
}

TEST_CASE("Qdot is the time derivative of Q along the flow") {
  const auto m = models::bump_coupling(2);
  const TrajectoryRecord r = integrate_trajectory(m, p2(-1.2, 0.2), p2(1.0, 0.1), Mode::plus, 3.0);
  for (double t : {0.3, 1.0, 1.7, 2.5}) {
    const double h = 1e-4;
    const SymMat fd = (r.Q(t + h) - r.Q(t - h)) / (2.0 * h);
    CHECK((r.Qdot(t) - fd).norm() <= 1e-5 * std::max(1.0, fd.norm()));
    CHECK((r.Q(t) - m->hessian_lambda(r.at(t).x, Mode::plus)).norm() < 1e-14);
  }
}

TEST_CASE("escape through the coupling region in d = 2") {
  const auto m = models::bump_coupling(2);
  const TrajectoryRecord r = integrate_trajectory(m, p2(-0.6, 0.2), p2(1.0, 0.3), Mode::plus, 100.0);
  const EscapeDiagnostics e = escape_diagnostics(r);
  CHECK(e.energy_excess > 0.0);
  CHECK(e.escaping());
  const double xi_inf = std::sqrt(2.0 * e.energy_excess);
  CHECK(e.min_speed_ratio > 0.9 * xi_inf);
  CHECK(r.max_energy_drift() < 1e-9);
}

TEST_CASE("Qdot decay fit") {
  const auto bump = models::bump_coupling(2);
  SUBCASE("short records are rejected") {
    const TrajectoryRecord r = integrate_trajectory(bump, p2(-0.6, 0.2), p2(1.0, 0.3), Mode::plus, 5.0);
    CHECK_THROWS_AS(fit_qdot_decay(r), FitError);
  }
  SUBCASE("constant eigenvalue is degenerate with infinite decay") {
    const TrajectoryRecord r =
        integrate_trajectory(models::constant_diagonal(2, 1.0, -1.0), p2(0, 0), p2(1, 0), Mode::plus, 20.0);
    const QdotFit f = fit_qdot_decay(r);
    CHECK(f.degenerate);
    CHECK(f.hypothesis_met);
    CHECK(std::isinf(f.kappa0));
  }
  SUBCASE("<x>^-2 tail gives Qdot ~ t^-5") {
    const TrajectoryRecord r = integrate_trajectory(bump, p2(-0.6, 0.2), p2(1.0, 0.3), Mode::plus, 100.0);
    const QdotFit f = fit_qdot_decay(r);
    CHECK_FALSE(f.degenerate);
    CHECK(f.kappa0 > 3.0);
    CHECK(f.kappa0 < 4.5);
    CHECK(f.hypothesis_met);
  }
}

TEST_CASE("Taylor remainder of lambda about x(t)") {
  SUBCASE("vanishes for the quadratic and constant models") {
    for (const ModelPtr& m : {models::synthetic_quadratic(2), models::constant_diagonal(2, 1.0, -1.0)}) {
      const TrajectoryRecord r = integrate_trajectory(m, p2(0.5, -0.2), p2(0.3, 0.8), Mode::plus, 2.0);
      for (const Point& x : oracle::random_points(2, 50, 2.0, 9))
        CHECK(std::abs(taylor_remainder(*m, r, 1.3, x, Mode::plus)) < 1e-12);
    }
  }
  SUBCASE("is cubic in the displacement for the bump model") {
    const auto m = models::bump_coupling(2);
    const TrajectoryRecord r = integrate_trajectory(m, p2(-0.6, 0.2), p2(1.0, 0.3), Mode::plus, 2.0);
    const double t = 0.5;
    const Point xc = r.at(t).x;
    const Point v = p2(0.6, 0.8);
    std::vector<double> hs, rs;
    for (double h = 0.08; h > 0.009; h /= 2) {
      hs.push_back(h);
      rs.push_back(std::abs(taylor_remainder(*m, r, t, xc + h * v, Mode::plus)));
    }
    CHECK(oracle::log2_slope(hs, rs) == doctest::Approx(3.0).epsilon(0.1));
  }
}

TEST_CASE("Stormer-Verlet is second order on the harmonic flow") {
  const auto m = models::synthetic_quadratic(1);
  std::vector<double> hs, errs;
  for (double h : {4e-3, 2e-3, 1e-3}) {
    TrajectoryOptions opt;
    opt.integrator = Integrator::stormer_verlet;
    opt.verlet_step = h;
    const TrajectoryRecord r = integrate_trajectory(m, p1(1.0), p1(0.0), Mode::plus, 2.0, opt);
    const auto s = r.at(2.0);
    hs.push_back(h);
    errs.push_back(std::abs(s.x(0) - std::cos(2.0)) + std::abs(s.xi(0) + std::sin(2.0)));
    CHECK(r.max_energy_drift() < 1e-5);
  }
  CHECK(oracle::log2_slope(hs, errs) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("trajectory CSV columns") {
  const auto m = models::bump_coupling(2);
  const TrajectoryRecord r = integrate_trajectory(m, p2(-0.6, 0.2), p2(1.0, 0.3), Mode::minus, 1.0);
  const auto path = std::filesystem::temp_directory_path() / "wplab_traj_test.csv";
  write_trajectory_csv(r, path);
  std::ifstream is(path);
  std::string header;
  std::getline(is, header);
  CHECK(header == "t,x_1,x_2,xi_1,xi_2,S,E,Q_norm,Qdot_norm");
  std::size_t rows = 0;
  for (std::string line; std::getline(is, line);) ++rows;
  CHECK(rows == r.t_samples().size());
  std::filesystem::remove(path);
}
