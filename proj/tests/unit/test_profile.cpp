#include "oracles.hpp"

#include "wplab/errors.hpp"
#include "wplab/profile.hpp"

#include <doctest.h>

using namespace wplab;

namespace {

ComplexField gaussian(const GridSpec& g, double shift = 0.0) {
  return sample_field(g, [&](const Point& y) {
    Point z = y;
    z(0) -= shift;
    return oracle::free_gaussian(z, 0.0, g.dim);
  });
}

double max_abs_diff(const ComplexField& a, const ComplexField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

SymMat eye(int d) { return SymMat::Identity(d, d); }

// Q(t) = (1 + sin(t)/2) Id, a smooth time dependence for order and identity checks.
QSourcePtr breathing_q(int d) {
  return std::make_shared<FunctionQSource>(
      d, [d](double t) -> SymMat { return (1.0 + 0.5 * std::sin(t)) * eye(d); },
      [d](double t) -> SymMat { return 0.5 * std::cos(t) * eye(d); });
}

}  // namespace

TEST_CASE("free evolution matches the exact spreading Gaussian") {
  const GridSpec g = profile_grid(1, 1024);
  const ComplexField a = gaussian(g);
  ProfileSolveOptions opt;
  opt.dt = 1e-2;
  opt.record_every = 50;
  const auto states = solve_profile(a, constant_q(SymMat::Zero(1, 1)), 0.0, 1.5, opt);
  for (const ProfileState& s : states) {
    const ComplexField exact = sample_field(g, [&](const Point& y) { return oracle::free_gaussian(y, s.t, 1); });
    CHECK(max_abs_diff(s.u, exact) <= 1e-6);
  }
  CHECK(states.back().t == doctest::Approx(1.5));
}

TEST_CASE("harmonic ground state keeps its modulus") {
  const GridSpec g = profile_grid(1, 256);
  const ComplexField a = gaussian(g);
  ProfileSolveOptions opt;
  opt.dt = 1e-3;
  opt.record_every = 500;
  const auto states = solve_profile(a, constant_q(eye(1)), 0.0, 2.0, opt);
  for (const ProfileState& s : states) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.points(); ++i) m = std::max(m, std::abs(std::abs(s.u.at(0, i)) - std::abs(a.at(0, i))));
    CHECK(m <= 1e-5);
  }
  const ProfileFunctionals f = functionals(states.front(), *constant_q(eye(1)), 0.0);
  CHECK(f.mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.V == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(f.E == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(f.M[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.grad_norm == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));
}

TEST_CASE("d = 2 defocusing: mass and energy conservation for constant Q") {
  const GridSpec g = profile_grid(2, 64, 8.0);
  const ComplexField a = gaussian(g, 0.5);
  const auto q = constant_q(eye(2));
  ProfileSolveOptions opt;
  opt.dt = 5e-4;
  opt.record_every = 200;
  const auto states = solve_profile(a, q, 1.0, 1.0, opt);
  const ProfileFunctionals f0 = functionals(states.front(), *q, 1.0, false);
  for (const ProfileState& s : states) {
    const ProfileFunctionals f = functionals(s, *q, 1.0, false);
    CHECK(std::abs(f.mass - f0.mass) <= 1e-10);
    CHECK(std::abs(f.E - f0.E) <= 1e-6);
  }
}

TEST_CASE("Strang splitting is second order in time") {
  const GridSpec g = profile_grid(1, 128);
  const ComplexField a = gaussian(g, 0.3);
  const auto q = breathing_q(1);
  auto final_state = [&](double dt) {
    ProfileSolveOptions opt;
    opt.dt = dt;
    opt.record_every = 1;
    return solve_profile(a, q, 1.0, 1.0, opt).back().u;
  };
  const ComplexField ref = final_state(1.0 / 1280.0);
  std::vector<double> hs, errs;
  for (double dt : {1.0 / 40.0, 1.0 / 80.0, 1.0 / 160.0}) {
    hs.push_back(dt);
    errs.push_back(l2_norm(final_state(dt) - ref));
  }
  CHECK(oracle::log2_slope(hs, errs) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("energy identity dE/dt = (1/2) int <Qdot y, y> |u|^2") {
  const GridSpec g = profile_grid(1, 128);
  const ComplexField a = gaussian(g, 0.4);
  const auto q = breathing_q(1);
  ProfileSolveOptions opt;
  opt.dt = 5e-4;
  opt.record_every = 20;
  const auto states = solve_profile(a, q, 1.0, 2.0, opt);
  const auto res = energy_identity_residual(states, *q, 1.0);
  CHECK(res.size() == states.size() - 2);
  double worst = 0.0;
  for (double r : res) worst = std::max(worst, r);
  CHECK(worst <= 1e-4);
}

TEST_CASE("growth study: free Gaussian widens like sqrt((1 + t^2)/2)") {
  const GridSpec g = profile_grid(1, 512, 24.0);
  const GrowthReport rep = growth_study(gaussian(g), constant_q(SymMat::Zero(1, 1)), 0.0, 3.0, 16, 1e-2);
  REQUIRE(rep.rows.size() == 17);
  for (const GrowthRow& r : rep.rows) {
    CHECK(r.f.y_norm == doctest::Approx(std::sqrt((1.0 + r.t * r.t) / 2.0)).epsilon(1e-8));
    CHECK(r.f.grad_norm == doctest::Approx(std::sqrt(0.5)).epsilon(1e-8));
    CHECK(r.leak < 1e-12);
  }
  CHECK(rep.sup_grad_norm == doctest::Approx(std::sqrt(0.5)).epsilon(1e-8));
  CHECK(rep.hypothesis_met);
  CHECK(rep.y_power.slope > 0.0);
}

TEST_CASE("focusing Lambda is rejected") {
  const GridSpec g = profile_grid(1, 64);
  CHECK_THROWS_AS(solve_profile(gaussian(g), constant_q(eye(1)), -1.0, 1.0), ConfigError);
}

TEST_CASE("mass reaching the box faces raises BoundaryLeak") {
  const GridSpec g = profile_grid(1, 64, 4.0);
  ProfileSolveOptions opt;
  opt.dt = 1e-2;
  opt.record_every = 10;
  CHECK_THROWS_AS(solve_profile(gaussian(g), constant_q(SymMat::Zero(1, 1)), 0.0, 6.0, opt), BoundaryLeak);
}

TEST_CASE("global phase commutes with the flow") {
  const GridSpec g = profile_grid(1, 128);
  const ComplexField a = gaussian(g, 0.2);
  const cplx phase = std::polar(1.0, 0.7);
  ProfileSolveOptions opt;
  opt.dt = 1e-3;
  opt.record_every = 250;
  const auto q = breathing_q(1);
  const auto s1 = solve_profile(a, q, 1.0, 1.0, opt);
  const auto s2 = solve_profile(phase * a, q, 1.0, 1.0, opt);
  for (std::size_t k = 0; k < s1.size(); ++k) CHECK(max_abs_diff(phase * s1[k].u, s2[k].u) < 1e-13);
}

TEST_CASE("ProfileTrack reproduces solve_profile") {
  const GridSpec g = profile_grid(1, 128);
  const ComplexField a = gaussian(g, 0.2);
  const auto q = breathing_q(1);
  ProfileSolveOptions opt;
  opt.dt = 1e-3;
  opt.record_every = 100;
  const auto states = solve_profile(a, q, 1.0, 0.5, opt);
  ProfileTrack track(a, q, 1.0, 1e-3);
  for (const ProfileState& s : states) CHECK(max_abs_diff(track.advance_to(s.t), s.u) < 1e-13);
}
