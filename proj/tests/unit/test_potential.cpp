#include "oracles.hpp"

#include "wplab/errors.hpp"
#include "wplab/potential.hpp"

#include <doctest.h>

using namespace wplab;

namespace {

double bracket(const Point& x) { return std::sqrt(1.0 + x.squaredNorm()); }

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("V is symmetric and matches rho0 Id + [[rho, omega], [omega, -rho]]") {
  for (int d = 1; d <= 3; ++d) {
    const auto m = models::bump_coupling(d);
    for (const Point& x : oracle::random_points(d, 500, 3.0, 11 + d)) {
      const Eigen::Matrix2d V = m->eval_V(x);
      CHECK((V - V.transpose()).norm() == 0.0);
      const PotentialSample s = m->sample(x);
      CHECK(V(0, 0) == doctest::Approx(s.rho0 + s.rho).epsilon(1e-15));
      CHECK(V(1, 1) == doctest::Approx(s.rho0 - s.rho).epsilon(1e-15));
      CHECK(V(0, 1) == doctest::Approx(s.omega).epsilon(1e-15));
    }
  }
}

TEST_CASE("bump model outside the coupling support is diag(rho0 + 1, rho0 - 1)") {
  const auto m = models::bump_coupling(2);
  for (const Point& x : oracle::random_points(2, 200, 8.0, 3)) {
    if (x.norm() <= m->coupling_support_radius()) continue;
    const double rho0 = 0.5 * std::pow(bracket(x), -2.0);
    const Eigen::Matrix2d V = m->eval_V(x);
    CHECK(V(0, 0) == doctest::Approx(rho0 + 1.0).epsilon(1e-14));
    CHECK(V(1, 1) == doctest::Approx(rho0 - 1.0).epsilon(1e-14));
    CHECK(V(0, 1) == 0.0);
  }
}

TEST_CASE("rotation example with theta = 0 is <x>^-p diag(1, -1), and lambda = +-<x>^-p everywhere") {
  const auto m = models::rotation_example(2, {}, 1e-300);
  Point far(2);
  far << 2.0, -1.0;  // outside the theta support
  const Eigen::Matrix2d V = m->eval_V(far);
  const double b = 1.0 / bracket(far);
  CHECK(V(0, 0) == doctest::Approx(b).epsilon(1e-15));
  CHECK(V(1, 1) == doctest::Approx(-b).epsilon(1e-15));
  CHECK(V(0, 1) == 0.0);
  for (const Point& x : oracle::random_points(2, 300, 4.0, 5)) {
    const EigenData e = m->eigen(x);
    CHECK(e.lambda_plus == doctest::Approx(1.0 / bracket(x)).epsilon(1e-13));
    CHECK(e.lambda_minus == doctest::Approx(-1.0 / bracket(x)).epsilon(1e-13));
  }
}

TEST_CASE("an already diagonal V has the canonical eigenbasis") {
  const auto m = models::constant_diagonal(1, 1.0, -1.0);
  const EigenData e = m->eigen(Point::Zero(1));
  CHECK(e.lambda_plus == doctest::Approx(1.0));
  CHECK(e.lambda_minus == doctest::Approx(-1.0));
  CHECK(e.chi_plus(0) == doctest::Approx(1.0));
  CHECK(std::abs(e.chi_plus(1)) < 1e-15);
  CHECK(std::abs(e.chi_minus(0)) < 1e-15);
  CHECK(e.chi_minus(1) == doctest::Approx(1.0));
}

TEST_CASE("eigen residual, orthonormality and the eigenvalue formula at 10^4 random points") {
  const auto m = models::bump_coupling(2);
  double worst = 0.0;
  for (const Point& x : oracle::random_points(2, 10000, 2.5, 7)) {
    const EigenData e = m->eigen(x);
    const Eigen::Matrix2d V = m->eval_V(x);
    worst = std::max(worst, (V * e.chi_plus - e.lambda_plus * e.chi_plus).norm());
    worst = std::max(worst, (V * e.chi_minus - e.lambda_minus * e.chi_minus).norm());
    CHECK(std::abs(e.chi_plus.norm() - 1.0) < 1e-14);
    CHECK(std::abs(e.chi_plus.dot(e.chi_minus)) < 1e-14);
    const PotentialSample s = m->sample(x);
    const double r = std::sqrt(s.rho * s.rho + s.omega * s.omega);
    CHECK(e.lambda_plus == doctest::Approx(s.rho0 + r).epsilon(1e-14));
    CHECK(e.gap == doctest::Approx(2.0 * r).epsilon(1e-14));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("a vanishing rho and omega is a GapViolation") {
  MatrixPotentialModel m("degenerate", 1, fn::constant(0.0), fn::constant(0.0), fn::constant(0.0), 1.0,
                         Eigen::Matrix2d::Zero(), 1.0);
  CHECK_THROWS_AS(m.eigen(Point::Zero(1)), GapViolation);
  CHECK_THROWS_AS(m.grad_lambda(Point::Zero(1), Mode::plus), GapViolation);
}

TEST_CASE("grad lambda agrees with central differences") {
  for (int d = 1; d <= 3; ++d) {
    const auto m = models::bump_coupling(d);
    for (Mode mode : {Mode::plus, Mode::minus}) {
      for (const Point& x : oracle::random_points(d, 200, 2.5, 19 + d)) {
        const double h = 1e-4 * bracket(x);
        const Point fd = oracle::fd_gradient([&](const Point& y) { return m->lambda(y, mode); }, x, h);
        const Point g = m->grad_lambda(x, mode);
        CHECK((g - fd).norm() <= 1e-6 * std::max(1.0, g.norm()));
      }
    }
  }
}

TEST_CASE("rotation example gradient at x = (1, 0) with p = 1") {
  const auto m = models::rotation_example(2, {}, 1e-300);
  Point x(2);
  x << 1.0, 0.0;
  const Point g = m->grad_lambda(x, Mode::plus);
  CHECK(g(0) == doctest::Approx(-std::pow(2.0, -1.5)).epsilon(1e-13));
  CHECK(std::abs(g(1)) < 1e-14);
  const Point fd = oracle::fd_gradient([&](const Point& y) { return m->lambda(y, Mode::plus); }, x, 1e-4);
  CHECK((g - fd).norm() < 1e-7);
}

TEST_CASE("constant eigenvalue region has zero gradient and Hessian") {
  BumpCouplingParams p;
  p.rho0_amplitude = 0.0;
  const auto m = models::bump_coupling(2, p);
  Point x(2);
  x << 3.0, -2.0;
  CHECK(m->grad_lambda(x, Mode::plus).norm() == 0.0);
  CHECK(m->hessian_lambda(x, Mode::minus).norm() == 0.0);
}

TEST_CASE("Hessian: identity for the quadratic model, finite differences elsewhere") {
  const auto q = models::synthetic_quadratic(3);
  for (const Point& x : oracle::random_points(3, 20, 4.0, 2))
    CHECK((q->hessian_lambda(x, Mode::plus) - SymMat::Identity(3, 3)).norm() < 1e-14);

  for (int d = 1; d <= 3; ++d) {
    const auto m = models::bump_coupling(d);
    for (Mode mode : {Mode::plus, Mode::minus}) {
      for (const Point& x : oracle::random_points(d, 100, 2.0, 31 + d)) {
        const double h = 1e-4 * bracket(x);
        const SymMat fd =
            oracle::fd_jacobian([&](const Point& y) { return Point(m->grad_lambda(y, mode)); }, x, h);
        const SymMat H = m->hessian_lambda(x, mode);
        CHECK((H - H.transpose()).norm() < 1e-14);
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) CHECK(std::abs(H(a, b) - fd(a, b)) <= 1e-5 * std::max(1.0, std::abs(H(a, b))));
      }
    }
  }
}

TEST_CASE("d chi: zero outside the support, finite differences, and the half-angle identity") {
  const auto m = models::bump_coupling(2);
  Point far(2);
  far << 2.0, 1.0;
  CHECK(m->d_chi(far, Mode::plus).norm() == 0.0);

  for (const Point& x : oracle::random_points(2, 200, 1.6, 41)) {
    const EigenData e = m->eigen(x);
    const FrameDerivative dchi = m->d_chi(x, Mode::plus);
    const Point ga = m->grad_alpha(x);
    for (int j = 0; j < 2; ++j) {
      Point xp = x, xm = x;
      const double h = 1e-5;
      xp(j) += h;
      xm(j) -= h;
      const Eigen::Vector2d fd =
          (m->eigen(xp, e.alpha).chi_plus - m->eigen(xm, e.alpha).chi_plus) / (2.0 * h);
      const Eigen::Vector2d an = dchi.row(j).transpose();
      CHECK((an - fd).norm() <= 1e-6 * std::max(1.0, an.norm()));
      // d chi_plus = (grad alpha / 2) chi_minus, so it is orthogonal to chi_plus.
      CHECK((an - 0.5 * ga(j) * e.chi_minus).norm() < 1e-14);
      CHECK(std::abs(an.dot(e.chi_plus)) < 1e-14);
    }
  }
}

TEST_CASE("assumption audit") {
  const int d = 2;
  const AuditBox box{Point::Constant(d, -10.0), Point::Constant(d, 10.0)};

  const AuditReport bump = models::bump_coupling(d)->assumption_audit(box, 5000);
  CHECK(bump.passed());
  CHECK(bump.min_gap_squared == doctest::Approx(1.0).epsilon(1e-12));

  const AuditReport rot = models::rotation_example(d, {}, 1e-6)->assumption_audit(box, 5000);
  CHECK_FALSE(rot.gap_ok);
  CHECK_FALSE(rot.passed());

  // omega with unbounded support.
  Eigen::Matrix2d vinf;
  vinf << 1.0, 0.0, 0.0, -1.0;
  MatrixPotentialModel wide("wide-coupling", d, fn::constant(0.0), fn::constant(1.0),
                            fn::bracket_power(0.3, 2.0, Point::Zero(d)), 2.0, vinf, 1.5);
  const AuditReport w = wide.assumption_audit(box, 5000);
  CHECK_FALSE(w.diagonal_outside_support_ok);
  CHECK(w.gap_ok);
}

TEST_CASE("lambda at infinity reads V_infinity") {
  const auto m = models::bump_coupling(1);
  CHECK(m->lambda_infinity(Mode::plus) == doctest::Approx(1.0));
  CHECK(m->lambda_infinity(Mode::minus) == doctest::Approx(-1.0));
  Point x(1);
  x << 1e4;
  CHECK(rel(m->lambda(x, Mode::plus), 1.0) < 1e-8);
}
