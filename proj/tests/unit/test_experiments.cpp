#include "oracles.hpp"

#include "wplab/errors.hpp"
#include "wplab/experiments.hpp"
#include "wplab/report.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace wplab;

namespace {

Point vec1(double a) {
  Point x(1);
  x << a;
  return x;
}

ErrorSeries synthetic(double eps, double w, double minus, double l4, double drift) {
  ErrorSeries s;
  s.eps = eps;
  s.t = {0.0, 0.5, 1.0};
  s.w_Heps1 = {0.0, w / 2, w};
  s.minus_mass = {0.0, minus, minus / 2};
  s.theta_L4_scaled = {l4, l4, l4};
  s.mass_drift = {0.0, drift, drift};
  return s;
}

PacketSpec packet(double x0, double xi0, Mode m = Mode::plus) {
  PacketSpec p;
  p.x0 = vec1(x0);
  p.xi0 = vec1(xi0);
  p.mode = m;
  return p;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k] != b[k]) return false;
  return true;
}

}  // namespace

TEST_CASE("ladder parsing") {
  const auto l = parse_ladder("2^-2..2^-5");
  REQUIRE(l.size() == 4);
  CHECK(l[0] == 0.25);
  CHECK(l[3] == 1.0 / 32.0);
  const auto m = parse_ladder("0.5, 2^-3,0.0625");
  CHECK(m == std::vector<double>{0.5, 0.125, 0.0625});
  CHECK_THROWS_AS(parse_ladder("abc"), ConfigError);
  CHECK_THROWS_AS(parse_ladder("2"), ConfigError);
  CHECK_THROWS_AS(parse_ladder(""), ConfigError);
  CHECK(default_ladder(1).size() >= 4);
}

TEST_CASE("gates on synthetic series") {
  const std::vector<ErrorSeries> good{synthetic(0.25, 0.8, 0.1, 0.30, 1e-12), synthetic(0.125, 0.5, 0.05, 0.31, 2e-12),
                                      synthetic(0.0625, 0.3, 0.02, 0.29, 1e-12), synthetic(0.03125, 0.2, 0.01, 0.30, 0)};
  CHECK(mass_gate(good, 1.0).passed);
  CHECK(monotone_gate("w", good, &ErrorSeries::w_Heps1).passed);
  CHECK(decoupling_gate(good).passed);
  CHECK(bootstrap_diagnostics(good).passed);

  SUBCASE("mass drift limit scales with T") {
    auto bad = good;
    bad[1].mass_drift[2] = 5e-8;
    CHECK_FALSE(mass_gate(bad, 1.0).passed);
    CHECK(mass_gate(bad, 10.0).passed);
  }
  SUBCASE("an increase breaks monotonicity, ties within 1e-6 do not") {
    auto bad = good;
    bad[2].w_Heps1[2] = 0.6;
    CHECK_FALSE(monotone_gate("w", bad, &ErrorSeries::w_Heps1).passed);
    auto tie = good;
    tie[2].w_Heps1[2] = 0.5 + 5e-7;
    CHECK(monotone_gate("w", tie, &ErrorSeries::w_Heps1).passed);
  }
  SUBCASE("minus mass above the error bound fails decoupling") {
    auto bad = good;
    bad[3].minus_mass[1] = 0.25;
    CHECK_FALSE(decoupling_gate(bad).passed);
  }
  SUBCASE("bootstrap outlier") {
    auto bad = good;
    bad[3].theta_L4_scaled = {1.0, 1.0, 1.0};
    CHECK_FALSE(bootstrap_diagnostics(bad).passed);
  }
}

TEST_CASE("sup and finiteness") {
  CHECK(sup({0.1, 3.0, -2.0}) == 3.0);
  CHECK(sup({}) == 0.0);
  ErrorSeries s = synthetic(0.25, 0.5, 0.1, 0.3, 0.0);
  CHECK(s.all_finite());
  s.w_Heps1[1] = std::nan("");
  CHECK_FALSE(s.all_finite());
}

TEST_CASE("constant diagonal control: the ansatz is exact") {
  const Scenario s = scenarios::constant_diagonal_control(1);
  for (double eps : {0.125, 0.0625}) {
    const ErrorSeries r = run_series(s, eps);
    CHECK(r.all_finite());
    CHECK(sup(r.w_Heps1) <= 1e-6);
    CHECK(sup(r.theta_Heps1) <= 1e-6);
    CHECK(sup(r.minus_mass) <= 1e-12);
    CHECK(sup(r.g_Heps1) == 0.0);
    CHECK(r.size() == s.snapshots + 1);
  }
}

TEST_CASE("a vanishing perturbation reproduces the unperturbed run bit for bit") {
  Scenario base = scenarios::main_convergence(1);
  base.T = 0.25;
  base.snapshots = 8;
  Scenario pert = base;
  pert.perturbation = PerturbationSpec{2000.0, vec1(-0.9), 0.5, vec1(1.2)};
  const ErrorSeries a = run_series(base, 0.25);
  const ErrorSeries b = run_series(pert, 0.25);
  CHECK(bitwise_equal(a.w_Heps1, b.w_Heps1));
  CHECK(bitwise_equal(a.theta_L2, b.theta_L2));

  pert.perturbation->gamma0 = 0.5;
  const ErrorSeries c = run_series(pert, 0.25);
  CHECK_FALSE(bitwise_equal(a.w_Heps1, c.w_Heps1));
  // ||eta||_{H_eps^1} = eps^gamma0 bounds the initial discrepancy.
  CHECK(std::abs(c.w_Heps1[0] - a.w_Heps1[0]) <= std::sqrt(0.25) + 1e-12);
}

TEST_CASE("linear problem: two identical packets equal one packet of amplitude 2") {
  Scenario one;
  one.model = models::bump_coupling(1);
  one.Lambda = 0.0;
  one.T = 0.5;
  one.snapshots = 8;
  PacketSpec p = packet(-0.6, 1.0);
  p.amplitude = 2.0;
  one.packets = {p};
  Scenario two = one;
  two.packets = {packet(-0.6, 1.0), packet(-0.6, 1.0)};
  const ErrorSeries a = run_series(one, 0.125);
  const ErrorSeries b = run_series(two, 0.125);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a.w_Heps1[k] == doctest::Approx(b.w_Heps1[k]).epsilon(1e-9));
    CHECK(a.minus_mass[k] == doctest::Approx(b.minus_mass[k]).epsilon(1e-9));
  }
}

TEST_CASE("interaction interval of two free counter-propagating centres") {
  // x_{1,2}(t) = -/+ (r - v t): |x_1 - x_2| = 2|r - v t|, so |I| = eps^gamma / (2 v) * 2 = eps^gamma / v.
  Scenario s;
  s.model = models::constant_diagonal(1, 1.0, -1.0);
  s.T = 2.0;
  const double r = 0.6, v = 1.0;
  s.packets = {packet(-r, v), packet(r, -v)};
  const auto recs = scenario_trajectories(s);
  const double gamma = 0.25;
  std::vector<double> eps, measure;
  for (double e : {1.0 / 16.0, 1.0 / 64.0, 1.0 / 256.0}) {
    const InteractionReport rep = measure_interaction_interval(*recs[0], *recs[1], e, gamma, s.T);
    const double expect = std::pow(e, gamma) / v;
    CHECK(rep.measure_I == doctest::Approx(expect).epsilon(1e-8));
    CHECK(rep.N_intervals == 1);
    CHECK(rep.max_J == doctest::Approx(expect).epsilon(1e-8));
    CHECK(rep.identity_holds());
    REQUIRE(rep.intervals.size() == 1);
    CHECK(rep.intervals[0].first == doctest::Approx(r / v - 0.5 * expect).epsilon(1e-8));
    CHECK(rep.min_zddot == doctest::Approx(8.0 * v * v).epsilon(1e-10));
    eps.push_back(e);
    measure.push_back(rep.measure_I);
  }
  CHECK(oracle::log2_slope(eps, measure) == doctest::Approx(gamma).epsilon(1e-6));
  CHECK(separation_acceleration(*recs[0], *recs[1], 0.3) == doctest::Approx(8.0 * v * v));
  CHECK_THROWS_AS(measure_interaction_interval(*recs[0], *recs[1], 0.1, 0.5, s.T), ConfigError);
}

TEST_CASE("interaction runner gates on the counter-propagating pair") {
  Scenario s;
  s.model = models::constant_diagonal(1, 1.0, -1.0);
  s.T = 2.0;
  s.packets = {packet(-0.6, 1.0), packet(0.6, -1.0)};
  const ExperimentReport rep = run_interaction(s, {1.0 / 16.0, 1.0 / 64.0, 1.0 / 256.0, 1.0 / 1024.0}, 0.25);
  CHECK(rep.passed());
  REQUIRE(rep.find_gate("interval_identity"));
  REQUIRE(rep.find_gate("measure_I_order"));
  CHECK(rep.interaction.size() == 4);
}

TEST_CASE("energy-gap constant: resonant pair raises GammaError") {
  Scenario s;
  s.model = models::bump_coupling(1);
  s.Lambda = 1.0;
  s.T = 0.5;
  // E_plus - E_minus = 0.1 + 2, which lies inside the range of lambda_plus - lambda_minus.
  s.packets = {packet(5.0, 1.0, Mode::plus), packet(5.0, std::sqrt(0.8), Mode::minus)};
  CHECK_THROWS_AS(run_superposition(s, {0.25, 0.125, 0.0625, 0.03125}), GammaError);

  const AuditBox box{Point::Constant(1, -10.0), Point::Constant(1, 10.0)};
  CHECK(energy_gap_constant(*s.model, 2.1, 0.0, box) == 0.0);
  CHECK(energy_gap_constant(*s.model, 3.0, 0.0, box) == doctest::Approx(3.0 - 2.0 * std::sqrt(1.25)).epsilon(1e-6));
}

TEST_CASE("same-mode superposition rejects coincident packets") {
  Scenario s = scenarios::superposition_same_mode();
  s.packets[1] = s.packets[0];
  CHECK_THROWS_AS(run_superposition(s, {0.25, 0.125, 0.0625, 0.03125}), ConfigError);
}

TEST_CASE("convergence study needs four ladder points") {
  CHECK_THROWS_AS(run_main_convergence(scenarios::main_convergence(1), {0.25, 0.125, 0.0625}), FitError);
}

TEST_CASE("report files") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(series_file_name(0.0625, 7) == "series_eps_4.csv");
  CHECK(series_file_name(0.3, 2) == "series_eps_i2.csv");

  ExperimentReport rep;
  rep.experiment = "main";
  rep.scenario = "synthetic";
  rep.series = {synthetic(0.25, 0.8, 0.1, 0.3, 0.0), synthetic(0.125, 0.5, 0.05, 0.3, 0.0)};
  for (auto& s : rep.series) {
    s.w_L2 = s.theta_L2 = s.theta_Heps1 = s.g_Heps1 = s.w_Heps1;
  }
  rep.fits = standard_fits(rep.series);
  rep.gates = {{"mass_conservation", true, "ok"}, {"w_Heps1_decreasing", false, "0.8 > 0.9"}};
  rep.breakdown = {{0.25, 0.5}, {0.125, std::nullopt}};
  CHECK_FALSE(rep.passed());
  CHECK(rep.find_gate("mass_conservation")->passed);
  CHECK(rep.find_gate("missing") == nullptr);

  const auto dir = std::filesystem::temp_directory_path() / "wplab_report_test";
  std::filesystem::remove_all(dir);
  write_experiment(rep, dir, "[run]\nexperiment = main\n");
  for (const char* f : {"config.echo", "series_eps_2.csv", "series_eps_3.csv", "fits.csv", "report.txt", "breakdown.csv"})
    CHECK(std::filesystem::exists(dir / f));
  std::ifstream is(dir / "series_eps_2.csv");
  std::string header;
  std::getline(is, header);
  CHECK(header == "t,w_L2,w_Heps1,theta_L2,theta_Heps1,theta_L4_scaled,minus_mass,mass_drift,g_Heps1");
  std::ifstream fits(dir / "fits.csv");
  std::getline(fits, header);
  CHECK(header == "quantity,order,intercept,r_squared,rms_residual,points");
  const std::string text = render_report(rep);
  CHECK(text.find("PASS mass_conservation") != std::string::npos);
  CHECK(text.find("FAIL w_Heps1_decreasing") != std::string::npos);
  std::filesystem::remove_all(dir);
}
