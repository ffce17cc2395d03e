#include "wplab/report.hpp"

#include "wplab/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wplab {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  return os;
}

}  // namespace

void write_series_csv(const ErrorSeries& s, const std::filesystem::path& path) {
  auto os = open_out(path);
  os << "t,w_L2,w_Heps1,theta_L2,theta_Heps1,theta_L4_scaled,minus_mass,mass_drift,g_Heps1\n";
  for (std::size_t k = 0; k < s.size(); ++k) {
    os << format_double(s.t[k]) << ',' << format_double(s.w_L2[k]) << ',' << format_double(s.w_Heps1[k]) << ','
       << format_double(s.theta_L2[k]) << ',' << format_double(s.theta_Heps1[k]) << ','
       << format_double(s.theta_L4_scaled[k]) << ',' << format_double(s.minus_mass[k]) << ','
       << format_double(s.mass_drift[k]) << ',' << format_double(s.g_Heps1[k]) << '\n';
  }
}

void write_fits_csv(const std::vector<FitRow>& fits, const std::filesystem::path& path) {
  auto os = open_out(path);
  os << "quantity,order,intercept,r_squared,rms_residual,points\n";
  for (const FitRow& f : fits)
    os << f.quantity << ',' << format_double(f.fit.slope) << ',' << format_double(f.fit.intercept) << ','
       << format_double(f.fit.r_squared) << ',' << format_double(f.fit.rms_residual) << ',' << f.fit.points << '\n';
}

std::string series_file_name(double eps, std::size_t index) {
  const double k = -std::log2(eps);
  if (std::abs(k - std::round(k)) < 1e-12) return "series_eps_" + std::to_string(std::lround(k)) + ".csv";
  return "series_eps_i" + std::to_string(index) + ".csv";
}

std::string render_report(const ExperimentReport& r) {
  std::ostringstream os;
  os << "experiment: " << r.experiment << "\nscenario: " << r.scenario << "\nladder:";
  for (const auto& s : r.series) os << ' ' << format_double(s.eps);
  os << "\n\n";
  for (const auto& s : r.series) {
    os << "eps " << format_double(s.eps) << ": grid";
    for (int a = 0; a < s.grid.dim; ++a) os << ' ' << s.grid.points[a] << " on [-" << s.grid.half_width[a] << ','
                                            << s.grid.half_width[a] << ')';
    os << ", dt " << s.dt << ", steps " << s.steps << (s.stopped_early ? " (stopped at threshold)" : "") << '\n';
  }
  os << '\n';
  for (const Gate& g : r.gates) os << (g.passed ? "PASS " : "FAIL ") << g.name << ": " << g.detail << '\n';
  for (const FitRow& f : r.fits)
    os << "fit " << f.quantity << ": slope " << f.fit.slope << ", r^2 " << f.fit.r_squared << ", rms residual "
       << f.fit.rms_residual << '\n';
  for (const auto& n : r.notes) os << "note: " << n << '\n';
  os << "overall: " << (r.passed() ? "PASS" : "FAIL") << '\n';
  return os.str();
}

void write_experiment(const ExperimentReport& r, const std::filesystem::path& dir, const std::string& config_echo) {
  std::filesystem::create_directories(dir);
  {
    auto os = open_out(dir / "config.echo");
    os << config_echo;
  }
  for (std::size_t k = 0; k < r.series.size(); ++k)
    write_series_csv(r.series[k], dir / series_file_name(r.series[k].eps, k));
  write_fits_csv(r.fits, dir / "fits.csv");
  if (!r.breakdown.empty()) {
    auto os = open_out(dir / "breakdown.csv");
    os << "eps,t_star,reached,log_inv_eps,loglog_inv_eps\n";
    for (const auto& b : r.breakdown) {
      const double l = std::log(1.0 / b.eps);
      os << format_double(b.eps) << ',' << (b.t_star ? format_double(*b.t_star) : "inf") << ','
         << (b.t_star ? 1 : 0) << ',' << format_double(l) << ',' << format_double(std::log(l)) << '\n';
    }
  }
  if (!r.interaction.empty()) {
    auto os = open_out(dir / "interaction.csv");
    os << "eps,gamma,measure_I,N_intervals,max_J,Gamma,min_zddot\n";
    for (const auto& i : r.interaction)
      os << format_double(i.eps) << ',' << format_double(i.gamma) << ',' << format_double(i.measure_I) << ','
         << i.N_intervals << ',' << format_double(i.max_J) << ',' << format_double(i.Gamma) << ','
         << format_double(i.min_zddot) << '\n';
  }
  if (r.growth) write_growth_csv(*r.growth, dir / "growth.csv");
  auto os = open_out(dir / "report.txt");
  os << render_report(r);
}

}  // namespace wplab
