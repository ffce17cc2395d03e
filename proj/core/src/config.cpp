#include "wplab/config.hpp"

#include "wplab/errors.hpp"
#include "wplab/report.hpp"
#include "wplab/solver.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace wplab {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, ExperimentKind>& kind_table() {
  static const std::map<std::string, ExperimentKind> table{
      {"main", ExperimentKind::main},
      {"perturbed", ExperimentKind::perturbed},
      {"breakdown", ExperimentKind::breakdown},
      {"superposition_diff", ExperimentKind::superposition_diff},
      {"superposition_same", ExperimentKind::superposition_same},
      {"interaction", ExperimentKind::interaction},
      {"growth", ExperimentKind::growth},
      {"audit", ExperimentKind::audit},
  };
  return table;
}

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"run", {"experiment", "name", "dim", "ladder", "Lambda", "beta", "T", "dt", "snapshots", "correction", "workers"}},
      {"potential",
       {"id", "rho0_amplitude", "decay_exponent", "rho", "coupling_amplitude", "coupling_radius", "theta_amplitude",
        "theta_radius", "lambda_plus", "lambda_minus", "gap_floor"}},
      {"packet1", {"x0", "xi0", "mode", "envelope", "width"}},
      {"packet2", {"x0", "xi0", "mode", "envelope", "width"}},
      {"grid", {"half_width", "points", "padding", "profile_points", "profile_half_width"}},
      {"interaction", {"gamma"}},
      {"perturbed", {"gamma0", "width"}},
      {"breakdown", {"threshold"}},
      {"growth", {"samples", "dt"}},
      {"output", {"dir"}},
  };
  return keys;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  bool has(const std::string& key) const { return tree_.get_optional<std::string>(key).has_value(); }

  std::string text(const std::string& key, const std::string& fallback) const {
    return trim(tree_.get<std::string>(key, fallback));
  }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return parse_number(key, text(key, ""));
  }

  std::optional<double> optional_number(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return parse_number(key, text(key, ""));
  }

  std::size_t count(const std::string& key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    const double v = number(key, 0.0);
    if (!(v >= 0.0) || v != std::floor(v)) throw ConfigError(key + " must be a non-negative integer");
    return static_cast<std::size_t>(v);
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string v = text(key, "");
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw ConfigError(key + " = '" + v + "' is not a boolean");
  }

  Point vector(const std::string& key, int dim) const {
    if (!has(key)) throw ConfigError("missing key " + key);
    std::string v = text(key, "");
    std::replace(v.begin(), v.end(), ',', ' ');
    std::istringstream is(v);
    std::vector<double> values;
    std::string tok;
    while (is >> tok) values.push_back(parse_number(key, tok));
    if (static_cast<int>(values.size()) != dim)
      throw ConfigError(key + " has " + std::to_string(values.size()) + " entries, dimension is " + std::to_string(dim));
    Point p(dim);
    for (int a = 0; a < dim; ++a) p(a) = values[static_cast<std::size_t>(a)];
    return p;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  static double parse_number(const std::string& key, const std::string& v) {
    try {
      std::size_t used = 0;
      const double x = std::stod(v, &used);
      if (used != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw ConfigError(key + " = '" + v + "' is not a finite number");
    }
  }

  const pt::ptree& tree_;
};

ModelPtr build_model(const Reader& r, int dim, SimConfig& cfg) {
  const std::string id = r.text("potential.id", "bump");
  cfg.potential_id = id;
  auto num = [&](const std::string& key, double fallback) {
    const double v = r.number("potential." + key, fallback);
    cfg.potential_params.emplace_back(key, v);
    return v;
  };
  if (id == "bump") {
    BumpCouplingParams p;
    p.rho0_amplitude = num("rho0_amplitude", p.rho0_amplitude);
    p.decay_exponent = num("decay_exponent", p.decay_exponent);
    p.rho = num("rho", p.rho);
    p.coupling_amplitude = num("coupling_amplitude", p.coupling_amplitude);
    p.coupling_radius = num("coupling_radius", p.coupling_radius);
    return models::bump_coupling(dim, p, num("gap_floor", 1e-6));
  }
  if (id == "rotation") {
    RotationParams p;
    p.decay_exponent = num("decay_exponent", p.decay_exponent);
    p.theta_amplitude = num("theta_amplitude", p.theta_amplitude);
    p.theta_radius = num("theta_radius", p.theta_radius);
    return models::rotation_example(dim, p, num("gap_floor", 1e-6));
  }
  if (id == "constant_diagonal") {
    const double lp = num("lambda_plus", 1.0);
    return models::constant_diagonal(dim, lp, num("lambda_minus", -1.0));
  }
  if (id == "quadratic") return models::synthetic_quadratic(dim);
  throw ConfigError("unknown potential id '" + id + "' (bump | rotation | constant_diagonal | quadratic)");
}

PacketSpec build_packet(const Reader& r, const std::string& section, int dim) {
  PacketSpec p;
  p.x0 = r.vector(section + ".x0", dim);
  p.xi0 = r.vector(section + ".xi0", dim);
  const std::string mode = r.text(section + ".mode", "plus");
  if (mode == "plus") p.mode = Mode::plus;
  else if (mode == "minus") p.mode = Mode::minus;
  else throw ConfigError(section + ".mode must be plus or minus");
  const std::string env = r.text(section + ".envelope", "gaussian");
  if (env == "gaussian") p.envelope.kind = EnvelopeKind::gaussian;
  else if (env == "hermite1") p.envelope.kind = EnvelopeKind::hermite1;
  else throw ConfigError(section + ".envelope must be gaussian or hermite1");
  p.envelope.width = r.number(section + ".width", 1.0);
  return p;
}

std::string join(const Point& p) {
  std::string out;
  for (Eigen::Index a = 0; a < p.size(); ++a) out += (a ? ", " : "") + format_double(p(a));
  return out;
}

std::string join_ladder(const std::vector<double>& ladder) {
  std::string out;
  for (std::size_t k = 0; k < ladder.size(); ++k) out += (k ? ", " : "") + format_double(ladder[k]);
  return out;
}

// Seconds per (x-grid node x step) and per (profile node x step x packet), fitted on a
// single core of the reference machine.
struct Calibration {
  double per_x_node;
  double per_y_node;
};

Calibration calibration(int dim) {
  switch (dim) {
    case 1: return {1.6e-6, 7.0e-6};
    case 2: return {5.0e-7, 2.0e-6};
    default: return {4.0e-7, 2.0e-6};
  }
}

// Complex arrays of x-grid size held by one run: 2 field components, 2 transform buffers,
// kinetic and potential tables, polarization frame, source scratch, plus an ansatz and a
// correction per packet.
double complex_arrays(std::size_t packets) { return 8.0 + 2.0 * double(packets); }

}  // namespace

ExperimentKind parse_experiment_kind(const std::string& id) {
  const auto it = kind_table().find(id);
  if (it == kind_table().end())
    throw ConfigError("unknown experiment '" + id +
                      "' (main | perturbed | breakdown | superposition_diff | superposition_same | interaction | "
                      "growth | audit)");
  return it->second;
}

std::string to_string(ExperimentKind kind) {
  for (const auto& [name, k] : kind_table())
    if (k == kind) return name;
  return "unknown";
}

SimConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config does not parse: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    const auto it = allowed_keys().find(section);
    if (it == allowed_keys().end()) {
      if (body.empty()) throw ConfigError("key '" + section + "' outside any section");
      throw ConfigError("unknown section [" + section + "]");
    }
    for (const auto& kv : body)
      if (!it->second.count(kv.first)) throw ConfigError("unknown key '" + kv.first + "' in [" + section + "]");
  }
  const Reader r(tree);
  SimConfig cfg;
  cfg.experiment = parse_experiment_kind(r.text("run.experiment", "main"));
  const int dim = static_cast<int>(r.count("run.dim", 1));
  if (dim < 1 || dim > 3) throw ConfigError("dim must be 1, 2 or 3");

  Scenario& s = cfg.scenario;
  s.name = r.text("run.name", to_string(cfg.experiment) + "_d" + std::to_string(dim));
  s.model = build_model(r, dim, cfg);
  s.Lambda = r.number("run.Lambda", 1.0);
  s.beta = r.optional_number("run.beta");
  s.T = r.number("run.T", 1.0);
  s.dt = r.number("run.dt", 1e-3);
  s.snapshots = r.count("run.snapshots", 64);
  s.correction = r.flag("run.correction", cfg.experiment != ExperimentKind::breakdown);
  cfg.workers = std::max<std::size_t>(1, r.count("run.workers", 1));

  if (!r.has("packet1.x0")) throw ConfigError("missing section [packet1] with x0 and xi0");
  s.packets.push_back(build_packet(r, "packet1", dim));
  if (r.has("packet2.x0") || r.has("packet2.xi0")) s.packets.push_back(build_packet(r, "packet2", dim));

  s.grid_half_width = r.optional_number("grid.half_width");
  if (r.has("grid.points")) s.grid_points = r.count("grid.points", 0);
  s.grid_padding = r.number("grid.padding", s.grid_padding);
  s.profile_points = r.count("grid.profile_points", s.profile_points);
  s.profile_half_width = r.number("grid.profile_half_width", s.profile_half_width);

  cfg.ladder = r.has("run.ladder") ? parse_ladder(r.text("run.ladder", "")) : default_ladder(dim);
  cfg.gamma = r.number("interaction.gamma", cfg.gamma);
  cfg.gamma0 = r.number("perturbed.gamma0", cfg.gamma0);
  cfg.perturbation_width = r.number("perturbed.width", cfg.perturbation_width);
  cfg.breakdown_threshold = r.number("breakdown.threshold", cfg.breakdown_threshold);
  cfg.growth_samples = r.count("growth.samples", cfg.growth_samples);
  cfg.growth_dt = r.number("growth.dt", cfg.growth_dt);
  cfg.output_dir = r.text("output.dir", "out/" + s.name);

  validate_scenario(s);
  if (s.beta && !(*s.beta > 1.0)) throw ConfigError("beta must exceed 1");
  if (cfg.ladder.empty()) throw ConfigError("empty eps ladder");
  for (double e : cfg.ladder)
    if (!(e > 0.0 && e < 1.0)) throw ConfigError("ladder entries must lie in (0, 1)");
  const bool two = cfg.experiment == ExperimentKind::superposition_diff ||
                   cfg.experiment == ExperimentKind::superposition_same ||
                   cfg.experiment == ExperimentKind::interaction;
  if (two && s.packets.size() != 2) throw ConfigError(to_string(cfg.experiment) + " needs [packet1] and [packet2]");
  if (cfg.experiment == ExperimentKind::superposition_diff && s.packets[0].mode == s.packets[1].mode)
    throw ConfigError("superposition_diff needs packets on different modes");
  if (cfg.experiment == ExperimentKind::superposition_same && s.packets[0].mode != s.packets[1].mode)
    throw ConfigError("superposition_same needs packets on the same mode");
  if (!(cfg.gamma > 0.0 && cfg.gamma < 0.5)) throw ConfigError("interaction gamma must lie in (0, 1/2)");
  if (!(cfg.breakdown_threshold > 0.0)) throw ConfigError("breakdown threshold must be positive");
  if (!(cfg.perturbation_width > 0.0)) throw ConfigError("perturbation width must be positive");
  if (cfg.growth_samples < 2) throw ConfigError("growth samples must be at least 2");
  if (!(cfg.growth_dt > 0.0)) throw ConfigError("growth dt must be positive");
  cfg.echo = render_config(cfg);
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

std::string render_config(const SimConfig& cfg) {
  const Scenario& s = cfg.scenario;
  const int d = s.dim();
  std::ostringstream os;
  os << "[run]\n"
     << "experiment = " << to_string(cfg.experiment) << '\n'
     << "name = " << s.name << '\n'
     << "dim = " << d << '\n'
     << "ladder = " << join_ladder(cfg.ladder) << '\n'
     << "Lambda = " << format_double(s.Lambda) << '\n';
  if (s.beta) os << "beta = " << format_double(*s.beta) << '\n';
  os << "T = " << format_double(s.T) << '\n'
     << "dt = " << format_double(s.dt) << '\n'
     << "snapshots = " << s.snapshots << '\n'
     << "correction = " << (s.correction ? "true" : "false") << '\n'
     << "workers = " << cfg.workers << "\n\n";
  os << "[potential]\nid = " << cfg.potential_id << '\n';
  for (const auto& [key, value] : cfg.potential_params) os << key << " = " << format_double(value) << '\n';
  os << '\n';
  for (std::size_t k = 0; k < s.packets.size(); ++k) {
    const PacketSpec& p = s.packets[k];
    os << "[packet" << k + 1 << "]\n"
       << "x0 = " << join(p.x0) << '\n'
       << "xi0 = " << join(p.xi0) << '\n'
       << "mode = " << (p.mode == Mode::plus ? "plus" : "minus") << '\n'
       << "envelope = " << (p.envelope.kind == EnvelopeKind::gaussian ? "gaussian" : "hermite1") << '\n'
       << "width = " << format_double(p.envelope.width) << "\n\n";
  }
  os << "[grid]\n";
  if (s.grid_half_width) os << "half_width = " << format_double(*s.grid_half_width) << '\n';
  if (s.grid_points) os << "points = " << *s.grid_points << '\n';
  os << "padding = " << format_double(s.grid_padding) << '\n'
     << "profile_points = " << s.profile_points << '\n'
     << "profile_half_width = " << format_double(s.profile_half_width) << "\n\n";
  os << "[interaction]\ngamma = " << format_double(cfg.gamma) << "\n\n"
     << "[perturbed]\ngamma0 = " << format_double(cfg.gamma0) << "\nwidth = " << format_double(cfg.perturbation_width)
     << "\n\n"
     << "[breakdown]\nthreshold = " << format_double(cfg.breakdown_threshold) << "\n\n"
     << "[growth]\nsamples = " << cfg.growth_samples << "\ndt = " << format_double(cfg.growth_dt) << "\n\n"
     << "[output]\ndir = " << cfg.output_dir.string() << '\n';
  return os.str();
}

ValidationReport validate_config(const SimConfig& cfg) {
  const Scenario& s = cfg.scenario;
  validate_scenario(s);
  ValidationReport rep;
  const int d = s.dim();

  const AuditBox box{Point::Constant(d, -10.0), Point::Constant(d, 10.0)};
  const AuditReport audit = s.model->assumption_audit(box, 4000);
  for (const std::string& v : audit.violations) rep.warnings.push_back("assumption audit: " + v);

  const double bc = critical_beta(d);
  if (s.beta && std::abs(*s.beta - bc) > 0) rep.warnings.push_back("beta differs from the critical value " +
                                                                    format_double(bc) + "; the convergence analysis assumes beta_c");
  if (cfg.experiment == ExperimentKind::perturbed && !(cfg.gamma0 > d / 8.0))
    rep.warnings.push_back("gamma0 <= d/8: outside the proven regime, run is flagged and convergence not gated");
  const bool smoke = cfg.experiment == ExperimentKind::main && d == 3;
  if (cfg.experiment == ExperimentKind::main || cfg.experiment == ExperimentKind::perturbed)
    if (cfg.ladder.size() < 4 && !smoke) rep.errors.push_back("convergence study needs at least 4 ladder points (FitError)");
  if (cfg.experiment == ExperimentKind::growth || cfg.experiment == ExperimentKind::audit ||
      cfg.experiment == ExperimentKind::interaction)
    return rep;

  std::vector<std::shared_ptr<const TrajectoryRecord>> records;
  try {
    records = scenario_trajectories(s);
  } catch (const Error& e) {
    rep.errors.push_back(std::string(e.kind()) + ": " + e.what());
    return rep;
  }
  const double xi_max = max_momentum(records);
  const Calibration cal = calibration(d);
  std::size_t y_nodes = 1;
  for (int a = 0; a < d; ++a) y_nodes *= s.profile_points;
  for (double eps : cfg.ladder) {
    PointEstimate pe;
    pe.eps = eps;
    pe.grid = choose_grid(s, eps, records);
    const TimeGrid tg = make_time_grid(eps, s.dt, s.T, s.snapshots);
    pe.steps = tg.steps;
    const double nodes = double(pe.grid.size());
    pe.memory_bytes = 16.0 * nodes * complex_arrays(s.packets.size()) + 16.0 * double(y_nodes) * 8.0;
    pe.runtime_seconds =
        double(tg.steps) * (cal.per_x_node * nodes + cal.per_y_node * double(y_nodes) * double(s.packets.size()));
    try {
      check_resolution(pe.grid, eps, xi_max);
    } catch (const ResolutionError& e) {
      pe.resolution_violation = e.what();
      rep.errors.push_back("eps = " + format_double(eps) + ": ResolutionError: " + e.what());
    }
    if (pe.memory_bytes > rep.memory_budget_bytes)
      rep.warnings.push_back("eps = " + format_double(eps) + ": estimated memory " +
                             format_double(std::round(pe.memory_bytes / 1048576.0)) + " MiB exceeds the " +
                             format_double(rep.memory_budget_bytes / 1048576.0) + " MiB budget");
    rep.points.push_back(pe);
  }
  return rep;
}

std::string render_validation(const ValidationReport& r) {
  std::ostringstream os;
  double total = 0.0;
  for (const PointEstimate& p : r.points) {
    os << "eps " << format_double(p.eps) << ": grid";
    for (int a = 0; a < p.grid.dim; ++a) os << (a ? " x " : " ") << p.grid.points[a];
    char buf[160];
    std::snprintf(buf, sizeof buf, ", steps %zu, memory %.1f MiB, runtime %.1f s", p.steps,
                  p.memory_bytes / 1048576.0, p.runtime_seconds);
    os << buf << (p.resolution_violation.empty() ? "" : ", RESOLUTION VIOLATED") << '\n';
    total += p.runtime_seconds;
  }
  if (!r.points.empty()) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "estimated total runtime (1 worker): %.1f s\n", total);
    os << buf;
  }
  for (const auto& w : r.warnings) os << "warning: " << w << '\n';
  for (const auto& e : r.errors) os << "error: " << e << '\n';
  os << "validate: " << (r.ok() ? "PASS" : "FAIL") << '\n';
  return os.str();
}

ExperimentReport run_config(const SimConfig& cfg) {
  const Scenario& s = cfg.scenario;
  switch (cfg.experiment) {
    case ExperimentKind::main:
      if (s.dim() == 3 && cfg.ladder.size() < 4) return run_smoke(s, cfg.ladder, cfg.workers);
      return run_main_convergence(s, cfg.ladder, cfg.workers);
    case ExperimentKind::perturbed: {
      Scenario p = s;
      PerturbationSpec spec;
      spec.gamma0 = cfg.gamma0;
      spec.center = s.packets.front().x0;
      spec.width = cfg.perturbation_width;
      spec.frequency = s.packets.front().xi0;
      p.perturbation = spec;
      return run_perturbed_data(p, cfg.gamma0, cfg.ladder, cfg.workers);
    }
    case ExperimentKind::breakdown:
      return run_breakdown_time(s, cfg.ladder, cfg.breakdown_threshold, cfg.workers);
    case ExperimentKind::superposition_diff:
    case ExperimentKind::superposition_same:
      return run_superposition(s, cfg.ladder, cfg.workers, cfg.gamma);
    case ExperimentKind::interaction:
      return run_interaction(s, cfg.ladder, cfg.gamma);
    case ExperimentKind::growth:
      return run_growth(s, cfg.growth_samples, cfg.growth_dt);
    case ExperimentKind::audit:
      return run_audit(s);
  }
  throw ConfigError("unhandled experiment");
}

ExperimentReport run_and_write(const SimConfig& cfg, const std::filesystem::path& dir) {
  ExperimentReport rep = run_config(cfg);
  write_experiment(rep, dir, cfg.echo);
  return rep;
}

}  // namespace wplab
