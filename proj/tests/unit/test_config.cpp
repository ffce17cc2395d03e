#include "wplab/config.hpp"
#include "wplab/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <string>

using namespace wplab;

namespace {

const std::filesystem::path kConfigs = WPLAB_CONFIG_DIR;

const char* kFull = R"(# comment
[run]
experiment = superposition_diff
name = demo
dim = 2
ladder = 2^-2..2^-5
Lambda = 0.5
T = 0.75
dt = 5e-4
snapshots = 32
workers = 2

[potential]
id = bump
coupling_amplitude = 0.4

[packet1]
x0 = -0.6, 0.1
xi0 = 0.6 0
mode = plus

[packet2]
x0 = 0.6, 0
xi0 = -1.2, 0
mode = minus
envelope = hermite1
width = 0.8

[grid]
profile_points = 64
profile_half_width = 10

[interaction]
gamma = 0.2

[output]
dir = out/demo
)";

std::string with_line(std::string text, const std::string& after, const std::string& line) {
  const auto pos = text.find(after);
  REQUIRE(pos != std::string::npos);
  text.insert(pos + after.size(), "\n" + line);
  return text;
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("parse a complete configuration") {
  const SimConfig c = parse_config(kFull);
  CHECK(c.experiment == ExperimentKind::superposition_diff);
  CHECK(c.scenario.name == "demo");
  CHECK(c.scenario.dim() == 2);
  CHECK(c.ladder == std::vector<double>{0.25, 0.125, 0.0625, 0.03125});
  CHECK(c.scenario.Lambda == 0.5);
  CHECK(c.scenario.T == 0.75);
  CHECK(c.scenario.dt == 5e-4);
  CHECK(c.scenario.snapshots == 32);
  CHECK(c.workers == 2);
  CHECK(c.potential_id == "bump");
  REQUIRE(c.scenario.packets.size() == 2);
  CHECK(c.scenario.packets[0].x0(1) == 0.1);
  CHECK(c.scenario.packets[1].mode == Mode::minus);
  CHECK(c.scenario.packets[1].envelope.kind == EnvelopeKind::hermite1);
  CHECK(c.scenario.packets[1].envelope.width == 0.8);
  CHECK(c.scenario.profile_points == 64);
  CHECK(c.gamma == 0.2);
  CHECK(c.output_dir == "out/demo");
  CHECK(c.scenario.correction);
  CHECK_FALSE(c.scenario.beta.has_value());
}

TEST_CASE("defaults") {
  const SimConfig c = parse_config("[packet1]\nx0 = 0\nxi0 = 1\n");
  CHECK(c.experiment == ExperimentKind::main);
  CHECK(c.scenario.dim() == 1);
  CHECK(c.scenario.Lambda == 1.0);
  CHECK(c.ladder == default_ladder(1));
  CHECK(c.workers == 1);
  CHECK(c.potential_id == "bump");
  const SimConfig b = parse_config("[run]\nexperiment = breakdown\n[packet1]\nx0 = 0\nxi0 = 1\n");
  CHECK_FALSE(b.scenario.correction);
}

TEST_CASE("echo is canonical and round-trips") {
  const SimConfig c = parse_config(kFull);
  const SimConfig again = parse_config(c.echo);
  CHECK(again.echo == c.echo);
  CHECK(render_config(again) == c.echo);
  CHECK(c.echo.find("coupling_amplitude = 0.40000000000000002") != std::string::npos);
  CHECK(c.echo.find("rho = 1") != std::string::npos);
}

TEST_CASE("rejections name the problem") {
  CHECK(error_of(with_line(kFull, "[grid]", "resolution = 4")).find("unknown key 'resolution'") != std::string::npos);
  CHECK(error_of(std::string(kFull) + "[extras]\nx = 1\n").find("unknown section [extras]") != std::string::npos);
  CHECK(error_of(with_line(kFull, "[run]", "Lambda = -1")).size() > 0);
  const std::string focusing = error_of("[run]\nLambda = -2\n[packet1]\nx0 = 0\nxi0 = 1\n");
  CHECK(focusing.find("focusing") != std::string::npos);
  CHECK(focusing.find("Lambda") != std::string::npos);
  CHECK(error_of("[run]\ndim = 4\n[packet1]\nx0 = 0\nxi0 = 1\n").find("dim") != std::string::npos);
  CHECK(error_of("[run]\nT = abc\n[packet1]\nx0 = 0\nxi0 = 1\n").find("not a finite number") != std::string::npos);
  CHECK(error_of("[run]\ndim = 2\n[packet1]\nx0 = 0\nxi0 = 1 0\n").find("dimension is 2") != std::string::npos);
  CHECK(error_of("[packet1]\nx0 = 0\nxi0 = 1\nmode = up\n").find("plus or minus") != std::string::npos);
  CHECK(error_of("[run]\nexperiment = main\n").find("[packet1]") != std::string::npos);
  CHECK(error_of("[run]\nexperiment = fly\n[packet1]\nx0 = 0\nxi0 = 1\n").find("unknown experiment") != std::string::npos);
  CHECK(error_of("[potential]\nid = cubic\n[packet1]\nx0 = 0\nxi0 = 1\n").find("unknown potential") != std::string::npos);
  CHECK(error_of("[run]\nexperiment = interaction\n[packet1]\nx0 = 0\nxi0 = 1\n").find("[packet2]") != std::string::npos);
  CHECK(error_of("[run]\nladder = 2^-2, 1.5\n[packet1]\nx0 = 0\nxi0 = 1\n").size() > 0);
  CHECK(error_of("[run]\ncorrection = maybe\n[packet1]\nx0 = 0\nxi0 = 1\n").find("boolean") != std::string::npos);
  CHECK(error_of("[run]\nbeta = 1\n[packet1]\nx0 = 0\nxi0 = 1\n").find("beta") != std::string::npos);
  std::string same = kFull;
  same.replace(same.find("mode = minus"), 12, "mode = plus");
  CHECK(error_of(same).find("different modes") != std::string::npos);
  std::string gamma = kFull;
  gamma.replace(gamma.find("gamma = 0.2"), 11, "gamma = 0.5");
  CHECK(error_of(gamma).find("gamma") != std::string::npos);
  CHECK_THROWS_AS(load_config(kConfigs / "no_such.cfg"), ConfigError);
}

TEST_CASE("every shipped configuration parses, except the deliberately bad one") {
  for (const auto& entry : std::filesystem::directory_iterator(kConfigs)) {
    if (entry.path().extension() != ".cfg") continue;
    CAPTURE(entry.path().filename().string());
    if (entry.path().filename() == "bad_focusing.cfg") {
      CHECK_THROWS_AS(load_config(entry.path()), ConfigError);
    } else {
      CHECK_NOTHROW(load_config(entry.path()));
    }
  }
}

TEST_CASE("validation: estimates, resolution and warnings") {
  SUBCASE("control run is valid and estimates every ladder point") {
    const SimConfig c = load_config(kConfigs / "control_constant_d1.cfg");
    const ValidationReport v = validate_config(c);
    CHECK(v.ok());
    REQUIRE(v.points.size() == c.ladder.size());
    for (const PointEstimate& p : v.points) {
      CHECK(p.resolution_violation.empty());
      CHECK(p.grid.spacing(0) <= std::min(std::sqrt(p.eps) / 4.0, p.eps / (4.0 * 1.0 + 1.0)) + 1e-15);
      CHECK(p.steps >= static_cast<std::size_t>(20.0 / p.eps) - 1);
      CHECK(p.memory_bytes > 0.0);
      CHECK(p.runtime_seconds > 0.0);
    }
    CHECK(v.points.back().runtime_seconds > v.points.front().runtime_seconds);
    CHECK(render_validation(v).find("eps") != std::string::npos);
  }
  SUBCASE("a fixed coarse grid is a resolution error") {
    const ValidationReport v = validate_config(load_config(kConfigs / "bad_resolution.cfg"));
    CHECK_FALSE(v.ok());
    bool named = false;
    for (const auto& e : v.errors) named = named || e.find("eps") != std::string::npos;
    CHECK(named);
  }
  SUBCASE("gamma0 at or below d/8 is flagged") {
    const ValidationReport v = validate_config(load_config(kConfigs / "perturbed_d1_gamma0.cfg"));
    bool flagged = false;
    for (const auto& w : v.warnings) flagged = flagged || w.find("gamma0") != std::string::npos;
    CHECK(flagged);
  }
  SUBCASE("the rotation example fails the audit as a warning") {
    const ValidationReport v = validate_config(load_config(kConfigs / "audit_example12.cfg"));
    CHECK_FALSE(v.warnings.empty());
  }
  SUBCASE("d = 3 at 256 points per axis exceeds the memory budget") {
    const ValidationReport v = validate_config(load_config(kConfigs / "main_d3_n256.cfg"));
    bool memory = false;
    for (const auto& w : v.warnings) memory = memory || w.find("memory") != std::string::npos;
    for (const auto& e : v.errors) memory = memory || e.find("memory") != std::string::npos;
    CHECK(memory);
  }
  SUBCASE("non-critical beta is flagged") {
    const ValidationReport v = validate_config(parse_config("[run]\nbeta = 2\n[packet1]\nx0 = -0.9\nxi0 = 1.2\n"));
    bool flagged = false;
    for (const auto& w : v.warnings) flagged = flagged || w.find("beta") != std::string::npos;
    CHECK(flagged);
  }
}

TEST_CASE("experiment kind names") {
  for (const char* k : {"main", "perturbed", "breakdown", "superposition_diff", "superposition_same", "interaction",
                        "growth", "audit"})
    CHECK(to_string(parse_experiment_kind(k)) == k);
}
