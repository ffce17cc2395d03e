#include "wplab/config.hpp"
#include "wplab/errors.hpp"
#include "wplab/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

namespace {

using nlohmann::json;

constexpr int kExitPass = 0;
constexpr int kExitUnexpected = 1;
constexpr int kExitGateFailure = 2;
constexpr int kExitConfigError = 3;

json gates_json(const wplab::ExperimentReport& rep) {
  json gates = json::array();
  for (const auto& g : rep.gates) gates.push_back({{"gate", g.name}, {"passed", g.passed}, {"detail", g.detail}});
  return gates;
}

json failure_list(const wplab::ExperimentReport& rep) {
  json out = json::array();
  for (const auto& g : rep.gates)
    if (!g.passed) out.push_back({{"gate", g.name}, {"detail", g.detail}});
  return out;
}

int emit_error(const std::string& command, const char* kind, const std::string& message, int code) {
  json j{{"command", command},
         {"status", code == kExitConfigError ? "config_error" : "fail"},
         {"failures", json::array({{{"kind", kind}, {"detail", message}}})}};
  std::cerr << kind << ": " << message << '\n';
  std::cout << j.dump(2) << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semiclassical wave-packet convergence harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output;
  std::size_t workers = 0;
  std::uint64_t seed = 0;

  CLI::App* run = app.add_subcommand("run", "Run the configured experiment and write its artifact directory");
  run->add_option("config", config_path, "Run configuration (INI)")->required()->check(CLI::ExistingFile);
  run->add_option("--output", output, "Artifact directory (overrides [output] dir)");
  run->add_option("--workers", workers, "Concurrent ladder points (overrides [run] workers)")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Reserved; the pipeline is deterministic and seed-free");

  CLI::App* validate = app.add_subcommand("validate", "Dry run: checks, audit and per-point cost estimates");
  validate->add_option("config", config_path, "Run configuration (INI)")->required()->check(CLI::ExistingFile);
  validate->add_option("--workers", workers, "Ignored by validate")->check(CLI::PositiveNumber);
  validate->add_option("--seed", seed, "Reserved");

  CLI11_PARSE(app, argc, argv);
  const std::string command = run->parsed() ? "run" : "validate";

  try {
    wplab::SimConfig cfg = wplab::load_config(config_path);
    if (workers) cfg.workers = workers;
    if (!output.empty()) cfg.output_dir = output;
    cfg.echo = wplab::render_config(cfg);

    if (validate->parsed()) {
      const wplab::ValidationReport rep = wplab::validate_config(cfg);
      std::cerr << wplab::render_validation(rep);
      json points = json::array();
      for (const auto& p : rep.points) {
        json grid = json::array();
        for (int a = 0; a < p.grid.dim; ++a) grid.push_back(p.grid.points[a]);
        points.push_back({{"eps", p.eps},
                          {"grid", grid},
                          {"steps", p.steps},
                          {"memory_bytes", p.memory_bytes},
                          {"runtime_seconds", p.runtime_seconds},
                          {"resolution_ok", p.resolution_violation.empty()}});
      }
      json failures = json::array();
      for (const auto& e : rep.errors) failures.push_back({{"kind", "validation"}, {"detail", e}});
      const json j{{"command", command},          {"status", rep.ok() ? "pass" : "fail"},
                   {"experiment", wplab::to_string(cfg.experiment)}, {"points", points},
                   {"warnings", rep.warnings},    {"failures", failures}};
      std::cout << j.dump(2) << '\n';
      return rep.ok() ? kExitPass : kExitGateFailure;
    }

    wplab::set_progress_callback([](const wplab::ErrorSeries& s) {
      std::cerr << "eps " << wplab::format_double(s.eps) << " done in " << s.wall_seconds << " s\n";
    });
    const wplab::ExperimentReport rep = wplab::run_and_write(cfg, cfg.output_dir);
    std::cerr << wplab::render_report(rep);
    const json j{{"command", command},
                 {"status", rep.passed() ? "pass" : "fail"},
                 {"experiment", rep.experiment},
                 {"output", cfg.output_dir.string()},
                 {"gates", gates_json(rep)},
                 {"failures", failure_list(rep)}};
    std::cout << j.dump(2) << '\n';
    return rep.passed() ? kExitPass : kExitGateFailure;
  } catch (const wplab::ConfigError& e) {
    return emit_error(command, e.kind(), e.what(), kExitConfigError);
  } catch (const wplab::Error& e) {
    return emit_error(command, e.kind(), e.what(), kExitGateFailure);
  } catch (const std::exception& e) {
    return emit_error(command, "unexpected", e.what(), kExitUnexpected);
  }
}
