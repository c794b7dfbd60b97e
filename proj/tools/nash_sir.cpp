// Command-line front end: forward simulation, equilibrium enumeration,
// trajectory verification, and parameter sweeps over the distancing model.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nashsir/enumerator.hpp"
#include "nashsir/io.hpp"
#include "nashsir/simulate.hpp"

namespace fs = std::filesystem;
using namespace nashsir;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;

struct CliOptions {
  std::string config_path;
  std::string out_dir;     // overrides config output.directory when set
  int stride = 0;          // overrides config output.stride when > 0
  std::string trajectory;  // verify only
};

RunConfig load_config(const CliOptions& cli) {
  RunConfig cfg = load_run_config(cli.config_path);
  if (!cli.out_dir.empty()) cfg.output.directory = cli.out_dir;
  if (cli.stride > 0) cfg.output.stride = cli.stride;
  fs::create_directories(cfg.output.directory);
  return cfg;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.output.directory) / name).string();
}

nlohmann::json summary_json(const EquilibriumSummary& s) {
  return {{"attack_rate", s.attack_rate},
          {"total_gamma_E", s.total_gamma_E},
          {"peak_I", s.peak_I},
          {"t_peak", s.t_peak}};
}

int cmd_simulate(const CliOptions& cli) {
  const RunConfig cfg = load_config(cli);
  const Trajectory tr = forward_simulate(cfg.model, cfg.policy, cfg.integrator);
  if (cfg.output.csv)
    write_text_file(out_path(cfg, "trajectory.csv"),
                    trajectory_to_csv(tr, cfg.output.stride));
  // Summary statistics reuse the equilibrium summary on the simulated path.
  FinalCondition fc{tr.back().epi.S, tr.back().epi.C, tr.back().epi.I,
                    tr.back().epi.R_I};
  const EquilibriumSummary s = summarize_equilibrium(fc, tr, 0.0, cfg.model);
  if (cfg.output.json)
    write_text_file(out_path(cfg, "summary.json"), summary_json(s).dump(2) + "\n");
  std::cout << "simulated [0," << cfg.model.T
            << "], attack_rate=" << s.attack_rate
            << ", total_gamma_E=" << s.total_gamma_E << "\n";
  return kExitOk;
}

int cmd_equilibrium(const CliOptions& cli) {
  const RunConfig cfg = load_config(cli);
  const EquilibriumSet set =
      enumerate_equilibria(cfg.model, cfg.search, cfg.integrator);
  for (std::size_t i = 0; i < set.equilibria.size(); ++i) {
    if (cfg.output.csv)
      write_text_file(
          out_path(cfg, "equilibrium_" + std::to_string(i) + ".csv"),
          trajectory_to_csv(set.equilibria[i].trajectory, cfg.output.stride));
  }
  write_text_file(out_path(cfg, "manifest.json"),
                  manifest_json(set, cfg.model).dump(2) + "\n");
  std::cout << "equilibria found: " << set.equilibria.size() << " (traced "
            << set.diagnostics.candidates_traced << " candidates, "
            << set.diagnostics.invalid_boundary << " invalid-boundary, "
            << set.diagnostics.refinement_failures
            << " refinement failures)\n";
  return kExitOk;
}

int cmd_verify(const CliOptions& cli) {
  const RunConfig cfg = load_config(cli);
  std::ifstream in(cli.trajectory);
  if (!in) {
    std::cerr << "cannot open trajectory: " << cli.trajectory << "\n";
    return kExitUsage;
  }
  Trajectory tr;
  try {
    tr = trajectory_from_csv(in);
  } catch (const std::exception& e) {
    std::cerr << "trajectory schema error: " << e.what() << "\n";
    return kExitUsage;
  }
  VerifyReport rep;
  try {
    rep = verify_trajectory(tr, cfg.model, cfg.integrator);
  } catch (const std::exception& e) {
    std::cerr << "trajectory schema error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::cout << "state_residual=" << rep.state_residual
            << " d_residual=" << rep.d_residual << "\n";
  return rep.ok() ? kExitOk : kExitVerifyFailed;
}

int cmd_sweep(const CliOptions& cli) {
  const RunConfig base = load_config(cli);
  std::ifstream in(cli.config_path);
  nlohmann::json j;
  in >> j;
  if (!j.contains("sweep")) {
    std::cerr << "sweep requires a 'sweep' section in the config\n";
    return kExitUsage;
  }
  const std::string param = j["sweep"].at("parameter").get<std::string>();
  const std::vector<double> values =
      j["sweep"].at("values").get<std::vector<double>>();

  std::string csv = "value,count,min_attack_rate,max_attack_rate,"
                    "min_total_gamma_E,max_total_gamma_E\n";
  for (double v : values) {
    ModelParams p = base.model;
    if (param == "beta") p.beta = v;
    else if (param == "sigma") p.sigma = v;
    else if (param == "gamma") p.gamma = v;
    else if (param == "alpha") p.alpha = v;
    else if (param == "delta_init") p.delta_init = v;
    else if (param == "T") p.T = v;
    else if (param == "a0") p.a0 = v;
    else if (param == "a1") p.a1 = v;
    else if (param == "a2") p.a2 = v;
    else {
      std::cerr << "unknown sweep parameter: " << param << "\n";
      return kExitUsage;
    }
    try {
      validate_params(p);
    } catch (const std::exception& e) {
      std::cerr << "invalid sweep value " << v << ": " << e.what() << "\n";
      return kExitUsage;
    }
    const EquilibriumSet set = enumerate_equilibria(p, base.search, base.integrator);
    double min_ar = 0.0, max_ar = 0.0, min_g = 0.0, max_g = 0.0;
    for (std::size_t i = 0; i < set.equilibria.size(); ++i) {
      const auto& s = set.equilibria[i].summary;
      if (i == 0) {
        min_ar = max_ar = s.attack_rate;
        min_g = max_g = s.total_gamma_E;
      } else {
        min_ar = std::min(min_ar, s.attack_rate);
        max_ar = std::max(max_ar, s.attack_rate);
        min_g = std::min(min_g, s.total_gamma_E);
        max_g = std::max(max_g, s.total_gamma_E);
      }
    }
    csv += format_double(v) + "," + std::to_string(set.equilibria.size()) +
           "," + format_double(min_ar) + "," + format_double(max_ar) + "," +
           format_double(min_g) + "," + format_double(max_g) + "\n";
    std::cout << param << "=" << v << ": " << set.equilibria.size()
              << " equilibria\n";
  }
  write_text_file(out_path(base, "sweep.csv"), csv);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Behavior-coupled epidemic equilibrium solver"};
  app.require_subcommand(1);
  CliOptions cli;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", cli.config_path, "configuration file (JSON)")
        ->required();
    sub->add_option("--out", cli.out_dir, "output directory override");
    sub->add_option("--stride", cli.stride, "sample stride for CSV output");
  };

  auto* sim = app.add_subcommand("simulate", "forward run under a fixed policy");
  add_common(sim);
  auto* eq = app.add_subcommand("equilibrium", "enumerate equilibrium epidemics");
  add_common(eq);
  auto* ver = app.add_subcommand("verify", "check a recorded trajectory");
  add_common(ver);
  ver->add_option("trajectory", cli.trajectory, "trajectory CSV to verify")
      ->required();
  auto* sw = app.add_subcommand("sweep", "re-enumerate across parameter values");
  add_common(sw);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(cli);
    if (eq->parsed()) return cmd_equilibrium(cli);
    if (ver->parsed()) return cmd_verify(cli);
    if (sw->parsed()) return cmd_sweep(cli);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
