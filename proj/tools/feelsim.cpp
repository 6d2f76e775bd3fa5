// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: `run` executes a simulation config and writes a
// trace CSV, `bound` sweeps the analytic convergence bound, `validate`
// checks a config without running it.

#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "feelsim/bound.hpp"
#include "feelsim/config.hpp"
#include "feelsim/experiment.hpp"
#include "feelsim/trace.hpp"

namespace {

void print_diagnostics(const feelsim::Diagnostics& diag, std::ostream& out) {
  for (const std::string& e : diag.errors) out << "error: " << e << "\n";
  for (const std::string& w : diag.warnings) out << "warning: " << w << "\n";
}

int cmd_run(const std::string& config_path, const std::string& out_path,
            const std::vector<std::string>& overrides) {
  feelsim::Diagnostics diag;
  feelsim::SimConfig cfg = feelsim::load_config(config_path, diag);
  for (const std::string& kv : overrides)
    feelsim::apply_override(cfg, kv, diag);
  feelsim::validate_config(cfg, diag);
  print_diagnostics(diag, std::cerr);
  if (!diag.ok()) return 1;

  const feelsim::RunResult result = feelsim::run_experiment(cfg);
  feelsim::write_trace_csv(result.trace, out_path);
  std::cout << out_path << "\n";
  return 0;
}

int cmd_bound(const feelsim::BoundParams& params, const std::string& vary,
              const std::vector<double>& values, std::uint64_t T,
              const std::string& out_dir) {
  const auto table = feelsim::sweep(params, vary, values, T);
  for (std::size_t i = 0; i < table.size(); ++i) {
    std::string text = "t,tau,P_dl,bound\n";
    for (const feelsim::BoundRow& row : table[i]) {
      text += std::to_string(row.t);
      text += ',';
      text += std::to_string(row.tau);
      text += ',';
      text += feelsim::format_double(row.P_dl);
      text += ',';
      text += feelsim::format_double(row.bound);
      text += '\n';
    }
    const std::string path = out_dir + "/bound_" + vary + "_" +
                             feelsim::format_double(values[i]) + ".csv";
    feelsim::write_text_atomic(text, path);
    std::cout << path << "\n";
  }
  return 0;
}

int cmd_validate(const std::string& config_path) {
  feelsim::Diagnostics diag;
  feelsim::SimConfig cfg = feelsim::load_config(config_path, diag);
  feelsim::validate_config(cfg, diag);
  print_diagnostics(diag, std::cout);
  if (!diag.ok()) return 1;
  std::cout << "ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "feelsim: federated learning over bandwidth-limited fading channels"};
  app.require_subcommand(1);

  // --- run ---
  auto* run = app.add_subcommand("run", "execute one simulation config");
  std::string config_path;
  std::string out_path = "trace.csv";
  std::vector<std::string> overrides;
  run->add_option("--config", config_path, "config file (key = value lines)")
      ->required();
  run->add_option("--out", out_path, "trace CSV output path");
  run->add_option("--set", overrides,
                  "override a config key, e.g. --set T=50 (repeatable)");

  // --- bound ---
  auto* bound = app.add_subcommand(
      "bound", "sweep the analytic convergence bound; one CSV per value");
  feelsim::BoundParams bp;
  bp.mu = 0.2;
  bp.L = 10.0;
  bp.tau = 1;
  bp.G2 = 100.0;
  bp.Gamma = 50.0;
  bp.Z2 = 2e4;
  bp.M = 40;
  bp.sigma_dl = 1.0;
  bp.P_dl = 10.0;
  bp.init_gap = 5e3;
  bp.eta_schedule.decay = 1e-3;
  std::string vary;
  std::vector<double> values;
  std::uint64_t T = 10000;
  std::string out_dir = ".";
  double eta0 = 0.0;  // 0 = largest admissible value per tau
  bound->add_option("--vary", vary, "parameter to sweep: tau Pdl M G2 Gamma Z2")
      ->required();
  bound->add_option("--values", values, "comma-separated sweep values")
      ->required()
      ->delimiter(',');
  bound->add_option("--T", T, "rounds to evaluate");
  bound->add_option("--mu", bp.mu, "strong-convexity modulus");
  bound->add_option("--L", bp.L, "smoothness constant");
  bound->add_option("--tau", bp.tau, "local steps per round");
  bound->add_option("--G2", bp.G2, "gradient second-moment bound");
  bound->add_option("--Gamma", bp.Gamma, "data-heterogeneity gap");
  bound->add_option("--Z2", bp.Z2, "model-norm proxy for downlink noise");
  bound->add_option("--M", bp.M, "device count");
  bound->add_option("--sigma-dl", bp.sigma_dl, "downlink fading variance");
  bound->add_option("--Pdl", bp.P_dl, "downlink power budget");
  bound->add_option("--init-gap", bp.init_gap, "initial squared distance");
  bound->add_option("--eta0", eta0,
                    "step-size base; 0 picks the largest admissible value");
  bound->add_option("--eta-decay", bp.eta_schedule.decay,
                    "step-size decay rate");
  bound->add_option("--out-dir", out_dir, "directory for the CSV files");

  // --- validate ---
  auto* validate =
      app.add_subcommand("validate", "check a config without running it");
  std::string validate_path;
  validate->add_option("config", validate_path, "config file to check")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, out_path, overrides);
    if (bound->parsed()) {
      if (eta0 > 0.0) bp.eta_schedule.base = eta0;
      return cmd_bound(bp, vary, values, T, out_dir);
    }
    if (validate->parsed()) return cmd_validate(validate_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n"
              << "run '" << argv[0] << " --help' for usage\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
