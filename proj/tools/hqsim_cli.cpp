// Copyright 2026 The hqsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <string>

#include "hqsim/calibrate.hpp"
#include "hqsim/csv.hpp"
#include "hqsim/experiments.hpp"
#include "hqsim/manifest.hpp"
#include "hqsim/qasm.hpp"
#include "hqsim/version.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  int trajectories = 0;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "config file (flat key = value text)");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "override noise.base_seed");
  cmd->add_option("--trajectories", opts.trajectories, "override noise.trajectories");
  cmd->add_option("--threads", opts.threads, "worker threads (0 = hardware)");
}

hqsim::ExperimentConfig resolve_config(const CommonOpts& opts, const std::string& experiment) {
  hqsim::ExperimentConfig cfg = opts.config_path.empty()
                                    ? hqsim::default_config(experiment)
                                    : hqsim::load_config_file(opts.config_path);
  if (cfg.experiment != experiment)
    throw hqsim::ConfigError("config is for experiment '" + cfg.experiment +
                             "' but the subcommand runs '" + experiment + "'");
  if (opts.seed >= 0)
    hqsim::apply_config_pair(cfg, "noise.base_seed", std::to_string(opts.seed));
  if (opts.trajectories > 0)
    hqsim::apply_config_pair(cfg, "noise.trajectories", std::to_string(opts.trajectories));
  if (opts.threads > 0)
    hqsim::apply_config_pair(cfg, "run.threads", std::to_string(opts.threads));
  if (!opts.out_dir.empty()) hqsim::apply_config_pair(cfg, "out.dir", opts.out_dir);
  cfg.validate();
  return cfg;
}

std::string counts_csv(const std::map<std::string, std::uint64_t>& counts) {
  std::string out = "bitstring,count\n";
  for (const auto& [bits, n] : counts) out += bits + "," + std::to_string(n) + "\n";
  return out;
}

int run_experiment_command(const CommonOpts& opts, const std::string& experiment) {
  hqsim::ExperimentConfig cfg = resolve_config(opts, experiment);
  const auto output = hqsim::run_experiment(cfg);

  std::filesystem::create_directories(cfg.out_dir);
  std::vector<std::string> files;
  for (const auto& curve : output.curves) {
    const std::string name = curve.label + ".csv";
    hqsim::write_curve_csv(cfg.out_dir + "/" + name, curve);
    files.push_back(name);
  }
  if (!output.counts.empty()) {
    hqsim::write_text_file(cfg.out_dir + "/counts_final.csv", counts_csv(output.counts));
    files.push_back("counts_final.csv");
  }
  hqsim::write_manifest(cfg.out_dir + "/manifest.txt", cfg, files, output.summary);

  std::cout << experiment << ": wrote " << files.size() << " file(s) to " << cfg.out_dir
            << "\n";
  for (const auto& [k, v] : output.summary) std::cout << "  " << k << " = " << v << "\n";
  return 0;
}

int run_calibrate_command(const CommonOpts& opts) {
  hqsim::ExperimentConfig cfg = resolve_config(opts, "calibrate");
  const auto outcome = hqsim::calibrate_noise(cfg);

  std::filesystem::create_directories(cfg.out_dir);
  const std::string report = hqsim::calibration_report_text(outcome.report);
  hqsim::write_text_file(cfg.out_dir + "/calibration_report.txt", report);
  hqsim::write_manifest(cfg.out_dir + "/calibrated.cfg", outcome.fitted,
                        {"calibration_report.txt"});
  std::cout << report;
  if (!outcome.report.ok) {
    std::cerr << "calibration residual above "
              << cfg.calib_max_residual * 100.0 << "% on at least one target\n";
    return 2;
  }
  return 0;
}

int run_export_qasm(const CommonOpts& opts) {
  hqsim::ExperimentConfig cfg = opts.config_path.empty()
                                    ? hqsim::default_config("relaxation")
                                    : hqsim::load_config_file(opts.config_path);
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);

  const double t_us = cfg.grid_stop * cfg.unit_to_us();
  hqsim::HamiltonianParams three = cfg.ham;
  three.n_nv = 1;
  const auto terms = hqsim::pauli_decompose(hqsim::build_hamiltonian(three));
  const auto u1 = hqsim::trotterize(terms, {t_us, cfg.trotter_steps});
  hqsim::write_text_file(cfg.out_dir + "/trotter_evolution.qasm", hqsim::export_qasm(u1));
  hqsim::write_text_file(cfg.out_dir + "/entangling_circuit.qasm",
                         hqsim::export_qasm(hqsim::build_entangling_circuit(u1, true)));

  hqsim::HamiltonianParams ext = cfg.ham;
  if (ext.n_nv < 2) ext.n_nv = 3;
  const auto ext_terms = hqsim::pauli_decompose(hqsim::build_extended_hamiltonian(ext));
  const auto ext_u1 = hqsim::trotterize(ext_terms, {t_us, cfg.trotter_steps});
  hqsim::write_text_file(cfg.out_dir + "/extended_circuit.qasm",
                         hqsim::export_qasm(hqsim::build_extended_circuit(ext.n_nv, ext_u1)));
  std::cout << "export-qasm: wrote 3 circuits to " << cfg.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Virtual-experiment simulator for hybrid NV-centre / flux-qubit systems"};
  app.set_version_flag("--version", hqsim::version());
  app.require_subcommand(1);

  struct Sub {
    const char* command;
    const char* experiment;
    const char* help;
  };
  const std::vector<Sub> subs = {
      {"relaxation", "relaxation", "electron relaxation and entangled coherence curves"},
      {"coherence", "coherence_evolution", "entangled coherence evolution"},
      {"fidelity", "fidelity", "extended-system fidelity against noise-free evolution"},
      {"steps-sweep", "steps_sweep", "fidelity and coherence against step count"},
      {"scaling", "scaling", "decoherence scaling with the number of NV centres"},
  };

  std::vector<CommonOpts> opts(subs.size() + 2);
  std::vector<CLI::App*> cmds;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    CLI::App* cmd = app.add_subcommand(subs[i].command, subs[i].help);
    add_common(cmd, opts[i]);
    cmds.push_back(cmd);
  }
  CLI::App* cal = app.add_subcommand("calibrate", "fit noise magnitudes to target values");
  add_common(cal, opts[subs.size()]);
  CLI::App* qasm = app.add_subcommand("export-qasm", "write preset circuits as OpenQASM 2.0");
  add_common(qasm, opts[subs.size() + 1]);

  CLI11_PARSE(app, argc, argv);

  try {
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (cmds[i]->parsed()) return run_experiment_command(opts[i], subs[i].experiment);
    if (cal->parsed()) return run_calibrate_command(opts[subs.size()]);
    if (qasm->parsed()) return run_export_qasm(opts[subs.size() + 1]);
  } catch (const hqsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const hqsim::SimError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
