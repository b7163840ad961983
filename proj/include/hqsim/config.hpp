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

#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hqsim/decoupling.hpp"
#include "hqsim/errors.hpp"
#include "hqsim/hamiltonian.hpp"

namespace hqsim {

/// Fully resolved settings of one experiment run. Loaded from a flat
/// key-value config file; every run writes the resolved set back out as its
/// manifest, so a manifest is itself a loadable config.
struct ExperimentConfig {
  std::string experiment = "relaxation";

  HamiltonianParams ham;

  // Stochastic field noise on the noisy qubits.
  double ou_tau_c_us = 1000.0;
  double ou_sigma_b = 0.0;      // 0 disables the OU component
  double static_sigma = 0.0;    // 0 disables the static bath
  std::string noise_qubits = "electron,nv";

  // Channel noise.
  bool gate_noise_enabled = true;
  double p_depol_1q = 0.0;
  double p_depol_2q = 0.0;
  double t1_us = 0.0;           // 0 disables amplitude damping

  int trajectories = 1000;
  std::uint64_t base_seed = 12345;

  int trotter_steps = 50;

  DDKind dd_kind = DDKind::None;
  int dd_pulses = 0;
  double dd_window = 0.0;       // grid units

  double grid_start = 0.0;      // grid units
  double grid_stop = 2.5;
  int grid_points = 26;
  std::string grid_unit = "us";

  std::uint64_t shots = 1024;
  int threads = 1;
  std::string out_dir = "out";

  // steps-sweep settings
  std::vector<int> sweep_steps = {50, 100, 200, 400, 700, 1000, 1200, 1400};
  double sweep_time = 0.5;      // grid units

  // scaling settings
  std::vector<int> scaling_n = {1, 2, 3, 4};

  // calibration settings
  std::vector<std::pair<std::string, double>> calib_targets = {
      {"coherence_time_s", 0.35}, {"fidelity_plateau", 0.82}};
  std::vector<std::string> calib_free = {"sigma_b", "p_depol_1q", "p_depol_2q"};
  int calib_budget = 500;
  double calib_max_residual = 0.25;

  // key -> "published" | "default" | "config" | "calibrated"
  std::map<std::string, std::string> provenance;

  double unit_to_us() const {
    if (grid_unit == "us") return 1.0;
    if (grid_unit == "ms") return 1e3;
    if (grid_unit == "s") return 1e6;
    throw ConfigError("grid.unit must be us, ms or s");
  }

  void validate() const {
    ham.validate();
    if (grid_points < 2) throw ConfigError("grid.points must be >= 2");
    if (!(grid_stop > grid_start)) throw ConfigError("grid.stop must exceed grid.start");
    if (trajectories < 1) throw ConfigError("noise.trajectories must be >= 1");
    if (trotter_steps < 1) throw ConfigError("trotter.steps must be >= 1");
    if (shots < 1) throw ConfigError("shots must be >= 1");
    if (p_depol_1q < 0 || p_depol_1q > 1 || p_depol_2q < 0 || p_depol_2q > 1)
      throw ConfigError("depolarizing probabilities must be in [0,1]");
    if (t1_us < 0) throw ConfigError("noise.gate.t1 must be >= 0");
    if (ou_sigma_b < 0 || static_sigma < 0) throw ConfigError("noise sigmas must be >= 0");
    if (ou_sigma_b > 0 && !(ou_tau_c_us > 0)) throw ConfigError("noise.ou.tau_c must be > 0");
    unit_to_us();
  }
};

namespace detail {

inline double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("config: bad numeric value for " + key + ": '" + v + "'");
  return x;
}

inline long long parse_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("config: bad integer value for " + key + ": '" + v + "'");
  return x;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config: bad boolean value for " + key + ": '" + v + "'");
}

inline std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::string cur;
  for (char ch : v + ",") {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(static_cast<int>(parse_int(key, cur)));
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur += ch;
    }
  }
  if (out.empty()) throw ConfigError("config: empty list for " + key);
  return out;
}

inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

struct KeySpec {
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
  bool published_constant = false;
};

inline const std::vector<KeySpec>& config_schema() {
  static const std::vector<KeySpec> schema = [] {
    std::vector<KeySpec> s;
    auto add = [&s](const std::string& key,
                    std::function<void(ExperimentConfig&, const std::string&)> set,
                    std::function<std::string(const ExperimentConfig&)> get,
                    bool published = false) {
      s.push_back({key, std::move(set), std::move(get), published});
    };
    auto dbl = [&add](const std::string& key, double ExperimentConfig::* field, bool published = false) {
      add(key,
          [key, field](ExperimentConfig& c, const std::string& v) { c.*field = parse_double(key, v); },
          [field](const ExperimentConfig& c) { return format_full(c.*field); }, published);
    };
    auto ham_dbl = [&add](const std::string& key, double HamiltonianParams::* field, bool published) {
      add(key,
          [key, field](ExperimentConfig& c, const std::string& v) { c.ham.*field = parse_double(key, v); },
          [field](const ExperimentConfig& c) { return format_full(c.ham.*field); }, published);
    };

    add("experiment",
        [](ExperimentConfig& c, const std::string& v) { c.experiment = v; },
        [](const ExperimentConfig& c) { return c.experiment; });

    ham_dbl("hamiltonian.d_zfs", &HamiltonianParams::d_zfs, true);
    ham_dbl("hamiltonian.gamma_e", &HamiltonianParams::gamma_e, true);
    ham_dbl("hamiltonian.gamma_n", &HamiltonianParams::gamma_n, true);
    ham_dbl("hamiltonian.b0", &HamiltonianParams::b0, false);
    ham_dbl("hamiltonian.q_quad", &HamiltonianParams::q_quad, true);
    ham_dbl("hamiltonian.j_c", &HamiltonianParams::j_c, true);
    ham_dbl("hamiltonian.j_n", &HamiltonianParams::j_n, true);
    ham_dbl("hamiltonian.delta", &HamiltonianParams::delta, false);
    ham_dbl("hamiltonian.g_f", &HamiltonianParams::g_f, false);
    add("hamiltonian.n_nv",
        [](ExperimentConfig& c, const std::string& v) { c.ham.n_nv = static_cast<int>(parse_int("hamiltonian.n_nv", v)); },
        [](const ExperimentConfig& c) { return std::to_string(c.ham.n_nv); });

    dbl("noise.ou.tau_c", &ExperimentConfig::ou_tau_c_us);
    dbl("noise.ou.sigma_b", &ExperimentConfig::ou_sigma_b);
    dbl("noise.static.sigma", &ExperimentConfig::static_sigma);
    add("noise.qubits",
        [](ExperimentConfig& c, const std::string& v) { c.noise_qubits = v; },
        [](const ExperimentConfig& c) { return c.noise_qubits; });
    add("noise.gate.enabled",
        [](ExperimentConfig& c, const std::string& v) { c.gate_noise_enabled = parse_bool("noise.gate.enabled", v); },
        [](const ExperimentConfig& c) { return c.gate_noise_enabled ? "true" : "false"; });
    dbl("noise.gate.p_depol_1q", &ExperimentConfig::p_depol_1q);
    dbl("noise.gate.p_depol_2q", &ExperimentConfig::p_depol_2q);
    dbl("noise.gate.t1", &ExperimentConfig::t1_us);
    add("noise.trajectories",
        [](ExperimentConfig& c, const std::string& v) { c.trajectories = static_cast<int>(parse_int("noise.trajectories", v)); },
        [](const ExperimentConfig& c) { return std::to_string(c.trajectories); });
    add("noise.base_seed",
        [](ExperimentConfig& c, const std::string& v) { c.base_seed = static_cast<std::uint64_t>(parse_int("noise.base_seed", v)); },
        [](const ExperimentConfig& c) { return std::to_string(c.base_seed); });

    add("trotter.steps",
        [](ExperimentConfig& c, const std::string& v) { c.trotter_steps = static_cast<int>(parse_int("trotter.steps", v)); },
        [](const ExperimentConfig& c) { return std::to_string(c.trotter_steps); });

    add("dd.kind",
        [](ExperimentConfig& c, const std::string& v) { c.dd_kind = dd_kind_from_name(v); },
        [](const ExperimentConfig& c) { return dd_kind_name(c.dd_kind); });
    add("dd.n_pulses",
        [](ExperimentConfig& c, const std::string& v) { c.dd_pulses = static_cast<int>(parse_int("dd.n_pulses", v)); },
        [](const ExperimentConfig& c) { return std::to_string(c.dd_pulses); });
    dbl("dd.window", &ExperimentConfig::dd_window);

    dbl("grid.start", &ExperimentConfig::grid_start);
    dbl("grid.stop", &ExperimentConfig::grid_stop);
    add("grid.points",
        [](ExperimentConfig& c, const std::string& v) { c.grid_points = static_cast<int>(parse_int("grid.points", v)); },
        [](const ExperimentConfig& c) { return std::to_string(c.grid_points); });
    add("grid.unit",
        [](ExperimentConfig& c, const std::string& v) { c.grid_unit = v; },
        [](const ExperimentConfig& c) { return c.grid_unit; });

    add("shots",
        [](ExperimentConfig& c, const std::string& v) { c.shots = static_cast<std::uint64_t>(parse_int("shots", v)); },
        [](const ExperimentConfig& c) { return std::to_string(c.shots); });
    add("run.threads",
        [](ExperimentConfig& c, const std::string& v) { c.threads = static_cast<int>(parse_int("run.threads", v)); },
        [](const ExperimentConfig& c) { return std::to_string(c.threads); });
    add("out.dir",
        [](ExperimentConfig& c, const std::string& v) { c.out_dir = v; },
        [](const ExperimentConfig& c) { return c.out_dir; });

    add("sweep.steps_list",
        [](ExperimentConfig& c, const std::string& v) { c.sweep_steps = parse_int_list("sweep.steps_list", v); },
        [](const ExperimentConfig& c) { return join_ints(c.sweep_steps); });
    dbl("sweep.time", &ExperimentConfig::sweep_time);

    add("scaling.n_list",
        [](ExperimentConfig& c, const std::string& v) { c.scaling_n = parse_int_list("scaling.n_list", v); },
        [](const ExperimentConfig& c) { return join_ints(c.scaling_n); });

    add("calibrate.targets",
        [](ExperimentConfig& c, const std::string& v) {
          c.calib_targets.clear();
          std::string cur;
          for (char ch : v + ",") {
            if (ch == ',') {
              if (!cur.empty()) {
                const auto eq = cur.find('=');
                if (eq == std::string::npos)
                  throw ConfigError("calibrate.targets entries must be name=value");
                c.calib_targets.emplace_back(cur.substr(0, eq),
                                             parse_double("calibrate.targets", cur.substr(eq + 1)));
              }
              cur.clear();
            } else if (!std::isspace(static_cast<unsigned char>(ch))) {
              cur += ch;
            }
          }
          if (c.calib_targets.empty()) throw ConfigError("calibrate.targets is empty");
        },
        [](const ExperimentConfig& c) {
          std::string out;
          for (std::size_t i = 0; i < c.calib_targets.size(); ++i) {
            if (i) out += ",";
            out += c.calib_targets[i].first + "=" + format_full(c.calib_targets[i].second);
          }
          return out;
        });
    add("calibrate.free",
        [](ExperimentConfig& c, const std::string& v) {
          c.calib_free.clear();
          std::string cur;
          for (char ch : v + ",") {
            if (ch == ',') {
              if (!cur.empty()) c.calib_free.push_back(cur);
              cur.clear();
            } else if (!std::isspace(static_cast<unsigned char>(ch))) {
              cur += ch;
            }
          }
          if (c.calib_free.empty()) throw ConfigError("calibrate.free is empty");
        },
        [](const ExperimentConfig& c) {
          std::string out;
          for (std::size_t i = 0; i < c.calib_free.size(); ++i) {
            if (i) out += ",";
            out += c.calib_free[i];
          }
          return out;
        });
    add("calibrate.budget",
        [](ExperimentConfig& c, const std::string& v) { c.calib_budget = static_cast<int>(parse_int("calibrate.budget", v)); },
        [](const ExperimentConfig& c) { return std::to_string(c.calib_budget); });
    dbl("calibrate.max_residual", &ExperimentConfig::calib_max_residual);

    return s;
  }();
  return schema;
}

inline const KeySpec* find_key(const std::string& key) {
  for (const auto& k : config_schema())
    if (k.key == key) return &k;
  return nullptr;
}

}  // namespace detail

/// Built-in defaults per experiment. The noise magnitudes are artifact
/// defaults with no published values behind them; they are flagged
/// "default" in manifests and replaced by `calibrate` outputs where
/// calibration is used.
inline ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "relaxation") {
    c.grid_start = 0.0;
    c.grid_stop = 2.5;
    c.grid_points = 26;
    c.grid_unit = "us";
    c.trotter_steps = 40;
    c.ou_tau_c_us = 1.0;
    c.ou_sigma_b = 0.13;
    c.static_sigma = 0.08;
    c.gate_noise_enabled = true;
    c.p_depol_1q = 1e-5;
    c.p_depol_2q = 3e-5;
    c.t1_us = 200.0;
    c.trajectories = 1000;
  } else if (experiment == "coherence_evolution") {
    c.grid_start = 0.0;
    c.grid_stop = 5.0;
    c.grid_points = 26;
    c.grid_unit = "us";
    c.trotter_steps = 40;
    c.ou_tau_c_us = 0.8;
    c.ou_sigma_b = 0.75;
    c.static_sigma = 0.1;
    c.gate_noise_enabled = true;
    c.p_depol_1q = 1e-5;
    c.p_depol_2q = 3e-5;
    c.t1_us = 100.0;
    c.trajectories = 1000;
  } else if (experiment == "fidelity") {
    c.ham.n_nv = 3;
    c.ham.delta = 0.0;
    c.grid_start = 0.0;
    c.grid_stop = 1.5;
    c.grid_points = 30;
    c.grid_unit = "ms";
    c.trotter_steps = 40;
    c.ou_tau_c_us = 1000.0;
    c.ou_sigma_b = 3.7e-4;
    c.static_sigma = 0.0;
    c.gate_noise_enabled = true;
    c.p_depol_1q = 5e-5;
    c.p_depol_2q = 1.5e-4;
    c.t1_us = 0.0;
    c.trajectories = 1000;
  } else if (experiment == "steps_sweep") {
    c.ham.n_nv = 3;
    c.ham.delta = 0.0;
    c.grid_start = 0.0;
    c.grid_stop = 1.0;  // unused; sweep.time drives the physics
    c.grid_points = 2;
    c.grid_unit = "ms";
    c.sweep_time = 0.5;
    c.static_sigma = 5e-4;
    c.ou_sigma_b = 0.0;
    c.gate_noise_enabled = true;
    c.p_depol_1q = 5e-5;
    c.p_depol_2q = 1.5e-4;
    c.trajectories = 160;
  } else if (experiment == "scaling") {
    c.ham.delta = 0.0;
    c.grid_start = 0.0;
    c.grid_stop = 30.0;
    c.grid_points = 40;
    c.grid_unit = "ms";
    c.trotter_steps = 150;
    c.ou_tau_c_us = 1000.0;
    c.ou_sigma_b = 1.88e-4;
    c.static_sigma = 0.0;
    c.gate_noise_enabled = false;
    c.trajectories = 1000;
  } else if (experiment == "calibrate") {
    c.ham.n_nv = 3;
    c.ham.delta = 0.0;
    c.grid_unit = "ms";
    c.grid_stop = 1.5;
    c.trotter_steps = 40;
    c.ou_tau_c_us = 1000.0;
    c.ou_sigma_b = 1.0e-4;
    c.static_sigma = 0.0;
    c.gate_noise_enabled = true;
    c.p_depol_1q = 5e-5;
    c.p_depol_2q = 1.5e-4;
    c.trajectories = 160;
  } else {
    throw ConfigError("unknown experiment '" + experiment + "'");
  }
  return c;
}

/// Applies one key = value pair; unknown keys are errors. manifest.* keys
/// are informational output and are accepted but ignored on load.
inline void apply_config_pair(ExperimentConfig& cfg, const std::string& key,
                              const std::string& value) {
  if (key.rfind("manifest.", 0) == 0) return;
  const detail::KeySpec* spec = detail::find_key(key);
  if (!spec) throw ConfigError("config: unknown key '" + key + "'");
  spec->set(cfg, value);
  cfg.provenance[key] = "config";
}

/// Parses flat `key = value` text ('#' starts a comment). The experiment
/// key selects the default set; all other keys override it.
inline ExperimentConfig parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto strip = [](const std::string& s) {
      const auto a = s.find_first_not_of(" \t\r\n");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r\n");
      return s.substr(a, b - a + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) + " is not key = value");
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config: empty key on line " + std::to_string(lineno));
    pairs.emplace_back(key, value);
  }

  std::string experiment;
  for (const auto& [k, v] : pairs)
    if (k == "experiment") experiment = v;
  if (experiment.empty()) throw ConfigError("config: missing 'experiment' key");

  ExperimentConfig cfg = default_config(experiment);
  for (const auto& [k, v] : pairs) apply_config_pair(cfg, k, v);
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace hqsim
