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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "hqsim/config.hpp"
#include "hqsim/experiments.hpp"

namespace hqsim {

// The noise magnitudes behind the reference headline numbers are not
// public, so they are reproduced by fitting the model to a small target set
// and validating out of sample. Fitted values are flagged "calibrated" in
// manifests.

struct CalibrationTarget {
  std::string name;
  double target = 0.0;
  double achieved = 0.0;
  double residual = 0.0;  // |achieved - target| / |target|
};

struct CalibrationReport {
  std::vector<CalibrationTarget> targets;
  int evaluations = 0;
  bool budget_exhausted = false;
  bool ok = false;
  double objective = std::numeric_limits<double>::infinity();
};

struct CalibrationOutcome {
  ExperimentConfig fitted;
  CalibrationReport report;
};

namespace detail {

inline double* free_param_ref(ExperimentConfig& cfg, const std::string& name) {
  if (name == "tau_c") return &cfg.ou_tau_c_us;
  if (name == "sigma_b") return &cfg.ou_sigma_b;
  if (name == "sigma_static") return &cfg.static_sigma;
  if (name == "p_depol_1q") return &cfg.p_depol_1q;
  if (name == "p_depol_2q") return &cfg.p_depol_2q;
  if (name == "t1") return &cfg.t1_us;
  throw ConfigError("calibrate: unknown free parameter '" + name + "'");
}

/// 0.4-threshold crossing time of the single-branch decoherence of the
/// n-NV extended system, evaluated through the real scaling pipeline on a
/// reduced grid. Returns the crossing in the answer unit, or 2x the window
/// as an out-of-range penalty.
inline double eval_crossing(const ExperimentConfig& base, int n_nv, double window_us,
                            double answer_unit_us, int trajectories,
                            std::uint64_t eval_seed) {
  ExperimentConfig e = base;
  e.experiment = "scaling";
  e.scaling_n = {n_nv};
  e.ham.delta = 0.0;
  e.gate_noise_enabled = false;
  e.dd_kind = DDKind::None;
  e.grid_unit = "us";
  e.grid_start = 0.0;
  e.grid_stop = window_us;
  e.grid_points = 49;
  e.trajectories = trajectories;
  e.base_seed = eval_seed;
  e.threads = base.threads;
  // Step count from the OU sampling bound; refuse absurd workloads.
  const double dt_max = e.ou_tau_c_us / 5.0;
  const int steps = static_cast<int>(std::ceil(window_us / dt_max));
  if (steps > 20000) return 2.0 * window_us / answer_unit_us;
  e.trotter_steps = std::max(steps, 48);
  e.provenance.clear();

  const auto out = run_scaling(e);
  const Curve& curve = out.curves.front();
  Curve us_curve = curve;
  for (auto& t : us_curve.times) t *= 1.0;  // grid unit already us
  const CoherenceTime ct = coherence_time(us_curve, 0.4);
  if (!ct.crossed) return 2.0 * window_us / answer_unit_us;
  return ct.time / answer_unit_us;
}

/// Tail mean of the extended-system fidelity curve, through the real
/// fidelity pipeline with the caller's step count and a reduced grid.
inline double eval_plateau(const ExperimentConfig& base, int trajectories,
                           std::uint64_t eval_seed) {
  ExperimentConfig e = base;
  e.experiment = "fidelity";
  e.ham.n_nv = 3;
  e.scaling_n = {1, 2, 3, 4};
  e.grid_points = 14;
  e.trajectories = trajectories;
  e.base_seed = eval_seed;
  e.threads = base.threads;
  e.provenance.clear();
  const auto out = run_fidelity(e);
  const Curve& curve = out.curves.front();
  const std::size_t tail = curve.values.size() - curve.values.size() / 3;
  double mean = 0.0;
  for (std::size_t i = tail; i < curve.values.size(); ++i) mean += curve.values[i];
  return mean / static_cast<double>(curve.values.size() - tail);
}

inline std::string cache_key(const std::vector<double>& vals) {
  std::string key;
  for (double v : vals) key += format_full(v) + "|";
  return key;
}

}  // namespace detail

/// Minimizes the summed squared relative target error by coordinate descent
/// over a log-spaced multiplier grid, then one finer refinement pass.
/// Deterministic for a fixed config. The report flags budget exhaustion and
/// whether every residual clears calib_max_residual.
inline CalibrationOutcome calibrate_noise(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.calib_targets.empty()) throw ConfigError("calibrate: no targets configured");
  if (cfg.calib_free.empty()) throw ConfigError("calibrate: no free parameters configured");
  for (const auto& [name, value] : cfg.calib_targets) {
    if (name != "coherence_time_s" && name != "fidelity_plateau" &&
        name != "crossing_ms_n1" && name != "crossing_ms_n4")
      throw ConfigError("calibrate: unknown target '" + name + "'");
    if (!(std::abs(value) > 0)) throw ConfigError("calibrate: target must be nonzero");
  }

  CalibrationOutcome outcome;
  outcome.fitted = cfg;
  CalibrationReport& report = outcome.report;

  const std::uint64_t eval_seed = cfg.base_seed + 777;

  // Per-target memoization on the parameters that can affect the target:
  // the stochastic-field targets are evaluated with channel noise off.
  std::map<std::string, std::map<std::string, double>> target_cache;
  auto field_params = [](const ExperimentConfig& c) {
    return std::vector<double>{c.ou_tau_c_us, c.ou_sigma_b, c.static_sigma};
  };
  auto all_params = [](const ExperimentConfig& c) {
    return std::vector<double>{c.ou_tau_c_us, c.ou_sigma_b, c.static_sigma,
                               c.p_depol_1q, c.p_depol_2q, c.t1_us};
  };

  auto eval_target = [&](const ExperimentConfig& c, const std::string& name) {
    const bool field_only = name != "fidelity_plateau";
    const std::string key =
        detail::cache_key(field_only ? field_params(c) : all_params(c));
    auto& cache = target_cache[name];
    const auto hit = cache.find(key);
    if (hit != cache.end()) return hit->second;
    double value = 0.0;
    if (name == "coherence_time_s") {
      double target_s = 0.0;
      for (const auto& [n, v] : cfg.calib_targets)
        if (n == "coherence_time_s") target_s = v;
      value = detail::eval_crossing(c, 1, 1.5e6 * target_s, 1e6, 160, eval_seed);
    } else if (name == "crossing_ms_n1") {
      value = detail::eval_crossing(c, 1, 6.0e4, 1e3, 160, eval_seed);
    } else if (name == "crossing_ms_n4") {
      value = detail::eval_crossing(c, 4, 2.0e4, 1e3, 160, eval_seed);
    } else {
      value = detail::eval_plateau(c, 128, eval_seed);
    }
    cache[key] = value;
    return value;
  };

  auto objective = [&](const ExperimentConfig& c) {
    double obj = 0.0;
    for (const auto& [name, target] : cfg.calib_targets) {
      const double v = eval_target(c, name);
      const double r = (v - target) / target;
      obj += r * r;
    }
    ++report.evaluations;
    return obj;
  };

  ExperimentConfig best = cfg;
  double best_obj = objective(best);

  const std::vector<double> coarse = {0.25, 0.5, 1.0 / std::sqrt(2.0), std::sqrt(2.0), 2.0, 4.0};
  const std::vector<double> fine = {0.85, 0.925, 1.075, 1.15};
  const std::vector<double> finest = {0.96, 0.98, 1.02, 1.04};

  bool out_of_budget = false;
  for (int round = 0; round < 5 && !out_of_budget; ++round) {
    const auto& mults = (round < 3) ? coarse : (round == 3 ? fine : finest);
    bool improved = false;
    for (const auto& pname : cfg.calib_free) {
      const double current = *detail::free_param_ref(best, pname);
      if (current == 0.0) continue;  // a zeroed parameter has no scale to search
      for (double m : mults) {
        if (report.evaluations >= cfg.calib_budget) {
          out_of_budget = true;
          break;
        }
        ExperimentConfig trial = best;
        *detail::free_param_ref(trial, pname) = current * m;
        double obj;
        try {
          obj = objective(trial);
        } catch (const SimError&) {
          continue;  // infeasible candidate (e.g. OU sampling bound)
        }
        if (obj < best_obj - 1e-12) {
          best_obj = obj;
          best = trial;
          improved = true;
        }
      }
      if (out_of_budget) break;
    }
    if (!improved && round < 3) round = 2;  // skip the remaining coarse rounds
  }
  report.budget_exhausted = out_of_budget;

  // Final residuals at the fitted point.
  report.objective = best_obj;
  report.ok = true;
  for (const auto& [name, target] : cfg.calib_targets) {
    CalibrationTarget t;
    t.name = name;
    t.target = target;
    t.achieved = eval_target(best, name);
    t.residual = std::abs(t.achieved - target) / std::abs(target);
    if (t.residual > cfg.calib_max_residual) report.ok = false;
    report.targets.push_back(t);
  }

  for (const auto& pname : cfg.calib_free) {
    const std::string key =
        pname == "tau_c"        ? "noise.ou.tau_c"
        : pname == "sigma_b"    ? "noise.ou.sigma_b"
        : pname == "sigma_static" ? "noise.static.sigma"
        : pname == "p_depol_1q" ? "noise.gate.p_depol_1q"
        : pname == "p_depol_2q" ? "noise.gate.p_depol_2q"
                                : "noise.gate.t1";
    best.provenance[key] = "calibrated";
  }
  outcome.fitted = best;
  return outcome;
}

/// Renders the fit report as text (also written next to the manifest).
inline std::string calibration_report_text(const CalibrationReport& r) {
  std::string out;
  out += "calibration " + std::string(r.ok ? "ok" : "FAILED") + "\n";
  out += "evaluations = " + std::to_string(r.evaluations) +
         (r.budget_exhausted ? " (budget exhausted)" : "") + "\n";
  out += "objective = " + detail::format_full(r.objective) + "\n";
  for (const auto& t : r.targets)
    out += t.name + ": target " + detail::format_full(t.target) + ", achieved " +
           detail::format_full(t.achieved) + ", residual " +
           detail::format_full(t.residual) + "\n";
  return out;
}

}  // namespace hqsim
