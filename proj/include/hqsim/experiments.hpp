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
#include <map>
#include <string>
#include <vector>

#include "hqsim/circuit.hpp"
#include "hqsim/config.hpp"
#include "hqsim/decoupling.hpp"
#include "hqsim/hamiltonian.hpp"
#include "hqsim/noise.hpp"
#include "hqsim/observables.hpp"
#include "hqsim/trotter.hpp"

namespace hqsim {

/// Curves plus run summary facts; the CLI writes curves as CSV files and
/// summary entries into the manifest.
struct ExperimentOutput {
  std::vector<Curve> curves;
  std::vector<std::pair<std::string, std::string>> summary;
  std::map<std::string, std::uint64_t> counts;  // shot sample of the final state
};

namespace detail {

inline constexpr std::uint64_t kSeedStride = 1000000007ULL;

struct Grid {
  std::vector<double> times_unit;
  std::vector<double> times_us;
};

inline Grid make_grid(const ExperimentConfig& cfg) {
  Grid g;
  const double f = cfg.unit_to_us();
  for (int i = 0; i < cfg.grid_points; ++i) {
    const double t = cfg.grid_start +
                     (cfg.grid_stop - cfg.grid_start) * i / (cfg.grid_points - 1);
    g.times_unit.push_back(t);
    g.times_us.push_back(t * f);
  }
  return g;
}

inline std::vector<std::size_t> snap_to_steps(const std::vector<double>& times_us,
                                              double dt_us, std::size_t n_steps) {
  std::vector<std::size_t> out;
  for (double t : times_us) {
    auto s = static_cast<long long>(std::llround(t / dt_us));
    s = std::max<long long>(0, std::min<long long>(s, static_cast<long long>(n_steps)));
    out.push_back(static_cast<std::size_t>(s));
  }
  return out;
}

inline bool role_matches(const std::string& role, const std::string& token) {
  if (token == "all") return true;
  if (token == "nv") return role.rfind("nv_", 0) == 0;
  return role == token;
}

inline std::vector<int> noisy_qubits_for(const ExperimentConfig& cfg, const Circuit& c) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : cfg.noise_qubits + ",") {
    if (ch == ',') {
      if (!cur.empty()) tokens.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur += ch;
    }
  }
  std::vector<int> out;
  for (const auto& [q, role] : c.qubit_roles)
    for (const auto& tok : tokens)
      if (role_matches(role, tok)) {
        out.push_back(q);
        break;
      }
  return out;
}

inline NoiseModel make_model(const ExperimentConfig& cfg, const Circuit& c,
                             std::uint64_t seed) {
  NoiseModel m;
  const auto noisy = noisy_qubits_for(cfg, c);
  if (cfg.ou_sigma_b > 0) {
    OUParams p{cfg.ou_tau_c_us, cfg.ou_sigma_b, c.step_duration_us};
    if (c.n_steps() > 0) {
      if (p.dt_us > p.tau_c_us / 5.0 + 1e-12)
        throw ConfigError(
            "OU sampling interval (Trotter step) exceeds tau_c/5; "
            "increase trotter.steps or noise.ou.tau_c");
      for (int q : noisy) m.ou[q] = p;
    }
  }
  if (cfg.static_sigma > 0)
    for (int q : noisy) m.static_bath[q] = StaticBathParams{cfg.static_sigma};
  if (cfg.gate_noise_enabled &&
      (cfg.p_depol_1q > 0 || cfg.p_depol_2q > 0 || cfg.t1_us > 0)) {
    GateNoiseParams g;
    g.p_depol_1q = cfg.p_depol_1q;
    g.p_depol_2q = cfg.p_depol_2q;
    if (cfg.t1_us > 0) g.t1_us = cfg.t1_us;
    m.gate_noise = g;
  }
  m.n_trajectories = cfg.trajectories;
  m.base_seed = seed;
  m.validate();
  return m;
}

inline Curve make_curve(const Grid& grid, const std::string& label,
                        const std::string& unit) {
  Curve c;
  c.times = grid.times_unit;
  c.label = label;
  c.time_unit = unit;
  return c;
}

/// Interferometric echo circuit: entangle, evolve for t, apply the exact
/// inverse evolution, disentangle, and mark the electron readout. With no
/// noise the register returns to |000> exactly.
inline Circuit make_echo_circuit(const PauliSum& terms, double t_us, int steps) {
  Circuit c;
  c.n_qubits = 3;
  c.qubit_roles = {{0, "electron"}, {1, "nitrogen"}, {2, "flux"}};
  c.gates.push_back(Gate::h(0));
  c.gates.push_back(Gate::cnot(0, 1));
  c.gates.push_back(Gate::cnot(0, 2));
  c.prologue_end = c.gates.size();
  if (t_us > 0) {
    const Circuit u1 = trotterize(terms, {t_us, steps});
    const std::size_t base = c.gates.size();
    c.gates.insert(c.gates.end(), u1.gates.begin(), u1.gates.end());
    for (std::size_t e : u1.step_ends) c.step_ends.push_back(base + e);
    // Inverse evolution block, mirrored step by step.
    std::vector<std::size_t> sizes;
    std::size_t prev = 0;
    for (std::size_t e : u1.step_ends) {
      sizes.push_back(e - prev);
      prev = e;
    }
    const std::size_t inv_base = c.gates.size();
    for (std::size_t i = u1.gates.size(); i-- > 0;)
      c.gates.push_back(inverse_gate(u1.gates[i]));
    std::size_t acc = inv_base;
    for (auto it = sizes.rbegin(); it != sizes.rend(); ++it) {
      acc += *it;
      c.step_ends.push_back(acc);
    }
    c.step_duration_us = u1.step_duration_us;
    c.global_phase = 0.0;
  }
  c.gates.push_back(Gate::cnot(0, 2));
  c.gates.push_back(Gate::cnot(0, 1));
  c.gates.push_back(Gate::h(0));
  c.gates.push_back(Gate::measure_z(0));
  return c;
}

inline Extractor population_extractor(int qubit, int level) {
  return [qubit, level](const DensityMatrix& rho, std::size_t) {
    return Complex(population(rho, qubit, level), 0.0);
  };
}

inline Extractor branch_coherence_extractor(int n_qubits) {
  const auto last = static_cast<Eigen::Index>(dim_for(n_qubits)) - 1;
  return [last](const DensityMatrix& rho, std::size_t) { return rho.entries(0, last); };
}

inline void require_experiment(const ExperimentConfig& cfg, const char* kind) {
  if (cfg.experiment != kind)
    throw ConfigError(std::string("config experiment '") + cfg.experiment +
                      "' does not match the requested run '" + kind + "'");
}

inline void reject_dd(const ExperimentConfig& cfg, const char* kind) {
  if (cfg.dd_kind != DDKind::None)
    throw ConfigError(std::string("decoupling sequences are not supported by the ") +
                      kind + " run; use the scaling or fidelity experiments");
}

/// Applies the configured sequence to every noisy line of the circuit.
inline Circuit apply_dd(const ExperimentConfig& cfg, Circuit circuit) {
  if (cfg.dd_kind == DDKind::None) return circuit;
  DDSequence seq{cfg.dd_kind, cfg.dd_pulses, cfg.dd_window * cfg.unit_to_us()};
  for (int q : noisy_qubits_for(cfg, circuit))
    circuit = interleave(circuit, seq, q, circuit.step_duration_us);
  return circuit;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Relaxation (population decay of three preparations + entangled coherence)
// ---------------------------------------------------------------------------

/// Electron relaxation and entangled-spin coherence against pulse duration.
/// Preparations: m_s = 0 analog is the idle register, m_s = +1 the X-pulse
/// excitation and m_s = -1 the u3(pi,0,0) excitation. In the two-level
/// encoding both excitations land on |1>, so the +1 and -1 curves are
/// statistically equal analogs of the three-level system's split pair.
/// The coherence curve runs the full echo protocol (entangle, evolve,
/// invert, disentangle) and reads 2 P(electron = 0) - 1.
inline ExperimentOutput run_relaxation(const ExperimentConfig& cfg) {
  detail::require_experiment(cfg, "relaxation");
  detail::reject_dd(cfg, "relaxation");
  cfg.validate();
  const Operator h = build_hamiltonian(cfg.ham);
  const PauliSum terms = pauli_decompose(h);
  const auto grid = detail::make_grid(cfg);
  const double stop_us = cfg.grid_stop * cfg.unit_to_us();

  Circuit evo = trotterize(terms, {stop_us, cfg.trotter_steps});
  evo.qubit_roles = {{0, "electron"}, {1, "nitrogen"}, {2, "flux"}};
  const auto record = detail::snap_to_steps(grid.times_us, evo.step_duration_us, evo.n_steps());

  ExperimentOutput out;

  struct Prep {
    const char* label;
    int level;          // measured electron level
    StateVector state;
  };
  StateVector excited_x = StateVector::basis_state(3, 4);  // X pulse: |100>
  Circuit prep_u3;
  prep_u3.n_qubits = 3;
  prep_u3.gates.push_back(Gate::u3(0, M_PI, 0.0, 0.0));
  StateVector excited_u3 = run_circuit(prep_u3, StateVector::zero_state(3));
  std::vector<Prep> preps;
  preps.push_back({"relaxation_ms0", 0, StateVector::zero_state(3)});
  preps.push_back({"relaxation_ms_plus1", 1, std::move(excited_x)});
  preps.push_back({"relaxation_ms_minus1", 1, std::move(excited_u3)});

  std::uint64_t run_idx = 0;
  for (auto& prep : preps) {
    const NoiseModel model =
        detail::make_model(cfg, evo, cfg.base_seed + run_idx * detail::kSeedStride);
    ++run_idx;
    const auto res = monte_carlo_curve(evo, model, prep.state, record,
                                       detail::population_extractor(0, prep.level),
                                       cfg.threads);
    Curve curve = detail::make_curve(grid, prep.label, cfg.grid_unit);
    for (const auto& p : res.points) {
      curve.values.push_back(stat_real(p));
      curve.std_errors.push_back(stat_real_stderr(p));
    }
    out.curves.push_back(std::move(curve));
  }

  // Entangled-electron coherence via the echo protocol, one run per point.
  Curve coh = detail::make_curve(grid, "coherence", cfg.grid_unit);
  DensityMatrix last_state;
  for (std::size_t i = 0; i < grid.times_us.size(); ++i) {
    const double t = grid.times_us[i];
    const int steps_i =
        t > 0 ? std::max(2, static_cast<int>(std::llround(cfg.trotter_steps * t / stop_us)))
              : 0;
    Circuit echo = detail::make_echo_circuit(terms, t, steps_i);
    const NoiseModel model = detail::make_model(
        cfg, echo, cfg.base_seed + (run_idx + i) * detail::kSeedStride);
    const auto res = monte_carlo_curve(echo, model, StateVector::zero_state(3),
                                       {std::max<std::size_t>(1, echo.n_steps())},
                                       detail::population_extractor(0, 0), cfg.threads);
    const double c = 2.0 * stat_real(res.points[0]) - 1.0;
    coh.values.push_back(std::clamp(c, 0.0, 1.0));
    coh.std_errors.push_back(2.0 * stat_real_stderr(res.points[0]));
    if (i + 1 == grid.times_us.size()) last_state = res.mean_final;
  }
  out.curves.push_back(std::move(coh));
  out.counts = sample_counts(last_state, {0}, cfg.shots, cfg.base_seed);

  const double drop = out.curves.back().values.front() - out.curves.back().values.back();
  out.summary.emplace_back("relaxation.coherence_drop", detail::format_full(drop));
  return out;
}

// ---------------------------------------------------------------------------
// Coherence evolution (echo protocol over the whole grid)
// ---------------------------------------------------------------------------

inline ExperimentOutput run_coherence_evolution(const ExperimentConfig& cfg) {
  detail::require_experiment(cfg, "coherence_evolution");
  detail::reject_dd(cfg, "coherence_evolution");
  cfg.validate();
  const Operator h = build_hamiltonian(cfg.ham);
  const PauliSum terms = pauli_decompose(h);
  const auto grid = detail::make_grid(cfg);
  const double stop_us = cfg.grid_stop * cfg.unit_to_us();

  ExperimentOutput out;
  Curve coh = detail::make_curve(grid, "coherence", cfg.grid_unit);
  DensityMatrix last_state;
  for (std::size_t i = 0; i < grid.times_us.size(); ++i) {
    const double t = grid.times_us[i];
    const int steps_i =
        t > 0 ? std::max(2, static_cast<int>(std::llround(cfg.trotter_steps * t / stop_us)))
              : 0;
    Circuit echo = detail::make_echo_circuit(terms, t, steps_i);
    const NoiseModel model =
        detail::make_model(cfg, echo, cfg.base_seed + i * detail::kSeedStride);
    const auto res = monte_carlo_curve(echo, model, StateVector::zero_state(3),
                                       {std::max<std::size_t>(1, echo.n_steps())},
                                       detail::population_extractor(0, 0), cfg.threads);
    const double c = 2.0 * stat_real(res.points[0]) - 1.0;
    coh.values.push_back(std::clamp(c, 0.0, 1.0));
    coh.std_errors.push_back(2.0 * stat_real_stderr(res.points[0]));
    if (i + 1 == grid.times_us.size()) last_state = res.mean_final;
  }
  out.counts = sample_counts(last_state, {0}, cfg.shots, cfg.base_seed);
  out.curves.push_back(std::move(coh));
  return out;
}

// ---------------------------------------------------------------------------
// Fidelity of the extended system against its noise-free evolution
// ---------------------------------------------------------------------------

inline ExperimentOutput run_fidelity(const ExperimentConfig& cfg) {
  detail::require_experiment(cfg, "fidelity");
  cfg.validate();
  const Operator h = build_extended_hamiltonian(cfg.ham);
  const PauliSum terms = pauli_decompose(h);
  const int n = cfg.ham.n_nv + 1;
  const auto grid = detail::make_grid(cfg);
  const double stop_us = cfg.grid_stop * cfg.unit_to_us();

  const Circuit u1 = trotterize(terms, {stop_us, cfg.trotter_steps});
  Circuit circuit = detail::apply_dd(cfg, build_extended_circuit(cfg.ham.n_nv, u1));
  const auto record =
      detail::snap_to_steps(grid.times_us, circuit.step_duration_us, circuit.n_steps());

  // Noise-free reference snapshots at the record points. The reference runs
  // the same (possibly decoupled) circuit, so pulse frames cancel in the
  // fidelity.
  std::vector<Vector> refs;
  {
    StateVector psi = StateVector::zero_state(n);
    std::size_t cursor = 0;
    auto apply_upto = [&](std::size_t end) {
      for (; cursor < end; ++cursor) {
        const Gate& g = circuit.gates[cursor];
        if (g.kind == GateKind::MEASURE_Z) continue;
        detail::apply_matrix_vec(psi.amplitudes, gate_matrix(g).entries, n, g.targets);
      }
    };
    apply_upto(circuit.prologue_end);
    for (std::size_t r : record) {
      apply_upto(r >= circuit.n_steps() ? circuit.gates.size()
                                        : (r == 0 ? circuit.prologue_end : circuit.step_ends[r - 1]));
      refs.push_back(psi.amplitudes);
    }
  }

  const NoiseModel model = detail::make_model(cfg, circuit, cfg.base_seed);
  Extractor fidelity_extract = [&refs](const DensityMatrix& rho, std::size_t idx) {
    const Vector& psi = refs[idx];
    return Complex((psi.adjoint() * rho.entries * psi)(0).real(), 0.0);
  };
  const auto res = monte_carlo_curve(circuit, model, StateVector::zero_state(n), record,
                                     fidelity_extract, cfg.threads);

  ExperimentOutput out;
  Curve curve = detail::make_curve(grid, "fidelity", cfg.grid_unit);
  for (const auto& p : res.points) {
    curve.values.push_back(stat_real(p));
    curve.std_errors.push_back(stat_real_stderr(p));
  }
  const std::size_t tail = curve.values.size() - curve.values.size() / 3;
  double plateau = 0.0;
  for (std::size_t i = tail; i < curve.values.size(); ++i) plateau += curve.values[i];
  plateau /= static_cast<double>(curve.values.size() - tail);
  out.summary.emplace_back("fidelity.plateau", detail::format_full(plateau));
  out.curves.push_back(std::move(curve));
  out.counts = sample_counts(res.mean_final, {cfg.ham.n_nv}, cfg.shots, cfg.base_seed);
  return out;
}

// ---------------------------------------------------------------------------
// Steps sweep (gate-layer noise scaling at fixed physical time)
// ---------------------------------------------------------------------------

/// Holds the physical evolution fixed at sweep.time and recompiles it with
/// each step count, so the number of noisy gate layers is the only thing
/// that grows. Reports fidelity against the noise-free evolution and the
/// readout-branch coherence, both at the final time.
inline ExperimentOutput run_steps_sweep(const ExperimentConfig& cfg) {
  detail::require_experiment(cfg, "steps_sweep");
  detail::reject_dd(cfg, "steps_sweep");
  cfg.validate();
  const Operator h = build_extended_hamiltonian(cfg.ham);
  const PauliSum terms = pauli_decompose(h);
  const int n = cfg.ham.n_nv + 1;
  const double t_us = cfg.sweep_time * cfg.unit_to_us();

  std::vector<int> steps_list = cfg.sweep_steps;
  std::sort(steps_list.begin(), steps_list.end());

  Curve fid, coh;
  fid.label = "fidelity_vs_steps";
  coh.label = "coherence_vs_steps";
  fid.time_unit = coh.time_unit = "steps";

  for (int s : steps_list) {
    const Circuit u1 = trotterize(terms, {t_us, s});
    Circuit circuit = build_extended_circuit(cfg.ham.n_nv, u1);
    const StateVector ref = run_circuit(circuit, StateVector::zero_state(n));
    const NoiseModel model = detail::make_model(cfg, circuit, cfg.base_seed);

    Extractor fidelity_extract = [&ref](const DensityMatrix& rho, std::size_t) {
      return Complex((ref.amplitudes.adjoint() * rho.entries * ref.amplitudes)(0).real(), 0.0);
    };
    const auto res = monte_carlo_curves(circuit, model, StateVector::zero_state(n),
                                        {circuit.n_steps()},
                                        {fidelity_extract, detail::branch_coherence_extractor(n)},
                                        cfg.threads);
    const PointStats& pf = res.per_extractor[0][0];
    const PointStats& pcoh = res.per_extractor[1][0];
    fid.times.push_back(s);
    fid.values.push_back(stat_real(pf));
    fid.std_errors.push_back(stat_real_stderr(pf));
    coh.times.push_back(s);
    coh.values.push_back(stat_magnitude(pcoh, 2.0));
    coh.std_errors.push_back(stat_magnitude_stderr(pcoh, 2.0));
  }

  ExperimentOutput out;
  out.summary.emplace_back("steps_sweep.final_coherence",
                           detail::format_full(coh.values.back()));
  out.curves.push_back(std::move(fid));
  out.curves.push_back(std::move(coh));
  return out;
}

// ---------------------------------------------------------------------------
// Scaling with the number of NV centres
// ---------------------------------------------------------------------------

/// For each n, evolves the entangled extended register and tracks the
/// decoherence of the readout branch; emits one decoherence curve per n and
/// the 0.4-threshold coherence time against n.
inline ExperimentOutput run_scaling(const ExperimentConfig& cfg) {
  detail::require_experiment(cfg, "scaling");
  cfg.validate();
  const auto grid = detail::make_grid(cfg);
  const double stop_us = cfg.grid_stop * cfg.unit_to_us();

  std::vector<int> n_list = cfg.scaling_n;
  std::sort(n_list.begin(), n_list.end());
  for (int n_nv : n_list)
    if (n_nv < 1 || n_nv > 4) throw ConfigError("scaling.n_list entries must be in [1,4]");

  ExperimentOutput out;
  Curve tcurve;
  tcurve.label = "coherence_time_vs_n";
  tcurve.time_unit = "n_nv";

  DensityMatrix last_state;
  int last_flux = 0;
  for (int n_nv : n_list) {
    HamiltonianParams params = cfg.ham;
    params.n_nv = n_nv;
    const Operator h = build_extended_hamiltonian(params);
    const PauliSum terms = pauli_decompose(h);
    const int n = n_nv + 1;

    const Circuit u1 = trotterize(terms, {stop_us, cfg.trotter_steps});
    Circuit circuit = detail::apply_dd(cfg, build_extended_circuit(n_nv, u1));
    const auto record =
        detail::snap_to_steps(grid.times_us, circuit.step_duration_us, circuit.n_steps());
    const NoiseModel model = detail::make_model(cfg, circuit, cfg.base_seed);
    // Decoupling pulses toggle the readout frame; records taken inside the
    // pulse train read the branch element in that frame.
    std::vector<std::size_t> point_masks(record.size(), 0);
    if (!circuit.step_frame_masks.empty())
      for (std::size_t i = 0; i < record.size(); ++i)
        if (record[i] >= 1 && record[i] < circuit.n_steps())
          point_masks[i] = circuit.step_frame_masks[record[i] - 1];
    const auto last_idx = static_cast<Eigen::Index>(dim_for(n)) - 1;
    Extractor branch = [point_masks, last_idx](const DensityMatrix& rho, std::size_t idx) {
      const auto m = static_cast<Eigen::Index>(point_masks[idx]);
      return rho.entries(m, last_idx ^ m);
    };
    const auto res = monte_carlo_curve(circuit, model, StateVector::zero_state(n), record,
                                       branch, cfg.threads);

    Curve curve = detail::make_curve(grid, "decoherence_n" + std::to_string(n_nv),
                                     cfg.grid_unit);
    for (const auto& p : res.points) {
      curve.values.push_back(stat_magnitude(p, 2.0));
      curve.std_errors.push_back(stat_magnitude_stderr(p, 2.0));
    }
    const CoherenceTime ct = coherence_time(curve, 0.4);
    tcurve.times.push_back(n_nv);
    tcurve.values.push_back(ct.time);
    tcurve.std_errors.push_back(0.0);
    out.summary.emplace_back(
        "scaling.coherence_time_n" + std::to_string(n_nv),
        ct.crossed ? detail::format_full(ct.time) + " " + cfg.grid_unit : "not_crossed");
    out.curves.push_back(std::move(curve));
    last_state = res.mean_final;
    last_flux = n_nv;
  }
  out.curves.push_back(std::move(tcurve));
  out.counts = sample_counts(last_state, {last_flux}, cfg.shots, cfg.base_seed);
  return out;
}

/// Dispatch by cfg.experiment (calibrate is separate; see calibrate.hpp).
inline ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  if (cfg.experiment == "relaxation") return run_relaxation(cfg);
  if (cfg.experiment == "coherence_evolution") return run_coherence_evolution(cfg);
  if (cfg.experiment == "fidelity") return run_fidelity(cfg);
  if (cfg.experiment == "steps_sweep") return run_steps_sweep(cfg);
  if (cfg.experiment == "scaling") return run_scaling(cfg);
  throw ConfigError("run_experiment: unknown experiment '" + cfg.experiment + "'");
}

}  // namespace hqsim
