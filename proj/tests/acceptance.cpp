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

// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line
// with its measured runtime; tolerances are fixed here, not configurable.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <functional>

#include "hqsim/calibrate.hpp"
#include "hqsim/csv.hpp"
#include "hqsim/decoupling.hpp"
#include "hqsim/experiments.hpp"
#include "hqsim/manifest.hpp"
#include "hqsim/qasm.hpp"
#include "oracles.hpp"

using namespace hqsim;

namespace {

class Criterion {
 public:
  Criterion(int number, const char* title) : number_(number), title_(title) {
    start_ = std::chrono::steady_clock::now();
  }
  void expect(bool condition, const char* what) {
    if (!condition) std::printf("  [criterion %d] failed: %s\n", number_, what);
    CHECK_MESSAGE(condition, what);
    ok_ = ok_ && condition;
  }
  ~Criterion() {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::printf("[criterion %d] %s: %s (%.1f s)\n", number_, ok_ ? "PASS" : "FAIL",
                title_, secs);
    std::fflush(stdout);
  }

 private:
  int number_;
  const char* title_;
  bool ok_ = true;
  std::chrono::steady_clock::time_point start_;
};

Circuit delay_circuit(int n, int steps, double dt) {
  Circuit c;
  c.n_qubits = n;
  c.step_duration_us = dt;
  for (int s = 0; s < steps; ++s) c.step_ends.push_back(0);
  return c;
}

StateVector plus_state() {
  StateVector s(1, Vector::Zero(2));
  s.amplitudes << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  return s;
}

Extractor coherence01() {
  return [](const DensityMatrix& rho, std::size_t) { return rho.entries(0, 1); };
}

ExperimentConfig noise_free(const std::string& experiment) {
  ExperimentConfig cfg = default_config(experiment);
  cfg.ou_sigma_b = 0.0;
  cfg.static_sigma = 0.0;
  cfg.gate_noise_enabled = false;
  cfg.trajectories = 1;
  cfg.grid_points = 5;
  cfg.threads = 2;
  return cfg;
}

}  // namespace

TEST_CASE("criterion 1: Trotter error halves when steps double") {
  Criterion crit(1, "Trotter halving on the reference Hamiltonian, ratio in [1.7, 2.3]");
  HamiltonianParams p;  // published constants; delta = 100, g_f = 1, b0 = 0 defaults
  const Operator h = build_hamiltonian(p);
  const PauliSum terms = pauli_decompose(h);
  const Operator exact = matrix_exponential(h, 0.05);
  double prev = 0.0;
  for (int steps : {4, 8, 16, 32}) {
    const double err =
        unitary_distance(circuit_unitary(trotterize(terms, {0.05, steps})), exact);
    if (prev > 0.0) {
      const double ratio = prev / err;
      crit.expect(ratio > 1.7 && ratio < 2.3, "halving ratio within [1.7, 2.3]");
    }
    prev = err;
  }
}

TEST_CASE("criterion 2: every experiment is flat at 1.0 without noise") {
  Criterion crit(2, "noise-free identity at 1.0 +- 1e-9 across the grids");
  {
    ExperimentConfig cfg = noise_free("relaxation");
    cfg.trotter_steps = 12;
    const auto out = run_relaxation(cfg);
    for (const auto& curve : out.curves)
      for (double v : curve.values)
        crit.expect(std::abs(v - 1.0) < 1e-9, "relaxation value at 1.0");
  }
  {
    ExperimentConfig cfg = noise_free("coherence_evolution");
    cfg.trotter_steps = 12;
    const auto out = run_coherence_evolution(cfg);
    for (double v : out.curves[0].values)
      crit.expect(std::abs(v - 1.0) < 1e-9, "coherence value at 1.0");
  }
  {
    ExperimentConfig cfg = noise_free("fidelity");
    cfg.trotter_steps = 10;
    const auto out = run_fidelity(cfg);
    for (double v : out.curves[0].values)
      crit.expect(std::abs(v - 1.0) < 1e-9, "fidelity value at 1.0");
  }
  {
    ExperimentConfig cfg = noise_free("steps_sweep");
    cfg.sweep_steps = {4, 8};
    const auto out = run_steps_sweep(cfg);
    for (const auto& curve : out.curves)
      for (double v : curve.values)
        crit.expect(std::abs(v - 1.0) < 1e-9, "sweep value at 1.0");
  }
  {
    ExperimentConfig cfg = noise_free("scaling");
    cfg.scaling_n = {1, 2};
    cfg.trotter_steps = 20;
    const auto out = run_scaling(cfg);
    for (const auto& curve : out.curves) {
      if (curve.label == "coherence_time_vs_n") continue;
      for (double v : curve.values)
        crit.expect(std::abs(v - 1.0) < 1e-9, "scaling value at 1.0");
    }
  }
}

TEST_CASE("criterion 3: Monte-Carlo OU dephasing matches the closed form") {
  Criterion crit(3, "OU coherence within 4 standard errors at three times, 1e4 trajectories");
  const double tau = 1.0, sigma = 1.0;
  const double dt = tau / 120.0;
  Circuit c = delay_circuit(1, 600, dt);
  NoiseModel m;
  m.ou[0] = {tau, sigma, dt};
  m.n_trajectories = 10000;
  m.base_seed = 20260808;
  const auto res =
      monte_carlo_curve(c, m, plus_state(), {60, 120, 600}, coherence01(), 2);
  const double times[] = {0.5, 1.0, 5.0};
  for (int i = 0; i < 3; ++i) {
    const double got = stat_magnitude(res.points[i], 2.0);
    const double se = stat_magnitude_stderr(res.points[i], 2.0);
    const double want = oracle::ou_coherence(sigma, tau, times[i]);
    crit.expect(std::abs(got - want) < 4 * std::max(se, 1e-4),
                "Monte-Carlo coherence within 4 SE of the closed form");
  }
}

TEST_CASE("criterion 4: decoupling refocuses and orders as expected") {
  Criterion crit(4, "echo restores static coherence; CPMG-4 >= CPMG-1 >= none under OU");
  // one echo pulse under static Gaussian dephasing
  {
    const double sigma = 2.0, T = 1.0;
    Circuit c = delay_circuit(1, 100, T / 100);
    NoiseModel m;
    m.static_bath[0] = {sigma};
    m.n_trajectories = 8000;
    m.base_seed = 31;
    const Circuit echo = interleave(c, {DDKind::Echo, 1, T}, 0, T / 100);
    const auto r = monte_carlo_curve(echo, m, plus_state(), {100}, coherence01(), 2);
    const double val = stat_magnitude(r.points[0], 2.0);
    const double se = stat_magnitude_stderr(r.points[0], 2.0);
    crit.expect(std::abs(val - 1.0) < std::max(4 * se, 1e-9),
                "echo returns C(T) to 1 within 4 SE");
  }
  // CPMG ordering under OU noise with tau_c = T
  {
    const double T = 1.0, sigma = 2.0;
    const int steps = 200;
    Circuit c = delay_circuit(1, steps, T / steps);
    NoiseModel m;
    m.ou[0] = {T, sigma, T / steps};
    m.n_trajectories = 10000;
    m.base_seed = 37;
    auto run = [&](const Circuit& circ) {
      const auto r = monte_carlo_curve(circ, m, plus_state(),
                                       {static_cast<std::size_t>(steps)}, coherence01(), 2);
      return std::pair<double, double>{stat_magnitude(r.points[0], 2.0),
                                       stat_magnitude_stderr(r.points[0], 2.0)};
    };
    const auto [c_none, se_none] = run(c);
    const auto [c_1, se_1] = run(interleave(c, {DDKind::Cpmg, 1, T}, 0, T / steps));
    const auto [c_4, se_4] = run(interleave(c, {DDKind::Cpmg, 4, T}, 0, T / steps));
    crit.expect(c_1 - c_none > 5 * std::hypot(se_1, se_none),
                "CPMG-1 beats free decay by more than 5 SE");
    crit.expect(c_4 - c_1 > 5 * std::hypot(se_4, se_1),
                "CPMG-4 beats CPMG-1 by more than 5 SE");
  }
}

TEST_CASE("criterion 5: calibrated reproduction of the headline numbers") {
  Criterion crit(5, "calibrate {0.35 s, 0.82}; plateau, crossing ratio, monotone, sweep floor");
  ExperimentConfig cal = default_config("calibrate");
  cal.threads = 2;
  const auto outcome = calibrate_noise(cal);
  crit.expect(outcome.report.evaluations <= 500, "calibration budget at most 500");
  crit.expect(outcome.report.ok, "all residuals at most 25%");

  const ExperimentConfig& fit = outcome.fitted;

  // (a) fidelity plateau on a fresh seed at 1e3 trajectories
  {
    ExperimentConfig cfg = fit;
    cfg.experiment = "fidelity";
    cfg.ham.n_nv = 3;
    cfg.grid_points = 30;
    cfg.trajectories = 1000;
    cfg.base_seed = fit.base_seed + 1;  // out-of-sample seed
    cfg.provenance.clear();
    const auto out = run_fidelity(cfg);
    double plateau = 0.0;
    const auto& v = out.curves[0].values;
    const std::size_t tail = v.size() - v.size() / 3;
    for (std::size_t i = tail; i < v.size(); ++i) plateau += v[i];
    plateau /= static_cast<double>(v.size() - tail);
    crit.expect(std::abs(plateau - 0.82) < 0.05, "fresh-seed plateau within 0.82 +- 0.05");
    crit.expect(v[1] < 0.9995, "visible fidelity drop within the first 0.06 ms");
  }

  // (b), (c) scaling crossings at 1e3 trajectories on 5-qubit registers
  {
    ExperimentConfig cfg = fit;
    cfg.experiment = "scaling";
    cfg.scaling_n = {1, 2, 3, 4};
    cfg.ham.delta = 0.0;
    cfg.gate_noise_enabled = false;
    cfg.grid_unit = "ms";
    cfg.grid_start = 0.0;
    cfg.grid_stop = 520.0;
    cfg.grid_points = 40;
    cfg.trotter_steps = 2600;
    cfg.trajectories = 1000;
    cfg.base_seed = fit.base_seed + 2;
    cfg.provenance.clear();
    const auto out = run_scaling(cfg);
    const Curve& tc = out.curves.back();
    REQUIRE(tc.values.size() == 4);
    for (double t : tc.values) crit.expect(std::isfinite(t), "all n cross 0.4 in window");
    crit.expect(tc.values[0] >= 2.0 * tc.values[3],
                "n = 4 crosses 0.4 at least twice as early as n = 1");
    for (std::size_t i = 1; i < tc.values.size(); ++i)
      crit.expect(tc.values[i] <= tc.values[i - 1] * 1.02,
                  "coherence time non-increasing in n");
  }

  // (d) steps-sweep coherence below 0.05 at 1400 steps
  {
    ExperimentConfig cfg = fit;
    cfg.experiment = "steps_sweep";
    cfg.ham.n_nv = 3;
    cfg.ham.delta = 0.0;
    cfg.gate_noise_enabled = true;
    cfg.static_sigma = 5e-4;
    cfg.ou_sigma_b = 0.0;
    cfg.grid_unit = "ms";
    cfg.sweep_time = 0.5;
    cfg.sweep_steps = {100, 700, 1200, 1400};
    cfg.trajectories = 128;
    cfg.base_seed = fit.base_seed + 3;
    cfg.provenance.clear();
    const auto out = run_steps_sweep(cfg);
    const Curve& coh = out.curves[1];
    crit.expect(coh.values.back() < 0.05, "sweep coherence below 0.05 at 1400 steps");
    const Curve& fid = out.curves[0];
    crit.expect(fid.values[0] > fid.values[1] && fid.values[1] > fid.values[2],
                "sweep fidelity strictly decreasing before the tail");
    const double tail_rate =
        std::abs(fid.values[3] - fid.values[2]) / (1400.0 - 1200.0) * 100.0;
    crit.expect(tail_rate < 0.01, "sweep fidelity changes below 0.01 per 100 steps at the tail");
  }
}

TEST_CASE("criterion 6: channel algebra identities") {
  Criterion crit(6, "depolarizing fixed point, damping decay, Uhlmann symmetry");
  std::mt19937_64 rng(20260809);
  // depolarizing p = 3/4 sends any qubit state to I/2 within 1e-12
  for (int rep = 0; rep < 8; ++rep) {
    DensityMatrix rho(1, oracle::random_density(2, rng));
    const DensityMatrix out = apply_depolarizing(rho, 0, 0.75);
    crit.expect(max_abs(out.entries - Matrix::Identity(2, 2) / 2.0) < 1e-12,
                "depolarizing p = 3/4 fixed point within 1e-12");
  }
  // amplitude damping for one T1 leaves e^{-1} excited population within 1e-10
  {
    DensityMatrix rho = DensityMatrix::from_state(StateVector::basis_state(1, 1));
    const DensityMatrix out = apply_amplitude_damping(rho, 0, 12.5, 12.5);
    crit.expect(std::abs(population(out, 0, 1) - std::exp(-1.0)) < 1e-10,
                "excited population e^{-1} after one T1 within 1e-10");
  }
  // Uhlmann fidelity: symmetric and equal to the pure form within 1e-10
  for (int rep = 0; rep < 8; ++rep) {
    DensityMatrix a(2, oracle::random_density(4, rng));
    DensityMatrix b(2, oracle::random_density(4, rng));
    crit.expect(std::abs(state_fidelity(a, b) - state_fidelity(b, a)) < 1e-10,
                "Uhlmann fidelity symmetric within 1e-10");
    const StateVector psi(2, oracle::random_state(4, rng));
    crit.expect(std::abs(state_fidelity(a, DensityMatrix::from_state(psi)) -
                         state_fidelity(a, psi)) < 1e-10,
                "Uhlmann form equals <psi|rho|psi> for pure targets within 1e-10");
  }
}

TEST_CASE("criterion 7: bit-identical outputs for identical configs") {
  Criterion crit(7, "same config and seed give identical CSV bytes across runs and threads");
  ExperimentConfig cfg = default_config("scaling");
  cfg.scaling_n = {1, 2};
  cfg.grid_points = 12;
  cfg.grid_stop = 12.0;
  cfg.trotter_steps = 60;
  cfg.trajectories = 192;

  auto render = [](const ExperimentOutput& out) {
    std::string all;
    for (const auto& curve : out.curves) all += curve_to_csv(curve);
    return all;
  };
  cfg.threads = 1;
  const std::string a = render(run_scaling(cfg));
  const std::string b = render(run_scaling(cfg));
  cfg.threads = 2;
  const std::string c = render(run_scaling(cfg));
  crit.expect(a == b, "two identical runs emit identical bytes");
  crit.expect(a == c, "thread count does not change the bytes");
}

TEST_CASE("criterion 8: QASM round trip is byte identical for preset circuits") {
  Criterion crit(8, "export, parse, export returns identical text");
  HamiltonianParams p;
  const PauliSum terms = pauli_decompose(build_hamiltonian(p));
  const Circuit u1 = trotterize(terms, {0.05, 5});
  HamiltonianParams ext = p;
  ext.n_nv = 3;
  const PauliSum ext_terms = pauli_decompose(build_extended_hamiltonian(ext));
  const Circuit ext_u1 = trotterize(ext_terms, {0.05, 5});
  const Circuit presets[] = {u1, build_entangling_circuit(u1, true),
                             build_extended_circuit(3, ext_u1)};
  for (const Circuit& c : presets) {
    const std::string once = export_qasm(c);
    const std::string twice = export_qasm(parse_qasm(once));
    crit.expect(once == twice, "round trip byte identical");
  }
}
