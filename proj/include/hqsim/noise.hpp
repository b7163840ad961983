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

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "hqsim/circuit.hpp"
#include "hqsim/errors.hpp"
#include "hqsim/linalg.hpp"
#include "hqsim/rng.hpp"

namespace hqsim {

// ---------------------------------------------------------------------------
// Noise parameter types
// ---------------------------------------------------------------------------

/// Ornstein-Uhlenbeck field noise: stationary std sigma_b, correlation time
/// tau_c, sampled every dt. The dt <= tau_c/5 bound keeps the discrete jump
/// correlation close to the continuous process.
struct OUParams {
  double tau_c_us = 1.0;
  double sigma_b = 0.0;  // MHz-2pi
  double dt_us = 0.1;

  void validate() const {
    if (!(tau_c_us > 0)) throw InvalidParamsError("OUParams: tau_c must be > 0");
    if (!(sigma_b >= 0)) throw InvalidParamsError("OUParams: sigma_b must be >= 0");
    if (!(dt_us > 0)) throw InvalidParamsError("OUParams: dt must be > 0");
    if (dt_us > tau_c_us / 5.0 + 1e-12)
      throw InvalidParamsError("OUParams: dt must be <= tau_c/5");
  }
};

/// Per-trajectory constant detuning drawn from N(0, sigma_static^2),
/// modelling the quasi-static nuclear bath.
struct StaticBathParams {
  double sigma_static = 0.0;  // MHz-2pi

  void validate() const {
    if (!(sigma_static >= 0))
      throw InvalidParamsError("StaticBathParams: sigma_static must be >= 0");
  }
};

/// Hardware-style channel noise: depolarizing probability per gate and an
/// amplitude-damping time applied per elapsed step.
struct GateNoiseParams {
  double p_depol_1q = 0.0;
  double p_depol_2q = 0.0;
  std::optional<double> t1_us;  // disabled when absent

  void validate() const {
    if (p_depol_1q < 0 || p_depol_1q > 1 || p_depol_2q < 0 || p_depol_2q > 1)
      throw InvalidParamsError("GateNoiseParams: probabilities must be in [0,1]");
    if (t1_us && !(*t1_us > 0))
      throw InvalidParamsError("GateNoiseParams: t1 must be > 0 when set");
  }
};

/// Aggregate noise model: stochastic field noise per qubit plus channel
/// noise, with the Monte-Carlo sampling configuration.
struct NoiseModel {
  std::map<int, OUParams> ou;                  // keyed by qubit
  std::map<int, StaticBathParams> static_bath; // keyed by qubit
  std::optional<GateNoiseParams> gate_noise;
  int n_trajectories = 1;
  std::uint64_t base_seed = 0;

  void validate() const {
    if (n_trajectories < 1)
      throw InvalidParamsError("NoiseModel: n_trajectories must be >= 1");
    for (const auto& [q, p] : ou) {
      if (q < 0) throw IndexError("NoiseModel: negative qubit index");
      p.validate();
    }
    for (const auto& [q, p] : static_bath) {
      if (q < 0) throw IndexError("NoiseModel: negative qubit index");
      p.validate();
    }
    if (gate_noise) gate_noise->validate();
  }

  bool stochastic() const { return !ou.empty() || !static_bath.empty(); }

  static NoiseModel none() { return NoiseModel{}; }
};

// ---------------------------------------------------------------------------
// Stochastic field sampling
// ---------------------------------------------------------------------------

/// One OU path b[0..n_steps] with b[0] drawn at stationarity and the exact
/// discrete update b[k+1] = b[k] e^{-dt/tau} + sigma sqrt(1 - e^{-2dt/tau}) xi.
inline std::vector<double> sample_ou_trajectory(const OUParams& p, int n_steps,
                                                std::uint64_t seed) {
  p.validate();
  Rng rng(seed);
  std::vector<double> b(static_cast<std::size_t>(n_steps) + 1);
  const double decay = std::exp(-p.dt_us / p.tau_c_us);
  const double kick = p.sigma_b * std::sqrt(1.0 - decay * decay);
  b[0] = p.sigma_b * rng.normal();
  for (int k = 0; k < n_steps; ++k)
    b[static_cast<std::size_t>(k) + 1] = b[static_cast<std::size_t>(k)] * decay + kick * rng.normal();
  return b;
}

/// Converts field samples to per-step RZ angles, phi[k] = b[k] * dt.
inline std::vector<double> dephasing_angles(const std::vector<double>& trajectory,
                                            double dt_us) {
  if (!(dt_us > 0)) throw InvalidParamsError("dephasing_angles: dt must be > 0");
  std::vector<double> out(trajectory.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = trajectory[i] * dt_us;
  return out;
}

// ---------------------------------------------------------------------------
// Channels
// ---------------------------------------------------------------------------

namespace detail {

// Blockwise with respect to the target qubit, rho = [[A, B], [C, D]]:
// X rho X + Y rho Y + Z rho Z = [[A + 2D, -B], [-C, 2A + D]].
inline void depolarize_inplace(Matrix& rho, int n_qubits, int qubit, double p) {
  if (p == 0.0) return;
  const std::size_t mask = std::size_t{1} << qubit_bit(n_qubits, qubit);
  const std::size_t n_dim = static_cast<std::size_t>(rho.rows());
  const double keep = 1.0 - p;
  const double mix = p / 3.0;
  for (std::size_t i = 0; i < n_dim; ++i) {
    if (i & mask) continue;
    for (std::size_t j = 0; j < n_dim; ++j) {
      if (j & mask) continue;
      const auto i0 = static_cast<Eigen::Index>(i), j0 = static_cast<Eigen::Index>(j);
      const auto i1 = static_cast<Eigen::Index>(i | mask), j1 = static_cast<Eigen::Index>(j | mask);
      const Complex a = rho(i0, j0), b = rho(i0, j1), c = rho(i1, j0), d = rho(i1, j1);
      rho(i0, j0) = keep * a + mix * (a + 2.0 * d);
      rho(i0, j1) = keep * b - mix * b;
      rho(i1, j0) = keep * c - mix * c;
      rho(i1, j1) = keep * d + mix * (2.0 * a + d);
    }
  }
}

// Kraus pair K0 = diag(1, sqrt(1-g)), K1 = sqrt(g) |0><1| on the target.
inline void amplitude_damp_inplace(Matrix& rho, int n_qubits, int qubit, double gamma) {
  if (gamma == 0.0) return;
  const std::size_t mask = std::size_t{1} << qubit_bit(n_qubits, qubit);
  const std::size_t n_dim = static_cast<std::size_t>(rho.rows());
  const double s = std::sqrt(1.0 - gamma);
  for (std::size_t i = 0; i < n_dim; ++i) {
    if (i & mask) continue;
    for (std::size_t j = 0; j < n_dim; ++j) {
      if (j & mask) continue;
      const auto i0 = static_cast<Eigen::Index>(i), j0 = static_cast<Eigen::Index>(j);
      const auto i1 = static_cast<Eigen::Index>(i | mask), j1 = static_cast<Eigen::Index>(j | mask);
      const Complex a = rho(i0, j0), b = rho(i0, j1), c = rho(i1, j0), d = rho(i1, j1);
      rho(i0, j0) = a + gamma * d;
      rho(i0, j1) = s * b;
      rho(i1, j0) = s * c;
      rho(i1, j1) = (1.0 - gamma) * d;
    }
  }
}

// rho_ij *= e^{i theta (z_i - z_j)} where z is the target qubit's bit:
// conjugation by RZ(theta).
inline void rz_kick_inplace(Matrix& rho, int n_qubits, int qubit, double theta) {
  if (theta == 0.0) return;
  const std::size_t mask = std::size_t{1} << qubit_bit(n_qubits, qubit);
  const std::size_t n_dim = static_cast<std::size_t>(rho.rows());
  const Complex up = std::exp(Complex(0, theta));
  const Complex dn = std::conj(up);
  for (std::size_t i = 0; i < n_dim; ++i)
    for (std::size_t j = 0; j < n_dim; ++j) {
      const int zi = static_cast<int>((i & mask) != 0);
      const int zj = static_cast<int>((j & mask) != 0);
      if (zi == zj) continue;
      rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *= (zi > zj) ? up : dn;
    }
}

}  // namespace detail

/// Single-qubit depolarizing channel:
/// rho -> (1-p) rho + (p/3)(X rho X + Y rho Y + Z rho Z).
inline DensityMatrix apply_depolarizing(const DensityMatrix& rho, int qubit, double p) {
  if (p < 0 || p > 1) throw InvalidParamsError("apply_depolarizing: p must be in [0,1]");
  if (qubit < 0 || qubit >= rho.n_qubits)
    throw IndexError("apply_depolarizing: qubit out of range");
  DensityMatrix out = rho;
  detail::depolarize_inplace(out.entries, rho.n_qubits, qubit, p);
  return out;
}

/// Amplitude damping toward |0> with gamma = 1 - e^{-duration/t1}.
inline DensityMatrix apply_amplitude_damping(const DensityMatrix& rho, int qubit,
                                             double duration_us, double t1_us) {
  if (!(duration_us >= 0))
    throw InvalidParamsError("apply_amplitude_damping: duration must be >= 0");
  if (!(t1_us > 0)) throw InvalidParamsError("apply_amplitude_damping: t1 must be > 0");
  if (qubit < 0 || qubit >= rho.n_qubits)
    throw IndexError("apply_amplitude_damping: qubit out of range");
  DensityMatrix out = rho;
  const double gamma = 1.0 - std::exp(-duration_us / t1_us);
  detail::amplitude_damp_inplace(out.entries, rho.n_qubits, qubit, gamma);
  return out;
}

// ---------------------------------------------------------------------------
// Monte-Carlo trajectory engine
// ---------------------------------------------------------------------------

/// Running sums of a complex per-trajectory observable at one record point.
/// Means and delta-method standard errors are derived from these.
struct PointStats {
  Complex sum{0.0, 0.0};
  double sum_re2 = 0.0;
  double sum_im2 = 0.0;
  double sum_reim = 0.0;
  long long n = 0;

  void add(Complex z) {
    sum += z;
    sum_re2 += z.real() * z.real();
    sum_im2 += z.imag() * z.imag();
    sum_reim += z.real() * z.imag();
    ++n;
  }
  void merge(const PointStats& o) {
    sum += o.sum;
    sum_re2 += o.sum_re2;
    sum_im2 += o.sum_im2;
    sum_reim += o.sum_reim;
    n += o.n;
  }
  Complex mean() const { return sum / static_cast<double>(n); }
  double var_re() const {
    if (n < 2) return 0.0;
    const double m = sum.real() / static_cast<double>(n);
    return std::max(0.0, (sum_re2 - static_cast<double>(n) * m * m) / static_cast<double>(n - 1));
  }
  double var_im() const {
    if (n < 2) return 0.0;
    const double m = sum.imag() / static_cast<double>(n);
    return std::max(0.0, (sum_im2 - static_cast<double>(n) * m * m) / static_cast<double>(n - 1));
  }
  double cov_reim() const {
    if (n < 2) return 0.0;
    const double mr = sum.real() / static_cast<double>(n);
    const double mi = sum.imag() / static_cast<double>(n);
    return (sum_reim - static_cast<double>(n) * mr * mi) / static_cast<double>(n - 1);
  }
};

/// Observable whose plotted value is Re(mean z).
inline double stat_real(const PointStats& s) { return s.mean().real(); }
inline double stat_real_stderr(const PointStats& s) {
  return std::sqrt(s.var_re() / static_cast<double>(s.n));
}

/// Observable whose plotted value is scale * |mean z|; the standard error
/// projects the trajectory-to-trajectory covariance along the mean direction.
inline double stat_magnitude(const PointStats& s, double scale) {
  return scale * std::abs(s.mean());
}
inline double stat_magnitude_stderr(const PointStats& s, double scale) {
  const Complex m = s.mean();
  const double r = std::abs(m);
  const double n = static_cast<double>(s.n);
  if (r < 1e-300)
    return scale * std::sqrt((s.var_re() + s.var_im()) / n);
  const double gx = m.real() / r, gy = m.imag() / r;
  const double v = gx * gx * s.var_re() + 2.0 * gx * gy * s.cov_reim() + gy * gy * s.var_im();
  return scale * std::sqrt(std::max(0.0, v) / n);
}

/// Per-trajectory observable: receives the trajectory state and the index
/// of the record point being filled.
using Extractor = std::function<Complex(const DensityMatrix&, std::size_t)>;

namespace detail {

struct ChunkAccum {
  std::vector<PointStats> points;
  Matrix final_sum;
  long long count = 0;
};

struct PreparedCircuit {
  const Circuit* circuit = nullptr;
  std::vector<Matrix> gate_mats;  // identity entries for MEASURE_Z markers
  std::vector<int> ou_qubits;
  std::vector<int> static_qubits;
  // When every timed step compiles to a diagonal unitary and no per-gate
  // channel runs, each step collapses to one phase-vector pass.
  bool fast_diag = false;
  std::vector<Vector> step_diags;
};

inline PreparedCircuit prepare_circuit(const Circuit& c, const NoiseModel& model) {
  c.validate();
  model.validate();
  PreparedCircuit out;
  out.circuit = &c;
  out.gate_mats.reserve(c.gates.size());
  for (const auto& g : c.gates) {
    Matrix m = gate_matrix(g).entries;
    if (g.kind != GateKind::MEASURE_Z && !is_unitary(m, 1e-8))
      throw NonUnitaryError("monte_carlo: non-unitary gate matrix");
    out.gate_mats.push_back(std::move(m));
  }
  for (const auto& [q, p] : model.ou) {
    if (q >= c.n_qubits) throw IndexError("monte_carlo: OU qubit out of range");
    if (c.n_steps() > 0 && std::abs(p.dt_us - c.step_duration_us) > 1e-9 * std::max(1.0, p.dt_us))
      throw InvalidParamsError("monte_carlo: OU dt does not match the circuit step duration");
    out.ou_qubits.push_back(q);
  }
  for (const auto& [q, p] : model.static_bath) {
    if (q >= c.n_qubits) throw IndexError("monte_carlo: static-bath qubit out of range");
    out.static_qubits.push_back(q);
  }

  // Per-gate channels interleave inside a step, so any gate-noise block
  // keeps the step-by-step path.
  if (!model.gate_noise && c.n_steps() > 0) {
    const auto n_dim = static_cast<Eigen::Index>(dim_for(c.n_qubits));
    out.step_diags.reserve(c.n_steps());
    bool all_diag = true;
    std::size_t cursor = c.prologue_end;
    for (std::size_t s = 0; s < c.n_steps() && all_diag; ++s) {
      Matrix u = Matrix::Identity(n_dim, n_dim);
      for (std::size_t gi = cursor; gi < c.step_ends[s]; ++gi) {
        if (c.gates[gi].kind == GateKind::MEASURE_Z) continue;
        apply_matrix_dm_left_only(u, out.gate_mats[gi], c.n_qubits, c.gates[gi].targets);
      }
      cursor = c.step_ends[s];
      Matrix off = u;
      off.diagonal().setZero();
      if (max_abs(off) > 1e-13) {
        all_diag = false;
        break;
      }
      out.step_diags.push_back(u.diagonal());
    }
    if (all_diag) out.fast_diag = true;
    else out.step_diags.clear();
  }
  return out;
}

inline void apply_gate_with_noise(Matrix& rho, const PreparedCircuit& pc,
                                  std::size_t gate_idx, const NoiseModel& model) {
  const Circuit& c = *pc.circuit;
  const Gate& g = c.gates[gate_idx];
  if (g.kind == GateKind::MEASURE_Z) return;
  apply_matrix_dm(rho, pc.gate_mats[gate_idx], c.n_qubits, g.targets);
  if (model.gate_noise && !g.noiseless) {
    const double p = (g.kind == GateKind::CNOT) ? model.gate_noise->p_depol_2q
                                                : model.gate_noise->p_depol_1q;
    if (p > 0)
      for (int t : g.targets) depolarize_inplace(rho, c.n_qubits, t, p);
  }
}

/// Evolves trajectories [j0, j1) and accumulates their statistics. The
/// observable is recorded after `record_after[k]` completed steps; index 0
/// means the prepared state (after the untimed prologue) and n_steps means
/// the end of the circuit including its epilogue.
inline ChunkAccum run_chunk(const PreparedCircuit& pc, const NoiseModel& model,
                            const Matrix& initial, const std::vector<std::size_t>& record_after,
                            const std::vector<Extractor>& extractors, long long j0,
                            long long j1) {
  const Circuit& c = *pc.circuit;
  const int n = c.n_qubits;
  const std::size_t n_steps = c.n_steps();
  const std::size_t n_dim = dim_for(n);
  const double dt = c.step_duration_us;
  const double t1_gamma =
      (model.gate_noise && model.gate_noise->t1_us && n_steps > 0)
          ? 1.0 - std::exp(-dt / *model.gate_noise->t1_us)
          : 0.0;

  ChunkAccum acc;
  acc.points.resize(record_after.size() * extractors.size());
  acc.final_sum = Matrix::Zero(initial.rows(), initial.cols());
  const std::size_t n_ext = extractors.size();

  DensityMatrix work;
  work.n_qubits = n;

  std::vector<std::vector<double>> ou_paths(pc.ou_qubits.size());
  std::vector<double> statics(pc.static_qubits.size(), 0.0);
  Vector phases(static_cast<Eigen::Index>(n_dim));
  std::vector<std::size_t> noisy_masks;
  for (int q : pc.ou_qubits) noisy_masks.push_back(std::size_t{1} << qubit_bit(n, q));
  std::vector<std::size_t> static_masks;
  for (int q : pc.static_qubits) static_masks.push_back(std::size_t{1} << qubit_bit(n, q));

  for (long long j = j0; j < j1; ++j) {
    Rng rng(model.base_seed + static_cast<std::uint64_t>(j));
    for (std::size_t k = 0; k < pc.static_qubits.size(); ++k)
      statics[k] = model.static_bath.at(pc.static_qubits[k]).sigma_static * rng.normal();
    for (std::size_t k = 0; k < pc.ou_qubits.size(); ++k) {
      const OUParams& p = model.ou.at(pc.ou_qubits[k]);
      auto& b = ou_paths[k];
      b.assign(n_steps + 1, 0.0);
      const double decay = std::exp(-p.dt_us / p.tau_c_us);
      const double kick = p.sigma_b * std::sqrt(1.0 - decay * decay);
      b[0] = p.sigma_b * rng.normal();
      for (std::size_t s = 0; s < n_steps; ++s) b[s + 1] = b[s] * decay + kick * rng.normal();
    }

    work.entries = initial;
    std::size_t rec = 0;

    for (std::size_t gi = 0; gi < c.prologue_end; ++gi)
      apply_gate_with_noise(work.entries, pc, gi, model);
    while (rec < record_after.size() && record_after[rec] == 0) {
      for (std::size_t e = 0; e < n_ext; ++e)
        acc.points[e * record_after.size() + rec].add(extractors[e](work, rec));
      ++rec;
    }

    std::size_t gate_cursor = c.prologue_end;
    for (std::size_t s = 0; s < n_steps; ++s) {
      if (pc.fast_diag) {
        // One fused phase pass: step unitary diagonal times dephasing kicks.
        const Vector& sd = pc.step_diags[s];
        for (std::size_t i = 0; i < n_dim; ++i) {
          double angle = 0.0;
          for (std::size_t k = 0; k < noisy_masks.size(); ++k)
            if (i & noisy_masks[k]) angle += ou_paths[k][s] * dt;
          for (std::size_t k = 0; k < static_masks.size(); ++k)
            if (i & static_masks[k]) angle += statics[k] * dt;
          phases(static_cast<Eigen::Index>(i)) =
              sd(static_cast<Eigen::Index>(i)) * std::exp(Complex(0, angle));
        }
        for (std::size_t i = 0; i < n_dim; ++i)
          for (std::size_t jj = 0; jj < n_dim; ++jj)
            work.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(jj)) *=
                phases(static_cast<Eigen::Index>(i)) *
                std::conj(phases(static_cast<Eigen::Index>(jj)));
        gate_cursor = c.step_ends[s];
      } else {
        const std::size_t end = c.step_ends[s];
        for (std::size_t gi = gate_cursor; gi < end; ++gi)
          apply_gate_with_noise(work.entries, pc, gi, model);
        gate_cursor = end;
        for (std::size_t k = 0; k < pc.ou_qubits.size(); ++k)
          rz_kick_inplace(work.entries, n, pc.ou_qubits[k], ou_paths[k][s] * dt);
        for (std::size_t k = 0; k < pc.static_qubits.size(); ++k)
          rz_kick_inplace(work.entries, n, pc.static_qubits[k], statics[k] * dt);
      }
      if (t1_gamma > 0)
        for (int q = 0; q < n; ++q) amplitude_damp_inplace(work.entries, n, q, t1_gamma);

      if (s + 1 < n_steps) {
        while (rec < record_after.size() && record_after[rec] == s + 1) {
          for (std::size_t e = 0; e < n_ext; ++e)
            acc.points[e * record_after.size() + rec].add(extractors[e](work, rec));
          ++rec;
        }
      }
    }

    for (std::size_t gi = gate_cursor; gi < c.gates.size(); ++gi)
      apply_gate_with_noise(work.entries, pc, gi, model);
    while (rec < record_after.size() && record_after[rec] >= n_steps) {
      for (std::size_t e = 0; e < n_ext; ++e)
        acc.points[e * record_after.size() + rec].add(extractors[e](work, rec));
      ++rec;
    }

    acc.final_sum += work.entries;
    ++acc.count;
  }
  return acc;
}

inline constexpr long long kChunkSize = 64;

/// Runs all trajectories in fixed chunks of kChunkSize and merges chunk
/// results in chunk order, so the output is bit-identical for any thread
/// count.
inline ChunkAccum run_all(const PreparedCircuit& pc, const NoiseModel& model,
                          const Matrix& initial, const std::vector<std::size_t>& record_after,
                          const std::vector<Extractor>& extractors, int threads) {
  const long long total = model.n_trajectories;
  const long long n_chunks = (total + kChunkSize - 1) / kChunkSize;
  if (threads <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    threads = hw > 0 ? static_cast<int>(hw) : 1;
  }
  std::vector<ChunkAccum> results(static_cast<std::size_t>(n_chunks));

  if (threads == 1 || n_chunks == 1) {
    for (long long ci = 0; ci < n_chunks; ++ci)
      results[static_cast<std::size_t>(ci)] =
          run_chunk(pc, model, initial, record_after, extractors, ci * kChunkSize,
                    std::min(total, (ci + 1) * kChunkSize));
  } else {
    std::atomic<long long> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
      try {
        for (;;) {
          const long long ci = next.fetch_add(1);
          if (ci >= n_chunks) return;
          results[static_cast<std::size_t>(ci)] =
              run_chunk(pc, model, initial, record_after, extractors, ci * kChunkSize,
                        std::min(total, (ci + 1) * kChunkSize));
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    };
    std::vector<std::thread> pool;
    const int n_workers = static_cast<int>(std::min<long long>(threads, n_chunks));
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  ChunkAccum merged;
  merged.points.resize(record_after.size() * extractors.size());
  merged.final_sum = Matrix::Zero(initial.rows(), initial.cols());
  for (const auto& r : results) {
    for (std::size_t i = 0; i < merged.points.size(); ++i)
      merged.points[i].merge(r.points[i]);
    merged.final_sum += r.final_sum;
    merged.count += r.count;
  }
  return merged;
}

}  // namespace detail

/// Trajectory-averaged final state: each trajectory draws its own static
/// detunings and OU paths (seed = base_seed + index), interleaves dephasing
/// kicks and damping at step boundaries and depolarizing after gates, and
/// the resulting density matrices are averaged in fixed order.
inline DensityMatrix monte_carlo_evolve(const Circuit& c, const NoiseModel& model,
                                        const StateVector& initial, int threads = 1) {
  if (initial.n_qubits != c.n_qubits)
    throw RegisterMismatchError("monte_carlo_evolve: register size mismatch");
  const auto pc = detail::prepare_circuit(c, model);
  const Matrix rho0 = initial.amplitudes * initial.amplitudes.adjoint();
  const auto acc = detail::run_all(pc, model, rho0, {}, {}, threads);
  DensityMatrix out;
  out.n_qubits = c.n_qubits;
  out.entries = acc.final_sum / static_cast<double>(acc.count);
  return out;
}

inline DensityMatrix monte_carlo_evolve(const Circuit& c, const NoiseModel& model,
                                        const DensityMatrix& initial, int threads = 1) {
  if (initial.n_qubits != c.n_qubits)
    throw RegisterMismatchError("monte_carlo_evolve: register size mismatch");
  const auto pc = detail::prepare_circuit(c, model);
  const auto acc = detail::run_all(pc, model, initial.entries, {}, {}, threads);
  DensityMatrix out;
  out.n_qubits = c.n_qubits;
  out.entries = acc.final_sum / static_cast<double>(acc.count);
  return out;
}

struct McCurveResult {
  std::vector<PointStats> points;
  DensityMatrix mean_final;
};

struct McMultiCurveResult {
  std::vector<std::vector<PointStats>> per_extractor;  // [extractor][point]
  DensityMatrix mean_final;
};

/// Records a complex observable of the per-trajectory state after the given
/// step counts (0 = prepared state, n_steps = end of circuit). Returns one
/// PointStats per requested point, in order, plus the trajectory-averaged
/// final state.
inline McCurveResult monte_carlo_curve(const Circuit& c, const NoiseModel& model,
                                       const StateVector& initial,
                                       const std::vector<std::size_t>& record_after,
                                       const Extractor& extract, int threads = 1) {
  if (initial.n_qubits != c.n_qubits)
    throw RegisterMismatchError("monte_carlo_curve: register size mismatch");
  for (std::size_t i = 1; i < record_after.size(); ++i)
    if (record_after[i] < record_after[i - 1])
      throw InvalidParamsError("monte_carlo_curve: record points must be sorted");
  const auto pc = detail::prepare_circuit(c, model);
  const Matrix rho0 = initial.amplitudes * initial.amplitudes.adjoint();
  auto acc = detail::run_all(pc, model, rho0, record_after, {extract}, threads);
  McCurveResult out;
  out.points = std::move(acc.points);
  out.mean_final.n_qubits = c.n_qubits;
  out.mean_final.entries = acc.final_sum / static_cast<double>(acc.count);
  return out;
}

/// Several observables recorded over one shared trajectory sweep.
inline McMultiCurveResult monte_carlo_curves(const Circuit& c, const NoiseModel& model,
                                             const StateVector& initial,
                                             const std::vector<std::size_t>& record_after,
                                             const std::vector<Extractor>& extractors,
                                             int threads = 1) {
  if (initial.n_qubits != c.n_qubits)
    throw RegisterMismatchError("monte_carlo_curves: register size mismatch");
  for (std::size_t i = 1; i < record_after.size(); ++i)
    if (record_after[i] < record_after[i - 1])
      throw InvalidParamsError("monte_carlo_curves: record points must be sorted");
  const auto pc = detail::prepare_circuit(c, model);
  const Matrix rho0 = initial.amplitudes * initial.amplitudes.adjoint();
  auto acc = detail::run_all(pc, model, rho0, record_after, extractors, threads);
  McMultiCurveResult out;
  out.per_extractor.resize(extractors.size());
  for (std::size_t e = 0; e < extractors.size(); ++e)
    out.per_extractor[e].assign(acc.points.begin() + static_cast<std::ptrdiff_t>(e * record_after.size()),
                                acc.points.begin() + static_cast<std::ptrdiff_t>((e + 1) * record_after.size()));
  out.mean_final.n_qubits = c.n_qubits;
  out.mean_final.entries = acc.final_sum / static_cast<double>(acc.count);
  return out;
}

}  // namespace hqsim
