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

#include <map>
#include <string>
#include <vector>

#include "hqsim/errors.hpp"
#include "hqsim/gates.hpp"
#include "hqsim/linalg.hpp"
#include "hqsim/rng.hpp"

namespace hqsim {

/// Ordered gate list on a named-role register, with optional timing
/// structure for simulated evolutions:
///
///   gates[0, prologue_end)              untimed preparation
///   gates[prologue_end, step_ends[0])   Trotter step 0
///   gates[step_ends[s-1], step_ends[s]) Trotter step s
///   gates[step_ends.back(), ...)        untimed epilogue (inversions,
///                                       corrective pulses, measurements)
///
/// Each timed step spans step_duration_us of physical evolution; the noise
/// engine inserts its dephasing and damping at step boundaries. Circuits
/// without steps (step_ends empty) are plain gate sequences.
struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;
  std::map<int, std::string> qubit_roles;

  std::size_t prologue_end = 0;
  std::vector<std::size_t> step_ends;
  double step_duration_us = 0.0;
  double global_phase = 0.0;  // radians; from identity Pauli terms

  // Pauli toggling frame after each step when decoupling pulses are
  // interleaved: a bit mask (register bit convention) of qubits whose
  // frame is currently flipped. Empty when no pulses are present.
  std::vector<std::size_t> step_frame_masks;

  std::size_t n_steps() const { return step_ends.size(); }

  std::size_t epilogue_begin() const {
    return step_ends.empty() ? gates.size() : step_ends.back();
  }

  void validate() const {
    for (const auto& g : gates) {
      g.validate();
      for (int t : g.targets)
        if (t < 0 || t >= n_qubits)
          throw IndexError("Circuit: gate target out of range");
    }
    if (!step_ends.empty()) {
      std::size_t prev = prologue_end;
      for (std::size_t e : step_ends) {
        if (e < prev) throw InvalidParamsError("Circuit: step_ends not monotone");
        prev = e;
      }
      if (prev > gates.size())
        throw InvalidParamsError("Circuit: step_ends beyond gate list");
    } else if (prologue_end > gates.size()) {
      throw InvalidParamsError("Circuit: prologue beyond gate list");
    }
    // Measurement markers: at most one per qubit, only at the end.
    bool seen_measure = false;
    std::vector<int> measured(static_cast<std::size_t>(n_qubits), 0);
    for (const auto& g : gates) {
      if (g.kind == GateKind::MEASURE_Z) {
        seen_measure = true;
        if (++measured[static_cast<std::size_t>(g.targets[0])] > 1)
          throw InvalidParamsError("Circuit: duplicate MEASURE_Z on a qubit");
      } else if (seen_measure) {
        throw InvalidParamsError("Circuit: gate after MEASURE_Z");
      }
    }
  }

  std::vector<int> measured_qubits() const {
    std::vector<int> out;
    for (const auto& g : gates)
      if (g.kind == GateKind::MEASURE_Z) out.push_back(g.targets[0]);
    return out;
  }
};

/// Applies the circuit's gates in order to a pure state. MEASURE_Z markers
/// do not collapse; they only mark readout qubits. The tracked global phase
/// is applied so compiled circuits reproduce exact exponentials including
/// identity terms.
inline StateVector run_circuit(const Circuit& c, const StateVector& initial) {
  if (initial.n_qubits != c.n_qubits)
    throw RegisterMismatchError("run_circuit: register size mismatch");
  StateVector state = initial;
  for (const auto& g : c.gates) {
    if (g.kind == GateKind::MEASURE_Z) continue;
    detail::apply_matrix_vec(state.amplitudes, gate_matrix(g).entries, c.n_qubits,
                             g.targets);
  }
  if (c.global_phase != 0.0)
    state.amplitudes *= std::exp(Complex(0, c.global_phase));
  return state;
}

/// Density-matrix overload; the global phase cancels in rho.
inline DensityMatrix run_circuit(const Circuit& c, const DensityMatrix& initial) {
  if (initial.n_qubits != c.n_qubits)
    throw RegisterMismatchError("run_circuit: register size mismatch");
  DensityMatrix state = initial;
  for (const auto& g : c.gates) {
    if (g.kind == GateKind::MEASURE_Z) continue;
    detail::apply_matrix_dm(state.entries, gate_matrix(g).entries, c.n_qubits,
                            g.targets);
  }
  return state;
}

/// Full unitary of the circuit (measure markers skipped), including the
/// tracked global phase.
inline Operator circuit_unitary(const Circuit& c) {
  const auto d = static_cast<Eigen::Index>(dim_for(c.n_qubits));
  Matrix u = Matrix::Identity(d, d);
  for (const auto& g : c.gates) {
    if (g.kind == GateKind::MEASURE_Z) continue;
    detail::apply_matrix_dm_left_only(u, gate_matrix(g).entries, c.n_qubits, g.targets);
  }
  return Operator(std::exp(Complex(0, c.global_phase)) * u);
}

// ---------------------------------------------------------------------------
// Readout
// ---------------------------------------------------------------------------

namespace detail {

template <typename State>
std::vector<double> marginal_probabilities(const State& state,
                                           const std::vector<int>& qubits);

inline std::vector<double> basis_probabilities(const StateVector& s) {
  std::vector<double> p(s.dim());
  for (std::size_t i = 0; i < p.size(); ++i)
    p[i] = std::norm(s.amplitudes(static_cast<Eigen::Index>(i)));
  return p;
}

inline std::vector<double> basis_probabilities(const DensityMatrix& s) {
  std::vector<double> p(s.dim());
  for (std::size_t i = 0; i < p.size(); ++i)
    p[i] = s.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
  return p;
}

template <typename State>
std::vector<double> marginal_probabilities(const State& state,
                                           const std::vector<int>& qubits) {
  const int n = state.n_qubits;
  for (int q : qubits)
    if (q < 0 || q >= n) throw IndexError("sample_counts: qubit out of range");
  const auto full = basis_probabilities(state);
  const std::size_t k = qubits.size();
  std::vector<double> marg(std::size_t{1} << k, 0.0);
  for (std::size_t i = 0; i < full.size(); ++i) {
    std::size_t outcome = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const int bit = static_cast<int>((i >> qubit_bit(n, qubits[j])) & 1);
      outcome |= static_cast<std::size_t>(bit) << (k - 1 - j);
    }
    marg[outcome] += full[i];
  }
  return marg;
}

inline std::string outcome_bits(std::size_t outcome, std::size_t k) {
  std::string s(k, '0');
  for (std::size_t j = 0; j < k; ++j)
    if ((outcome >> (k - 1 - j)) & 1) s[j] = '1';
  return s;
}

}  // namespace detail

/// Multinomial shot sampling from the Born probabilities of the listed
/// qubits. Deterministic for a given seed; counts sum to shots.
template <typename State>
std::map<std::string, std::uint64_t> sample_counts(const State& state,
                                                   const std::vector<int>& qubits,
                                                   std::uint64_t shots,
                                                   std::uint64_t seed) {
  if (shots < 1) throw InvalidParamsError("sample_counts: shots must be >= 1");
  const auto marg = detail::marginal_probabilities(state, qubits);
  std::vector<double> cdf(marg.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < marg.size(); ++i) {
    acc += marg[i];
    cdf[i] = acc;
  }
  Rng rng(seed);
  std::vector<std::uint64_t> counts(marg.size(), 0);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = rng.uniform01() * acc;
    std::size_t idx = 0;
    while (idx + 1 < cdf.size() && u >= cdf[idx]) ++idx;
    ++counts[idx];
  }
  std::map<std::string, std::uint64_t> out;
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (counts[i] > 0) out[detail::outcome_bits(i, qubits.size())] = counts[i];
  return out;
}

// ---------------------------------------------------------------------------
// Preset circuits
// ---------------------------------------------------------------------------

namespace detail {

/// Appends sub's gates to c, merging timing: sub's prologue joins c's last
/// untimed region and sub's steps are appended as new steps.
inline void append_timed(Circuit& c, const Circuit& sub) {
  const std::size_t base = c.gates.size();
  c.gates.insert(c.gates.end(), sub.gates.begin(), sub.gates.end());
  for (std::size_t e : sub.step_ends) c.step_ends.push_back(base + e);
  if (sub.step_duration_us > 0) c.step_duration_us = sub.step_duration_us;
  c.global_phase += sub.global_phase;
}

}  // namespace detail

/// Three-qubit entangled circuit: Hadamard on the electron line, CNOT
/// fan-out to nitrogen and flux, the evolution block u1, optionally the
/// exact inverse block (u3), and a Z measurement on the electron line only.
inline Circuit build_entangling_circuit(const Circuit& u1, bool include_inverse) {
  if (u1.n_qubits != 3)
    throw RegisterMismatchError("build_entangling_circuit: u1 must act on 3 qubits");
  Circuit c;
  c.n_qubits = 3;
  c.qubit_roles = {{0, "electron"}, {1, "nitrogen"}, {2, "flux"}};
  c.gates.push_back(Gate::h(0));
  c.gates.push_back(Gate::cnot(0, 1));
  c.gates.push_back(Gate::cnot(0, 2));
  c.prologue_end = c.gates.size();
  detail::append_timed(c, u1);
  if (include_inverse) {
    Circuit inv;
    inv.n_qubits = 3;
    const std::size_t body_end = u1.epilogue_begin();
    for (std::size_t i = body_end; i-- > 0;) inv.gates.push_back(inverse_gate(u1.gates[i]));
    // Mirror the step boundaries so the inverse half is timed too.
    if (!u1.step_ends.empty()) {
      std::vector<std::size_t> ends;
      std::size_t prev = u1.prologue_end;
      std::vector<std::size_t> sizes;
      for (std::size_t e : u1.step_ends) {
        sizes.push_back(e - prev);
        prev = e;
      }
      std::size_t acc = 0;  // reversal puts the timed steps first
      for (auto it = sizes.rbegin(); it != sizes.rend(); ++it) {
        acc += *it;
        ends.push_back(acc);
      }
      inv.step_ends = std::move(ends);
      inv.step_duration_us = u1.step_duration_us;
    }
    inv.global_phase = -u1.global_phase;
    detail::append_timed(c, inv);
  }
  c.gates.push_back(Gate::measure_z(0));
  return c;
}

/// Extended-model circuit: Hadamard on the flux line, CNOT fan-out from the
/// flux qubit to each NV line, evolution block u1, measurement on flux.
inline Circuit build_extended_circuit(int n_nv, const Circuit& u1) {
  if (n_nv < 1 || n_nv > 4)
    throw InvalidParamsError("build_extended_circuit: n_nv must be in [1, 4]");
  const int n = n_nv + 1;
  if (u1.n_qubits != 0 && u1.n_qubits != n)
    throw RegisterMismatchError("build_extended_circuit: u1 register mismatch");
  Circuit c;
  c.n_qubits = n;
  for (int i = 0; i < n_nv; ++i) c.qubit_roles[i] = "nv_" + std::to_string(i);
  c.qubit_roles[n_nv] = "flux";
  c.gates.push_back(Gate::h(n_nv));
  for (int i = 0; i < n_nv; ++i) c.gates.push_back(Gate::cnot(n_nv, i));
  c.prologue_end = c.gates.size();
  if (u1.n_qubits == n) detail::append_timed(c, u1);
  c.gates.push_back(Gate::measure_z(n_nv));
  return c;
}

}  // namespace hqsim
