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
#include <string>
#include <vector>

#include "hqsim/circuit.hpp"
#include "hqsim/errors.hpp"

namespace hqsim {

enum class DDKind { None, Echo, Cpmg, Xy4 };

inline const char* dd_kind_name(DDKind k) {
  switch (k) {
    case DDKind::None: return "none";
    case DDKind::Echo: return "echo";
    case DDKind::Cpmg: return "cpmg";
    case DDKind::Xy4: return "xy4";
  }
  return "?";
}

inline DDKind dd_kind_from_name(const std::string& s) {
  if (s == "none") return DDKind::None;
  if (s == "echo") return DDKind::Echo;
  if (s == "cpmg") return DDKind::Cpmg;
  if (s == "xy4") return DDKind::Xy4;
  throw ConfigError("unknown decoupling kind '" + s + "'");
}

/// Dynamical-decoupling sequence over a refocusing window. Echo is a single
/// pi pulse at the midpoint; CPMG-N spreads N pulses on the standard grid;
/// XY-4 uses the same grid with the X,Y,X,Y axis pattern.
struct DDSequence {
  DDKind kind = DDKind::None;
  int n_pulses = 0;
  double total_window_us = 0.0;

  void validate() const {
    switch (kind) {
      case DDKind::None:
        return;
      case DDKind::Echo:
        if (n_pulses != 1) throw InvalidParamsError("DDSequence: echo requires n_pulses = 1");
        break;
      case DDKind::Cpmg:
        if (n_pulses < 1) throw InvalidParamsError("DDSequence: cpmg requires n_pulses >= 1");
        break;
      case DDKind::Xy4:
        if (n_pulses < 4 || n_pulses % 4 != 0)
          throw InvalidParamsError("DDSequence: xy4 requires a positive multiple of 4 pulses");
        break;
    }
    if (!(total_window_us > 0))
      throw InvalidParamsError("DDSequence: total_window must be > 0");
  }
};

/// Pulse centres t_k = W (2k-1) / (2N), k = 1..N; strictly inside (0, W).
inline std::vector<double> pulse_times(const DDSequence& seq) {
  seq.validate();
  if (seq.kind == DDKind::None) return {};
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(seq.n_pulses));
  for (int k = 1; k <= seq.n_pulses; ++k)
    out.push_back(seq.total_window_us * (2.0 * k - 1.0) / (2.0 * seq.n_pulses));
  return out;
}

/// Pulse axis pattern: all X for echo/CPMG, X,Y,X,Y for XY-4.
inline std::vector<GateKind> pulse_axes(const DDSequence& seq) {
  if (seq.kind == DDKind::None) return {};
  std::vector<GateKind> out;
  out.reserve(static_cast<std::size_t>(seq.n_pulses));
  for (int k = 0; k < seq.n_pulses; ++k)
    out.push_back(seq.kind == DDKind::Xy4 ? (k % 2 == 0 ? GateKind::X : GateKind::Y)
                                          : GateKind::X);
  return out;
}

namespace detail {

/// Pauli label of the accumulated pulse frame, multiplication modulo phase.
enum class Frame { I, X, Y, Z };

inline Frame frame_mul(Frame pulse, Frame f) {
  if (pulse == Frame::I) return f;
  if (f == Frame::I) return pulse;
  if (pulse == f) return Frame::I;
  // distinct non-identity Paulis multiply to the third one
  const int a = static_cast<int>(pulse), b = static_cast<int>(f);
  return static_cast<Frame>(6 - a - b);
}

/// Conjugates one gate by the frame Pauli on the target qubit, exactly up
/// to a global phase. Gates on other qubits pass through except for the
/// control/target cascades of CNOT, which emit one extra Pauli gate.
inline void conjugate_gate(const Gate& g, Frame f, int target,
                           std::vector<Gate>& out) {
  bool touches = false;
  for (int t : g.targets) touches = touches || (t == target);
  if (f == Frame::I || !touches || g.kind == GateKind::MEASURE_Z) {
    out.push_back(g);
    return;
  }
  auto flipped = [&](double mult) {
    Gate h = g;
    h.params[0] = mult * g.params[0];
    return h;
  };
  switch (g.kind) {
    case GateKind::X:
    case GateKind::Y:
    case GateKind::Z:
      out.push_back(g);  // Pauli conjugated by Pauli is itself modulo sign
      return;
    case GateKind::RX:
      out.push_back(f == Frame::X ? g : flipped(-1.0));
      return;
    case GateKind::RY:
      out.push_back(f == Frame::Y ? g : flipped(-1.0));
      return;
    case GateKind::RZ:
      out.push_back(f == Frame::Z ? g : flipped(-1.0));
      return;
    case GateKind::U1:
      out.push_back(f == Frame::Z ? g : flipped(-1.0));
      return;
    case GateKind::U3: {
      Gate h = g;
      const double theta = g.params[0], phi = g.params[1], lambda = g.params[2];
      if (f == Frame::X) h.params = {-theta, -phi, -lambda};
      else if (f == Frame::Z) h.params = {-theta, phi, lambda};
      else h.params = {theta, -phi, -lambda};
      out.push_back(h);
      return;
    }
    case GateKind::H: {
      // X H X = -(X - Z)/sqrt(2) = -u3(pi/2, pi, 0); Z H Z = +u3(pi/2, pi, 0);
      // Y H Y = -H.
      if (f == Frame::Y) {
        out.push_back(g);
      } else {
        Gate h = Gate::u3(g.targets[0], M_PI / 2, M_PI, 0.0);
        h.noiseless = g.noiseless;
        out.push_back(h);
      }
      return;
    }
    case GateKind::CNOT: {
      const int control = g.targets[0], other = g.targets[1];
      out.push_back(g);
      if (control == target) {
        // X on the control toggles the target unconditionally.
        if (f == Frame::X || f == Frame::Y) {
          Gate fix = Gate::x(other);
          fix.noiseless = true;
          out.push_back(fix);
        }
      } else {
        // Z on the target reflects onto the control.
        if (f == Frame::Z || f == Frame::Y) {
          Gate fix = Gate::z(control);
          fix.noiseless = true;
          out.push_back(fix);
        }
      }
      return;
    }
    case GateKind::MEASURE_Z:
      out.push_back(g);
      return;
  }
}

}  // namespace detail

/// Inserts ideal pi pulses on the target qubit at the step boundary nearest
/// each pulse time (placement error at most step_duration/2). Gates that
/// follow an odd number of pulses are recompiled into the toggled frame
/// (conjugated by the accumulated pulse Pauli), and a trailing corrective
/// pulse clears the frame, so the net noise-free action equals the original
/// circuit up to a global phase while the interleaved pulses still refocus
/// the stochastic dephasing kicks.
inline Circuit interleave(const Circuit& c, const DDSequence& seq, int target,
                          double step_duration_us) {
  if (seq.kind == DDKind::None) return c;
  seq.validate();
  c.validate();
  if (target < 0 || target >= c.n_qubits)
    throw IndexError("interleave: target qubit out of range");
  const std::size_t n_steps = c.n_steps();
  if (n_steps < 2) throw InvalidParamsError("interleave: circuit has too few steps");
  const double span = static_cast<double>(n_steps) * step_duration_us;
  if (seq.total_window_us > span * (1.0 + 1e-9))
    throw InvalidParamsError("interleave: decoupling window exceeds the circuit span");

  const auto times = pulse_times(seq);
  const auto axes = pulse_axes(seq);

  // boundary b sits after step b; usable values are 1..n_steps-1.
  std::vector<std::vector<detail::Frame>> at_boundary(n_steps);
  for (std::size_t i = 0; i < times.size(); ++i) {
    auto b = static_cast<long long>(std::llround(times[i] / step_duration_us));
    b = std::max<long long>(1, std::min<long long>(b, static_cast<long long>(n_steps) - 1));
    at_boundary[static_cast<std::size_t>(b)].push_back(
        axes[i] == GateKind::X ? detail::Frame::X : detail::Frame::Y);
  }

  Circuit out;
  out.n_qubits = c.n_qubits;
  out.qubit_roles = c.qubit_roles;
  out.step_duration_us = c.step_duration_us;
  out.global_phase = c.global_phase;

  detail::Frame frame = detail::Frame::I;
  for (std::size_t gi = 0; gi < c.prologue_end; ++gi) out.gates.push_back(c.gates[gi]);
  out.prologue_end = out.gates.size();

  const std::size_t target_bit = std::size_t{1} << qubit_bit(c.n_qubits, target);
  std::size_t cursor = c.prologue_end;
  for (std::size_t s = 0; s < n_steps; ++s) {
    for (detail::Frame p : at_boundary[s]) {
      Gate pulse = p == detail::Frame::X ? Gate::x(target) : Gate::y(target);
      pulse.noiseless = true;
      out.gates.push_back(pulse);
      frame = detail::frame_mul(p, frame);
    }
    for (std::size_t gi = cursor; gi < c.step_ends[s]; ++gi)
      detail::conjugate_gate(c.gates[gi], frame, target, out.gates);
    cursor = c.step_ends[s];
    out.step_ends.push_back(out.gates.size());
    const std::size_t prior =
        c.step_frame_masks.empty() ? 0 : c.step_frame_masks[s];
    const bool flipped = frame == detail::Frame::X || frame == detail::Frame::Y;
    out.step_frame_masks.push_back(prior ^ (flipped ? target_bit : 0));
  }

  // Clear the frame before the epilogue (a Pauli is its own inverse up to
  // phase).
  if (frame != detail::Frame::I) {
    Gate fix = frame == detail::Frame::X   ? Gate::x(target)
               : frame == detail::Frame::Y ? Gate::y(target)
                                           : Gate::z(target);
    fix.noiseless = true;
    out.gates.push_back(fix);
  }
  for (std::size_t gi = cursor; gi < c.gates.size(); ++gi)
    out.gates.push_back(c.gates[gi]);
  return out;
}

}  // namespace hqsim
