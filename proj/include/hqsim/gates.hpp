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

#include <cmath>
#include <string>
#include <vector>

#include "hqsim/errors.hpp"
#include "hqsim/linalg.hpp"

namespace hqsim {

enum class GateKind { H, X, Y, Z, RX, RY, RZ, U1, U3, CNOT, MEASURE_Z };

inline const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::H: return "h";
    case GateKind::X: return "x";
    case GateKind::Y: return "y";
    case GateKind::Z: return "z";
    case GateKind::RX: return "rx";
    case GateKind::RY: return "ry";
    case GateKind::RZ: return "rz";
    case GateKind::U1: return "u1";
    case GateKind::U3: return "u3";
    case GateKind::CNOT: return "cx";
    case GateKind::MEASURE_Z: return "measure";
  }
  return "?";
}

/// One gate: kind, target qubits, rotation angles in radians.
/// CNOT targets are {control, target}. Gates flagged noiseless are exempt
/// from per-gate channel noise (used for ideal decoupling pulses).
struct Gate {
  GateKind kind;
  std::vector<int> targets;
  std::vector<double> params;
  bool noiseless = false;

  static Gate h(int q) { return {GateKind::H, {q}, {}}; }
  static Gate x(int q) { return {GateKind::X, {q}, {}}; }
  static Gate y(int q) { return {GateKind::Y, {q}, {}}; }
  static Gate z(int q) { return {GateKind::Z, {q}, {}}; }
  static Gate rx(int q, double angle) { return {GateKind::RX, {q}, {angle}}; }
  static Gate ry(int q, double angle) { return {GateKind::RY, {q}, {angle}}; }
  static Gate rz(int q, double angle) { return {GateKind::RZ, {q}, {angle}}; }
  static Gate u1(int q, double lambda) { return {GateKind::U1, {q}, {lambda}}; }
  static Gate u3(int q, double theta, double phi, double lambda) {
    return {GateKind::U3, {q}, {theta, phi, lambda}};
  }
  static Gate cnot(int control, int target) {
    return {GateKind::CNOT, {control, target}, {}};
  }
  static Gate measure_z(int q) { return {GateKind::MEASURE_Z, {q}, {}}; }

  std::size_t arity() const { return kind == GateKind::CNOT ? 2 : 1; }

  void validate() const {
    const std::size_t want_targets = arity();
    std::size_t want_params = 0;
    switch (kind) {
      case GateKind::RX:
      case GateKind::RY:
      case GateKind::RZ:
      case GateKind::U1: want_params = 1; break;
      case GateKind::U3: want_params = 3; break;
      default: want_params = 0; break;
    }
    if (targets.size() != want_targets)
      throw InvalidParamsError(std::string("Gate: wrong target count for ") + gate_name(kind));
    if (params.size() != want_params)
      throw InvalidParamsError(std::string("Gate: wrong angle count for ") + gate_name(kind));
    if (kind == GateKind::CNOT && targets[0] == targets[1])
      throw InvalidParamsError("Gate: CNOT control equals target");
    for (double a : params)
      if (!std::isfinite(a)) throw InvalidParamsError("Gate: non-finite angle");
  }
};

/// Matrix of a gate on its own qubits. Rotation gates use the physics
/// convention R_a(t) = exp(-i t a/2); u1 and u3 are pinned to the OpenQASM
/// 2.0 definitions:
///   u1(l)       = diag(1, e^{il})
///   u3(t, p, l) = [[cos(t/2),          -e^{il} sin(t/2)],
///                  [e^{ip} sin(t/2),  e^{i(p+l)} cos(t/2)]]
/// so u3(t, 0, 0) = ry(t) and u3(pi, 0, pi) = x.
inline Operator gate_matrix(const Gate& g) {
  g.validate();
  Matrix m;
  switch (g.kind) {
    case GateKind::H: m = mat_h(); break;
    case GateKind::X: m = mat_x(); break;
    case GateKind::Y: m = mat_y(); break;
    case GateKind::Z: m = mat_z(); break;
    case GateKind::RX: {
      const double t = g.params[0];
      m.resize(2, 2);
      m << std::cos(t / 2), Complex(0, -std::sin(t / 2)),
           Complex(0, -std::sin(t / 2)), std::cos(t / 2);
      break;
    }
    case GateKind::RY: {
      const double t = g.params[0];
      m.resize(2, 2);
      m << std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2);
      break;
    }
    case GateKind::RZ: {
      const double t = g.params[0];
      m.resize(2, 2);
      m << std::exp(Complex(0, -t / 2)), 0, 0, std::exp(Complex(0, t / 2));
      break;
    }
    case GateKind::U1: {
      const double l = g.params[0];
      m.resize(2, 2);
      m << 1, 0, 0, std::exp(Complex(0, l));
      break;
    }
    case GateKind::U3: {
      const double t = g.params[0], p = g.params[1], l = g.params[2];
      m.resize(2, 2);
      m << std::cos(t / 2), -std::exp(Complex(0, l)) * std::sin(t / 2),
           std::exp(Complex(0, p)) * std::sin(t / 2),
           std::exp(Complex(0, p + l)) * std::cos(t / 2);
      break;
    }
    case GateKind::CNOT: {
      m = Matrix::Zero(4, 4);
      m(0, 0) = 1;
      m(1, 1) = 1;
      m(2, 3) = 1;
      m(3, 2) = 1;
      break;
    }
    case GateKind::MEASURE_Z:
      // Readout marker; acts as identity during state evolution.
      m = mat_identity2();
      break;
  }
  return Operator(std::move(m));
}

/// Exact inverse gate. Self-inverse kinds pass through; rotations negate
/// their angle; u3 also swaps phi and lambda.
inline Gate inverse_gate(const Gate& g) {
  switch (g.kind) {
    case GateKind::H:
    case GateKind::X:
    case GateKind::Y:
    case GateKind::Z:
    case GateKind::CNOT:
    case GateKind::MEASURE_Z:
      return g;
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::U1: {
      Gate inv = g;
      inv.params[0] = -g.params[0];
      return inv;
    }
    case GateKind::U3: {
      Gate inv = g;
      inv.params = {-g.params[0], -g.params[2], -g.params[1]};
      return inv;
    }
  }
  throw InvalidParamsError("inverse_gate: unknown kind");
}

}  // namespace hqsim
