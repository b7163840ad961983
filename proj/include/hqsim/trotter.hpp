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
#include <vector>

#include "hqsim/circuit.hpp"
#include "hqsim/errors.hpp"
#include "hqsim/pauli.hpp"

namespace hqsim {

/// First-order product-formula plan.
struct TrotterPlan {
  double total_time_us = 0.0;
  int steps = 1;

  void validate() const {
    if (steps < 1) throw InvalidParamsError("TrotterPlan: steps must be >= 1");
    if (!(total_time_us >= 0))
      throw InvalidParamsError("TrotterPlan: total_time must be >= 0");
  }
};

/// Compiles exp(-i H t) for H given as a Pauli sum into a gate circuit:
/// steps repetitions of one exponential per term, each term compiled as
/// basis changes (H for X, RX(pi/2) for Y), a CNOT ladder onto the last
/// active qubit, RZ(2 c dt) there, and the mirrored ladder and basis
/// changes. Term order is fixed (descending |coefficient|, ties broken
/// lexicographically) so compilations are reproducible. Identity words
/// accumulate into the circuit's global phase instead of gates.
inline Circuit trotterize(const PauliSum& terms, const TrotterPlan& plan) {
  if (terms.empty()) throw InvalidParamsError("trotterize: empty Pauli sum");
  plan.validate();
  const int n = terms.front().n_qubits();
  for (const auto& t : terms) {
    t.validate();
    if (t.n_qubits() != n)
      throw InvalidParamsError("trotterize: inconsistent register sizes");
  }

  Circuit c;
  c.n_qubits = n;
  if (plan.total_time_us == 0.0) return c;

  PauliSum ordered = terms;
  std::sort(ordered.begin(), ordered.end(), [](const PauliString& a, const PauliString& b) {
    const double ma = std::abs(a.coefficient), mb = std::abs(b.coefficient);
    if (ma != mb) return ma > mb;
    return a.letters < b.letters;
  });

  const double dt = plan.total_time_us / plan.steps;
  c.step_duration_us = dt;

  for (int s = 0; s < plan.steps; ++s) {
    for (const auto& term : ordered) {
      std::vector<int> active;
      for (int q = 0; q < n; ++q)
        if (term.letters[static_cast<std::size_t>(q)] != 'I') active.push_back(q);
      if (active.empty()) {
        c.global_phase -= term.coefficient * dt;
        continue;
      }
      // Basis changes into the Z frame.
      for (int q : active) {
        const char l = term.letters[static_cast<std::size_t>(q)];
        if (l == 'X') c.gates.push_back(Gate::h(q));
        else if (l == 'Y') c.gates.push_back(Gate::rx(q, M_PI / 2));
      }
      for (std::size_t i = 0; i + 1 < active.size(); ++i)
        c.gates.push_back(Gate::cnot(active[i], active[i + 1]));
      c.gates.push_back(Gate::rz(active.back(), 2.0 * term.coefficient * dt));
      for (std::size_t i = active.size() - 1; i-- > 0;)
        c.gates.push_back(Gate::cnot(active[i], active[i + 1]));
      for (auto it = active.rbegin(); it != active.rend(); ++it) {
        const char l = term.letters[static_cast<std::size_t>(*it)];
        if (l == 'X') c.gates.push_back(Gate::h(*it));
        else if (l == 'Y') c.gates.push_back(Gate::rx(*it, -M_PI / 2));
      }
    }
    c.step_ends.push_back(c.gates.size());
  }
  return c;
}

}  // namespace hqsim
