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

#include <doctest.h>

#include <random>

#include "hqsim/circuit.hpp"
#include "hqsim/hamiltonian.hpp"
#include "hqsim/trotter.hpp"
#include "oracles.hpp"

using namespace hqsim;

TEST_CASE("gate_matrix conventions") {
  SUBCASE("u1(0) is the identity") {
    const Operator u = gate_matrix(Gate::u1(0, 0.0));
    CHECK(max_abs(u.entries - Matrix::Identity(2, 2)) < 1e-15);
  }
  SUBCASE("H is an involution") {
    const Matrix h = gate_matrix(Gate::h(0)).entries;
    CHECK(max_abs(h * h - Matrix::Identity(2, 2)) < 1e-15);
  }
  SUBCASE("u3(pi, 0, pi) equals X entrywise") {
    const Matrix u = gate_matrix(Gate::u3(0, M_PI, 0.0, M_PI)).entries;
    CHECK(max_abs(u - mat_x()) < 1e-12);
  }
  SUBCASE("u3(theta, 0, 0) equals ry(theta)") {
    for (double theta : {0.3, 1.1, 2.7}) {
      const Matrix u = gate_matrix(Gate::u3(0, theta, 0.0, 0.0)).entries;
      const Matrix r = gate_matrix(Gate::ry(0, theta)).entries;
      CHECK(max_abs(u - r) < 1e-14);
    }
  }
  SUBCASE("rz matches exp(-i t Z/2)") {
    const double t = 0.8;
    const Matrix r = gate_matrix(Gate::rz(0, t)).entries;
    CHECK(std::abs(r(0, 0) - std::exp(Complex(0, -t / 2))) < 1e-15);
    CHECK(std::abs(r(1, 1) - std::exp(Complex(0, t / 2))) < 1e-15);
  }
  SUBCASE("all kinds produce unitaries") {
    for (const Gate& g :
         {Gate::h(0), Gate::x(0), Gate::y(0), Gate::z(0), Gate::rx(0, 0.7),
          Gate::ry(0, 1.3), Gate::rz(0, -0.4), Gate::u1(0, 2.0),
          Gate::u3(0, 0.5, 1.0, -0.6), Gate::cnot(0, 1)})
      CHECK(is_unitary(gate_matrix(g).entries, 1e-12));
  }
  SUBCASE("inverse_gate really inverts") {
    for (const Gate& g :
         {Gate::h(0), Gate::rx(0, 0.7), Gate::rz(0, -0.4), Gate::u1(0, 2.0),
          Gate::u3(0, 0.5, 1.0, -0.6), Gate::cnot(0, 1)}) {
      const Matrix a = gate_matrix(g).entries;
      const Matrix b = gate_matrix(inverse_gate(g)).entries;
      CHECK(max_abs(a * b - Matrix::Identity(a.rows(), a.cols())) < 1e-13);
    }
  }
  SUBCASE("arity validation") {
    Gate bad = Gate::cnot(0, 1);
    bad.targets.pop_back();
    CHECK_THROWS_AS(bad.validate(), InvalidParamsError);
    Gate bad2 = Gate::u3(0, 1.0, 2.0, 3.0);
    bad2.params.pop_back();
    CHECK_THROWS_AS(bad2.validate(), InvalidParamsError);
    CHECK_THROWS_AS(Gate::cnot(1, 1).validate(), InvalidParamsError);
  }
}

TEST_CASE("run_circuit") {
  SUBCASE("empty circuit leaves the state alone") {
    Circuit c;
    c.n_qubits = 2;
    std::mt19937_64 rng(53);
    StateVector psi(2, oracle::random_state(4, rng));
    StateVector out = run_circuit(c, psi);
    CHECK((out.amplitudes - psi.amplitudes).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("X twice is the identity") {
    Circuit c;
    c.n_qubits = 1;
    c.gates = {Gate::x(0), Gate::x(0)};
    StateVector out = run_circuit(c, StateVector::zero_state(1));
    CHECK(std::abs(out.amplitudes(0) - Complex(1, 0)) < 1e-15);
  }
  SUBCASE("GHZ preparation puts weight on 000 and 111") {
    Circuit c;
    c.n_qubits = 3;
    c.gates = {Gate::h(0), Gate::cnot(0, 1), Gate::cnot(0, 2)};
    StateVector out = run_circuit(c, StateVector::zero_state(3));
    CHECK(std::abs(out.amplitudes(0) - 1 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(out.amplitudes(7) - 1 / std::sqrt(2.0)) < 1e-12);
    for (int i = 1; i < 7; ++i) CHECK(std::abs(out.amplitudes(i)) < 1e-15);
  }
  SUBCASE("register mismatch") {
    Circuit c;
    c.n_qubits = 2;
    CHECK_THROWS_AS(run_circuit(c, StateVector::zero_state(3)), RegisterMismatchError);
  }
  SUBCASE("density-matrix route agrees with the pure route") {
    std::mt19937_64 rng(59);
    Circuit c;
    c.n_qubits = 2;
    c.gates = {Gate::h(0), Gate::cnot(0, 1), Gate::rz(1, 0.7), Gate::rx(0, -0.3)};
    StateVector psi(2, oracle::random_state(4, rng));
    StateVector out = run_circuit(c, psi);
    DensityMatrix rho = run_circuit(c, DensityMatrix::from_state(psi));
    CHECK(max_abs(rho.entries - out.amplitudes * out.amplitudes.adjoint()) < 1e-12);
  }
}

TEST_CASE("circuit validation") {
  Circuit c;
  c.n_qubits = 2;
  SUBCASE("target out of range") {
    c.gates = {Gate::x(3)};
    CHECK_THROWS_AS(c.validate(), IndexError);
  }
  SUBCASE("gate after measurement") {
    c.gates = {Gate::measure_z(0), Gate::x(0)};
    CHECK_THROWS_AS(c.validate(), InvalidParamsError);
  }
  SUBCASE("duplicate measurement") {
    c.gates = {Gate::measure_z(0), Gate::measure_z(0)};
    CHECK_THROWS_AS(c.validate(), InvalidParamsError);
  }
  SUBCASE("well-formed circuit passes") {
    c.gates = {Gate::h(0), Gate::cnot(0, 1), Gate::measure_z(0), Gate::measure_z(1)};
    CHECK_NOTHROW(c.validate());
  }
}

TEST_CASE("circuit_unitary is unitary for compiled circuits") {
  HamiltonianParams p;
  const Circuit c = trotterize(pauli_decompose(build_hamiltonian(p)), {0.05, 4});
  const Operator u = circuit_unitary(c);
  CHECK(max_abs(u.entries.adjoint() * u.entries - Matrix::Identity(8, 8)) < 1e-8);
}

TEST_CASE("sample_counts") {
  SUBCASE("pure |0> gives all shots on one outcome") {
    const auto counts = sample_counts(StateVector::zero_state(1), {0}, 1024, 1);
    REQUIRE(counts.size() == 1);
    CHECK(counts.at("0") == 1024);
  }
  SUBCASE("|+> splits evenly within binomial error") {
    StateVector plus(1, Vector::Zero(2));
    plus.amplitudes << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    const std::uint64_t shots = 1000000;
    const auto counts = sample_counts(plus, {0}, shots, 7);
    const double frac = static_cast<double>(counts.at("0")) / shots;
    CHECK(std::abs(frac - 0.5) < 0.002);  // 4 sigma
  }
  SUBCASE("same seed, same counts") {
    StateVector plus(1, Vector::Zero(2));
    plus.amplitudes << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    const auto a = sample_counts(plus, {0}, 4096, 99);
    const auto b = sample_counts(plus, {0}, 4096, 99);
    CHECK(a == b);
  }
  SUBCASE("counts sum to shots over multiple outcomes") {
    Circuit c;
    c.n_qubits = 2;
    c.gates = {Gate::h(0), Gate::h(1)};
    const StateVector s = run_circuit(c, StateVector::zero_state(2));
    const auto counts = sample_counts(s, {0, 1}, 5000, 3);
    std::uint64_t total = 0;
    for (const auto& [k, v] : counts) total += v;
    CHECK(total == 5000);
    CHECK(counts.size() == 4);
  }
  SUBCASE("density matrices sample identically to their pure state") {
    StateVector plus(1, Vector::Zero(2));
    plus.amplitudes << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    const auto a = sample_counts(plus, {0}, 2048, 5);
    const auto b = sample_counts(DensityMatrix::from_state(plus), {0}, 2048, 5);
    CHECK(a == b);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(sample_counts(StateVector::zero_state(1), {3}, 10, 0), IndexError);
    CHECK_THROWS_AS(sample_counts(StateVector::zero_state(1), {0}, 0, 0),
                    InvalidParamsError);
  }
}

TEST_CASE("build_entangling_circuit") {
  HamiltonianParams p;
  const PauliSum terms = pauli_decompose(build_hamiltonian(p));
  const Circuit u1 = trotterize(terms, {0.1, 4});

  SUBCASE("empty u1 without inverse prepares a GHZ state") {
    Circuit empty;
    empty.n_qubits = 3;
    const Circuit c = build_entangling_circuit(empty, false);
    const StateVector out = run_circuit(c, StateVector::zero_state(3));
    const DensityMatrix rho = DensityMatrix::from_state(out);
    const DensityMatrix e = partial_trace(rho, {0});
    CHECK(e.entries(0, 0).real() == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(e.entries(1, 1).real() == doctest::Approx(0.5).epsilon(1e-10));
  }
  SUBCASE("with the inverse the electron marginal matches the empty case") {
    Circuit empty;
    empty.n_qubits = 3;
    const Circuit base = build_entangling_circuit(empty, false);
    const Circuit full = build_entangling_circuit(u1, true);
    const auto m0 = partial_trace(
        DensityMatrix::from_state(run_circuit(base, StateVector::zero_state(3))), {0});
    const auto m1 = partial_trace(
        DensityMatrix::from_state(run_circuit(full, StateVector::zero_state(3))), {0});
    CHECK(max_abs(m0.entries - m1.entries) < 1e-10);
  }
  SUBCASE("gate count bookkeeping") {
    const Circuit c = build_entangling_circuit(u1, true);
    // H + 2 fan-out CNOTs + body + inverse body + one measurement
    CHECK(c.gates.size() == 3 + 2 * u1.gates.size() + 1);
    CHECK(c.gates.back().kind == GateKind::MEASURE_Z);
    CHECK(c.gates.back().targets[0] == 0);
    CHECK(c.measured_qubits() == std::vector<int>{0});
  }
  SUBCASE("register mismatch") {
    Circuit wrong;
    wrong.n_qubits = 2;
    CHECK_THROWS_AS(build_entangling_circuit(wrong, false), RegisterMismatchError);
  }
}

TEST_CASE("build_extended_circuit") {
  SUBCASE("n = 1 with empty body is a Bell preparation") {
    Circuit empty;
    const Circuit c = build_extended_circuit(1, empty);
    CHECK(c.n_qubits == 2);
    const StateVector out = run_circuit(c, StateVector::zero_state(2));
    const DensityMatrix flux = partial_trace(DensityMatrix::from_state(out), {1});
    CHECK(flux.entries(0, 0).real() == doctest::Approx(0.5).epsilon(1e-10));
  }
  SUBCASE("n = 4 uses five qubits and four fan-out CNOTs") {
    Circuit empty;
    const Circuit c = build_extended_circuit(4, empty);
    CHECK(c.n_qubits == 5);
    int cnots = 0;
    for (const auto& g : c.gates) cnots += g.kind == GateKind::CNOT;
    CHECK(cnots == 4);
    CHECK(c.qubit_roles.at(4) == "flux");
    CHECK(c.qubit_roles.at(0) == "nv_0");
  }
  SUBCASE("evolution plus inverse returns the flux marginal to the Bell case") {
    HamiltonianParams p;
    p.n_nv = 2;
    const PauliSum terms = pauli_decompose(build_extended_hamiltonian(p));
    const Circuit fwd = trotterize(terms, {0.08, 4});
    Circuit both = fwd;
    for (std::size_t i = fwd.gates.size(); i-- > 0;)
      both.gates.push_back(inverse_gate(fwd.gates[i]));
    both.step_ends.clear();  // treat as a plain gate block
    both.global_phase = 0;
    const Circuit with_evo = build_extended_circuit(2, both);
    Circuit empty;
    const Circuit bare = build_extended_circuit(2, empty);
    const auto m_evo = partial_trace(
        DensityMatrix::from_state(run_circuit(with_evo, StateVector::zero_state(3))), {2});
    const auto m_bare = partial_trace(
        DensityMatrix::from_state(run_circuit(bare, StateVector::zero_state(3))), {2});
    CHECK(max_abs(m_evo.entries - m_bare.entries) < 1e-10);
  }
  SUBCASE("n out of range") {
    Circuit empty;
    CHECK_THROWS_AS(build_extended_circuit(0, empty), InvalidParamsError);
    CHECK_THROWS_AS(build_extended_circuit(5, empty), InvalidParamsError);
  }
}
