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
#include "hqsim/observables.hpp"
#include "hqsim/trotter.hpp"
#include "oracles.hpp"

using namespace hqsim;

namespace {

// Closed-form diagonal entry of the delta = 0 Hamiltonian: basis |e n f>
// with Sz, Nz = diag(1, 0) in the two-level encoding and sigma_z = diag(1,-1).
double diagonal_energy(const HamiltonianParams& p, int e, int n, int f) {
  const double sz = e;
  const double nz = n;
  const double zf = f == 0 ? 1.0 : -1.0;
  return p.d_zfs * sz * sz + p.gamma_e * p.b0 * sz - p.gamma_n * p.b0 * nz +
         p.q_quad * p.delta * p.delta / 4.0 + p.j_c * p.g_f * sz * zf +
         p.j_n * sz * nz;
}

}  // namespace

TEST_CASE("build_hamiltonian reproduces the published constants") {
  SUBCASE("bare zero-field splitting") {
    HamiltonianParams p;
    p.b0 = 0;
    p.delta = 0;
    p.j_c = 0;
    p.j_n = 0;
    const Operator h = build_hamiltonian(p);
    // every electron-excited basis state sits at D = 2.87e3
    for (int idx : {4, 5, 6, 7})
      CHECK(h.entries(idx, idx).real() == doctest::Approx(2.87e3).epsilon(1e-12));
    for (int idx : {0, 1, 2, 3})
      CHECK(std::abs(h.entries(idx, idx)) < 1e-12);
  }
  SUBCASE("electron and nitrogen both excited picks up D + JN") {
    HamiltonianParams p;
    p.b0 = 0;
    p.delta = 0;
    const Operator h = build_hamiltonian(p);
    // |110>: electron = 1, nitrogen = 1, flux = 0; JC term adds j_c g_f
    const double want = p.d_zfs + p.j_n + p.j_c * p.g_f;
    CHECK(h.entries(6, 6).real() == doctest::Approx(want).epsilon(1e-12));
    // isolate D + JN by removing the flux coupling
    HamiltonianParams q = p;
    q.j_c = 0;
    const Operator h2 = build_hamiltonian(q);
    CHECK(h2.entries(6, 6).real() == doctest::Approx(p.d_zfs + p.j_n).epsilon(1e-12));
  }
  SUBCASE("delta != 0 produces an off-diagonal Hermitian matrix") {
    HamiltonianParams p;  // delta = 100 by default
    const Operator h = build_hamiltonian(p);
    CHECK(max_abs(h.entries - h.entries.adjoint()) < 1e-12);
    Matrix off = h.entries;
    off.diagonal().setZero();
    CHECK(max_abs(off) > 1.0);
  }
  SUBCASE("Hermitian for random parameters") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int rep = 0; rep < 30; ++rep) {
      HamiltonianParams p;
      p.b0 = u(rng);
      p.delta = u(rng);
      p.g_f = u(rng);
      p.j_c = u(rng);
      p.j_n = u(rng);
      p.q_quad = u(rng);
      const Operator h = build_hamiltonian(p);
      CHECK(max_abs(h.entries - h.entries.adjoint()) < 1e-12);
    }
  }
  SUBCASE("delta = 0 diagonal matches the hand rule on all eight states") {
    HamiltonianParams p;
    p.delta = 0;
    p.b0 = 0.7;
    const Operator h = build_hamiltonian(p);
    Matrix off = h.entries;
    off.diagonal().setZero();
    CHECK(max_abs(off) < 1e-12);
    for (int e = 0; e < 2; ++e)
      for (int n = 0; n < 2; ++n)
        for (int f = 0; f < 2; ++f) {
          const int idx = (e << 2) | (n << 1) | f;
          CHECK(h.entries(idx, idx).real() ==
                doctest::Approx(diagonal_energy(p, e, n, f)).epsilon(1e-12));
        }
  }
  SUBCASE("parameter validation") {
    HamiltonianParams p;
    p.d_zfs = -1;
    CHECK_THROWS_AS(build_hamiltonian(p), InvalidParamsError);
    HamiltonianParams q;
    q.n_nv = 2;
    CHECK_THROWS_AS(build_hamiltonian(q), InvalidParamsError);
  }
}

TEST_CASE("the quadratic flux term is an inert uniform shift") {
  // Q (delta/2 sx)^2 = Q delta^2/4 I; dropping it changes no observable.
  HamiltonianParams with_q;
  HamiltonianParams no_q = with_q;
  no_q.q_quad = 0.0;
  const Operator h1 = build_hamiltonian(with_q);
  const Operator h2 = build_hamiltonian(no_q);
  const double shift = with_q.q_quad * with_q.delta * with_q.delta / 4.0;
  CHECK(max_abs(h1.entries - h2.entries - shift * Matrix::Identity(8, 8)) < 1e-9);

  const Circuit c1 = trotterize(pauli_decompose(h1), {0.2, 16});
  const Circuit c2 = trotterize(pauli_decompose(h2), {0.2, 16});
  std::mt19937_64 rng(43);
  const StateVector psi(3, oracle::random_state(8, rng));
  const StateVector out1 = run_circuit(c1, psi);
  const StateVector out2 = run_circuit(c2, psi);
  const DensityMatrix r1 = DensityMatrix::from_state(out1);
  const DensityMatrix r2 = DensityMatrix::from_state(out2);
  for (int q = 0; q < 3; ++q) {
    CHECK(std::abs(population(r1, q, 1) - population(r2, q, 1)) < 1e-10);
    CHECK(std::abs(coherence(r1, q) - coherence(r2, q)) < 1e-10);
  }
}

TEST_CASE("build_extended_hamiltonian") {
  SUBCASE("n = 1 matches the three-qubit form on the nitrogen ground subspace") {
    HamiltonianParams p;
    p.b0 = 0.3;
    const Operator full = build_hamiltonian(p);
    const Operator ext = build_extended_hamiltonian(p);
    // restrict (electron, nitrogen, flux) to nitrogen = 0: indices e0f
    for (int e = 0; e < 2; ++e)
      for (int f = 0; f < 2; ++f)
        for (int e2 = 0; e2 < 2; ++e2)
          for (int f2 = 0; f2 < 2; ++f2) {
            const int row3 = (e << 2) | f, col3 = (e2 << 2) | f2;
            const int row2 = (e << 1) | f, col2 = (e2 << 1) | f2;
            CHECK(std::abs(full.entries(row3, col3) - ext.entries(row2, col2)) < 1e-12);
          }
  }
  SUBCASE("n = 2 decoupled diagonal arithmetic") {
    HamiltonianParams p;
    p.n_nv = 2;
    p.j_c = 0;
    p.delta = 0;
    p.b0 = 0;
    const Operator h = build_extended_hamiltonian(p);
    // |110>: both NV electrons excited -> 2 D
    CHECK(h.entries(6, 6).real() == doctest::Approx(2 * p.d_zfs).epsilon(1e-12));
    CHECK(std::abs(h.entries(0, 0)) < 1e-12);
  }
  SUBCASE("delta = 0 is diagonal") {
    HamiltonianParams p;
    p.n_nv = 3;
    p.delta = 0;
    const Operator h = build_extended_hamiltonian(p);
    Matrix off = h.entries;
    off.diagonal().setZero();
    CHECK(max_abs(off) < 1e-12);
  }
  SUBCASE("Hermitian for all n") {
    for (int n = 1; n <= 4; ++n) {
      HamiltonianParams p;
      p.n_nv = n;
      p.b0 = 0.4;
      const Operator h = build_extended_hamiltonian(p);
      CHECK(max_abs(h.entries - h.entries.adjoint()) < 1e-12);
    }
  }
}

TEST_CASE("spin encoding variants") {
  SpinEncoding enc;
  enc.upper_ms = 1;
  enc.lower_ms = -1;
  CHECK_NOTHROW(enc.validate());
  CHECK(enc.sz()(1, 1).real() == 1.0);
  CHECK(enc.sz()(0, 0).real() == -1.0);
  SpinEncoding bad;
  bad.upper_ms = bad.lower_ms = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidParamsError);
}

TEST_CASE("pauli_decompose") {
  SUBCASE("single-qubit Z") {
    const PauliSum sum = pauli_decompose(Operator(Matrix(mat_z())));
    REQUIRE(sum.size() == 1);
    CHECK(sum[0].letters == "Z");
    CHECK(sum[0].coefficient == doctest::Approx(1.0));
  }
  SUBCASE("diagonal Hamiltonian uses only I and Z letters") {
    HamiltonianParams p;
    p.delta = 0;
    p.b0 = 0;
    const PauliSum sum = pauli_decompose(build_hamiltonian(p));
    for (const auto& term : sum)
      for (char c : term.letters) CHECK((c == 'I' || c == 'Z'));
  }
  SUBCASE("random Hermitian round trip") {
    std::mt19937_64 rng(47);
    for (int rep = 0; rep < 5; ++rep) {
      const Operator h(oracle::random_hermitian(8, rng));
      const PauliSum sum = pauli_decompose(h);
      for (const auto& t : sum) CHECK(std::isfinite(t.coefficient));
      const Operator back = pauli_sum_matrix(sum);
      CHECK(max_abs(back.entries - h.entries) < 1e-9);
    }
  }
  SUBCASE("rejects non-Hermitian input") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    CHECK_THROWS_AS(pauli_decompose(Operator(m)), NonHermitianError);
  }
}
