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
#include "hqsim/pauli.hpp"

namespace hqsim {

// Energies are in the MHz-2pi basis with hbar = 1 and time in microseconds,
// so phase = energy * time with no extra factors.

/// Parameters of the electron / nitrogen / flux-qubit Hamiltonian and its
/// n-NV extension. d_zfs, gamma_e, gamma_n, q_quad, j_c and j_n default to
/// the published constants; b0, delta and g_f have no published values and
/// their defaults are flagged as such in run manifests.
struct HamiltonianParams {
  double d_zfs = 2.87e3;       // zero-field splitting
  double gamma_e = 2.8;        // electron gyromagnetic factor (per field unit)
  double gamma_n = 0.3077e-3;  // nitrogen gyromagnetic factor (per field unit)
  double b0 = 0.0;             // external field, abstract field units
  double q_quad = -5.1;        // nitrogen quadrupole splitting
  double j_c = 14.0;           // electron <-> flux hyperfine coupling
  double j_n = 2.1;            // electron <-> nitrogen hyperfine coupling
  double delta = 100.0;        // flux tunneling amplitude
  double g_f = 1.0;            // flux coupling scale (dimensionless)
  int n_nv = 1;                // NV count for the extended model

  void validate() const {
    if (!(d_zfs > 0)) throw InvalidParamsError("HamiltonianParams: d_zfs must be > 0");
    if (n_nv < 1 || n_nv > 4)
      throw InvalidParamsError("HamiltonianParams: n_nv must be in [1, 4]");
    for (double v : {d_zfs, gamma_e, gamma_n, b0, q_quad, j_c, j_n, delta, g_f})
      if (!std::isfinite(v)) throw InvalidParamsError("HamiltonianParams: non-finite field");
  }
};

/// Two-level encoding of a spin-1 z operator: which pair of m_s levels maps
/// to {|1>, |0>}. With the default {+1, 0}, Sz = diag(1, 0) and Sz^2 = Sz.
struct SpinEncoding {
  int upper_ms = 1;  // eigenvalue carried by |1>
  int lower_ms = 0;  // eigenvalue carried by |0>

  void validate() const {
    if (upper_ms == lower_ms)
      throw InvalidParamsError("SpinEncoding: the two levels must be distinct");
  }

  Matrix sz() const {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = lower_ms;  // basis index 0 = |0>
    m(1, 1) = upper_ms;
    return m;
  }
};

namespace detail {

/// letters = all 'I' except letter `c` at qubit q.
inline std::string single_site(int n, int q, char c) {
  std::string s(static_cast<std::size_t>(n), 'I');
  s[static_cast<std::size_t>(q)] = c;
  return s;
}

inline Operator embed_1q(const Matrix& m, int n, int q) {
  Matrix acc = Matrix::Identity(1, 1);
  for (int i = 0; i < n; ++i) {
    const Matrix& factor = (i == q) ? m : mat_identity2();
    Matrix next(acc.rows() * 2, acc.cols() * 2);
    for (Eigen::Index r = 0; r < acc.rows(); ++r)
      for (Eigen::Index cc = 0; cc < acc.cols(); ++cc)
        next.block(r * 2, cc * 2, 2, 2) = acc(r, cc) * factor;
    acc = std::move(next);
  }
  return Operator(std::move(acc));
}

}  // namespace detail

/// Three-qubit Hamiltonian: electron = qubit 0, nitrogen = qubit 1,
/// flux = qubit 2. Implements, under the two-level encoding Sz -> diag(1,0):
///
///   H = D Sz^2 + g_e B0 Sz - g_n B0 Nz - B0 (delta/2) sx
///       + Q (delta/2 sx)^2 - (delta/2) sx + Jc Sz g_f sz + Jn Sz Nz
///
/// The quadratic term reduces to (Q delta^2/4) * identity and is kept as
/// written; it shifts every level uniformly and no observable depends on it.
inline Operator build_hamiltonian(const HamiltonianParams& p,
                                  const SpinEncoding& electron = {},
                                  const SpinEncoding& nitrogen = {}) {
  p.validate();
  electron.validate();
  nitrogen.validate();
  if (p.n_nv != 1)
    throw InvalidParamsError("build_hamiltonian: three-qubit form requires n_nv = 1");

  const int n = 3;
  const Matrix sz_e = electron.sz();
  const Matrix nz = nitrogen.sz();
  const Matrix sz_e2 = sz_e * sz_e;

  const auto d = static_cast<Eigen::Index>(dim_for(n));
  Matrix h = Matrix::Zero(d, d);

  h += p.d_zfs * detail::embed_1q(sz_e2, n, 0).entries;
  h += p.gamma_e * p.b0 * detail::embed_1q(sz_e, n, 0).entries;
  h -= p.gamma_n * p.b0 * detail::embed_1q(nz, n, 1).entries;
  h -= p.b0 * (p.delta / 2.0) * detail::embed_1q(mat_x(), n, 2).entries;
  h += p.q_quad * (p.delta * p.delta / 4.0) * Matrix::Identity(d, d);
  h -= (p.delta / 2.0) * detail::embed_1q(mat_x(), n, 2).entries;
  h += p.j_c * p.g_f *
       (detail::embed_1q(sz_e, n, 0).entries * detail::embed_1q(mat_z(), n, 2).entries);
  h += p.j_n *
       (detail::embed_1q(sz_e, n, 0).entries * detail::embed_1q(nz, n, 1).entries);

  return Operator(std::move(h));
}

/// Extended model over n_nv + 1 qubits: NV electron spins are qubits
/// 0..n_nv-1, the flux qubit is last. Nitrogen spins are dropped from the
/// register (they are treated as noise sources):
///
///   H = sum_i [D Sz_i^2 + g_e B0 Sz_i + Jc g_f Sz_i sz_flux]
///       - (delta/2) sx_flux - B0 (delta/2) sx_flux + Q (delta^2/4) I
inline Operator build_extended_hamiltonian(const HamiltonianParams& p,
                                           const SpinEncoding& electron = {}) {
  p.validate();
  electron.validate();
  const int n = p.n_nv + 1;
  const int flux = p.n_nv;
  const Matrix sz_e = electron.sz();
  const Matrix sz_e2 = sz_e * sz_e;

  const auto d = static_cast<Eigen::Index>(dim_for(n));
  Matrix h = Matrix::Zero(d, d);
  const Matrix z_flux = detail::embed_1q(mat_z(), n, flux).entries;
  for (int i = 0; i < p.n_nv; ++i) {
    h += p.d_zfs * detail::embed_1q(sz_e2, n, i).entries;
    h += p.gamma_e * p.b0 * detail::embed_1q(sz_e, n, i).entries;
    h += p.j_c * p.g_f * (detail::embed_1q(sz_e, n, i).entries * z_flux);
  }
  h -= (p.delta / 2.0) * detail::embed_1q(mat_x(), n, flux).entries;
  h -= p.b0 * (p.delta / 2.0) * detail::embed_1q(mat_x(), n, flux).entries;
  h += p.q_quad * (p.delta * p.delta / 4.0) * Matrix::Identity(d, d);

  return Operator(std::move(h));
}

/// Expands a Hermitian operator in the Pauli word basis: c_P = Tr(P h)/2^n.
/// Words with |c| < drop_tol are omitted; the remaining coefficients are
/// real by Hermiticity and reconstruct h entrywise within 1e-9.
inline PauliSum pauli_decompose(const Operator& h, double hermitian_tol = 1e-8,
                                double drop_tol = 1e-12) {
  if (!is_hermitian(h.entries, hermitian_tol))
    throw NonHermitianError("pauli_decompose: operator is not Hermitian");
  const int n = h.n_qubits();
  const double dim = static_cast<double>(h.dim());

  PauliSum out;
  std::string letters(static_cast<std::size_t>(n), 'I');
  const char alphabet[4] = {'I', 'X', 'Y', 'Z'};
  const std::size_t total = std::size_t{1} << (2 * n);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (int q = n - 1; q >= 0; --q) {
      letters[static_cast<std::size_t>(q)] = alphabet[c & 3];
      c >>= 2;
    }
    const Matrix p = pauli_string_matrix(letters);
    const Complex tr = (p * h.entries).trace();
    const double coeff = tr.real() / dim;
    if (std::abs(coeff) >= drop_tol) out.push_back({letters, coeff});
  }
  return out;
}

}  // namespace hqsim
