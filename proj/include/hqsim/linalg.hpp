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

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <complex>
#include <string>
#include <vector>

#include "hqsim/errors.hpp"

namespace hqsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Qubit ordering convention used throughout: qubit 0 is the MOST significant
// bit of the computational-basis index, so tensor products read left to
// right like ket notation (|q0 q1 q2>).
inline int qubit_bit(int n_qubits, int qubit) { return n_qubits - 1 - qubit; }

inline std::size_t dim_for(int n_qubits) {
  return std::size_t{1} << n_qubits;
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline bool is_power_of_two(std::size_t x) { return x != 0 && (x & (x - 1)) == 0; }

inline int log2_exact(std::size_t x) {
  int k = 0;
  while ((std::size_t{1} << k) < x) ++k;
  return k;
}

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Pure state over n qubits; amplitudes indexed by basis state.
struct StateVector {
  int n_qubits = 0;
  Vector amplitudes;

  StateVector() = default;
  StateVector(int n, Vector amps) : n_qubits(n), amplitudes(std::move(amps)) {}

  /// |0...0> on n qubits.
  static StateVector zero_state(int n) {
    StateVector s;
    s.n_qubits = n;
    s.amplitudes = Vector::Zero(static_cast<Eigen::Index>(dim_for(n)));
    s.amplitudes(0) = 1.0;
    return s;
  }

  static StateVector basis_state(int n, std::size_t index) {
    StateVector s;
    s.n_qubits = n;
    s.amplitudes = Vector::Zero(static_cast<Eigen::Index>(dim_for(n)));
    s.amplitudes(static_cast<Eigen::Index>(index)) = 1.0;
    return s;
  }

  std::size_t dim() const { return static_cast<std::size_t>(amplitudes.size()); }

  /// Checks the type invariants: length 2^n and unit norm within tol.
  void validate(double tol = 1e-10) const {
    if (dim() != dim_for(n_qubits))
      throw DimensionError("StateVector: length is not 2^n_qubits");
    if (std::abs(amplitudes.norm() - 1.0) > tol)
      throw InvalidParamsError("StateVector: norm deviates from 1");
  }
};

/// Mixed state over n qubits.
struct DensityMatrix {
  int n_qubits = 0;
  Matrix entries;

  DensityMatrix() = default;
  DensityMatrix(int n, Matrix m) : n_qubits(n), entries(std::move(m)) {}

  static DensityMatrix from_state(const StateVector& psi) {
    DensityMatrix rho;
    rho.n_qubits = psi.n_qubits;
    rho.entries = psi.amplitudes * psi.amplitudes.adjoint();
    return rho;
  }

  static DensityMatrix maximally_mixed(int n) {
    DensityMatrix rho;
    rho.n_qubits = n;
    const auto d = static_cast<Eigen::Index>(dim_for(n));
    rho.entries = Matrix::Identity(d, d) / static_cast<double>(d);
    return rho;
  }

  std::size_t dim() const { return static_cast<std::size_t>(entries.rows()); }

  /// Checks Hermiticity, unit trace and positive semidefiniteness
  /// (eigenvalues >= -psd_slack).
  void validate(double tol = 1e-10, double psd_slack = 1e-9) const {
    if (entries.rows() != entries.cols())
      throw DimensionError("DensityMatrix: not square");
    if (dim() != dim_for(n_qubits))
      throw DimensionError("DensityMatrix: dimension is not 2^n_qubits");
    if (max_abs(entries - entries.adjoint()) > tol)
      throw InvalidParamsError("DensityMatrix: not Hermitian");
    if (std::abs(entries.trace().real() - 1.0) > tol ||
        std::abs(entries.trace().imag()) > tol)
      throw InvalidParamsError("DensityMatrix: trace deviates from 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(entries, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -psd_slack)
      throw InvalidParamsError("DensityMatrix: negative eigenvalue beyond slack");
  }
};

/// Square operator on a 2^k-dimensional space.
struct Operator {
  Matrix entries;

  Operator() = default;
  explicit Operator(Matrix m) : entries(std::move(m)) {
    if (entries.rows() != entries.cols() ||
        !is_power_of_two(static_cast<std::size_t>(entries.rows())))
      throw DimensionError("Operator: dimension must be a power of two");
  }

  std::size_t dim() const { return static_cast<std::size_t>(entries.rows()); }
  int n_qubits() const { return log2_exact(dim()); }

  static Operator identity(int n_qubits) {
    const auto d = static_cast<Eigen::Index>(dim_for(n_qubits));
    return Operator(Matrix::Identity(d, d));
  }
};

// Single-qubit constants.
inline const Matrix& mat_identity2() {
  static const Matrix m = Matrix::Identity(2, 2);
  return m;
}
inline const Matrix& mat_x() {
  static const Matrix m = [] {
    Matrix v(2, 2);
    v << 0, 1, 1, 0;
    return v;
  }();
  return m;
}
inline const Matrix& mat_y() {
  static const Matrix m = [] {
    Matrix v(2, 2);
    v << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return v;
  }();
  return m;
}
inline const Matrix& mat_z() {
  static const Matrix m = [] {
    Matrix v(2, 2);
    v << 1, 0, 0, -1;
    return v;
  }();
  return m;
}
inline const Matrix& mat_h() {
  static const Matrix m = [] {
    Matrix v(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    v << s, s, s, -s;
    return v;
  }();
  return m;
}

inline bool is_hermitian(const Matrix& m, double tol) {
  return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

inline bool is_unitary(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m.adjoint() * m - Matrix::Identity(m.rows(), m.cols())) <= tol;
}

// ---------------------------------------------------------------------------
// Embedded gate application kernels
// ---------------------------------------------------------------------------

namespace detail {

/// Validates a target list against the register size.
inline void check_targets(int n_qubits, const std::vector<int>& targets,
                          std::size_t u_dim) {
  if (u_dim != dim_for(static_cast<int>(targets.size())))
    throw DimensionError("apply_unitary: matrix dimension does not match target count");
  std::size_t seen = 0;
  for (int t : targets) {
    if (t < 0 || t >= n_qubits)
      throw IndexError("apply_unitary: target qubit out of range");
    const std::size_t bit = std::size_t{1} << qubit_bit(n_qubits, t);
    if (seen & bit) throw IndexError("apply_unitary: duplicate target qubit");
    seen |= bit;
  }
}

/// Applies a k-qubit matrix to a state vector in place, without any
/// unitarity check. Matrix qubit j acts on register qubit targets[j];
/// matrix qubit 0 is the most significant bit of the matrix index.
inline void apply_matrix_vec(Vector& psi, const Matrix& u, int n_qubits,
                             const std::vector<int>& targets) {
  const int k = static_cast<int>(targets.size());
  const std::size_t sub_dim = dim_for(k);
  const std::size_t n_dim = static_cast<std::size_t>(psi.size());

  std::size_t target_mask = 0;
  std::vector<int> pos(k);
  for (int j = 0; j < k; ++j) {
    pos[j] = qubit_bit(n_qubits, targets[j]);
    target_mask |= std::size_t{1} << pos[j];
  }
  // Index of the sub-block element s embedded at base index `base`.
  std::vector<std::size_t> offset(sub_dim);
  for (std::size_t s = 0; s < sub_dim; ++s) {
    std::size_t off = 0;
    for (int j = 0; j < k; ++j)
      if ((s >> (k - 1 - j)) & 1) off |= std::size_t{1} << pos[j];
    offset[s] = off;
  }

  std::vector<Complex> in(sub_dim), out(sub_dim);
  for (std::size_t base = 0; base < n_dim; ++base) {
    if (base & target_mask) continue;
    for (std::size_t s = 0; s < sub_dim; ++s) in[s] = psi(static_cast<Eigen::Index>(base | offset[s]));
    for (std::size_t r = 0; r < sub_dim; ++r) {
      Complex acc(0, 0);
      for (std::size_t s = 0; s < sub_dim; ++s) acc += u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) * in[s];
      out[r] = acc;
    }
    for (std::size_t s = 0; s < sub_dim; ++s) psi(static_cast<Eigen::Index>(base | offset[s])) = out[s];
  }
}

/// Left-multiplies an arbitrary square matrix by the embedded gate
/// (every column transforms like a state vector).
inline void apply_matrix_dm_left_only(Matrix& m, const Matrix& u, int n_qubits,
                                      const std::vector<int>& targets) {
  Vector col(m.rows());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    col = m.col(c);
    apply_matrix_vec(col, u, n_qubits, targets);
    m.col(c) = col;
  }
}

/// rho -> U rho U^dagger with the same embedding rules, in place.
inline void apply_matrix_dm(Matrix& rho, const Matrix& u, int n_qubits,
                            const std::vector<int>& targets) {
  const int k = static_cast<int>(targets.size());
  const std::size_t sub_dim = dim_for(k);
  const std::size_t n_dim = static_cast<std::size_t>(rho.rows());

  std::size_t target_mask = 0;
  std::vector<int> pos(k);
  for (int j = 0; j < k; ++j) {
    pos[j] = qubit_bit(n_qubits, targets[j]);
    target_mask |= std::size_t{1} << pos[j];
  }
  std::vector<std::size_t> offset(sub_dim);
  for (std::size_t s = 0; s < sub_dim; ++s) {
    std::size_t off = 0;
    for (int j = 0; j < k; ++j)
      if ((s >> (k - 1 - j)) & 1) off |= std::size_t{1} << pos[j];
    offset[s] = off;
  }

  std::vector<Complex> in(sub_dim), out(sub_dim);
  // Left multiply: each column transforms like a state vector.
  for (std::size_t col = 0; col < n_dim; ++col) {
    for (std::size_t base = 0; base < n_dim; ++base) {
      if (base & target_mask) continue;
      for (std::size_t s = 0; s < sub_dim; ++s)
        in[s] = rho(static_cast<Eigen::Index>(base | offset[s]), static_cast<Eigen::Index>(col));
      for (std::size_t r = 0; r < sub_dim; ++r) {
        Complex acc(0, 0);
        for (std::size_t s = 0; s < sub_dim; ++s) acc += u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) * in[s];
        out[r] = acc;
      }
      for (std::size_t s = 0; s < sub_dim; ++s)
        rho(static_cast<Eigen::Index>(base | offset[s]), static_cast<Eigen::Index>(col)) = out[s];
    }
  }
  // Right multiply by U^dagger: rows transform with conj(U).
  for (std::size_t row = 0; row < n_dim; ++row) {
    for (std::size_t base = 0; base < n_dim; ++base) {
      if (base & target_mask) continue;
      for (std::size_t s = 0; s < sub_dim; ++s)
        in[s] = rho(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(base | offset[s]));
      for (std::size_t r = 0; r < sub_dim; ++r) {
        Complex acc(0, 0);
        for (std::size_t s = 0; s < sub_dim; ++s) acc += std::conj(u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s))) * in[s];
        out[r] = acc;
      }
      for (std::size_t s = 0; s < sub_dim; ++s)
        rho(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(base | offset[s])) = out[s];
    }
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Kronecker product; the first operand acts on the more significant qubits.
inline Operator tensor_product(const Operator& a, const Operator& b) {
  const auto ra = a.entries.rows();
  const auto rb = b.entries.rows();
  Matrix out(ra * rb, ra * rb);
  for (Eigen::Index i = 0; i < ra; ++i)
    for (Eigen::Index j = 0; j < ra; ++j)
      out.block(i * rb, j * rb, rb, rb) = a.entries(i, j) * b.entries;
  return Operator(std::move(out));
}

/// U|psi> with U embedded on the given target qubits.
inline StateVector apply_unitary(const StateVector& state, const Operator& u,
                                 const std::vector<int>& targets,
                                 double unitary_tol = 1e-8) {
  detail::check_targets(state.n_qubits, targets, u.dim());
  if (!is_unitary(u.entries, unitary_tol))
    throw NonUnitaryError("apply_unitary: matrix is not unitary within tolerance");
  StateVector out = state;
  detail::apply_matrix_vec(out.amplitudes, u.entries, state.n_qubits, targets);
  return out;
}

/// U rho U^dagger with U embedded on the given target qubits.
inline DensityMatrix apply_unitary(const DensityMatrix& rho, const Operator& u,
                                   const std::vector<int>& targets,
                                   double unitary_tol = 1e-8) {
  detail::check_targets(rho.n_qubits, targets, u.dim());
  if (!is_unitary(u.entries, unitary_tol))
    throw NonUnitaryError("apply_unitary: matrix is not unitary within tolerance");
  DensityMatrix out = rho;
  detail::apply_matrix_dm(out.entries, u.entries, rho.n_qubits, targets);
  return out;
}

/// Reduced density matrix over the kept qubits; result qubit j corresponds
/// to keep[j], preserving the given order.
inline DensityMatrix partial_trace(const DensityMatrix& rho,
                                   const std::vector<int>& keep) {
  const int n = rho.n_qubits;
  if (keep.empty()) throw IndexError("partial_trace: keep list is empty");
  std::size_t seen = 0;
  for (int q : keep) {
    if (q < 0 || q >= n) throw IndexError("partial_trace: qubit out of range");
    const std::size_t bit = std::size_t{1} << qubit_bit(n, q);
    if (seen & bit) throw IndexError("partial_trace: duplicate qubit in keep");
    seen |= bit;
  }
  const int k = static_cast<int>(keep.size());
  std::vector<int> traced;
  for (int q = 0; q < n; ++q) {
    bool kept = false;
    for (int kq : keep) kept = kept || (kq == q);
    if (!kept) traced.push_back(q);
  }
  const std::size_t kd = dim_for(k);
  const std::size_t td = dim_for(static_cast<int>(traced.size()));

  auto full_index = [&](std::size_t kept_idx, std::size_t traced_idx) {
    std::size_t idx = 0;
    for (int j = 0; j < k; ++j)
      if ((kept_idx >> (k - 1 - j)) & 1)
        idx |= std::size_t{1} << qubit_bit(n, keep[static_cast<std::size_t>(j)]);
    for (std::size_t j = 0; j < traced.size(); ++j)
      if ((traced_idx >> (traced.size() - 1 - j)) & 1)
        idx |= std::size_t{1} << qubit_bit(n, traced[j]);
    return idx;
  };

  DensityMatrix out;
  out.n_qubits = k;
  out.entries = Matrix::Zero(static_cast<Eigen::Index>(kd), static_cast<Eigen::Index>(kd));
  for (std::size_t i = 0; i < kd; ++i)
    for (std::size_t j = 0; j < kd; ++j) {
      Complex acc(0, 0);
      for (std::size_t t = 0; t < td; ++t)
        acc += rho.entries(static_cast<Eigen::Index>(full_index(i, t)),
                           static_cast<Eigen::Index>(full_index(j, t)));
      out.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc;
    }
  return out;
}

/// exp(-i h t) by eigendecomposition; exact at these dimensions and used as
/// the reference the Trotter compiler is tested against.
inline Operator matrix_exponential(const Operator& h, double t_us,
                                   double hermitian_tol = 1e-8) {
  if (!is_hermitian(h.entries, hermitian_tol))
    throw NonHermitianError("matrix_exponential: operator is not Hermitian");
  const Matrix sym = 0.5 * (h.entries + h.entries.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const auto& vals = es.eigenvalues();
  const auto& vecs = es.eigenvectors();
  Vector phases(vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    phases(i) = std::exp(Complex(0, -vals(i) * t_us));
  return Operator(vecs * phases.asDiagonal() * vecs.adjoint());
}

/// Largest singular value of (U - e^{i theta*} V) with the global phase
/// aligned through Tr(U^dagger V); zero iff U = V up to global phase.
inline double unitary_distance(const Operator& u, const Operator& v) {
  if (u.dim() != v.dim()) throw DimensionError("unitary_distance: dimension mismatch");
  const Complex tr = (u.entries.adjoint() * v.entries).trace();
  const Complex phase = std::abs(tr) > 0 ? tr / std::abs(tr) : Complex(1, 0);
  const Matrix diff = u.entries - v.entries / phase;
  Eigen::JacobiSVD<Matrix> svd(diff);
  return svd.singularValues()(0);
}

/// 1 - |Tr(U^dagger V)|/dim, the overlap-based distance.
inline double overlap_distance(const Operator& u, const Operator& v) {
  if (u.dim() != v.dim()) throw DimensionError("overlap_distance: dimension mismatch");
  const Complex tr = (u.entries.adjoint() * v.entries).trace();
  return 1.0 - std::abs(tr) / static_cast<double>(u.dim());
}

/// Principal square root of a PSD Hermitian matrix. Eigenvalues below a
/// relative floor are treated as exact zeros so that round-off in the null
/// space does not surface as sqrt(eps)-sized artifacts.
inline Matrix sqrt_psd(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
  Eigen::VectorXd vals = es.eigenvalues();
  const double floor = 1e-14 * std::max(vals.cwiseAbs().maxCoeff(), 1e-300);
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    vals(i) = vals(i) > floor ? std::sqrt(vals(i)) : 0.0;
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace hqsim
