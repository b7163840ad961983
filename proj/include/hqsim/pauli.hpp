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

/// One weighted Pauli word, e.g. 1.05 * "ZIZ". The letter at position q acts
/// on qubit q (qubit 0 most significant). Coefficients are real energies in
/// the MHz-2pi basis.
struct PauliString {
  std::string letters;  // over {I, X, Y, Z}
  double coefficient = 0.0;

  int n_qubits() const { return static_cast<int>(letters.size()); }

  void validate() const {
    if (!std::isfinite(coefficient))
      throw InvalidParamsError("PauliString: coefficient is not finite");
    for (char c : letters)
      if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
        throw InvalidParamsError("PauliString: invalid letter");
  }
};

using PauliSum = std::vector<PauliString>;

inline const Matrix& pauli_matrix(char letter) {
  switch (letter) {
    case 'I': return mat_identity2();
    case 'X': return mat_x();
    case 'Y': return mat_y();
    case 'Z': return mat_z();
    default: throw InvalidParamsError("pauli_matrix: invalid letter");
  }
}

/// Dense matrix of a Pauli word (without its coefficient).
inline Matrix pauli_string_matrix(const std::string& letters) {
  Matrix out = Matrix::Identity(1, 1);
  for (char c : letters) {
    const Matrix& p = pauli_matrix(c);
    Matrix next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      for (Eigen::Index j = 0; j < out.cols(); ++j)
        next.block(i * 2, j * 2, 2, 2) = out(i, j) * p;
    out = std::move(next);
  }
  return out;
}

/// Sum of coefficient * word over the whole list, as a dense operator.
inline Operator pauli_sum_matrix(const PauliSum& terms) {
  if (terms.empty()) throw InvalidParamsError("pauli_sum_matrix: empty sum");
  const auto d = static_cast<Eigen::Index>(dim_for(terms.front().n_qubits()));
  Matrix acc = Matrix::Zero(d, d);
  for (const auto& t : terms) acc += t.coefficient * pauli_string_matrix(t.letters);
  return Operator(std::move(acc));
}

}  // namespace hqsim
