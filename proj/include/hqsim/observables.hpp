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
#include <limits>
#include <string>
#include <vector>

#include "hqsim/errors.hpp"
#include "hqsim/linalg.hpp"

namespace hqsim {

/// One measured curve: time grid, values, per-point standard errors.
/// time_unit records the grid's unit ("us", "ms" or "s"); different
/// experiments run on very different scales.
struct Curve {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> std_errors;
  std::string label;
  std::string time_unit = "us";

  void validate() const {
    if (times.size() != values.size() || times.size() != std_errors.size())
      throw InvalidParamsError("Curve: field lengths differ");
    for (std::size_t i = 1; i < times.size(); ++i)
      if (!(times[i] > times[i - 1]))
        throw InvalidParamsError("Curve: times must be strictly increasing");
  }
};

/// Probability of finding `qubit` in `level` (0 or 1), from the diagonal of
/// the reduced state.
inline double population(const DensityMatrix& rho, int qubit, int level) {
  if (qubit < 0 || qubit >= rho.n_qubits)
    throw IndexError("population: qubit out of range");
  if (level != 0 && level != 1) throw IndexError("population: level must be 0 or 1");
  const DensityMatrix red = partial_trace(rho, {qubit});
  return red.entries(level, level).real();
}

/// Normalized single-qubit coherence 2 |rho_01| of the reduced state:
/// 1 for |+>, 0 for a fully dephased or maximally mixed qubit.
inline double coherence(const DensityMatrix& rho, int qubit) {
  if (qubit < 0 || qubit >= rho.n_qubits)
    throw IndexError("coherence: qubit out of range");
  const DensityMatrix red = partial_trace(rho, {qubit});
  return 2.0 * std::abs(red.entries(0, 1));
}

/// Fidelity against a pure target: <psi| rho |psi>.
inline double state_fidelity(const DensityMatrix& rho, const StateVector& target) {
  if (rho.dim() != target.dim())
    throw DimensionError("state_fidelity: dimension mismatch");
  const Complex v = (target.amplitudes.adjoint() * rho.entries * target.amplitudes)(0);
  return v.real();
}

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, evaluated as the
/// squared trace norm of sqrt(rho) sqrt(sigma); symmetric in its arguments
/// and equal to the pure-target form when sigma is pure.
inline double state_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim())
    throw DimensionError("state_fidelity: dimension mismatch");
  const Matrix product = sqrt_psd(rho.entries) * sqrt_psd(sigma.entries);
  Eigen::JacobiSVD<Matrix> svd(product);
  const double tr = svd.singularValues().sum();
  return tr * tr;
}

/// Result of a threshold-crossing read of a decay curve.
struct CoherenceTime {
  double time = std::numeric_limits<double>::infinity();
  bool crossed = false;
};

/// First downward crossing of the threshold, linearly interpolated between
/// samples. If the curve never crosses, the result carries an infinity
/// marker with crossed = false.
inline CoherenceTime coherence_time(const Curve& curve, double threshold) {
  curve.validate();
  if (curve.values.empty() || curve.values.front() <= threshold)
    throw InvalidParamsError("coherence_time: curve must start above the threshold");
  for (std::size_t i = 1; i < curve.values.size(); ++i) {
    if (curve.values[i] <= threshold) {
      const double v0 = curve.values[i - 1], v1 = curve.values[i];
      const double t0 = curve.times[i - 1], t1 = curve.times[i];
      const double frac = (v0 - threshold) / (v0 - v1);
      return {t0 + frac * (t1 - t0), true};
    }
  }
  return {};
}

}  // namespace hqsim
