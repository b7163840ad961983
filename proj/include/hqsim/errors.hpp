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

#include <stdexcept>
#include <string>

namespace hqsim {

/// Base class for all simulator errors.
class SimError : public std::runtime_error {
 public:
  explicit SimError(const std::string& msg) : std::runtime_error(msg) {}
};

class NonUnitaryError : public SimError {
 public:
  explicit NonUnitaryError(const std::string& msg) : SimError(msg) {}
};

class NonHermitianError : public SimError {
 public:
  explicit NonHermitianError(const std::string& msg) : SimError(msg) {}
};

class IndexError : public SimError {
 public:
  explicit IndexError(const std::string& msg) : SimError(msg) {}
};

class DimensionError : public SimError {
 public:
  explicit DimensionError(const std::string& msg) : SimError(msg) {}
};

class InvalidParamsError : public SimError {
 public:
  explicit InvalidParamsError(const std::string& msg) : SimError(msg) {}
};

class RegisterMismatchError : public SimError {
 public:
  explicit RegisterMismatchError(const std::string& msg) : SimError(msg) {}
};

class ConfigError : public SimError {
 public:
  explicit ConfigError(const std::string& msg) : SimError(msg) {}
};

/// Raised by the calibrator when the best fit leaves a target residual
/// above the hard acceptance limit.
class CalibrationError : public SimError {
 public:
  explicit CalibrationError(const std::string& msg) : SimError(msg) {}
};

}  // namespace hqsim
