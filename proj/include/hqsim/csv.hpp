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

#include <cstdio>
#include <fstream>
#include <string>

#include "hqsim/errors.hpp"
#include "hqsim/observables.hpp"

namespace hqsim {

namespace detail {

// Locale-independent fixed formatting so identical runs emit identical bytes.
inline std::string format_csv_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace detail

inline std::string curve_to_csv(const Curve& curve) {
  curve.validate();
  std::string out = "time,value,stderr\n";
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    out += detail::format_csv_value(curve.times[i]);
    out += ',';
    out += detail::format_csv_value(curve.values[i]);
    out += ',';
    out += detail::format_csv_value(curve.std_errors[i]);
    out += '\n';
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SimError("cannot open output file '" + path + "'");
  out << content;
  if (!out) throw SimError("failed writing '" + path + "'");
}

inline void write_curve_csv(const std::string& path, const Curve& curve) {
  write_text_file(path, curve_to_csv(curve));
}

}  // namespace hqsim
