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

#include <string>
#include <vector>

#include "hqsim/config.hpp"
#include "hqsim/csv.hpp"
#include "hqsim/version.hpp"

namespace hqsim {

/// Renders the fully resolved run configuration as key-value text. Every
/// parameter carries its provenance as a trailing comment: published
/// constant, artifact default, explicit config, or calibration output.
/// The manifest parses as a config, so a run can be reproduced with
/// `--config <manifest>`.
inline std::string manifest_text(const ExperimentConfig& cfg,
                                 const std::vector<std::string>& outputs = {},
                                 const std::vector<std::pair<std::string, std::string>>& extra = {}) {
  std::string out;
  out += "# run manifest (loadable as a config file)\n";
  out += "manifest.tool_version = ";
  out += version();
  out += "\n";
  for (const auto& spec : detail::config_schema()) {
    std::string source = "default";
    const auto it = cfg.provenance.find(spec.key);
    if (it != cfg.provenance.end()) source = it->second;
    else if (spec.published_constant) source = "published";
    out += spec.key + " = " + spec.get(cfg) + "  # [" + source + "]\n";
  }
  for (const auto& f : outputs) out += "manifest.output = " + f + "\n";
  for (const auto& [k, v] : extra) out += "manifest." + k + " = " + v + "\n";
  return out;
}

inline void write_manifest(const std::string& path, const ExperimentConfig& cfg,
                           const std::vector<std::string>& outputs = {},
                           const std::vector<std::pair<std::string, std::string>>& extra = {}) {
  write_text_file(path, manifest_text(cfg, outputs, extra));
}

}  // namespace hqsim
