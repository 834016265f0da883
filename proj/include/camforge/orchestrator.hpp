/* Copyright 2026 The camforge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef CAMFORGE_ORCHESTRATOR_HPP_
#define CAMFORGE_ORCHESTRATOR_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "camforge/config.hpp"

namespace camforge {

inline constexpr const char* kVersion = "0.1.0";

// Overrides given on the command line; they win over the config file.
struct RunOverrides {
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> manifest;
};

// Loads `config_path` (or defaults when empty) and applies the overrides.
ExperimentConfig resolve_config(const std::filesystem::path& config_path, const RunOverrides& overrides);

// Each command writes under cfg.output_directory, appends a section to
// run.log there and returns a short summary for stdout. Failures throw
// camforge::Error.
std::string cmd_simulate(const ExperimentConfig& cfg, int jobs);
std::string cmd_variants(const ExperimentConfig& cfg, int jobs);
std::string cmd_eval(const ExperimentConfig& cfg);
std::string cmd_census(const ExperimentConfig& cfg);
std::string cmd_matrix(const ExperimentConfig& cfg, const std::filesystem::path& cells_csv,
                       double asymmetry_threshold = 0.05);
std::string cmd_kid(const ExperimentConfig& cfg, const std::filesystem::path& features_a,
                    const std::filesystem::path& features_b);

}  // namespace camforge

#endif  // CAMFORGE_ORCHESTRATOR_HPP_
