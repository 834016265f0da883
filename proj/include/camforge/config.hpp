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
#ifndef CAMFORGE_CONFIG_HPP_
#define CAMFORGE_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "camforge/variant_factory.hpp"

namespace camforge {

// Flat key=value experiment configuration. Relative paths are resolved
// against the directory of the file they were read from.
struct ExperimentConfig {
  std::filesystem::path input_manifest;  // empty when unset
  PipelineSettings pipeline;

  std::string variant_axis;  // empty when unset
  std::vector<std::string> variant_values;

  std::filesystem::path eval_detections;  // directory of <scene_id>.csv files
  double eval_iou_threshold = 0.5;
  std::vector<double> eval_distance_bins;  // ascending edges in metres
  std::string eval_class;                  // empty means every class

  double census_fraction = 1.0 / 32.0;
  int kid_block_size = 50;

  std::filesystem::path output_directory = "camforge-out";
  std::uint64_t seed = 0;

  // Every key with the value that applied, defaults included. Parsing this
  // text back yields the same configuration.
  std::vector<std::pair<std::string, std::string>> resolved() const;
  std::string resolved_text() const;
};

// Every key accepted by the parser.
const std::vector<std::string>& config_keys();

ExperimentConfig parse_config(const std::string& contents, const std::string& origin,
                              const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace camforge

#endif  // CAMFORGE_CONFIG_HPP_
