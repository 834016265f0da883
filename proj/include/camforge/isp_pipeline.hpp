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
#ifndef CAMFORGE_ISP_PIPELINE_HPP_
#define CAMFORGE_ISP_PIPELINE_HPP_

// Post-acquisition processing: normalization, bilinear demosaicking and
// gamma. Steps applied are recorded in ProcessedImage::pipeline_tag, e.g.
// "demosaic-bilinear|gamma-0.30".

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "camforge/sensor_model.hpp"

namespace camforge {

/// Planar [channel][row][col] values in [0, 1].
struct ProcessedImage {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<double> data;
  std::vector<std::string> channel_names;
  std::string pipeline_tag;

  std::size_t plane_size() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  double at(int ch, int row, int col) const {
    return data[static_cast<std::size_t>(ch) * plane_size() + static_cast<std::size_t>(row) * width + col];
  }

  friend bool operator==(const ProcessedImage&, const ProcessedImage&) = default;
};

/// dn / (2^N - 1), single CFA-interleaved channel, tag "raw".
ProcessedImage normalize(const RawFrame& raw);

/// One output channel per filter class (RGGB -> R,G,B; RCCC -> C,R). A
/// missing sample is the mean of same-class samples among the 4 orthogonal
/// neighbours, or among the 4 diagonal ones when no orthogonal neighbour has
/// that class. Borders reflect about the edge sample, which keeps the CFA
/// phase. Monochrome frames pass through normalize().
ProcessedImage demosaic_bilinear(const RawFrame& raw);

ProcessedImage apply_gamma(const ProcessedImage& img, double gamma);

/// gamma = ln(0.5) / ln(max(1e-4, mean luminance)), clamped to [0.1, 1].
std::pair<ProcessedImage, double> adaptive_gamma(const ProcessedImage& img);

/// Distinct dn values among pixels with dn < fraction x 2^N.
int dark_level_census(const RawFrame& raw, double fraction);
/// Same census on a processed image re-expressed at `bit_depth` levels
/// (round(value x (2^N - 1))), over all channels.
int dark_level_census(const ProcessedImage& img, int bit_depth, double fraction);

/// Writes base.png (8 or 16 bit; value round(v x (2^depth - 1))) and
/// base.png.meta carrying channels, channel_names and pipeline_tag.
void save_processed_image(const ProcessedImage& img, const std::filesystem::path& base,
                          int output_depth);

}  // namespace camforge

#endif  // CAMFORGE_ISP_PIPELINE_HPP_
