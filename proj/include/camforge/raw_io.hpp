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
#ifndef CAMFORGE_RAW_IO_HPP_
#define CAMFORGE_RAW_IO_HPP_

// PNG persistence. Raw frames are 16-bit grayscale PNGs holding dn verbatim,
// with a <id>.raw.meta sidecar (bit_depth, cfa, exposure_s, sensor_name,
// rng_seed, pixel_pitch_um, brackets_s).

#include <cstdint>
#include <filesystem>
#include <vector>

#include "camforge/sensor_model.hpp"

namespace camforge {

struct PngImage {
  int width = 0;
  int height = 0;
  int channels = 1;   // 1 gray, 2 gray+alpha, 3 rgb
  int bit_depth = 16; // 8 or 16
  std::vector<std::uint16_t> samples;  // interleaved, row-major
};

void write_png(const std::filesystem::path& path, const PngImage& image);
PngImage read_png(const std::filesystem::path& path);

/// `base` is the path without suffixes; writes base.raw.png and base.raw.meta.
void save_raw_frame(const RawFrame& frame, const std::filesystem::path& base);
/// Accepts the bundle base, the .raw.png or the .raw.meta path.
RawFrame load_raw_frame(const std::filesystem::path& path);

std::filesystem::path raw_frame_base(const std::filesystem::path& path);

}  // namespace camforge

#endif  // CAMFORGE_RAW_IO_HPP_
