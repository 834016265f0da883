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
#include "camforge/isp_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "camforge/error.hpp"
#include "camforge/raw_io.hpp"
#include "camforge/text.hpp"

namespace camforge {

ProcessedImage normalize(const RawFrame& raw) {
  ProcessedImage img;
  img.width = raw.width;
  img.height = raw.height;
  img.channels = 1;
  img.channel_names = {"raw"};
  img.pipeline_tag = "raw";
  img.data.resize(raw.dn.size());
  const double scale = 1.0 / raw.max_dn();
  for (std::size_t p = 0; p < raw.dn.size(); ++p) img.data[p] = raw.dn[p] * scale;
  return img;
}

namespace {

// Whole-sample reflection (-1 -> 1, n -> n - 2); preserves parity so a 2x2
// CFA phase is unchanged across the border.
int mirror(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - m;
}

}  // namespace

ProcessedImage demosaic_bilinear(const RawFrame& raw) {
  const CfaPattern& cfa = raw.cfa;
  cfa.validate();
  if (cfa.filter_classes.size() == 1 && cfa.tile_width == 1 && cfa.tile_height == 1) {
    return normalize(raw);
  }
  if (cfa.tile_width != 2 || cfa.tile_height != 2) {
    fail(ErrorCode::kUnsupported, "bilinear demosaic supports 2x2 CFA tiles only (got " +
                                      std::to_string(cfa.tile_width) + "x" +
                                      std::to_string(cfa.tile_height) + ")");
  }
  const int n_classes = static_cast<int>(cfa.filter_classes.size());
  for (int c = 0; c < n_classes; ++c) {
    if (std::find(cfa.filter_ids.begin(), cfa.filter_ids.end(), c) == cfa.filter_ids.end()) {
      fail(ErrorCode::kUnsupported, "CFA class '" + cfa.filter_classes[static_cast<std::size_t>(c)].name +
                                        "' never occurs in the tile");
    }
  }

  ProcessedImage img;
  img.width = raw.width;
  img.height = raw.height;
  img.channels = n_classes;
  for (const auto& fc : cfa.filter_classes) img.channel_names.push_back(fc.name);
  img.pipeline_tag = "demosaic-bilinear";
  img.data.assign(static_cast<std::size_t>(n_classes) * img.plane_size(), 0.0);
  const double scale = 1.0 / raw.max_dn();
  const int w = raw.width;
  const int h = raw.height;
  static constexpr int kOrtho[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  static constexpr int kDiag[4][2] = {{-1, -1}, {-1, 1}, {1, -1}, {1, 1}};

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int own = cfa.class_at(r, c);
      for (int ch = 0; ch < n_classes; ++ch) {
        double value;
        if (ch == own) {
          value = raw.at(r, c) * scale;
        } else {
          auto average = [&](const int (&offsets)[4][2]) {
            double sum = 0.0;
            int count = 0;
            for (const auto& o : offsets) {
              const int rr = mirror(r + o[0], h);
              const int cc = mirror(c + o[1], w);
              if (cfa.class_at(rr, cc) == ch) {
                sum += raw.at(rr, cc);
                ++count;
              }
            }
            return std::pair{sum, count};
          };
          auto [sum, count] = average(kOrtho);
          if (count == 0) std::tie(sum, count) = average(kDiag);
          if (count == 0) {
            fail(ErrorCode::kUnsupported, "CFA layout leaves class without neighbours");
          }
          value = sum / count * scale;
        }
        img.data[static_cast<std::size_t>(ch) * img.plane_size() + static_cast<std::size_t>(r) * w + c] = value;
      }
    }
  }
  return img;
}

ProcessedImage apply_gamma(const ProcessedImage& img, double gamma) {
  if (!(gamma > 0) || !std::isfinite(gamma)) fail(ErrorCode::kInvalidArgument, "gamma must be > 0");
  ProcessedImage out = img;
  for (double& v : out.data) v = std::pow(v, gamma);
  out.pipeline_tag += "|gamma-" + text::format_fixed(gamma, 2);
  return out;
}

std::pair<ProcessedImage, double> adaptive_gamma(const ProcessedImage& img) {
  if (img.data.empty()) fail(ErrorCode::kInvalidArgument, "adaptive gamma of an empty image");
  // Luminance is the per-pixel channel mean, so the image mean luminance is
  // the mean over all samples.
  double total = 0.0;
  for (double v : img.data) total += v;
  const double mean = total / static_cast<double>(img.data.size());
  const double gamma = std::clamp(std::log(0.5) / std::log(std::max(1e-4, mean)), 0.1, 1.0);
  ProcessedImage out = img;
  for (double& v : out.data) v = std::pow(v, gamma);
  out.pipeline_tag += "|gamma-adaptive-" + text::format_fixed(gamma, 2);
  return {std::move(out), gamma};
}

int dark_level_census(const RawFrame& raw, double fraction) {
  if (!(fraction > 0 && fraction <= 1)) fail(ErrorCode::kInvalidArgument, "census fraction must lie in (0,1]");
  const double limit = fraction * std::ldexp(1.0, raw.bit_depth);
  std::vector<char> seen(static_cast<std::size_t>(raw.max_dn()) + 1, 0);
  int distinct = 0;
  for (auto v : raw.dn) {
    if (v < limit && !seen[v]) {
      seen[v] = 1;
      ++distinct;
    }
  }
  return distinct;
}

int dark_level_census(const ProcessedImage& img, int bit_depth, double fraction) {
  if (!(fraction > 0 && fraction <= 1)) fail(ErrorCode::kInvalidArgument, "census fraction must lie in (0,1]");
  if (bit_depth < 1 || bit_depth > 16) fail(ErrorCode::kInvalidArgument, "census bit depth must be 1..16");
  const double max_dn = std::ldexp(1.0, bit_depth) - 1.0;
  const double limit = fraction * std::ldexp(1.0, bit_depth);
  std::set<long> levels;
  for (double v : img.data) {
    const double level = std::round(std::clamp(v, 0.0, 1.0) * max_dn);
    if (level < limit) levels.insert(static_cast<long>(level));
  }
  return static_cast<int>(levels.size());
}

void save_processed_image(const ProcessedImage& img, const std::filesystem::path& base, int output_depth) {
  if (output_depth != 8 && output_depth != 16) {
    fail(ErrorCode::kInvalidArgument, "processed output depth must be 8 or 16");
  }
  if (img.channels < 1 || img.channels > 3) {
    fail(ErrorCode::kUnsupported, "processed images are stored with 1 to 3 channels");
  }
  PngImage png;
  png.width = img.width;
  png.height = img.height;
  png.channels = img.channels;
  png.bit_depth = output_depth;
  png.samples.resize(img.data.size());
  const double max_v = std::ldexp(1.0, output_depth) - 1.0;
  for (std::size_t p = 0; p < img.plane_size(); ++p) {
    for (int ch = 0; ch < img.channels; ++ch) {
      const double v = std::clamp(img.data[static_cast<std::size_t>(ch) * img.plane_size() + p], 0.0, 1.0);
      png.samples[p * img.channels + static_cast<std::size_t>(ch)] =
          static_cast<std::uint16_t>(std::round(v * max_v));
    }
  }
  const std::filesystem::path png_path(base.string() + ".png");
  write_png(png_path, png);
  std::string meta;
  meta += "channels=" + std::to_string(img.channels) + "\n";
  meta += "channel_names=" + text::join(img.channel_names, ",") + "\n";
  meta += "output_depth=" + std::to_string(output_depth) + "\n";
  meta += "pipeline_tag=" + img.pipeline_tag + "\n";
  text::write_file_atomic(std::filesystem::path(base.string() + ".png.meta"), meta);
}

}  // namespace camforge
