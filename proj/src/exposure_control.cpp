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
#include "camforge/exposure_control.hpp"

#include <algorithm>
#include <cmath>

#include "camforge/error.hpp"
#include "camforge/text.hpp"

namespace camforge {

std::string exposure_kind_name(ExposureKind kind) {
  switch (kind) {
    case ExposureKind::kGlobal: return "global";
    case ExposureKind::kCenterWeighted: return "center";
    case ExposureKind::kBracketed: return "bracketed";
  }
  return "?";
}

ExposureKind parse_exposure_kind(const std::string& name) {
  if (name == "global") return ExposureKind::kGlobal;
  if (name == "center" || name == "center-weighted") return ExposureKind::kCenterWeighted;
  if (name == "bracketed" || name == "bracketing") return ExposureKind::kBracketed;
  fail(ErrorCode::kInvalidArgument,
       "unknown exposure kind '" + name + "' (expected global, center or bracketed)");
}

void ExposurePolicy::validate() const {
  if (!(target_fraction > 0 && target_fraction <= 1)) {
    fail(ErrorCode::kInvalidArgument, "exposure target_fraction must lie in (0,1]");
  }
  if (!(max_duration_s > 0)) fail(ErrorCode::kInvalidArgument, "exposure max duration must be > 0");
  if (!(metering_percentile > 0 && metering_percentile <= 100)) {
    fail(ErrorCode::kInvalidArgument, "metering percentile must lie in (0,100]");
  }
  if (bracket_durations_s.empty()) fail(ErrorCode::kInvalidArgument, "bracket durations are empty");
  for (std::size_t i = 0; i < bracket_durations_s.size(); ++i) {
    if (!(bracket_durations_s[i] > 0)) fail(ErrorCode::kInvalidArgument, "bracket durations must be > 0");
    if (i && !(bracket_durations_s[i] > bracket_durations_s[i - 1])) {
      fail(ErrorCode::kInvalidArgument, "bracket durations must be strictly ascending");
    }
  }
  const auto& w = center_window;
  if (!(w.x0 >= 0 && w.x1 <= 1 && w.y0 >= 0 && w.y1 <= 1 && w.x0 <= w.x1 && w.y0 <= w.y1)) {
    fail(ErrorCode::kInvalidArgument, "center window must lie within [0,1]^2");
  }
}

PixelRect window_pixels(const NormalizedWindow& window, int width, int height) {
  // Pixel c is inside when its center (c + 0.5) / width lies in [x0, x1].
  auto first_inside = [](double lo, int n) {
    return std::max(0, static_cast<int>(std::ceil(lo * n - 0.5)));
  };
  auto last_inside = [](double hi, int n) {
    return std::min(n - 1, static_cast<int>(std::floor(hi * n - 0.5)));
  };
  PixelRect rect{first_inside(window.x0, width), last_inside(window.x1, width) + 1,
                 first_inside(window.y0, height), last_inside(window.y1, height) + 1};
  if (rect.col_begin >= rect.col_end || rect.row_begin >= rect.row_end) {
    fail(ErrorCode::kInvalidArgument, "metering window contains no pixels");
  }
  return rect;
}

double nearest_rank_percentile(std::vector<double> values, double percentile) {
  if (values.empty()) fail(ErrorCode::kInvalidArgument, "percentile of an empty set");
  const auto n = values.size();
  auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1), values.end());
  return values[rank - 1];
}

double meter(const SceneIrradiance& scene, const SensorConfig& config, const ExposurePolicy& policy) {
  policy.validate();
  if (policy.kind == ExposureKind::kBracketed) {
    fail(ErrorCode::kInvalidArgument, "bracketed capture does not meter");
  }
  PixelRect rect{0, scene.width_px, 0, scene.height_px};
  if (policy.kind == ExposureKind::kCenterWeighted) {
    rect = window_pixels(policy.center_window, scene.width_px, scene.height_px);
  }
  const std::vector<double> rate_e = expected_electrons(scene, config, 1.0);
  std::vector<double> rate_v;
  rate_v.reserve(static_cast<std::size_t>(rect.col_end - rect.col_begin) *
                 static_cast<std::size_t>(rect.row_end - rect.row_begin));
  for (int r = rect.row_begin; r < rect.row_end; ++r) {
    for (int c = rect.col_begin; c < rect.col_end; ++c) {
      rate_v.push_back(rate_e[static_cast<std::size_t>(r) * scene.width_px + c] *
                       config.conversion_gain_v_per_e);
    }
  }
  const double stat = nearest_rank_percentile(std::move(rate_v), policy.metering_percentile);
  if (stat <= 0) return policy.max_duration_s;
  return std::min(policy.target_fraction * config.voltage_swing_v / stat, policy.max_duration_s);
}

RawFrame capture(const SceneIrradiance& scene, const SensorConfig& config,
                 const ExposurePolicy& policy, std::uint64_t seed) {
  policy.validate();
  if (policy.kind != ExposureKind::kBracketed) {
    const double t = meter(scene, config, policy);
    RawFrame frame = quantize(expose(scene, config, t, seed), config);
    frame.rng_seed = seed;
    return frame;
  }
  std::vector<RawFrame> frames;
  for (std::size_t i = 0; i < policy.bracket_durations_s.size(); ++i) {
    frames.push_back(quantize(expose(scene, config, policy.bracket_durations_s[i], seed + i), config));
  }
  RawFrame fused = hdr_combine(frames, config);
  fused.rng_seed = seed;
  return fused;
}

RawFrame hdr_combine(std::span<const RawFrame> frames, const SensorConfig& config) {
  if (frames.empty()) fail(ErrorCode::kInvalidArgument, "hdr_combine needs at least one frame");
  const RawFrame& first = frames.front();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const RawFrame& f = frames[i];
    if (f.width != first.width || f.height != first.height || f.bit_depth != first.bit_depth ||
        !(f.cfa == first.cfa)) {
      fail(ErrorCode::kDimensionMismatch, "bracketed frames differ in size, bit depth or CFA");
    }
    if (!(f.exposure_s > 0)) fail(ErrorCode::kInvalidArgument, "bracketed frame with non-positive exposure");
    if (i && !(f.exposure_s > frames[i - 1].exposure_s)) {
      fail(ErrorCode::kInvalidArgument, "bracketed frames must have ascending exposures");
    }
  }
  const double clip_level = 0.98 * first.max_dn();
  const double longest = frames.back().exposure_s;
  const double out_max = std::ldexp(1.0, config.bit_depth) - 1.0;

  RawFrame out = frames.back();
  out.bit_depth = config.bit_depth;
  out.exposure_s = longest;
  out.bracket_exposures_s.clear();
  for (const auto& f : frames) out.bracket_exposures_s.push_back(f.exposure_s);
  for (std::size_t p = 0; p < out.dn.size(); ++p) {
    double sum = 0.0;
    int used = 0;
    for (const auto& f : frames) {
      if (f.dn[p] < clip_level) {
        sum += f.dn[p] / f.exposure_s;
        ++used;
      }
    }
    const double radiance = used ? sum / used : first.dn[p] / first.exposure_s;
    out.dn[p] = static_cast<std::uint16_t>(std::clamp(std::round(radiance * longest), 0.0, out_max));
  }
  return out;
}

}  // namespace camforge
