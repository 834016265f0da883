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
#include "camforge/sensor_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "camforge/error.hpp"
#include "camforge/rng.hpp"
#include "camforge/text.hpp"

namespace camforge {

CfaPattern CfaPattern::mono(int bands) {
  return CfaPattern{"mono", 1, 1, {0}, {{"C", std::vector<double>(static_cast<std::size_t>(bands), 1.0)}}};
}

CfaPattern CfaPattern::bayer_rggb() {
  return CfaPattern{"rggb", 2, 2, {0, 1, 1, 2},
                    {{"R", {1.0, 0.0, 0.0}}, {"G", {0.0, 1.0, 0.0}}, {"B", {0.0, 0.0, 1.0}}}};
}

CfaPattern CfaPattern::rccc() {
  return CfaPattern{"rccc", 2, 2, {1, 0, 0, 0},
                    {{"C", {1.0, 1.0, 1.0}}, {"R", {1.0, 0.0, 0.0}}}};
}

CfaPattern CfaPattern::from_name(const std::string& name, int bands) {
  if (name == "mono") return mono(bands);
  if (name == "rggb" || name == "bayer" || name == "rgb") return bayer_rggb();
  if (name == "rccc") return rccc();
  fail(ErrorCode::kUnsupported, "unknown CFA '" + name + "' (expected mono, rggb or rccc)");
}

void CfaPattern::validate() const {
  if (tile_width < 1 || tile_height < 1 ||
      filter_ids.size() != static_cast<std::size_t>(tile_width) * tile_height) {
    fail(ErrorCode::kInvalidArgument, "CFA '" + name + "': tile size does not match filter ids");
  }
  if (filter_classes.empty()) fail(ErrorCode::kInvalidArgument, "CFA '" + name + "' has no filter classes");
  for (int id : filter_ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= filter_classes.size()) {
      fail(ErrorCode::kInvalidArgument, "CFA '" + name + "': filter id out of range");
    }
  }
  for (const auto& fc : filter_classes) {
    for (double w : fc.band_weights) {
      if (!(w >= 0.0 && w <= 1.0)) {
        fail(ErrorCode::kInvalidArgument, "CFA class '" + fc.name + "': band weight outside [0,1]");
      }
    }
  }
}

double SensorConfig::qe_for_band(int band) const {
  if (qe.empty()) return 1.0;
  if (band < 0 || static_cast<std::size_t>(band) >= qe.size()) {
    fail(ErrorCode::kDimensionMismatch, "sensor '" + name + "' has no qe entry for band " + std::to_string(band));
  }
  return qe[static_cast<std::size_t>(band)];
}

SensorConfig SensorConfig::noise_free() const {
  SensorConfig c = *this;
  c.shot_noise = false;
  c.read_noise_e = 0.0;
  return c;
}

void SensorConfig::validate() const {
  auto require = [&](bool ok, const std::string& what) {
    if (!ok) fail(ErrorCode::kInvalidArgument, "sensor '" + name + "': " + what);
  };
  require(pixel_pitch_um > 0 && std::isfinite(pixel_pitch_um), "pixel_pitch_um must be > 0");
  require(array_width_px >= 0 && array_height_px >= 0, "array dimensions must be >= 0");
  require(well_capacity_e > 0, "well_capacity_e must be > 0");
  require(read_noise_e >= 0, "read_noise_e must be >= 0");
  require(dark_current_e_per_s >= 0, "dark_current_e_per_s must be >= 0");
  require(conversion_gain_v_per_e > 0, "conversion_gain_v_per_e must be > 0");
  require(voltage_swing_v > 0, "voltage_swing_v must be > 0");
  require(bit_depth == 8 || bit_depth == 10 || bit_depth == 12 || bit_depth == 16,
          "bit_depth must be 8, 10, 12 or 16");
  require(psf_fwhm_um >= 0, "psf_fwhm_um must be >= 0");
  require(well_capacity_e * conversion_gain_v_per_e >= voltage_swing_v,
          "well_capacity_e x conversion_gain must reach voltage_swing");
  for (double q : qe) require(q >= 0 && q <= 1, "qe entries must lie in [0,1]");
  if (dynamic_range_db && read_noise_e > 0) {
    const double dr = 20.0 * std::log10(well_capacity_e / read_noise_e);
    require(std::abs(dr - *dynamic_range_db) <= 0.1,
            "well/read-noise ratio does not match declared dynamic range");
  }
  cfa.validate();
}

namespace {

// Half-sample symmetric reflection: -1 -> 0, n -> n - 1, period 2n.
int reflect_index(long long i, int n) {
  const long long period = 2LL * n;
  long long m = i % period;
  if (m < 0) m += period;
  return static_cast<int>(m < n ? m : period - 1 - m);
}

}  // namespace

std::vector<double> gaussian_taps(double sigma_px) {
  const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma_px)));
  std::vector<double> taps(static_cast<std::size_t>(radius) + 1);
  double total = 0.0;
  for (int k = 0; k <= radius; ++k) {
    taps[static_cast<std::size_t>(k)] = std::exp(-0.5 * k * k / (sigma_px * sigma_px));
    total += (k == 0 ? 1.0 : 2.0) * taps[static_cast<std::size_t>(k)];
  }
  for (double& t : taps) t /= total;
  return taps;
}

SceneIrradiance apply_psf(const SceneIrradiance& scene, double fwhm_um) {
  if (!(fwhm_um >= 0)) fail(ErrorCode::kInvalidArgument, "psf fwhm must be >= 0");
  validate_scene(scene);
  if (fwhm_um == 0.0) return scene;

  const double sigma_px =
      fwhm_um / (2.0 * std::sqrt(2.0 * std::numbers::ln2)) / scene.pixel_pitch_um;
  const auto taps = gaussian_taps(sigma_px);
  const int radius = static_cast<int>(taps.size()) - 1;
  const int w = scene.width_px;
  const int h = scene.height_px;

  SceneIrradiance out = scene;
  std::vector<double> tmp(scene.plane_size());
  for (int b = 0; b < scene.bands; ++b) {
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          acc += taps[static_cast<std::size_t>(std::abs(k))] * scene.at(b, r, reflect_index(c + k, w));
        }
        tmp[static_cast<std::size_t>(r) * w + c] = acc;
      }
    }
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          acc += taps[static_cast<std::size_t>(std::abs(k))] *
                 tmp[static_cast<std::size_t>(reflect_index(r + k, h)) * w + c];
        }
        out.at(b, r, c) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

int pitch_ratio(double scene_pitch_um, double sensor_pitch_um) {
  const double ratio = sensor_pitch_um / scene_pitch_um;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio) {
    fail(ErrorCode::kInvalidArgument,
         "sensor pitch " + text::format_double(sensor_pitch_um) +
             " um is not a positive integer multiple of scene pitch " +
             text::format_double(scene_pitch_um) +
             " um; supply a scene sampled at a pitch that divides the sensor pitch");
  }
  return static_cast<int>(rounded);
}

SceneIrradiance resample_scene_to_sensor(const SceneIrradiance& scene,
                                         const SensorConfig& config) {
  validate_scene(scene);
  const int r = pitch_ratio(scene.pixel_pitch_um, config.pixel_pitch_um);
  if (r == 1) {
    SceneIrradiance same = scene;
    same.pixel_pitch_um = config.pixel_pitch_um;
    return same;
  }
  const int ow = scene.width_px / r;
  const int oh = scene.height_px / r;
  if (ow == 0 || oh == 0) {
    fail(ErrorCode::kDimensionMismatch, "scene smaller than one " + std::to_string(r) + "x" +
                                            std::to_string(r) + " binning block");
  }
  SceneIrradiance out = scene;
  out.width_px = ow;
  out.height_px = oh;
  out.pixel_pitch_um = config.pixel_pitch_um;
  out.data.assign(static_cast<std::size_t>(scene.bands) * out.plane_size(), 0.0f);
  const double inv_area = 1.0 / (static_cast<double>(r) * r);
  for (int b = 0; b < scene.bands; ++b) {
    for (int orow = 0; orow < oh; ++orow) {
      for (int ocol = 0; ocol < ow; ++ocol) {
        double sum = 0.0;
        for (int dr = 0; dr < r; ++dr) {
          for (int dc = 0; dc < r; ++dc) sum += scene.at(b, orow * r + dr, ocol * r + dc);
        }
        out.at(b, orow, ocol) = static_cast<float>(sum * inv_area);
      }
    }
  }
  return out;
}

SensorWindow sensor_window(int scene_width, int scene_height, const SensorConfig& config) {
  if (config.array_width_px == 0 || config.array_height_px == 0) {
    return {0, 0, scene_width, scene_height};
  }
  if (scene_width < config.array_width_px || scene_height < config.array_height_px) {
    fail(ErrorCode::kDimensionMismatch,
         "scene (" + std::to_string(scene_width) + "x" + std::to_string(scene_height) +
             " at sensor pitch) does not cover the " + std::to_string(config.array_width_px) +
             "x" + std::to_string(config.array_height_px) + " array of sensor '" + config.name + "'");
  }
  return {(scene_width - config.array_width_px) / 2, (scene_height - config.array_height_px) / 2,
          config.array_width_px, config.array_height_px};
}

SceneIrradiance crop_scene(const SceneIrradiance& scene, const SensorWindow& window) {
  if (window.offset_x == 0 && window.offset_y == 0 && window.width == scene.width_px &&
      window.height == scene.height_px) {
    return scene;
  }
  if (window.offset_x < 0 || window.offset_y < 0 ||
      window.offset_x + window.width > scene.width_px ||
      window.offset_y + window.height > scene.height_px) {
    fail(ErrorCode::kDimensionMismatch, "crop window outside scene");
  }
  SceneIrradiance out = scene;
  out.width_px = window.width;
  out.height_px = window.height;
  out.data.assign(static_cast<std::size_t>(scene.bands) * out.plane_size(), 0.0f);
  for (int b = 0; b < scene.bands; ++b) {
    for (int r = 0; r < window.height; ++r) {
      for (int c = 0; c < window.width; ++c) {
        out.at(b, r, c) = scene.at(b, r + window.offset_y, c + window.offset_x);
      }
    }
  }
  return out;
}

namespace {

void check_scene_matches_sensor(const SceneIrradiance& scene, const SensorConfig& config) {
  if (std::abs(scene.pixel_pitch_um - config.pixel_pitch_um) > 1e-9 * config.pixel_pitch_um) {
    fail(ErrorCode::kDimensionMismatch,
         "scene pitch " + text::format_double(scene.pixel_pitch_um) +
             " um differs from sensor pitch " + text::format_double(config.pixel_pitch_um) +
             " um; resample the scene first");
  }
  if (config.array_width_px != 0 &&
      (scene.width_px != config.array_width_px || scene.height_px != config.array_height_px)) {
    fail(ErrorCode::kDimensionMismatch,
         "scene is " + std::to_string(scene.width_px) + "x" + std::to_string(scene.height_px) +
             " but sensor array is " + std::to_string(config.array_width_px) + "x" +
             std::to_string(config.array_height_px));
  }
  for (const auto& fc : config.cfa.filter_classes) {
    if (fc.band_weights.size() != static_cast<std::size_t>(scene.bands)) {
      fail(ErrorCode::kDimensionMismatch,
           "filter class '" + fc.name + "' has " + std::to_string(fc.band_weights.size()) +
               " band weights but the scene has " + std::to_string(scene.bands) + " bands");
    }
  }
  if (!config.qe.empty() && config.qe.size() != static_cast<std::size_t>(scene.bands)) {
    fail(ErrorCode::kDimensionMismatch, "sensor qe has " + std::to_string(config.qe.size()) +
                                            " entries but the scene has " +
                                            std::to_string(scene.bands) + " bands");
  }
}

}  // namespace

std::vector<double> expected_electrons(const SceneIrradiance& scene, const SensorConfig& config,
                                       double exposure_s) {
  config.validate();
  validate_scene(scene);
  check_scene_matches_sensor(scene, config);
  const int n_classes = static_cast<int>(config.cfa.filter_classes.size());
  // Effective per-band responsivity for each class: weight x qe.
  std::vector<double> resp(static_cast<std::size_t>(n_classes) * scene.bands);
  for (int c = 0; c < n_classes; ++c) {
    for (int b = 0; b < scene.bands; ++b) {
      resp[static_cast<std::size_t>(c) * scene.bands + b] =
          config.cfa.filter_classes[static_cast<std::size_t>(c)].band_weights[static_cast<std::size_t>(b)] *
          config.qe_for_band(b);
    }
  }
  const double area_time = config.pixel_pitch_um * config.pixel_pitch_um * exposure_s;
  const double dark = config.dark_current_e_per_s * exposure_s;
  std::vector<double> mean(scene.plane_size());
  for (int r = 0; r < scene.height_px; ++r) {
    for (int col = 0; col < scene.width_px; ++col) {
      const int cls = config.cfa.class_at(r, col);
      double photons = 0.0;
      for (int b = 0; b < scene.bands; ++b) {
        photons += static_cast<double>(scene.at(b, r, col)) *
                   resp[static_cast<std::size_t>(cls) * scene.bands + b];
      }
      mean[static_cast<std::size_t>(r) * scene.width_px + col] = photons * area_time + dark;
    }
  }
  return mean;
}

ElectronImage expose(const SceneIrradiance& scene, const SensorConfig& config, double exposure_s,
                     std::uint64_t seed) {
  if (!(exposure_s > 0) || !std::isfinite(exposure_s)) {
    fail(ErrorCode::kInvalidArgument, "exposure_s must be > 0");
  }
  const std::vector<double> mean = expected_electrons(scene, config, exposure_s);
  ElectronImage img;
  img.width = scene.width_px;
  img.height = scene.height_px;
  img.exposure_s = exposure_s;
  img.electrons.resize(mean.size());
  img.saturated_mask.resize(mean.size());
  for (std::size_t p = 0; p < mean.size(); ++p) {
    double e = mean[p];
    if (config.shot_noise || config.read_noise_e > 0) {
      CounterStream stream(seed, p);
      if (config.shot_noise && e > 0) {
        std::poisson_distribution<std::int64_t> shot(e);
        e = static_cast<double>(shot(stream));
      }
      if (config.read_noise_e > 0) {
        std::normal_distribution<double> read(0.0, config.read_noise_e);
        e += read(stream);
      }
    }
    img.saturated_mask[p] = e >= config.well_capacity_e ? 1 : 0;
    img.electrons[p] = std::clamp(e, 0.0, config.well_capacity_e);
  }
  return img;
}

std::uint16_t quantize_voltage(double volts, double voltage_swing_v, int bit_depth) {
  if (bit_depth < 1 || bit_depth > 16) fail(ErrorCode::kInvalidArgument, "bit depth must be in [1, 16]");
  if (!(voltage_swing_v > 0)) fail(ErrorCode::kInvalidArgument, "voltage swing must be positive");
  const double v = std::clamp(volts, 0.0, voltage_swing_v);
  const double scaled = std::ldexp(v / voltage_swing_v, bit_depth);
  const double max_dn = std::ldexp(1.0, bit_depth) - 1.0;
  return static_cast<std::uint16_t>(std::min(max_dn, std::floor(scaled)));
}

SensorConfig fit_mono_to_bands(SensorConfig config, int bands) {
  if (config.cfa.name != "mono") return config;
  config.cfa = CfaPattern::mono(bands);
  auto& qe = config.qe;
  if (!qe.empty() && qe.size() != static_cast<std::size_t>(bands) &&
      std::all_of(qe.begin(), qe.end(), [&](double v) { return v == qe.front(); })) {
    qe.assign(static_cast<std::size_t>(bands), qe.front());
  }
  return config;
}

RawFrame quantize(const ElectronImage& electrons, const SensorConfig& config) {
  config.validate();
  RawFrame frame;
  frame.width = electrons.width;
  frame.height = electrons.height;
  frame.bit_depth = config.bit_depth;
  frame.cfa = config.cfa;
  frame.exposure_s = electrons.exposure_s;
  frame.sensor_name = config.name;
  frame.pixel_pitch_um = config.pixel_pitch_um;
  frame.dn.resize(electrons.electrons.size());
  for (std::size_t p = 0; p < frame.dn.size(); ++p) {
    frame.dn[p] = quantize_voltage(electrons.electrons[p] * config.conversion_gain_v_per_e,
                                   config.voltage_swing_v, config.bit_depth);
  }
  return frame;
}

namespace {

struct PitchGeometry {
  double pitch_um;
  int width;
  int height;
};

// Array sizes per pixel pitch for the reference die.
constexpr std::array<PitchGeometry, 4> kPresetGeometry{{
    {1.5, 2546, 1188},
    {3.0, 1268, 594},
    {4.5, 950, 446},
    {6.0, 634, 298},
}};

}  // namespace

SensorConfig make_preset(const std::string& name, double pitch_um) {
  SensorConfig c;
  if (name == "mt9v024-mono") {
    c.cfa = CfaPattern::mono(3);
  } else if (name == "mt9v024-rgb") {
    c.cfa = CfaPattern::bayer_rggb();
  } else if (name == "mt9v024-rccc") {
    c.cfa = CfaPattern::rccc();
  } else {
    fail(ErrorCode::kInvalidArgument,
         "unknown preset '" + name + "' (expected mt9v024-mono, mt9v024-rgb or mt9v024-rccc)");
  }
  const auto geo = std::find_if(kPresetGeometry.begin(), kPresetGeometry.end(),
                                [&](const PitchGeometry& g) { return std::abs(g.pitch_um - pitch_um) < 1e-9; });
  if (geo == kPresetGeometry.end()) {
    fail(ErrorCode::kInvalidArgument,
         "preset '" + name + "' has no " + text::format_double(pitch_um) +
             " um variant (expected 1.5, 3, 4.5 or 6)");
  }
  c.name = name;
  c.pixel_pitch_um = geo->pitch_um;
  c.array_width_px = geo->width;
  c.array_height_px = geo->height;
  c.qe = {0.6, 0.6, 0.6};
  // 20 log10(5620 / 10) = 54.995 dB.
  c.well_capacity_e = 5620.0;
  c.read_noise_e = 10.0;
  c.dark_current_e_per_s = 0.0;
  c.conversion_gain_v_per_e = 1.8e-4;
  c.voltage_swing_v = 1.0;
  c.bit_depth = 10;
  c.psf_fwhm_um = 0.0;
  c.dynamic_range_db = 55.0;
  c.die_width_mm = 8.6;
  c.die_height_mm = 3.6;
  c.validate();
  return c;
}

}  // namespace camforge
