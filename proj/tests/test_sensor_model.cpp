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
#include <cmath>
#include <numbers>
#include <random>

#include "camforge/error.hpp"
#include "camforge/sensor_model.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

namespace camforge {
namespace {

// One-band sensor with unit qe, so electrons = irradiance x pitch^2 x t.
SensorConfig unit_sensor(int w, int h, double pitch_um = 1.0) {
  SensorConfig c;
  c.pixel_pitch_um = pitch_um;
  c.array_width_px = w;
  c.array_height_px = h;
  c.cfa = CfaPattern::mono(1);
  c.qe = {1.0};
  c.well_capacity_e = 1e5;
  c.read_noise_e = 10.0;
  return c;
}

double band_sum(const SceneIrradiance& s, int band) {
  double total = 0.0;
  for (int r = 0; r < s.height_px; ++r) {
    for (int c = 0; c < s.width_px; ++c) total += s.at(band, r, c);
  }
  return total;
}

TEST_CASE("psf with zero width is the identity") {
  const SceneIrradiance s = testing::random_scene(9, 7, 2, 1);
  CHECK(apply_psf(s, 0.0) == s);
}

TEST_CASE("psf impulse response matches the dense gaussian sum") {
  SceneIrradiance s = SceneIrradiance::zeros(21, 21, 1, 1.0, "imp");
  s.at(0, 10, 10) = 1.0f;
  const double fwhm = 2.355;
  const SceneIrradiance out = apply_psf(s, fwhm);
  const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
  const int radius = static_cast<int>(std::ceil(4.0 * sigma));
  double norm = 0.0;
  for (int k = -radius; k <= radius; ++k) norm += std::exp(-k * k / (2.0 * sigma * sigma));
  const double dense_center = 1.0 / (norm * norm);
  CHECK(out.at(0, 10, 10) == doctest::Approx(dense_center).epsilon(1e-6));
  CHECK(out.at(0, 10, 10) == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(0.02));
  // Off-centre tap (0, 1) of the separable kernel.
  CHECK(out.at(0, 10, 11) ==
        doctest::Approx(std::exp(-1.0 / (2.0 * sigma * sigma)) / (norm * norm)).epsilon(1e-6));
}

TEST_CASE("psf conserves energy at the borders and keeps constants") {
  const SceneIrradiance s = testing::random_scene(13, 11, 3, 4, 1.5);
  const SceneIrradiance out = apply_psf(s, 3.0);
  for (int b = 0; b < 3; ++b) CHECK(band_sum(out, b) == doctest::Approx(band_sum(s, b)).epsilon(1e-6));
  const SceneIrradiance flat = testing::constant_scene(10, 10, 1, 7.25f, 1.0);
  const SceneIrradiance blurred = apply_psf(flat, 2.0);
  for (float v : blurred.data) CHECK(std::abs(v - 7.25) < 1e-5);
}

TEST_CASE("resampling is an r x r mean") {
  SceneIrradiance s = SceneIrradiance::zeros(2, 2, 1, 1.0, "b");
  s.data = {1, 2, 3, 4};
  SensorConfig c = unit_sensor(0, 0, 2.0);
  const SceneIrradiance out = resample_scene_to_sensor(s, c);
  CHECK(out.width_px == 1);
  CHECK(out.height_px == 1);
  CHECK(out.data[0] == 2.5f);
  CHECK(out.pixel_pitch_um == 2.0);

  const SceneIrradiance same = testing::random_scene(5, 4, 1, 2, 2.0);
  CHECK(resample_scene_to_sensor(same, c).data == same.data);
}

TEST_CASE("resampling conserves photons on random 8x8 scenes") {
  std::mt19937_64 gen(12);
  std::uniform_int_distribution<int> u(0, 5000);
  SceneIrradiance s = SceneIrradiance::zeros(8, 8, 1, 1.0, "p");
  std::vector<long long> ints;
  for (auto& v : s.data) {
    ints.push_back(u(gen));
    v = static_cast<float>(ints.back());
  }
  const SceneIrradiance out = resample_scene_to_sensor(s, unit_sensor(0, 0, 2.0));
  const auto sums = oracle::block_sums(ints, 8, 8, 2);
  long long total_in = 0, total_out = 0;
  for (std::size_t i = 0; i < sums.size(); ++i) {
    CHECK(static_cast<long long>(std::llround(out.data[i] * 4.0)) == sums[i]);
    total_out += std::llround(out.data[i] * 4.0);
  }
  for (auto v : ints) total_in += v;
  CHECK(total_in == total_out);
}

TEST_CASE("non-integer pitch ratio asks for a divisor pitch") {
  const SceneIrradiance s = testing::random_scene(6, 6, 1, 3, 2.0);
  try {
    resample_scene_to_sensor(s, unit_sensor(0, 0, 3.0));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("divides") != std::string::npos);
  }
  CHECK(pitch_ratio(1.5, 4.5) == 3);
}

TEST_CASE("centred sensor window and crop") {
  SensorConfig c = unit_sensor(4, 2);
  const SensorWindow w = sensor_window(10, 7, c);
  CHECK(w.offset_x == 3);
  CHECK(w.offset_y == 2);
  CHECK(w.width == 4);
  CHECK(w.height == 2);
  SceneIrradiance s = SceneIrradiance::zeros(10, 7, 1, 1.0, "c");
  for (std::size_t i = 0; i < s.data.size(); ++i) s.data[i] = static_cast<float>(i);
  const SceneIrradiance cropped = crop_scene(s, w);
  CHECK(cropped.at(0, 0, 0) == s.at(0, 2, 3));
  CHECK(cropped.at(0, 1, 3) == s.at(0, 3, 6));
  CHECK_THROWS_AS(sensor_window(3, 7, c), Error);
}

TEST_CASE("zero light, no noise gives zero electrons") {
  SensorConfig c = unit_sensor(4, 4);
  c.read_noise_e = 0.0;
  const ElectronImage e = expose(SceneIrradiance::zeros(4, 4, 1, 1.0, "z"), c, 0.01, 5);
  for (double v : e.electrons) CHECK(v == 0.0);
  for (auto m : e.saturated_mask) CHECK(m == 0);
}

TEST_CASE("shot and read noise statistics at 1e4 electrons") {
  const int n = 256;
  SensorConfig c = unit_sensor(n, n);
  const ElectronImage e = expose(testing::constant_scene(n, n, 1, 1e4f, 1.0), c, 1.0, 2024);
  double sum = 0.0;
  for (double v : e.electrons) sum += v;
  const double count = static_cast<double>(e.electrons.size());
  const double mean = sum / count;
  double ss = 0.0;
  for (double v : e.electrons) ss += (v - mean) * (v - mean);
  const double var = ss / (count - 1.0);
  const double expected_var = 1e4 + 10.0 * 10.0;
  CHECK(std::abs(mean - 1e4) <= 3.0 * std::sqrt(expected_var / count));
  CHECK(std::abs(var - expected_var) <= 0.05 * expected_var);
}

TEST_CASE("over-exposure clamps at the well and flags saturation") {
  SensorConfig c = unit_sensor(8, 8);
  const ElectronImage e = expose(testing::constant_scene(8, 8, 1, 2e5f, 1.0), c, 1.0, 1);
  for (double v : e.electrons) CHECK(v == c.well_capacity_e);
  for (auto m : e.saturated_mask) CHECK(m == 1);
}

TEST_CASE("noise is a pure function of seed and pixel") {
  SensorConfig c = unit_sensor(16, 16);
  const SceneIrradiance s = testing::random_scene(16, 16, 1, 6, 1.0);
  const ElectronImage a = expose(s, c, 0.5, 77);
  const ElectronImage b = expose(s, c, 0.5, 77);
  const ElectronImage d = expose(s, c, 0.5, 78);
  CHECK(a.electrons == b.electrons);
  CHECK(a.electrons != d.electrons);
}

TEST_CASE("noise-free exposure is linear until the clamp") {
  SensorConfig c = unit_sensor(8, 8).noise_free();
  const SceneIrradiance s = testing::random_scene(8, 8, 1, 7, 1.0);
  const ElectronImage a = expose(s, c, 1.0, 0);
  const ElectronImage b = expose(s, c, 2.0, 0);
  for (std::size_t i = 0; i < a.electrons.size(); ++i) CHECK(b.electrons[i] == 2.0 * a.electrons[i]);
}

TEST_CASE("quantizer endpoints and midpoint") {
  CHECK(quantize_voltage(0.0, 1.0, 10) == 0);
  CHECK(quantize_voltage(1.0, 1.0, 10) == 1023);
  CHECK(quantize_voltage(2.0, 1.0, 8) == 255);
  CHECK(quantize_voltage(-0.5, 1.0, 8) == 0);
  CHECK(quantize_voltage(0.5, 1.0, 8) == 128);
  CHECK(quantize_voltage(0.5, 2.0, 8) == 64);
}

TEST_CASE("quantizer is monotone and nests across bit depths") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(-0.1, 1.2);
  for (int i = 0; i < 100000; ++i) {
    const double v1 = u(gen), v2 = u(gen);
    const double lo = std::min(v1, v2), hi = std::max(v1, v2);
    REQUIRE(quantize_voltage(lo, 1.0, 10) <= quantize_voltage(hi, 1.0, 10));
    REQUIRE(quantize_voltage(v1, 1.0, 10) / 4 == quantize_voltage(v1, 1.0, 8));
    REQUIRE(quantize_voltage(v1, 1.0, 16) / 64 == quantize_voltage(v1, 1.0, 10));
    REQUIRE(quantize_voltage(v1, 1.0, 12) / 16 == quantize_voltage(v1, 1.0, 8));
  }
}

TEST_CASE("quantize applies conversion gain and records metadata") {
  SensorConfig c = unit_sensor(2, 1);
  c.conversion_gain_v_per_e = 1e-4;
  c.well_capacity_e = 1e4;
  c.bit_depth = 8;
  ElectronImage e;
  e.width = 2;
  e.height = 1;
  e.electrons = {5000.0, 1e4};
  e.exposure_s = 0.004;
  const RawFrame f = quantize(e, c);
  CHECK(f.dn == std::vector<std::uint16_t>{128, 255});
  CHECK(f.exposure_s == 0.004);
  CHECK(f.bit_depth == 8);
}

TEST_CASE("presets carry the published array sizes and a 55 dB range") {
  struct Dims {
    double pitch;
    int w, h;
  };
  for (const Dims& d : {Dims{1.5, 2546, 1188}, Dims{3.0, 1268, 594}, Dims{4.5, 950, 446}, Dims{6.0, 634, 298}}) {
    for (const char* name : {"mt9v024-mono", "mt9v024-rgb", "mt9v024-rccc"}) {
      const SensorConfig c = make_preset(name, d.pitch);
      CHECK(c.array_width_px == d.w);
      CHECK(c.array_height_px == d.h);
      CHECK(std::abs(20.0 * std::log10(c.well_capacity_e / c.read_noise_e) - 55.0) <= 0.1);
    }
  }
  const SensorConfig rgb = make_preset("mt9v024-rgb", 3.0);
  CHECK(rgb.cfa.tile_width == 2);
  CHECK(rgb.cfa.filter_classes[rgb.cfa.class_at(0, 0)].name == "R");
  CHECK(rgb.cfa.filter_classes[rgb.cfa.class_at(0, 1)].name == "G");
  CHECK(rgb.cfa.filter_classes[rgb.cfa.class_at(1, 0)].name == "G");
  CHECK(rgb.cfa.filter_classes[rgb.cfa.class_at(1, 1)].name == "B");
  const SensorConfig mono = make_preset("mt9v024-mono", 3.0);
  CHECK(mono.cfa.tile_width == 1);
  CHECK(mono.cfa.tile_height == 1);
  CHECK(mono.cfa.filter_classes.size() == 1);
  const SensorConfig rccc = make_preset("mt9v024-rccc", 6.0);
  CHECK(rccc.cfa.filter_classes[rccc.cfa.class_at(0, 0)].name == "R");
  CHECK(rccc.cfa.filter_classes[rccc.cfa.class_at(1, 1)].name == "C");
  CHECK_THROWS_AS(make_preset("mt9v034-mono", 3.0), Error);
  CHECK_THROWS_AS(make_preset("mt9v024-mono", 2.0), Error);
}

TEST_CASE("expose rejects mismatched scenes") {
  SensorConfig c = unit_sensor(4, 4);
  CHECK_THROWS_AS(expose(SceneIrradiance::zeros(4, 3, 1, 1.0, "x"), c, 0.01, 0), Error);
  CHECK_THROWS_AS(expose(SceneIrradiance::zeros(4, 4, 1, 2.0, "x"), c, 0.01, 0), Error);
  CHECK_THROWS_AS(expose(SceneIrradiance::zeros(4, 4, 1, 1.0, "x"), c, 0.0, 0), Error);
}

}  // namespace
}  // namespace camforge
