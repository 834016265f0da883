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

#include "camforge/error.hpp"
#include "camforge/exposure_control.hpp"
#include "doctest.h"
#include "support.hpp"

namespace camforge {
namespace {

SensorConfig metering_sensor(int w, int h) {
  SensorConfig c;
  c.pixel_pitch_um = 1.0;
  c.array_width_px = w;
  c.array_height_px = h;
  c.cfa = CfaPattern::mono(1);
  c.qe = {1.0};
  c.well_capacity_e = 5620.0;
  c.read_noise_e = 10.0;
  c.conversion_gain_v_per_e = 1.8e-4;
  return c;
}

ExposurePolicy policy(ExposureKind kind) {
  ExposurePolicy p;
  p.kind = kind;
  return p;
}

TEST_CASE("default policy matches the documented camera settings") {
  const ExposurePolicy p;
  CHECK(p.target_fraction == 0.9);
  CHECK(p.max_duration_s == 0.016);
  CHECK(p.bracket_durations_s == std::vector<double>{0.002, 0.004, 0.008});
  CHECK(p.metering_percentile == 99.9);
}

TEST_CASE("uniform scene meters to the formula inversion") {
  const SensorConfig c = metering_sensor(12, 12);
  const float irradiance = static_cast<float>(0.9 / (0.008 * 1.8e-4));
  const SceneIrradiance s = testing::constant_scene(12, 12, 1, irradiance, 1.0);
  const double expected = 0.9 / (static_cast<double>(irradiance) * 1.8e-4);
  CHECK(meter(s, c, policy(ExposureKind::kGlobal)) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(meter(s, c, policy(ExposureKind::kGlobal)) == doctest::Approx(0.008).epsilon(1e-6));
  CHECK(meter(s, c, policy(ExposureKind::kCenterWeighted)) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("dark scenes hit the 16 ms cap exactly") {
  const SensorConfig c = metering_sensor(8, 8);
  CHECK(meter(testing::constant_scene(8, 8, 1, 1e-3f, 1.0), c, policy(ExposureKind::kGlobal)) == 0.016);
  CHECK(meter(SceneIrradiance::zeros(8, 8, 1, 1.0, "z"), c, policy(ExposureKind::kCenterWeighted)) == 0.016);
}

TEST_CASE("a bright corner outside the window only shortens global metering") {
  const SensorConfig c = metering_sensor(30, 30);
  SceneIrradiance s = testing::constant_scene(30, 30, 1, 1000.0f, 1.0);
  for (int r = 0; r < 10; ++r) {
    for (int col = 0; col < 10; ++col) s.at(0, r, col) = 1e6f;
  }
  const double cw = meter(s, c, policy(ExposureKind::kCenterWeighted));
  const double global = meter(s, c, policy(ExposureKind::kGlobal));
  CHECK(cw >= global);
  CHECK(global < cw);

  SceneIrradiance changed = s;
  for (int col = 0; col < 30; ++col) changed.at(0, 0, col) = 5e5f;
  CHECK(meter(changed, c, policy(ExposureKind::kCenterWeighted)) == cw);
}

TEST_CASE("metered exposure scales as 1/k below the cap") {
  const SensorConfig c = metering_sensor(10, 10);
  SceneIrradiance s = testing::random_scene(10, 10, 1, 3, 1.0);
  for (auto& v : s.data) v = 1e5f + 1e3f * v;
  const double base = meter(s, c, policy(ExposureKind::kGlobal));
  SceneIrradiance bright = s;
  for (auto& v : bright.data) v *= 4.0f;
  CHECK(base < 0.016);
  CHECK(meter(bright, c, policy(ExposureKind::kGlobal)) == doctest::Approx(base / 4.0).epsilon(1e-12));
}

TEST_CASE("window pixels use pixel centres") {
  const PixelRect r = window_pixels(NormalizedWindow{}, 1268, 594);
  CHECK(r.col_begin == 423);
  CHECK(r.col_end == 845);
  CHECK(r.row_begin == 297);
  CHECK(r.row_end == 495);
  CHECK_THROWS_AS(window_pixels({0.5, 0.5, 0.5, 0.5}, 4, 4), Error);
}

TEST_CASE("nearest-rank percentile") {
  CHECK(nearest_rank_percentile({5, 1, 3, 2, 4}, 100) == 5);
  CHECK(nearest_rank_percentile({5, 1, 3, 2, 4}, 50) == 3);
  CHECK(nearest_rank_percentile({5, 1, 3, 2, 4}, 1) == 1);
}

TEST_CASE("center-weighted capture lands at 90 percent of full scale") {
  for (int bits : {8, 10, 12}) {
    SensorConfig c = metering_sensor(16, 16).noise_free();
    c.bit_depth = bits;
    const RawFrame f = capture(testing::constant_scene(16, 16, 1, 1e6f, 1.0), c,
                               policy(ExposureKind::kCenterWeighted), 9);
    const int target = static_cast<int>(std::floor(0.9 * std::ldexp(1.0, bits)));
    for (auto dn : f.dn) CHECK(std::abs(static_cast<int>(dn) - target) <= 1);
  }
}

TEST_CASE("bracketing always uses its three fixed durations") {
  const SensorConfig c = metering_sensor(8, 8);
  for (float level : {0.0f, 10.0f, 1e7f}) {
    const RawFrame f = capture(testing::constant_scene(8, 8, 1, level, 1.0), c, policy(ExposureKind::kBracketed), 4);
    CHECK(f.bracket_exposures_s == std::vector<double>{0.002, 0.004, 0.008});
    CHECK(f.exposure_s == 0.008);
  }
}

TEST_CASE("zero scene gives a zero frame under every policy") {
  const SensorConfig c = metering_sensor(6, 6).noise_free();
  for (auto kind : {ExposureKind::kGlobal, ExposureKind::kCenterWeighted, ExposureKind::kBracketed}) {
    const RawFrame f = capture(SceneIrradiance::zeros(6, 6, 1, 1.0, "z"), c, policy(kind), 1);
    for (auto dn : f.dn) CHECK(dn == 0);
  }
}

RawFrame frame_with(std::vector<std::uint16_t> dn, double t) {
  RawFrame f;
  f.width = static_cast<int>(dn.size());
  f.height = 1;
  f.bit_depth = 10;
  f.dn = std::move(dn);
  f.exposure_s = t;
  return f;
}

TEST_CASE("hdr combine rules") {
  SensorConfig c = metering_sensor(3, 1);
  // Pixel 0 clear in all frames, pixel 1 clipped at 4 and 8 ms, pixel 2 all clipped.
  const std::vector<RawFrame> frames{frame_with({100, 300, 1023}, 0.002), frame_with({200, 1023, 1023}, 0.004),
                                     frame_with({400, 1023, 1023}, 0.008)};
  const RawFrame out = hdr_combine(frames, c);
  CHECK(out.dn[0] == 400);
  CHECK(out.dn[1] == 1023);  // 300 x 4 clamps
  CHECK(out.dn[2] == 1023);

  const std::vector<RawFrame> mid{frame_with({50}, 0.002), frame_with({1010}, 0.004), frame_with({1023}, 0.008)};
  CHECK(hdr_combine(mid, metering_sensor(1, 1)).dn[0] == 200);

  const std::vector<RawFrame> zeros{frame_with({0, 0}, 0.002), frame_with({0, 0}, 0.004), frame_with({0, 0}, 0.008)};
  CHECK(hdr_combine(zeros, metering_sensor(2, 1)).dn == std::vector<std::uint16_t>{0, 0});

  const std::vector<RawFrame> bad{frame_with({0}, 0.004), frame_with({0}, 0.002)};
  CHECK_THROWS_AS(hdr_combine(bad, metering_sensor(1, 1)), Error);
}

TEST_CASE("noise-free bracketing reproduces the longest frame within 1 dn") {
  SensorConfig c = metering_sensor(32, 8).noise_free();
  SceneIrradiance s = testing::random_scene(32, 8, 1, 8, 1.0);
  for (auto& v : s.data) v *= 400.0f;  // keeps 8 ms below full scale
  const RawFrame fused = capture(s, c, policy(ExposureKind::kBracketed), 3);
  const RawFrame longest = quantize(expose(s, c, 0.008, 5), c);
  for (std::size_t p = 0; p < fused.dn.size(); ++p) {
    REQUIRE(longest.dn[p] < 0.98 * 1023);
    CHECK(std::abs(static_cast<int>(fused.dn[p]) - static_cast<int>(longest.dn[p])) <= 1);
  }
}

}  // namespace
}  // namespace camforge
