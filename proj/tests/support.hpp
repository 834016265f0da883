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
#ifndef CAMFORGE_TESTS_SUPPORT_HPP_
#define CAMFORGE_TESTS_SUPPORT_HPP_

#include <stdlib.h>

#include <algorithm>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "camforge/scene_io.hpp"

namespace camforge::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "camforge-test-XXXXXX").string();
    if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

inline SceneIrradiance constant_scene(int w, int h, int bands, float value, double pitch_um = 3.0,
                                      const std::string& id = "s") {
  SceneIrradiance s = SceneIrradiance::zeros(w, h, bands, pitch_um, id);
  std::fill(s.data.begin(), s.data.end(), value);
  return s;
}

inline SceneIrradiance random_scene(int w, int h, int bands, std::uint64_t seed, double pitch_um = 3.0,
                                    const std::string& id = "s") {
  SceneIrradiance s = SceneIrradiance::zeros(w, h, bands, pitch_um, id);
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<float> u(0.0f, 1000.0f);
  for (auto& v : s.data) v = u(gen);
  return s;
}

inline BoundingBox box(const std::string& cls, double x0, double y0, double x1, double y1,
                       std::optional<double> score = std::nullopt, std::optional<double> dist = std::nullopt) {
  BoundingBox b;
  b.cls = cls;
  b.x_min = x0;
  b.y_min = y0;
  b.x_max = x1;
  b.y_max = y1;
  b.score = score;
  b.distance_m = dist;
  return b;
}

}  // namespace camforge::testing

#endif  // CAMFORGE_TESTS_SUPPORT_HPP_
