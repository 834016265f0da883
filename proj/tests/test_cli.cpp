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
#include <cstdlib>
#include <filesystem>
#include <map>

#include "camforge/scene_io.hpp"
#include "doctest.h"
#include "support.hpp"

namespace camforge {
namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(CAMFORGE_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Relative path -> contents for every regular file except the run log.
std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file() || e.path().filename() == "run.log") continue;
    out[fs::relative(e.path(), root).string()] = testing::slurp(e.path());
  }
  return out;
}

void write_fixture(const fs::path& dir) {
  DatasetManifest m;
  m.name = "cli";
  fs::create_directories(dir / "dets");
  for (int i = 0; i < 6; ++i) {
    const std::string id = "s" + std::to_string(i);
    save_scene(testing::random_scene(64, 40, 3, 50 + i, 3.0, id), dir / id);
    save_labels({id, {testing::box("car", 4, 4, 30, 34, std::nullopt, 10.0 * (i + 1))}}, dir / (id + ".csv"));
    m.entries.push_back({id, id, id + ".csv"});
    save_labels({id, {testing::box("car", 5, 4, 30, 33, 0.9 - 0.1 * i), testing::box("car", 40, 20, 50, 30, 0.35)}},
                dir / "dets" / (id + ".csv"));
  }
  save_manifest(m, dir / "manifest.txt");
  testing::spit(dir / "exp.cfg",
                "input.manifest = manifest.txt\n"
                "sensor.cfa = rggb\n"
                "sensor.bit_depth = 12\n"
                "isp.demosaic = on\n"
                "isp.gamma = adaptive\n"
                "variants.axis = bit_depth\n"
                "variants.values = 8, 12\n"
                "eval.detections = dets\n"
                "eval.distance_bins = 0, 30, 100\n"
                "seed = 11\n");
}

TEST_CASE("cli output is identical across worker counts") {
  testing::TempDir dir;
  write_fixture(dir.path());
  const std::string cfg = "--config " + (dir / "exp.cfg").string();
  for (const std::string cmd : {"simulate", "variants", "eval"}) {
    CHECK(run_cli(cfg + " --jobs 1 --out " + (dir / "j1").string() + " " + cmd, dir / "log1") == 0);
    CHECK(run_cli(cfg + " --jobs 8 --out " + (dir / "j8").string() + " " + cmd, dir / "log8") == 0);
  }
  const auto a = tree(dir / "j1");
  const auto b = tree(dir / "j8");
  CHECK(a.size() > 10);
  CHECK(a == b);
  CHECK(a.count("eval/ap.txt") == 1);
  CHECK(fs::exists(dir / "j1" / "run.log"));
}

TEST_CASE("cli errors name their code") {
  testing::TempDir dir;
  CHECK(run_cli("simulate", dir / "log") == 1);
  CHECK(testing::slurp(dir / "log").find("error: code=invalid_argument") != std::string::npos);
  testing::spit(dir / "bad.cfg", "sensor.nope = 1\n");
  CHECK(run_cli("--config " + (dir / "bad.cfg").string() + " simulate", dir / "log") == 3);
  CHECK(testing::slurp(dir / "log").find("bad.cfg:1") != std::string::npos);
}

}  // namespace
}  // namespace camforge
