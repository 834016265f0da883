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
#include <filesystem>
#include <map>

#include "camforge/orchestrator.hpp"
#include "camforge/text.hpp"
#include "doctest.h"
#include "support.hpp"

namespace camforge {
namespace {

namespace fs = std::filesystem;

std::map<std::string, std::string> key_values(const std::string& contents) {
  std::map<std::string, std::string> out;
  for (const auto& line : text::split(contents, '\n')) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

double fraction_value(const std::string& f) {
  const auto slash = f.find('/');
  return std::stod(f.substr(0, slash)) / std::stod(f.substr(slash + 1));
}

TEST_CASE("eval on the golden corpus matches the rational reference") {
  const fs::path corpus = fs::path(CAMFORGE_TEST_DATA) / "eval_corpus";
  const auto golden = key_values(testing::slurp(corpus / "golden.txt"));
  testing::TempDir dir;
  ExperimentConfig cfg;
  cfg.input_manifest = corpus / "manifest.txt";
  cfg.eval_detections = corpus / "detections";
  cfg.eval_distance_bins = {0, 30, 60, 120};
  cfg.output_directory = dir.path();
  const auto got = key_values(cmd_eval(cfg));

  CHECK(std::abs(std::stod(got.at("ap")) - fraction_value(golden.at("ap"))) <= 1e-12);
  for (const char* k : {"tp", "fp", "fn", "unassignable_detections"}) CHECK(got.at(k) == golden.at(k));

  const auto rows = text::split(testing::slurp(dir / "eval" / "ap_by_distance.csv"), '\n');
  REQUIRE(rows.size() >= 4);
  const std::vector<std::string> bins{"bin_0_30", "bin_30_60", "bin_60_120"};
  for (std::size_t b = 0; b < bins.size(); ++b) {
    const auto want = text::split(golden.at(bins[b]), ',');
    const auto have = text::split(rows[b + 1], ',');
    REQUIRE(have.size() == 5);
    CHECK("gt=" + have[2] == want[1]);
    CHECK("det=" + have[3] == want[2]);
    CHECK(std::abs(std::stod(have[4]) - fraction_value(want[0])) <= 1e-12);
  }
}

}  // namespace
}  // namespace camforge
