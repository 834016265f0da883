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
// Command-line front end. Talks to the library only through camforge.h.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "camforge/camforge.h"

namespace {

struct Globals {
  std::string config;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int report(int status) {
  if (status != CAMFORGE_OK) {
    std::fprintf(stderr, "error: code=%s message=%s\n", camforge_status_name(status), camforge_last_error());
  }
  return status;
}

// Owns a config handle for the duration of one command.
class Session {
 public:
  ~Session() { camforge_config_free(cfg_); }

  int open(const Globals& g, const std::string& manifest) {
    int rc = g.config.empty() ? camforge_config_default(&cfg_) : camforge_config_load(g.config.c_str(), &cfg_);
    if (rc == CAMFORGE_OK && g.seed) rc = camforge_config_set_seed(cfg_, *g.seed);
    if (rc == CAMFORGE_OK && !g.out.empty()) rc = camforge_config_set_output(cfg_, g.out.c_str());
    if (rc == CAMFORGE_OK && !manifest.empty()) rc = camforge_config_set_manifest(cfg_, manifest.c_str());
    return rc;
  }

  int print_output() const {
    std::size_t needed = 0;
    int rc = camforge_config_last_output(cfg_, nullptr, 0, &needed);
    if (rc != CAMFORGE_OK) return rc;
    std::string text(needed, '\0');
    rc = camforge_config_last_output(cfg_, text.data(), text.size(), &needed);
    if (rc != CAMFORGE_OK) return rc;
    text.resize(needed - 1);
    std::fputs(text.c_str(), stdout);
    if (!text.empty() && text.back() != '\n') std::fputc('\n', stdout);
    return CAMFORGE_OK;
  }

  camforge_config* get() const { return cfg_; }

 private:
  camforge_config* cfg_ = nullptr;
};

template <typename Fn>
int run(const Globals& g, const std::string& manifest, Fn&& fn) {
  Session s;
  int rc = s.open(g, manifest);
  if (rc == CAMFORGE_OK) rc = fn(s.get());
  if (rc == CAMFORGE_OK) rc = s.print_output();
  return report(rc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"camforge: camera-variant dataset simulation and evaluation"};
  app.set_version_flag("--version", std::string("camforge ") + camforge_version());
  app.require_subcommand(1);

  Globals g;
  app.add_option("--config", g.config, "Experiment config file (flat key=value)");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Seed override");
  app.add_option("--out", g.out, "Output directory override");

  std::string manifest;
  auto* simulate = app.add_subcommand("simulate", "Capture and process every scene of input.manifest");
  auto* variants = app.add_subcommand("variants", "Render one dataset per value of variants.axis");
  auto* eval = app.add_subcommand("eval", "Score eval.detections against the manifest labels");
  eval->add_option("--manifest", manifest, "Manifest override");
  auto* census = app.add_subcommand("census", "Count distinct dark levels in each raw frame of a manifest");
  census->add_option("--manifest", manifest, "Manifest override");

  std::string cells;
  double gap = 0.05;
  auto* matrix = app.add_subcommand("matrix", "Render a train/eval AP matrix and report asymmetries");
  matrix->add_option("cells", cells, "CSV with train,eval,ap,count columns")->required();
  matrix->add_option("--gap-threshold", gap, "Smallest reported asymmetry")->check(CLI::NonNegativeNumber);

  std::string features_a, features_b;
  std::optional<int> block_size;
  auto* kid = app.add_subcommand("kid", "Kernel distance between two feature CSVs");
  kid->add_option("features_a", features_a, "First feature CSV")->required();
  kid->add_option("features_b", features_b, "Second feature CSV")->required();
  kid->add_option("--block-size", block_size, "Vectors per block")->check(CLI::Range(2, 1 << 30));

  for (auto* sub : {simulate, variants, eval, census, matrix, kid}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::fprintf(stderr, "error: code=invalid_argument message=%s\n", e.what());
    return CAMFORGE_ERR_INVALID_ARGUMENT;
  }

  if (*simulate) return run(g, "", [&](camforge_config* c) { return camforge_run_simulate(c, g.jobs); });
  if (*variants) return run(g, "", [&](camforge_config* c) { return camforge_run_variants(c, g.jobs); });
  if (*eval) return run(g, manifest, [](camforge_config* c) { return camforge_run_eval(c); });
  if (*census) return run(g, manifest, [](camforge_config* c) { return camforge_run_census(c); });
  if (*matrix) return run(g, "", [&](camforge_config* c) { return camforge_run_matrix(c, cells.c_str(), gap); });
  return run(g, "", [&](camforge_config* c) {
    int rc = block_size ? camforge_config_set_kid_block_size(c, *block_size) : CAMFORGE_OK;
    return rc == CAMFORGE_OK ? camforge_run_kid(c, features_a.c_str(), features_b.c_str()) : rc;
  });
}
