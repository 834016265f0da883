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
#include "camforge/camforge.h"

#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include "camforge/config.hpp"
#include "camforge/error.hpp"
#include "camforge/exposure_control.hpp"
#include "camforge/isp_pipeline.hpp"
#include "camforge/orchestrator.hpp"
#include "camforge/raw_io.hpp"
#include "camforge/scene_io.hpp"
#include "camforge/sensor_model.hpp"

struct camforge_config {
  camforge::ExperimentConfig cfg;
  std::string last_output;
};
struct camforge_scene {
  camforge::SceneIrradiance scene;
};
struct camforge_sensor {
  camforge::SensorConfig sensor;
};
struct camforge_frame {
  camforge::RawFrame frame;
};

namespace {

thread_local std::string g_last_error;

int set_error(int status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return CAMFORGE_OK;
  } catch (const camforge::Error& e) {
    return set_error(static_cast<int>(e.code()), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return set_error(CAMFORGE_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(CAMFORGE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(CAMFORGE_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(CAMFORGE_ERR_INTERNAL, "unknown failure");
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) camforge::fail(camforge::ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

void copy_out(const std::string& s, char* buf, size_t cap, size_t* needed) {
  const size_t n = s.size() + 1;
  if (needed != nullptr) *needed = n;
  if (buf == nullptr && cap == 0) return;
  require(buf, "buf");
  if (cap < n) {
    camforge::fail(camforge::ErrorCode::kInvalidArgument,
                   "buffer holds " + std::to_string(cap) + " bytes, " + std::to_string(n) + " needed");
  }
  std::memcpy(buf, s.c_str(), n);
}

}  // namespace

extern "C" {

const char* camforge_version(void) { return camforge::kVersion; }

const char* camforge_status_name(int status) {
  if (status < CAMFORGE_OK || status > CAMFORGE_ERR_INTERNAL) return "unknown";
  return camforge::error_code_name(static_cast<camforge::ErrorCode>(status)).data();
}

const char* camforge_last_error(void) { return g_last_error.c_str(); }

int camforge_config_default(camforge_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new camforge_config{};
  });
}

int camforge_config_load(const char* path, camforge_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new camforge_config{camforge::load_config(path), {}};
  });
}

int camforge_config_parse(const char* text, const char* base_dir, camforge_config** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new camforge_config{camforge::parse_config(text, "<config>", base_dir ? base_dir : ""), {}};
  });
}

int camforge_config_set_seed(camforge_config* cfg, uint64_t seed) {
  return guarded([&] {
    require(cfg, "cfg");
    cfg->cfg.seed = seed;
  });
}

int camforge_config_set_output(camforge_config* cfg, const char* directory) {
  return guarded([&] {
    require(cfg, "cfg");
    require(directory, "directory");
    if (*directory == '\0') camforge::fail(camforge::ErrorCode::kInvalidArgument, "output directory is empty");
    cfg->cfg.output_directory = std::filesystem::path(directory).lexically_normal();
  });
}

int camforge_config_set_manifest(camforge_config* cfg, const char* manifest_path) {
  return guarded([&] {
    require(cfg, "cfg");
    require(manifest_path, "manifest_path");
    cfg->cfg.input_manifest = std::filesystem::path(manifest_path).lexically_normal();
  });
}

int camforge_config_set_kid_block_size(camforge_config* cfg, int block_size) {
  return guarded([&] {
    require(cfg, "cfg");
    if (block_size < 2) camforge::fail(camforge::ErrorCode::kInvalidArgument, "block size must be >= 2");
    cfg->cfg.kid_block_size = block_size;
  });
}

int camforge_config_resolved(const camforge_config* cfg, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(cfg, "cfg");
    copy_out(cfg->cfg.resolved_text(), buf, cap, needed);
  });
}

int camforge_config_last_output(const camforge_config* cfg, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(cfg, "cfg");
    copy_out(cfg->last_output, buf, cap, needed);
  });
}

void camforge_config_free(camforge_config* cfg) { delete cfg; }

int camforge_run_simulate(camforge_config* cfg, int jobs) {
  return guarded([&] {
    require(cfg, "cfg");
    if (jobs < 1) camforge::fail(camforge::ErrorCode::kInvalidArgument, "jobs must be >= 1");
    cfg->last_output = camforge::cmd_simulate(cfg->cfg, jobs);
  });
}

int camforge_run_variants(camforge_config* cfg, int jobs) {
  return guarded([&] {
    require(cfg, "cfg");
    if (jobs < 1) camforge::fail(camforge::ErrorCode::kInvalidArgument, "jobs must be >= 1");
    cfg->last_output = camforge::cmd_variants(cfg->cfg, jobs);
  });
}

int camforge_run_eval(camforge_config* cfg) {
  return guarded([&] {
    require(cfg, "cfg");
    cfg->last_output = camforge::cmd_eval(cfg->cfg);
  });
}

int camforge_run_census(camforge_config* cfg) {
  return guarded([&] {
    require(cfg, "cfg");
    cfg->last_output = camforge::cmd_census(cfg->cfg);
  });
}

int camforge_run_matrix(camforge_config* cfg, const char* cells_csv, double asymmetry_threshold) {
  return guarded([&] {
    require(cfg, "cfg");
    require(cells_csv, "cells_csv");
    cfg->last_output = camforge::cmd_matrix(cfg->cfg, cells_csv, asymmetry_threshold);
  });
}

int camforge_run_kid(camforge_config* cfg, const char* features_a, const char* features_b) {
  return guarded([&] {
    require(cfg, "cfg");
    require(features_a, "features_a");
    require(features_b, "features_b");
    cfg->last_output = camforge::cmd_kid(cfg->cfg, features_a, features_b);
  });
}

int camforge_scene_create(int width, int height, int bands, double pixel_pitch_um, const char* scene_id,
                          camforge_scene** out) {
  return guarded([&] {
    require(out, "out");
    *out = new camforge_scene{
        camforge::SceneIrradiance::zeros(width, height, bands, pixel_pitch_um, scene_id ? scene_id : "")};
  });
}

int camforge_scene_load(const char* path, camforge_scene** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new camforge_scene{camforge::load_scene(path)};
  });
}

int camforge_scene_save(const camforge_scene* scene, const char* path) {
  return guarded([&] {
    require(scene, "scene");
    require(path, "path");
    camforge::save_scene(scene->scene, path);
  });
}

int camforge_scene_dims(const camforge_scene* scene, int* width, int* height, int* bands) {
  return guarded([&] {
    require(scene, "scene");
    if (width) *width = scene->scene.width_px;
    if (height) *height = scene->scene.height_px;
    if (bands) *bands = scene->scene.bands;
  });
}

float* camforge_scene_data(camforge_scene* scene) { return scene ? scene->scene.data.data() : nullptr; }

void camforge_scene_free(camforge_scene* scene) { delete scene; }

int camforge_sensor_preset(const char* name, double pitch_um, camforge_sensor** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    *out = new camforge_sensor{camforge::make_preset(name, pitch_um)};
  });
}

int camforge_sensor_from_config(const camforge_config* cfg, camforge_sensor** out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    cfg->cfg.pipeline.sensor.validate();
    *out = new camforge_sensor{cfg->cfg.pipeline.sensor};
  });
}

int camforge_sensor_set_bit_depth(camforge_sensor* sensor, int bit_depth) {
  return guarded([&] {
    require(sensor, "sensor");
    camforge::SensorConfig next = sensor->sensor;
    next.bit_depth = bit_depth;
    next.validate();
    sensor->sensor = next;
  });
}

int camforge_sensor_dims(const camforge_sensor* sensor, int* width, int* height) {
  return guarded([&] {
    require(sensor, "sensor");
    if (width) *width = sensor->sensor.array_width_px;
    if (height) *height = sensor->sensor.array_height_px;
  });
}

void camforge_sensor_free(camforge_sensor* sensor) { delete sensor; }

int camforge_capture(const camforge_scene* scene, const camforge_sensor* sensor, const char* exposure_kind,
                     uint64_t seed, camforge_frame** out) {
  return guarded([&] {
    require(scene, "scene");
    require(sensor, "sensor");
    require(exposure_kind, "exposure_kind");
    require(out, "out");
    camforge::ExposurePolicy policy;
    policy.kind = camforge::parse_exposure_kind(exposure_kind);
    *out = new camforge_frame{camforge::capture(scene->scene, camforge::fit_mono_to_bands(sensor->sensor, scene->scene.bands), policy, seed)};
  });
}

int camforge_frame_load(const char* path, camforge_frame** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new camforge_frame{camforge::load_raw_frame(path)};
  });
}

int camforge_frame_save(const camforge_frame* frame, const char* base) {
  return guarded([&] {
    require(frame, "frame");
    require(base, "base");
    camforge::save_raw_frame(frame->frame, base);
  });
}

int camforge_frame_dims(const camforge_frame* frame, int* width, int* height, int* bit_depth) {
  return guarded([&] {
    require(frame, "frame");
    if (width) *width = frame->frame.width;
    if (height) *height = frame->frame.height;
    if (bit_depth) *bit_depth = frame->frame.bit_depth;
  });
}

int camforge_frame_exposure(const camforge_frame* frame, double* exposure_s) {
  return guarded([&] {
    require(frame, "frame");
    require(exposure_s, "exposure_s");
    *exposure_s = frame->frame.exposure_s;
  });
}

const uint16_t* camforge_frame_dn(const camforge_frame* frame) { return frame ? frame->frame.dn.data() : nullptr; }

int camforge_frame_census(const camforge_frame* frame, double fraction, int* levels) {
  return guarded([&] {
    require(frame, "frame");
    require(levels, "levels");
    *levels = camforge::dark_level_census(frame->frame, fraction);
  });
}

void camforge_frame_free(camforge_frame* frame) { delete frame; }

int camforge_quantize_voltage(double volts, double voltage_swing_v, int bit_depth, uint16_t* dn) {
  return guarded([&] {
    require(dn, "dn");
    *dn = camforge::quantize_voltage(volts, voltage_swing_v, bit_depth);
  });
}

}  // extern "C"
