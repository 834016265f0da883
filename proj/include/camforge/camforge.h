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
#ifndef CAMFORGE_CAMFORGE_H_
#define CAMFORGE_CAMFORGE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CAMFORGE_BUILDING_LIBRARY)
#    define CAMFORGE_API __declspec(dllexport)
#  else
#    define CAMFORGE_API __declspec(dllimport)
#  endif
#else
#  define CAMFORGE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every function returning int returns one of these. */
enum {
  CAMFORGE_OK = 0,
  CAMFORGE_ERR_INVALID_ARGUMENT = 1,
  CAMFORGE_ERR_IO = 2,
  CAMFORGE_ERR_PARSE = 3,
  CAMFORGE_ERR_DIMENSION_MISMATCH = 4,
  CAMFORGE_ERR_INVALID_DATA = 5,
  CAMFORGE_ERR_UNSUPPORTED = 6,
  CAMFORGE_ERR_INTERNAL = 7
};

typedef struct camforge_config camforge_config;
typedef struct camforge_scene camforge_scene;
typedef struct camforge_sensor camforge_sensor;
typedef struct camforge_frame camforge_frame;

CAMFORGE_API const char* camforge_version(void);

/* Short name of a status code, e.g. "invalid_argument". */
CAMFORGE_API const char* camforge_status_name(int status);

/* Message of the last failed call on this thread; "" after a success. */
CAMFORGE_API const char* camforge_last_error(void);

/* Text outputs use size queries: *needed receives the length including the
 * terminating NUL. Passing buf == NULL and cap == 0 only queries the size. A
 * buffer that is too small yields CAMFORGE_ERR_INVALID_ARGUMENT. */

/* ---- experiment configuration ---- */

CAMFORGE_API int camforge_config_default(camforge_config** out);
CAMFORGE_API int camforge_config_load(const char* path, camforge_config** out);
/* base_dir anchors relative paths; NULL means the working directory. */
CAMFORGE_API int camforge_config_parse(const char* text, const char* base_dir, camforge_config** out);
CAMFORGE_API int camforge_config_set_seed(camforge_config* cfg, uint64_t seed);
CAMFORGE_API int camforge_config_set_output(camforge_config* cfg, const char* directory);
CAMFORGE_API int camforge_config_set_manifest(camforge_config* cfg, const char* manifest_path);
CAMFORGE_API int camforge_config_set_kid_block_size(camforge_config* cfg, int block_size);
CAMFORGE_API int camforge_config_resolved(const camforge_config* cfg, char* buf, size_t cap, size_t* needed);
CAMFORGE_API void camforge_config_free(camforge_config* cfg);

/* ---- subcommands; all outputs go under the configured output directory ---- */

CAMFORGE_API int camforge_run_simulate(camforge_config* cfg, int jobs);
CAMFORGE_API int camforge_run_variants(camforge_config* cfg, int jobs);
CAMFORGE_API int camforge_run_eval(camforge_config* cfg);
CAMFORGE_API int camforge_run_census(camforge_config* cfg);
CAMFORGE_API int camforge_run_matrix(camforge_config* cfg, const char* cells_csv, double asymmetry_threshold);
CAMFORGE_API int camforge_run_kid(camforge_config* cfg, const char* features_a, const char* features_b);
/* Summary text printed by the last successful run on this handle. */
CAMFORGE_API int camforge_config_last_output(const camforge_config* cfg, char* buf, size_t cap, size_t* needed);

/* ---- scenes: planar float irradiance, photons / (s * um^2) ---- */

CAMFORGE_API int camforge_scene_create(int width, int height, int bands, double pixel_pitch_um,
                                       const char* scene_id, camforge_scene** out);
CAMFORGE_API int camforge_scene_load(const char* path, camforge_scene** out);
CAMFORGE_API int camforge_scene_save(const camforge_scene* scene, const char* path);
CAMFORGE_API int camforge_scene_dims(const camforge_scene* scene, int* width, int* height, int* bands);
/* band-major, row-major samples owned by the scene. */
CAMFORGE_API float* camforge_scene_data(camforge_scene* scene);
CAMFORGE_API void camforge_scene_free(camforge_scene* scene);

/* ---- sensors ---- */

CAMFORGE_API int camforge_sensor_preset(const char* name, double pitch_um, camforge_sensor** out);
CAMFORGE_API int camforge_sensor_from_config(const camforge_config* cfg, camforge_sensor** out);
CAMFORGE_API int camforge_sensor_set_bit_depth(camforge_sensor* sensor, int bit_depth);
CAMFORGE_API int camforge_sensor_dims(const camforge_sensor* sensor, int* width, int* height);
CAMFORGE_API void camforge_sensor_free(camforge_sensor* sensor);

/* ---- raw frames ---- */

/* exposure_kind is "global", "center" or "bracketed" with default policy
 * parameters. The scene must already match the sensor array. */
CAMFORGE_API int camforge_capture(const camforge_scene* scene, const camforge_sensor* sensor,
                                  const char* exposure_kind, uint64_t seed, camforge_frame** out);
CAMFORGE_API int camforge_frame_load(const char* path, camforge_frame** out);
/* Writes <base>.raw.png and <base>.raw.meta. */
CAMFORGE_API int camforge_frame_save(const camforge_frame* frame, const char* base);
CAMFORGE_API int camforge_frame_dims(const camforge_frame* frame, int* width, int* height, int* bit_depth);
CAMFORGE_API int camforge_frame_exposure(const camforge_frame* frame, double* exposure_s);
CAMFORGE_API const uint16_t* camforge_frame_dn(const camforge_frame* frame);
CAMFORGE_API int camforge_frame_census(const camforge_frame* frame, double fraction, int* levels);
CAMFORGE_API void camforge_frame_free(camforge_frame* frame);

CAMFORGE_API int camforge_quantize_voltage(double volts, double voltage_swing_v, int bit_depth, uint16_t* dn);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* CAMFORGE_CAMFORGE_H_ */
