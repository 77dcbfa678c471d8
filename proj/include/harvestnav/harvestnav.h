// Copyright 2026 The HarvestNav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the harvestnav toolkit. All objects are opaque handles
 * owned by the caller and released with the matching *_destroy call.
 * Functions returning hn_status leave a message for hn_last_error() on
 * failure; the message is per-thread and valid until the next failing call. */

#ifndef HARVESTNAV_H_
#define HARVESTNAV_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HN_API __declspec(dllexport)
#else
#define HN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hn_status {
    HN_OK = 0,
    HN_ERR_INVALID_ARGUMENT = 1,
    HN_ERR_FILE_NOT_FOUND = 2,
    HN_ERR_MALFORMED_HEADER = 3,
    HN_ERR_DIMENSION_OVERFLOW = 4,
    HN_ERR_UNSUPPORTED_FORMAT = 5,
    HN_ERR_DIMENSION_MISMATCH = 6,
    HN_ERR_IO = 7,
    HN_ERR_VALIDATION = 8,
    HN_ERR_OUT_OF_BOUNDS = 9,
    HN_ERR_BIND = 10,
    HN_ERR_INTERNAL = 11
} hn_status;

typedef struct hn_params hn_params;
typedef struct hn_image hn_image;
typedef struct hn_mask hn_mask;
typedef struct hn_service hn_service;

typedef struct hn_frame_result {
    double crop_fraction;      /* of the stalk mask */
    double segmented_fraction; /* of the color mask */
    size_t segments_count;
    int has_centroid;
    int centroid_col;
    int centroid_row;
    int end_of_field;
} hn_frame_result;

HN_API const char* hn_last_error(void);
HN_API const char* hn_status_name(hn_status status);
HN_API void hn_string_free(char* s);

/* Parameters */
HN_API hn_status hn_params_create_default(hn_params** out);
/* JSON object or "key = value" lines; diagnostics carry file:line. */
HN_API hn_status hn_params_load(const char* path, hn_params** out);
HN_API hn_status hn_params_set(hn_params* params, const char* key, const char* value);
HN_API hn_status hn_params_validate(const hn_params* params);
HN_API hn_status hn_params_to_json(const hn_params* params, char** out_json);
HN_API void hn_params_destroy(hn_params* params);

/* Images: PPM (P3/P6) or PNG by content on load, by extension on save. */
HN_API hn_status hn_image_load(const char* path, hn_image** out);
HN_API hn_status hn_image_save(const hn_image* image, const char* path);
HN_API int hn_image_width(const hn_image* image);
HN_API int hn_image_height(const hn_image* image);
HN_API void hn_image_destroy(hn_image* image);

/* Pipeline */
HN_API hn_status hn_segment(const hn_image* image, const hn_params* params, hn_mask** out);
HN_API double hn_mask_fraction(const hn_mask* mask);
HN_API hn_status hn_mask_save(const hn_mask* mask, const char* path);
HN_API hn_status hn_overlay_save(const hn_image* image, const hn_mask* mask, const char* path);
HN_API void hn_mask_destroy(hn_mask* mask);

/* Full per-frame analysis. stalk_mask_out may be NULL. */
HN_API hn_status hn_analyze(const hn_image* image, const hn_params* params, hn_frame_result* out,
                            hn_mask** stalk_mask_out);

/* Closed-loop mission over a preset world, up to the params' max_steps.
 * frames_dir may be NULL; otherwise one frame_NNNNNN.ppm per step is written.
 * The report is written even when the mission times out. */
HN_API hn_status hn_simulate(const char* preset, int cols, int rows, uint64_t seed,
                             const hn_params* params, const char* frames_dir,
                             char** report_json, int* reached_done);

/* Tuning HTTP service. params may be NULL to read params_path (if present). */
HN_API hn_status hn_service_create(const char* params_path, const hn_params* params,
                                   hn_service** out);
/* Binds host:port (port 0 picks one) and returns the bound port via port_out. */
HN_API hn_status hn_service_bind(hn_service* service, const char* host, int port, int* port_out);
/* Blocks until hn_service_stop is called from another thread. */
HN_API hn_status hn_service_listen(hn_service* service);
HN_API void hn_service_stop(hn_service* service);
HN_API void hn_service_destroy(hn_service* service);

#ifdef __cplusplus
}
#endif

#endif /* HARVESTNAV_H_ */
