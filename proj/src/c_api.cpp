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

#include "harvestnav/harvestnav.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>

#include "harvestnav/error.hpp"
#include "harvestnav/image.hpp"
#include "harvestnav/params.hpp"
#include "harvestnav/perception.hpp"
#include "harvestnav/segmentation.hpp"
#include "harvestnav/simulator.hpp"
#include "harvestnav/tuner_service.hpp"

struct hn_params {
    harvestnav::Params value;
};
struct hn_image {
    harvestnav::RgbImage value;
};
struct hn_mask {
    harvestnav::BinaryMask value;
};
struct hn_service {
    std::shared_ptr<harvestnav::TunerSession> session;
    std::unique_ptr<harvestnav::TunerService> server;
};

namespace {

thread_local std::string g_last_error;

hn_status fail(hn_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

hn_status status_of(harvestnav::ErrorCode code) {
    using harvestnav::ErrorCode;
    switch (code) {
        case ErrorCode::InvalidArgument: return HN_ERR_INVALID_ARGUMENT;
        case ErrorCode::FileNotFound: return HN_ERR_FILE_NOT_FOUND;
        case ErrorCode::MalformedHeader: return HN_ERR_MALFORMED_HEADER;
        case ErrorCode::DimensionOverflow: return HN_ERR_DIMENSION_OVERFLOW;
        case ErrorCode::UnsupportedFormat: return HN_ERR_UNSUPPORTED_FORMAT;
        case ErrorCode::DimensionMismatch: return HN_ERR_DIMENSION_MISMATCH;
        case ErrorCode::Io: return HN_ERR_IO;
        case ErrorCode::Validation: return HN_ERR_VALIDATION;
        case ErrorCode::OutOfBounds: return HN_ERR_OUT_OF_BOUNDS;
    }
    return HN_ERR_INTERNAL;
}

// Runs body, translating exceptions into status codes.
template <typename F>
hn_status guarded(F&& body) {
    try {
        return body();
    } catch (const harvestnav::Error& e) {
        return fail(status_of(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(HN_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(HN_ERR_INTERNAL, e.what());
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

hn_status validated(const harvestnav::Params& p) {
    const auto errors = harvestnav::validate(p);
    if (errors.empty()) return HN_OK;
    return fail(HN_ERR_VALIDATION, errors.front().key + ": " + errors.front().message);
}

#define HN_REQUIRE(cond, what)                                                 \
    do {                                                                       \
        if (!(cond)) return fail(HN_ERR_INVALID_ARGUMENT, what " is required"); \
    } while (0)

}  // namespace

extern "C" {

const char* hn_last_error(void) { return g_last_error.c_str(); }

const char* hn_status_name(hn_status status) {
    switch (status) {
        case HN_OK: return "ok";
        case HN_ERR_INVALID_ARGUMENT: return "invalid argument";
        case HN_ERR_FILE_NOT_FOUND: return "file not found";
        case HN_ERR_MALFORMED_HEADER: return "malformed header";
        case HN_ERR_DIMENSION_OVERFLOW: return "dimension overflow";
        case HN_ERR_UNSUPPORTED_FORMAT: return "unsupported format";
        case HN_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
        case HN_ERR_IO: return "i/o error";
        case HN_ERR_VALIDATION: return "validation error";
        case HN_ERR_OUT_OF_BOUNDS: return "out of bounds";
        case HN_ERR_BIND: return "bind failure";
        case HN_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

void hn_string_free(char* s) { std::free(s); }

hn_status hn_params_create_default(hn_params** out) {
    HN_REQUIRE(out, "output handle");
    return guarded([&] {
        *out = new hn_params{};
        return HN_OK;
    });
}

hn_status hn_params_load(const char* path, hn_params** out) {
    HN_REQUIRE(path && out, "path and output handle");
    return guarded([&] {
        *out = new hn_params{harvestnav::load_params_file(path)};
        return HN_OK;
    });
}

hn_status hn_params_set(hn_params* params, const char* key, const char* value) {
    HN_REQUIRE(params && key && value, "params, key and value");
    return guarded([&] {
        harvestnav::set_param(params->value, key, value);
        return HN_OK;
    });
}

hn_status hn_params_validate(const hn_params* params) {
    HN_REQUIRE(params, "params");
    return guarded([&] { return validated(params->value); });
}

hn_status hn_params_to_json(const hn_params* params, char** out_json) {
    HN_REQUIRE(params && out_json, "params and output string");
    return guarded([&] {
        *out_json = dup_string(harvestnav::to_json(params->value).dump(2));
        return HN_OK;
    });
}

void hn_params_destroy(hn_params* params) { delete params; }

hn_status hn_image_load(const char* path, hn_image** out) {
    HN_REQUIRE(path && out, "path and output handle");
    return guarded([&] {
        *out = new hn_image{harvestnav::load_image(path)};
        return HN_OK;
    });
}

hn_status hn_image_save(const hn_image* image, const char* path) {
    HN_REQUIRE(image && path, "image and path");
    return guarded([&] {
        harvestnav::save_image(image->value, path);
        return HN_OK;
    });
}

int hn_image_width(const hn_image* image) { return image ? image->value.width() : 0; }
int hn_image_height(const hn_image* image) { return image ? image->value.height() : 0; }
void hn_image_destroy(hn_image* image) { delete image; }

hn_status hn_segment(const hn_image* image, const hn_params* params, hn_mask** out) {
    HN_REQUIRE(image && params && out, "image, params and output handle");
    return guarded([&] {
        if (hn_status s = validated(params->value); s != HN_OK) return s;
        *out = new hn_mask{harvestnav::segment_image(image->value, params->value.segmentation)};
        return HN_OK;
    });
}

double hn_mask_fraction(const hn_mask* mask) { return mask ? mask->value.fraction() : 0.0; }

hn_status hn_mask_save(const hn_mask* mask, const char* path) {
    HN_REQUIRE(mask && path, "mask and path");
    return guarded([&] {
        harvestnav::save_image(harvestnav::mask_to_image(mask->value), path);
        return HN_OK;
    });
}

hn_status hn_overlay_save(const hn_image* image, const hn_mask* mask, const char* path) {
    HN_REQUIRE(image && mask && path, "image, mask and path");
    return guarded([&] {
        harvestnav::save_mask_overlay(image->value, mask->value, path);
        return HN_OK;
    });
}

void hn_mask_destroy(hn_mask* mask) { delete mask; }

hn_status hn_analyze(const hn_image* image, const hn_params* params, hn_frame_result* out,
                     hn_mask** stalk_mask_out) {
    HN_REQUIRE(image && params && out, "image, params and result");
    return guarded([&] {
        if (hn_status s = validated(params->value); s != HN_OK) return s;
        const harvestnav::Params& p = params->value;
        harvestnav::FrameAnalysis a =
            harvestnav::analyze_frame_detailed(image->value, p.segmentation, p.detection, p.eof);
        out->crop_fraction = a.frame.crop_fraction;
        out->segmented_fraction = a.segmentation.fraction();
        out->segments_count = a.frame.segments_count;
        out->has_centroid = a.frame.centroid ? 1 : 0;
        out->centroid_col = a.frame.centroid ? a.frame.centroid->col : 0;
        out->centroid_row = a.frame.centroid ? a.frame.centroid->row : 0;
        out->end_of_field = a.frame.end_of_field ? 1 : 0;
        if (stalk_mask_out) *stalk_mask_out = new hn_mask{std::move(a.stalk_mask)};
        return HN_OK;
    });
}

hn_status hn_simulate(const char* preset, int cols, int rows, uint64_t seed,
                      const hn_params* params, const char* frames_dir, char** report_json,
                      int* reached_done) {
    HN_REQUIRE(preset && params && report_json, "preset, params and report output");
    return guarded([&] {
        const auto which = harvestnav::parse_preset(preset);
        if (!which) {
            return fail(HN_ERR_INVALID_ARGUMENT,
                        std::string("unknown preset '") + preset +
                            "' (expected single_field, two_fields_with_gap or weedy_corner)");
        }
        if (cols < 1 || rows < 1) return fail(HN_ERR_INVALID_ARGUMENT, "cols and rows must be >= 1");
        if (hn_status s = validated(params->value); s != HN_OK) return s;

        const harvestnav::Params& p = params->value;
        const harvestnav::FieldWorld world =
            harvestnav::make_world(*which, cols, rows, seed, harvestnav::to_world_options(p));
        const harvestnav::MissionConfig config = harvestnav::to_mission_config(p);
        harvestnav::FrameSink sink;
        std::filesystem::path dir;
        if (frames_dir) {
            dir = frames_dir;
            std::filesystem::create_directories(dir);
            sink = [&dir](int step, const harvestnav::RgbImage& frame) {
                char name[32];
                std::snprintf(name, sizeof name, "frame_%06d.ppm", step);
                harvestnav::save_image(frame, dir / name);
            };
        }
        const harvestnav::MissionReport report = harvestnav::run_mission(
            world, harvestnav::default_start_pose(world, config.vehicle), config, p.max_steps, sink);
        *report_json = dup_string(report.to_json());
        if (reached_done) *reached_done = report.reached_done ? 1 : 0;
        return HN_OK;
    });
}

hn_status hn_service_create(const char* params_path, const hn_params* params, hn_service** out) {
    HN_REQUIRE(params_path && out, "params path and output handle");
    return guarded([&] {
        auto service = std::make_unique<hn_service>();
        if (params) {
            if (hn_status s = validated(params->value); s != HN_OK) return s;
            service->session = std::make_shared<harvestnav::TunerSession>(params_path, params->value);
        } else {
            service->session = std::make_shared<harvestnav::TunerSession>(params_path);
        }
        service->server = std::make_unique<harvestnav::TunerService>(service->session);
        *out = service.release();
        return HN_OK;
    });
}

hn_status hn_service_bind(hn_service* service, const char* host, int port, int* port_out) {
    HN_REQUIRE(service && host, "service and host");
    if (port < 0 || port > 65535) return fail(HN_ERR_INVALID_ARGUMENT, "port out of range");
    return guarded([&] {
        if (!service->server->bind(host, port)) {
            return fail(HN_ERR_BIND, std::string("cannot bind ") + host + ":" + std::to_string(port));
        }
        if (port_out) *port_out = service->server->port();
        return HN_OK;
    });
}

hn_status hn_service_listen(hn_service* service) {
    HN_REQUIRE(service, "service");
    return guarded([&] {
        if (!service->server->listen()) return fail(HN_ERR_BIND, "server stopped with an error");
        return HN_OK;
    });
}

void hn_service_stop(hn_service* service) {
    if (service) service->server->stop();
}

void hn_service_destroy(hn_service* service) { delete service; }

}  // extern "C"
