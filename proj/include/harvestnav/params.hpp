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

#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "harvestnav/geometry.hpp"
#include "harvestnav/navigation.hpp"
#include "harvestnav/perception.hpp"
#include "harvestnav/segmentation.hpp"
#include "harvestnav/simulator.hpp"
#include "harvestnav/stalk_detection.hpp"

namespace harvestnav {

/// Every tunable key of the toolkit, flattened into one document. The
/// segmentation and detection values are starting points for a yellow crop
/// and are expected to be re-tuned in the field as the light changes.
struct Params {
    SegmentationParams segmentation;
    DetectionParams detection;
    EofParams eof;
    NavParams nav;

    double focal_px = 440.0;
    int image_width = 320;
    int image_height = 240;
    double mount_height_m = 0.5;
    double pitch_deg = 0.0;
    double max_range_m = 2.0;
    double near_clip_m = 0.3;

    double gps_noise_sigma_m = 0.5;
    int gps_period_steps = 10;
    std::optional<std::array<Point2, 4>> fence_corners;

    double wheelbase_m = 0.5;
    double max_speed_mps = 1.0;
    double max_steer_deg = 45.0;
    double dt_s = 0.1;
    double cutter_width_m = 1.0;
    double cutter_depth_m = 0.5;

    double cell_size_m = 0.5;
    int gap_width_cells = 3;
    double brightness = 1.0;
    int max_steps = 20000;
};

struct KeyError {
    std::string key;
    std::string message;
};

/// All recognized keys, in document order.
const std::vector<std::string>& param_keys();

/// Range checks for every key. Empty when valid.
std::vector<KeyError> validate(const Params& params);

nlohmann::json to_json(const Params& params);

/// Applies a (possibly partial) JSON object on top of base. Type errors and
/// unknown keys are reported in errors; range checks are not applied here.
Params apply_json(const Params& base, const nlohmann::json& patch, std::vector<KeyError>& errors);

/// Sets one key from its text form, as given on a command line.
/// Throws Validation naming the key on a parse failure.
void set_param(Params& params, std::string_view key, std::string_view value);

/// Parses a JSON object or "key = value" lines ('#' starts a comment).
/// Throws Validation with an "origin:line:" prefix on any error.
Params parse_params(std::string_view text, const std::string& origin);

Params load_params_file(const std::filesystem::path& path);

/// Writes JSON through a temporary file and rename.
void save_params_file(const Params& params, const std::filesystem::path& path);

MissionConfig to_mission_config(const Params& params);
WorldOptions to_world_options(const Params& params);

}  // namespace harvestnav
