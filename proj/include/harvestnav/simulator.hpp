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
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "harvestnav/geometry.hpp"
#include "harvestnav/image.hpp"
#include "harvestnav/navigation.hpp"
#include "harvestnav/perception.hpp"

namespace harvestnav {

enum class CellState { Uncut, Residual, Lying, Soil, Weed };

const char* to_string(CellState s) noexcept;

struct CropCell {
    CellState state = CellState::Soil;
    double height_m = 0.0;
    double hue_jitter = 0.0;  // degrees

    friend bool operator==(const CropCell&, const CropCell&) = default;
};

inline constexpr double kUncutHeightM = 1.0;
inline constexpr double kResidualHeightM = 0.06;
inline constexpr double kLyingHeightM = 0.04;
inline constexpr double kWeedHeightM = 0.6;

/// Crop-cell grid. Cell (c, r) covers [c*s, (c+1)*s) x [r*s, (r+1)*s) with
/// row 0 along the southern edge.
struct FieldWorld {
    int cols = 0;
    int rows = 0;
    double cell_size_m = 0.5;
    std::uint64_t rng_seed = 0;
    std::vector<CropCell> cells;

    CropCell& at(int col, int row) { return cells[static_cast<std::size_t>(row) * cols + col]; }
    const CropCell& at(int col, int row) const {
        return cells[static_cast<std::size_t>(row) * cols + col];
    }
    Point2 cell_center(int col, int row) const noexcept {
        return {(col + 0.5) * cell_size_m, (row + 0.5) * cell_size_m};
    }
    double width_m() const noexcept { return cols * cell_size_m; }
    double height_m() const noexcept { return rows * cell_size_m; }
    std::size_t count(CellState s) const noexcept;

    friend bool operator==(const FieldWorld&, const FieldWorld&) = default;
};

enum class Preset { SingleField, TwoFieldsWithGap, WeedyCorner };

std::optional<Preset> parse_preset(std::string_view name) noexcept;
const char* to_string(Preset p) noexcept;

struct WorldOptions {
    double cell_size_m = 0.5;
    int gap_width_cells = 3;
};

/// Deterministic in (preset, cols, rows, seed, options).
FieldWorld make_world(Preset preset, int cols, int rows, std::uint64_t seed,
                      const WorldOptions& options = {});

struct CameraModel {
    double focal_px = 440.0;
    int image_w = 320;
    int image_h = 240;
    double mount_height_m = 0.5;
    double pitch_rad = 0.0;         // positive looks up
    double max_range_m = 2.0;
    double near_clip_m = 0.3;
    double forward_offset_m = 0.5;  // camera ahead of the pose reference point
};

struct RenderOptions {
    double brightness = 1.0;  // scales value before noise
    int noise_amplitude = 4;  // uniform per-channel noise in [-a, a]
};

/// Camera position for a pose, clamped into the world rectangle.
Point2 camera_position(const FieldWorld& world, const RobotPose& pose, const CameraModel& cam);

/// Forward-facing pinhole render. Each visible non-soil cell is a vertical
/// stripe spanning its footprint width and its height, drawn far to near.
RgbImage render(const FieldWorld& world, const RobotPose& pose, const CameraModel& cam,
                const RenderOptions& options = {});

struct VehicleConfig {
    double wheelbase_m = 0.5;
    double max_speed_mps = 1.0;
    double max_steer_rad = std::numbers::pi / 4.0;
    double cutter_width_m = 1.0;
    double cutter_depth_m = 0.5;
};

/// Kinematic bicycle step about the rear axle.
RobotPose kinematics_step(const RobotPose& pose, const SteeringCommand& cmd, double dt_s,
                          const VehicleConfig& vehicle);

/// Cutter footprint: a rectangle centered on the front axle.
struct Cutter {
    double width_m = 1.0;
    double depth_m = 0.5;
    double forward_offset_m = 0.5;
};

/// Turns UNCUT cells whose centers lie in the cutter footprint into RESIDUAL.
/// Returns the number of cells changed.
int harvest_in_place(FieldWorld& world, const RobotPose& pose, const Cutter& cutter);

FieldWorld harvest_step(const FieldWorld& world, const RobotPose& pose, const Cutter& cutter);

struct MissionConfig {
    SegmentationParams segmentation;
    DetectionParams detection;
    EofParams eof;
    NavParams nav;
    CameraModel camera;
    VehicleConfig vehicle;
    RenderOptions render;
    double dt_s = 0.1;
    double gps_noise_sigma_m = 0.5;
    int gps_period_steps = 10;
    std::optional<GeoFence> fence;  // defaults to the world rectangle
};

struct MissionReport {
    double coverage_fraction = 0.0;
    int steps_used = 0;
    int fence_breaches = 0;
    bool reached_done = false;
    int passes_completed = 0;
    std::vector<std::array<double, 3>> trajectory;  // x, y, heading

    std::string to_json() const;

    friend bool operator==(const MissionReport&, const MissionReport&) = default;
};

/// Start pose at the lower-right corner, heading west, with the cutter
/// swath flush against the southern edge.
RobotPose default_start_pose(const FieldWorld& world, const VehicleConfig& vehicle);

/// Closed perceive-steer-act loop over one world.
class Mission {
public:
    Mission(FieldWorld world, RobotPose start, MissionConfig config);

    /// Render, analyze, decide, move, harvest. No-op once done.
    void step();

    bool done() const noexcept { return state_.mode == NavMode::Done; }
    int steps_used() const noexcept { return steps_; }
    int fence_breaches() const noexcept { return breaches_; }
    const RobotPose& pose() const noexcept { return pose_; }
    const NavState& nav_state() const noexcept { return state_; }
    const FieldWorld& world() const noexcept { return world_; }
    const MissionConfig& config() const noexcept { return config_; }
    const GeoFence& fence() const noexcept { return fence_; }
    double coverage() const noexcept;

    /// Edits take effect from the next rendered frame.
    void set_config(const MissionConfig& config);

    /// Latest rendered frame and its analysis. Before the first step this is
    /// the view from the start pose under the current parameters.
    const RgbImage& last_image();
    const FrameAnalysis& last_analysis();

    MissionReport report() const;

private:
    void observe();

    FieldWorld world_;
    RobotPose pose_;
    MissionConfig config_;
    GeoFence fence_;
    NavState state_;
    std::mt19937_64 gps_rng_;
    std::size_t initial_uncut_ = 0;
    int steps_ = 0;
    int breaches_ = 0;
    std::vector<std::array<double, 3>> trajectory_;
    std::optional<RgbImage> image_;
    std::optional<FrameAnalysis> analysis_;
    bool analysis_current_ = false;  // analysis_ matches the current parameters
};

using FrameSink = std::function<void(int step, const RgbImage& frame)>;

MissionReport run_mission(const FieldWorld& world, const RobotPose& start,
                          const MissionConfig& config, int max_steps, const FrameSink& sink = {});

}  // namespace harvestnav
