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
#include <numbers>
#include <optional>

#include "harvestnav/geometry.hpp"
#include "harvestnav/perception.hpp"

namespace harvestnav {

enum class NavMode { Tracking, Turning, Done };

const char* to_string(NavMode mode) noexcept;

/// steer in [-1, 1], negative left; drive in [0, 1] of max speed.
struct SteeringCommand {
    double steer = 0.0;
    double drive = 0.0;

    friend bool operator==(const SteeringCommand&, const SteeringCommand&) = default;
};

struct NavParams {
    double steer_gain = 0.01;  // per pixel of centroid error
    double cruise_drive = 0.5;
    double turn_drive = 0.15;
    int eof_debounce_frames = 3;
    double done_crop_fraction = 0.02;
    double heading_tolerance_deg = 2.0;

    /// Every turn is a quarter turn to the right.
    static constexpr double turn_angle_rad = -std::numbers::pi / 2.0;
};

struct NavState {
    NavMode mode = NavMode::Tracking;
    std::optional<double> turn_target_heading;  // set iff Turning
    int passes_completed = 0;
    int eof_debounce = 0;
    // Whether any tracked frame has shown more crop than done_crop_fraction.
    // A confirmed end of field before that means there is nothing to harvest.
    bool crop_seen = false;

    friend bool operator==(const NavState&, const NavState&) = default;
};

/// Axis-aligned rectangle marked out with assisted GPS.
struct GeoFence {
    std::array<Point2, 4> corners;
    double gps_noise_sigma_m = 0.5;

    static GeoFence rectangle(double min_x, double min_y, double max_x, double max_y,
                              double sigma_m);

    double min_x() const noexcept;
    double max_x() const noexcept;
    double min_y() const noexcept;
    double max_y() const noexcept;
};

/// Throws Validation unless the corners form a non-degenerate axis-aligned
/// rectangle and sigma lies in [0.5, 1.0].
void validate(const GeoFence& fence);

/// Boundary inclusive.
bool inside_fence(Point2 p, const GeoFence& fence) noexcept;

/// Euclidean distance from p to the fence rectangle; 0 inside.
double distance_outside(Point2 p, const GeoFence& fence) noexcept;

/// steer_gain * (centroid_col - width / 2), before clamping.
double raw_steer(double centroid_col, int image_width, const NavParams& params) noexcept;

SteeringCommand steering_from_centroid(std::optional<double> centroid_col, int image_width,
                                       const NavParams& params) noexcept;

struct NavStepResult {
    NavState state;
    SteeringCommand command;
    bool fence_breach = false;
};

/// One control tick. gps_fix is the noisy position when a fix arrived this
/// tick; a fix more than 3 sigma outside the fence ends the mission.
NavStepResult nav_step(const NavState& state, const PerceptionFrame& frame, const RobotPose& pose,
                       std::optional<Point2> gps_fix, const GeoFence& fence,
                       const NavParams& params);

}  // namespace harvestnav
