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

#include "harvestnav/navigation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "harvestnav/error.hpp"

namespace harvestnav {

const char* to_string(NavMode mode) noexcept {
    switch (mode) {
        case NavMode::Tracking: return "TRACKING";
        case NavMode::Turning: return "TURNING";
        case NavMode::Done: return "DONE";
    }
    return "UNKNOWN";
}

GeoFence GeoFence::rectangle(double min_x, double min_y, double max_x, double max_y,
                             double sigma_m) {
    return GeoFence{{Point2{min_x, min_y}, Point2{max_x, min_y}, Point2{max_x, max_y},
                     Point2{min_x, max_y}},
                    sigma_m};
}

double GeoFence::min_x() const noexcept {
    return std::min({corners[0].x, corners[1].x, corners[2].x, corners[3].x});
}
double GeoFence::max_x() const noexcept {
    return std::max({corners[0].x, corners[1].x, corners[2].x, corners[3].x});
}
double GeoFence::min_y() const noexcept {
    return std::min({corners[0].y, corners[1].y, corners[2].y, corners[3].y});
}
double GeoFence::max_y() const noexcept {
    return std::max({corners[0].y, corners[1].y, corners[2].y, corners[3].y});
}

void validate(const GeoFence& fence) {
    if (!(fence.gps_noise_sigma_m >= 0.5 && fence.gps_noise_sigma_m <= 1.0)) {
        throw Error(ErrorCode::Validation, "gps_noise_sigma_m must lie in [0.5, 1.0]");
    }
    const double x0 = fence.min_x(), x1 = fence.max_x();
    const double y0 = fence.min_y(), y1 = fence.max_y();
    if (!(x1 > x0 && y1 > y0)) {
        throw Error(ErrorCode::Validation, "fence corners are degenerate");
    }
    // Each corner must be a distinct rectangle vertex.
    std::array<bool, 4> seen{};
    for (const Point2& c : fence.corners) {
        const bool on_x = c.x == x0 || c.x == x1;
        const bool on_y = c.y == y0 || c.y == y1;
        if (!on_x || !on_y) throw Error(ErrorCode::Validation, "fence is not axis-aligned");
        const int idx = (c.x == x1 ? 1 : 0) + (c.y == y1 ? 2 : 0);
        if (seen[idx]) throw Error(ErrorCode::Validation, "fence repeats a corner");
        seen[idx] = true;
    }
}

bool inside_fence(Point2 p, const GeoFence& fence) noexcept {
    return p.x >= fence.min_x() && p.x <= fence.max_x() && p.y >= fence.min_y() &&
           p.y <= fence.max_y();
}

double distance_outside(Point2 p, const GeoFence& fence) noexcept {
    const double dx = std::max({fence.min_x() - p.x, 0.0, p.x - fence.max_x()});
    const double dy = std::max({fence.min_y() - p.y, 0.0, p.y - fence.max_y()});
    return std::hypot(dx, dy);
}

double raw_steer(double centroid_col, int image_width, const NavParams& params) noexcept {
    return params.steer_gain * (centroid_col - image_width / 2.0);
}

SteeringCommand steering_from_centroid(std::optional<double> centroid_col, int image_width,
                                       const NavParams& params) noexcept {
    if (!centroid_col) return {0.0, 0.0};
    return {std::clamp(raw_steer(*centroid_col, image_width, params), -1.0, 1.0),
            params.cruise_drive};
}

NavStepResult nav_step(const NavState& state, const PerceptionFrame& frame, const RobotPose& pose,
                       std::optional<Point2> gps_fix, const GeoFence& fence,
                       const NavParams& params) {
    NavStepResult out{state, {0.0, 0.0}, false};
    NavState& next = out.state;
    auto finish = [&] {
        next.mode = NavMode::Done;
        next.turn_target_heading.reset();
        out.command = {0.0, 0.0};
        return out;
    };

    if (state.mode == NavMode::Done) return out;

    if (gps_fix && distance_outside(*gps_fix, fence) > 3.0 * fence.gps_noise_sigma_m) {
        out.fence_breach = true;
        return finish();
    }

    if (state.mode == NavMode::Turning) {
        const double tolerance = params.heading_tolerance_deg * std::numbers::pi / 180.0;
        // Heading only decreases during a right turn, so anything at or past
        // the tolerance band counts as arrival.
        if (pose.heading - *state.turn_target_heading > tolerance) {
            out.command = {1.0, params.turn_drive};
            return out;
        }
        next.mode = NavMode::Tracking;
        next.turn_target_heading.reset();
        next.eof_debounce = 0;
        if (frame.end_of_field && frame.crop_fraction < params.done_crop_fraction) {
            return finish();
        }
    }

    if (frame.crop_fraction > params.done_crop_fraction) next.crop_seen = true;
    std::optional<double> col;
    if (frame.centroid_exact) col = frame.centroid_exact->col;
    out.command = steering_from_centroid(col, frame.image_width, params);
    // A frame flagged as end of field shows only a sliver of crop, so its
    // centroid says nothing about the row. Hold the wheel until confirmed.
    if (frame.end_of_field) out.command.steer = 0.0;

    next.eof_debounce = frame.end_of_field ? next.eof_debounce + 1 : 0;
    if (next.eof_debounce >= params.eof_debounce_frames) {
        if (!next.crop_seen) return finish();
        next.mode = NavMode::Turning;
        next.turn_target_heading = pose.heading + NavParams::turn_angle_rad;
        next.passes_completed += 1;
        next.eof_debounce = 0;
        out.command = {1.0, params.turn_drive};
    }
    return out;
}

}  // namespace harvestnav
