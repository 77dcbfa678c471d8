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

namespace harvestnav {

/// Local field coordinates in meters: x east, y north.
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

/// Vehicle state. (x, y) is the rear-axle reference point; heading is
/// counter-clockwise from +x and is not wrapped, so accumulated turning is
/// directly visible. steer_angle is positive to the right.
struct RobotPose {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
    double steer_angle = 0.0;

    friend bool operator==(const RobotPose&, const RobotPose&) = default;
};

}  // namespace harvestnav
