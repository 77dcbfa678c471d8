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

#include "harvestnav/image.hpp"

namespace harvestnav {

/// Three cut planes in the HSV cylinder: two hue half-planes bounding a
/// wedge, and the plane a*S + V = b. The wedge angle is derived, not stored.
struct SegmentationParams {
    double phi1_deg = 35.0;
    double phi2_deg = 75.0;
    double plane_a = 0.5;
    double plane_b = 0.7;
};

/// Hue span from phi1 to phi2 going counter-clockwise, in (0, 360].
/// Equal planes give the full circle.
double wedge_angle(const SegmentationParams& params) noexcept;

/// True iff the hue lies in the closed wedge [phi1, phi2] and the pixel is on
/// the bright side of the S/V plane (a*S + V >= b).
bool classify_pixel(const HsvPixel& p, const SegmentationParams& params) noexcept;

BinaryMask segment_image(const RgbImage& img, const SegmentationParams& params);

}  // namespace harvestnav
