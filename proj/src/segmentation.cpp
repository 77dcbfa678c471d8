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

#include "harvestnav/segmentation.hpp"

#include <cmath>

namespace harvestnav {

namespace {

double normalize_deg(double deg) noexcept {
    double d = std::fmod(deg, 360.0);
    if (d < 0.0) d += 360.0;
    return d;
}

bool classify(const HsvPixel& p, const SegmentationParams& params, double phi1,
              double wedge) noexcept {
    if (params.plane_a * p.saturation + p.value < params.plane_b) return false;
    double offset = p.hue - phi1;
    if (offset < 0.0) offset += 360.0;
    return offset <= wedge;
}

}  // namespace

double wedge_angle(const SegmentationParams& params) noexcept {
    double w = normalize_deg(params.phi2_deg) - normalize_deg(params.phi1_deg);
    if (w <= 0.0) w += 360.0;
    return w;
}

bool classify_pixel(const HsvPixel& p, const SegmentationParams& params) noexcept {
    return classify(p, params, normalize_deg(params.phi1_deg), wedge_angle(params));
}

BinaryMask segment_image(const RgbImage& img, const SegmentationParams& params) {
    BinaryMask mask(img.width(), img.height());
    auto src = img.pixels();
    auto dst = mask.bits();
    const double phi1 = normalize_deg(params.phi1_deg);
    const double wedge = wedge_angle(params);
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = classify(rgb_to_hsv(src[i]), params, phi1, wedge) ? 1 : 0;
    }
    return mask;
}

}  // namespace harvestnav
