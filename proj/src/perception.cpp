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

#include "harvestnav/perception.hpp"

#include <algorithm>
#include <cmath>

#include "harvestnav/error.hpp"

namespace harvestnav {

std::optional<CentroidF> centroid_exact(const BinaryMask& mask) {
    double sum_col = 0.0;
    double sum_row = 0.0;
    std::size_t n = 0;
    for (int row = 0; row < mask.height(); ++row) {
        for (int col = 0; col < mask.width(); ++col) {
            if (mask.at(col, row)) {
                sum_col += col;
                sum_row += row;
                ++n;
            }
        }
    }
    if (n == 0) return std::nullopt;
    return CentroidF{sum_col / static_cast<double>(n), sum_row / static_cast<double>(n)};
}

std::optional<PixelCoord> crop_centroid(const BinaryMask& mask) {
    const auto c = centroid_exact(mask);
    if (!c) return std::nullopt;
    return PixelCoord{static_cast<int>(std::floor(c->col + 0.5)),
                      static_cast<int>(std::floor(c->row + 0.5))};
}

TopProfile top_height_profile(const BinaryMask& mask) {
    TopProfile profile;
    profile.image_height = mask.height();
    profile.top_rows.assign(static_cast<std::size_t>(mask.width()), std::nullopt);
    for (int col = 0; col < mask.width(); ++col) {
        for (int row = 0; row < mask.height(); ++row) {
            if (mask.at(col, row)) {
                profile.top_rows[col] = row;
                break;
            }
        }
    }
    return profile;
}

bool detect_end_of_field(const TopProfile& profile, const EofParams& params) {
    std::vector<int> heights;
    for (const auto& top : profile.top_rows) {
        if (top) heights.push_back(profile.image_height - *top);
    }
    double median = 0.0;
    if (!heights.empty()) {
        std::sort(heights.begin(), heights.end());
        const std::size_t mid = heights.size() / 2;
        median = heights.size() % 2 ? heights[mid] : 0.5 * (heights[mid - 1] + heights[mid]);
    }

    int run = 0;
    for (const auto& top : profile.top_rows) {
        const bool gap = !top || median - (profile.image_height - *top) >= params.drop_threshold_px;
        run = gap ? run + 1 : 0;
        if (run >= params.min_gap_width_cols) return true;
    }
    return false;
}

double pinhole_image_height(double object_height_m, double distance_m, double focal_px) {
    if (!(distance_m > 0.0)) throw Error(ErrorCode::InvalidArgument, "distance must be positive");
    if (!(focal_px > 0.0)) throw Error(ErrorCode::InvalidArgument, "focal length must be positive");
    if (object_height_m < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "object height must be non-negative");
    }
    return focal_px * object_height_m / distance_m;
}

FrameAnalysis analyze_mask(BinaryMask segmentation, const DetectionParams& det,
                           const EofParams& eof) {
    std::vector<StalkSegment> stalks = detect_stalks(segmentation, det);
    BinaryMask stalks_mask = stalk_mask(stalks, segmentation.width(), segmentation.height());

    PerceptionFrame frame;
    frame.image_width = segmentation.width();
    frame.crop_fraction = stalks_mask.fraction();
    frame.centroid_exact = centroid_exact(stalks_mask);
    if (frame.centroid_exact) {
        frame.centroid = PixelCoord{static_cast<int>(std::floor(frame.centroid_exact->col + 0.5)),
                                    static_cast<int>(std::floor(frame.centroid_exact->row + 0.5))};
    }
    frame.top_profile = top_height_profile(stalks_mask);
    frame.end_of_field = detect_end_of_field(frame.top_profile, eof);
    frame.segments_count = stalks.size();
    return FrameAnalysis{std::move(segmentation), std::move(stalks), std::move(stalks_mask),
                         std::move(frame)};
}

FrameAnalysis analyze_frame_detailed(const RgbImage& img, const SegmentationParams& seg,
                                     const DetectionParams& det, const EofParams& eof) {
    return analyze_mask(segment_image(img, seg), det, eof);
}

PerceptionFrame analyze_frame(const RgbImage& img, const SegmentationParams& seg,
                              const DetectionParams& det, const EofParams& eof) {
    return analyze_frame_detailed(img, seg, det, eof).frame;
}

}  // namespace harvestnav
