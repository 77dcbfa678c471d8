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

#include <cstddef>
#include <optional>
#include <vector>

#include "harvestnav/image.hpp"
#include "harvestnav/segmentation.hpp"
#include "harvestnav/stalk_detection.hpp"

namespace harvestnav {

struct EofParams {
    int drop_threshold_px = 30;
    int min_gap_width_cols = 64;
};

/// Topmost crop row per column (row 0 at the top of the image).
struct TopProfile {
    int image_height = 0;
    std::vector<std::optional<int>> top_rows;

    friend bool operator==(const TopProfile&, const TopProfile&) = default;
};

struct CentroidF {
    double col = 0.0;
    double row = 0.0;
};

struct PerceptionFrame {
    double crop_fraction = 0.0;
    std::optional<PixelCoord> centroid;
    /// Unrounded centroid; steering consumes this one.
    std::optional<CentroidF> centroid_exact;
    TopProfile top_profile;
    bool end_of_field = false;
    std::size_t segments_count = 0;
    int image_width = 0;
};

std::optional<CentroidF> centroid_exact(const BinaryMask& mask);

/// Mean of true-pixel coordinates, rounded half-up. Empty for an all-false mask.
std::optional<PixelCoord> crop_centroid(const BinaryMask& mask);

TopProfile top_height_profile(const BinaryMask& mask);

/// Flags a run of at least min_gap_width_cols columns that are either empty
/// or whose apparent crop height (image_height - top_row) sits at least
/// drop_threshold_px below the median over non-empty columns.
bool detect_end_of_field(const TopProfile& profile, const EofParams& params);

/// On-screen height of an object under the pinhole model: f * h / d.
double pinhole_image_height(double object_height_m, double distance_m, double focal_px);

/// Every intermediate of the frame pipeline, for overlays and tests.
struct FrameAnalysis {
    BinaryMask segmentation;
    std::vector<StalkSegment> stalks;
    BinaryMask stalk_mask;
    PerceptionFrame frame;
};

/// Every stage after segmentation, on an existing color mask.
FrameAnalysis analyze_mask(BinaryMask segmentation, const DetectionParams& det,
                           const EofParams& eof);

FrameAnalysis analyze_frame_detailed(const RgbImage& img, const SegmentationParams& seg,
                                     const DetectionParams& det, const EofParams& eof);

PerceptionFrame analyze_frame(const RgbImage& img, const SegmentationParams& seg,
                              const DetectionParams& det, const EofParams& eof);

}  // namespace harvestnav
