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

#include <compare>
#include <span>
#include <vector>

#include "harvestnav/image.hpp"

namespace harvestnav {

struct DetectionParams {
    double tilt_tolerance_deg = 5.0;  // in [0, 45)
    int min_stalk_length_px = 20;     // >= 1
};

struct PixelCoord {
    int col = 0;
    int row = 0;

    friend auto operator<=>(const PixelCoord&, const PixelCoord&) = default;
};

/// A maximal run of mask pixels along one scan direction. Pixel i of the
/// segment sits at (base.col + round(i * tan(tilt)), base.row - i), so a
/// positive tilt leans right going up the image.
struct StalkSegment {
    PixelCoord base;
    int length_px = 0;
    int tilt_deg = 0;

    friend bool operator==(const StalkSegment&, const StalkSegment&) = default;
};

/// Scan directions in whole degrees: -floor(tol) .. +floor(tol).
std::vector<int> scan_directions(const DetectionParams& params);

/// Column offset of the i-th pixel above the base for a given tilt.
int tilt_offset(int tilt_deg, int i) noexcept;

PixelCoord segment_pixel(const StalkSegment& s, int i) noexcept;

/// Every maximal run along every scan direction, before overlap removal.
std::vector<StalkSegment> scan_runs(const BinaryMask& mask, const DetectionParams& params);

/// Greedy overlap removal. Candidates are visited longest first (ties:
/// smaller |tilt|, smaller base col, negative tilt, smaller base row); a
/// candidate is dropped when it shares at least half of its pixels with a
/// segment already kept. Output is sorted by (base col, base row, tilt).
std::vector<StalkSegment> remove_overlaps(std::vector<StalkSegment> candidates, int width,
                                          int height);

std::vector<StalkSegment> detect_vertical_segments(const BinaryMask& mask,
                                                   const DetectionParams& params);

/// Drops segments shorter than min_stalk_length_px; order preserved.
std::vector<StalkSegment> filter_residual(std::span<const StalkSegment> segments,
                                          const DetectionParams& params);

/// Same result as filter_residual(detect_vertical_segments(mask)), but short
/// runs are discarded before overlap removal. Short runs can never suppress a
/// longer one, so the outputs are identical.
std::vector<StalkSegment> detect_stalks(const BinaryMask& mask, const DetectionParams& params);

/// Rasterizes segments into a mask. Throws OutOfBounds for any pixel outside.
BinaryMask stalk_mask(std::span<const StalkSegment> segments, int width, int height);

}  // namespace harvestnav
