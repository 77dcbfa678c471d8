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

#include "harvestnav/stalk_detection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <string>

#include "harvestnav/error.hpp"

namespace harvestnav {

namespace {

double tan_deg(int deg) noexcept { return std::tan(deg * std::numbers::pi / 180.0); }

bool higher_priority(const StalkSegment& a, const StalkSegment& b) noexcept {
    if (a.length_px != b.length_px) return a.length_px > b.length_px;
    if (std::abs(a.tilt_deg) != std::abs(b.tilt_deg)) return std::abs(a.tilt_deg) < std::abs(b.tilt_deg);
    if (a.base.col != b.base.col) return a.base.col < b.base.col;
    if (a.tilt_deg != b.tilt_deg) return a.tilt_deg < b.tilt_deg;
    return a.base.row < b.base.row;
}

bool output_order(const StalkSegment& a, const StalkSegment& b) noexcept {
    if (a.base != b.base) return a.base < b.base;
    return a.tilt_deg < b.tilt_deg;
}

void scan_direction(const BinaryMask& mask, int tilt, int min_length,
                    std::vector<StalkSegment>& out) {
    const int w = mask.width();
    const int h = mask.height();
    const std::uint8_t* bits = mask.bits().data();
    const double slope = tan_deg(tilt);
    std::vector<int> shift(static_cast<std::size_t>(h) + 1);
    for (int i = 0; i <= h; ++i) shift[i] = static_cast<int>(std::lround(i * slope));
    const int back = static_cast<int>(std::lround(-slope));

    for (int row = 0; row < h; ++row) {
        const std::uint8_t* line = bits + static_cast<std::size_t>(row) * w;
        const std::uint8_t* below = row + 1 < h ? line + w : nullptr;
        for (int col = 0; col < w; ++col) {
            if (!line[col]) continue;
            const int pc = col + back;
            if (below && pc >= 0 && pc < w && below[pc]) continue;
            // Walk up until a false pixel or the border; row - len >= 0.
            int len = 1;
            while (len <= row) {
                const int c = col + shift[len];
                if (c < 0 || c >= w || !bits[static_cast<std::size_t>(row - len) * w + c]) break;
                ++len;
            }
            if (len >= min_length) out.push_back(StalkSegment{{col, row}, len, tilt});
        }
    }
}

std::vector<StalkSegment> scan_all(const BinaryMask& mask, const DetectionParams& params,
                                   int min_length) {
    std::vector<StalkSegment> out;
    for (int tilt : scan_directions(params)) scan_direction(mask, tilt, min_length, out);
    return out;
}

}  // namespace

std::vector<int> scan_directions(const DetectionParams& params) {
    const int limit = static_cast<int>(std::floor(params.tilt_tolerance_deg));
    std::vector<int> dirs;
    for (int t = -limit; t <= limit; ++t) dirs.push_back(t);
    return dirs;
}

int tilt_offset(int tilt_deg, int i) noexcept {
    return static_cast<int>(std::lround(i * tan_deg(tilt_deg)));
}

PixelCoord segment_pixel(const StalkSegment& s, int i) noexcept {
    return {s.base.col + tilt_offset(s.tilt_deg, i), s.base.row - i};
}

std::vector<StalkSegment> scan_runs(const BinaryMask& mask, const DetectionParams& params) {
    return scan_all(mask, params, 1);
}

std::vector<StalkSegment> remove_overlaps(std::vector<StalkSegment> candidates, int width,
                                          int height) {
    std::sort(candidates.begin(), candidates.end(), higher_priority);

    // Kept segment ids per pixel, grouped by tilt: a few inline slots, then a
    // linked overflow. Cells are column-major so walking a near-vertical
    // segment stays local.
    constexpr int kSlots = 2;
    struct Node {
        int id;
        int next;
    };
    struct Bucket {
        std::unique_ptr<int[]> slots;
        std::vector<std::uint8_t> used;
        std::vector<int> overflow;
        std::vector<Node> nodes;
    };
    const std::size_t npix = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    std::vector<Bucket> buckets(91);  // indexed by tilt + 45, allocated on first use
    std::vector<int> live_tilts;

    // Two digital lines whose slopes differ by ds coincide on at most
    // floor(2 / |ds|) + 1 rows, since each rounding is off by at most 1/2.
    std::vector<long> bound_cache(91 * 91, -1);
    auto max_shared = [&](int t1, int t2) -> long {
        if (t1 == t2) return std::numeric_limits<long>::max();
        long& b = bound_cache[static_cast<std::size_t>((t1 + 45) * 91 + t2 + 45)];
        if (b < 0) {
            const double ds = std::fabs(tan_deg(t1) - tan_deg(t2));
            b = static_cast<long>(std::floor(2.0 / ds + 1e-9)) + 1;
        }
        return b;
    };

    std::vector<int> shared;  // indexed by kept id
    std::vector<int> touched;
    std::vector<std::size_t> cells;
    std::vector<const Bucket*> active;
    std::vector<StalkSegment> kept;

    // Column shift tables per tilt, indexed by tilt + 45.
    std::vector<std::vector<int>> shifts(91);
    for (const StalkSegment& cand : candidates) {
        auto& table = shifts[static_cast<std::size_t>(cand.tilt_deg + 45)];
        if (table.empty()) {
            for (int i = 0; i <= height; ++i) table.push_back(tilt_offset(cand.tilt_deg, i));
        }
        cells.clear();
        for (int i = 0; i < cand.length_px; ++i) {
            cells.push_back(static_cast<std::size_t>(cand.base.col + table[i]) *
                                static_cast<std::size_t>(height) +
                            static_cast<std::size_t>(cand.base.row - i));
        }
        active.clear();
        for (int t : live_tilts) {
            if (max_shared(cand.tilt_deg, t) >= (cand.length_px + 1) / 2) {
                active.push_back(&buckets[static_cast<std::size_t>(t + 45)]);
            }
        }
        bool overlaps = false;
        auto visit = [&](int id) {
            if (shared[id]++ == 0) touched.push_back(id);
            if (2 * shared[id] >= cand.length_px) overlaps = true;
        };
        for (std::size_t cell : cells) {
            for (const Bucket* b : active) {
                const int* slot = &b->slots[cell * kSlots];
                const int n_used = b->used[cell];
                for (int k = 0; k < n_used; ++k) visit(slot[k]);
                if (n_used == kSlots && !b->overflow.empty()) {
                    for (int n = b->overflow[cell]; n >= 0; n = b->nodes[n].next) visit(b->nodes[n].id);
                }
            }
            if (overlaps) break;
        }
        for (int id : touched) shared[id] = 0;
        touched.clear();
        if (overlaps) continue;

        const int id = static_cast<int>(kept.size());
        kept.push_back(cand);
        shared.push_back(0);
        Bucket& b = buckets[static_cast<std::size_t>(cand.tilt_deg + 45)];
        if (b.used.empty()) {
            b.slots.reset(new int[npix * kSlots]);  // read only below used[]
            b.used.assign(npix, 0);
            live_tilts.push_back(cand.tilt_deg);
        }
        for (std::size_t cell : cells) {
            if (b.used[cell] < kSlots) {
                b.slots[cell * kSlots + b.used[cell]++] = id;
            } else {
                if (b.overflow.empty()) b.overflow.assign(npix, -1);
                b.nodes.push_back(Node{id, b.overflow[cell]});
                b.overflow[cell] = static_cast<int>(b.nodes.size()) - 1;
            }
        }
    }
    std::sort(kept.begin(), kept.end(), output_order);
    return kept;
}

std::vector<StalkSegment> detect_vertical_segments(const BinaryMask& mask,
                                                   const DetectionParams& params) {
    return remove_overlaps(scan_all(mask, params, 1), mask.width(), mask.height());
}

std::vector<StalkSegment> filter_residual(std::span<const StalkSegment> segments,
                                          const DetectionParams& params) {
    std::vector<StalkSegment> out;
    std::copy_if(segments.begin(), segments.end(), std::back_inserter(out),
                 [&](const StalkSegment& s) { return s.length_px >= params.min_stalk_length_px; });
    return out;
}

std::vector<StalkSegment> detect_stalks(const BinaryMask& mask, const DetectionParams& params) {
    return remove_overlaps(scan_all(mask, params, params.min_stalk_length_px), mask.width(),
                           mask.height());
}

BinaryMask stalk_mask(std::span<const StalkSegment> segments, int width, int height) {
    BinaryMask mask(width, height);
    std::uint8_t* bits = mask.bits().data();
    std::map<int, std::vector<int>> shifts;
    for (const StalkSegment& s : segments) {
        if (s.length_px < 1) continue;
        std::vector<int>& table = shifts[s.tilt_deg];
        for (int i = static_cast<int>(table.size()); i < s.length_px; ++i) {
            table.push_back(tilt_offset(s.tilt_deg, i));
        }
        // Columns move monotonically along a segment, so the two ends bound it.
        for (int i : {0, s.length_px - 1}) {
            const PixelCoord p{s.base.col + table[static_cast<std::size_t>(i)], s.base.row - i};
            if (!mask.in_bounds(p.col, p.row)) {
                throw Error(ErrorCode::OutOfBounds,
                            "segment pixel (" + std::to_string(p.col) + ", " +
                                std::to_string(p.row) + ") outside " + std::to_string(width) +
                                "x" + std::to_string(height) + " mask");
            }
        }
        for (int i = 0; i < s.length_px; ++i) {
            bits[static_cast<std::size_t>(s.base.row - i) * width + s.base.col +
                 table[static_cast<std::size_t>(i)]] = 1;
        }
    }
    return mask;
}

}  // namespace harvestnav
