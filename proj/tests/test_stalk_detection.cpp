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

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "harvestnav/error.hpp"
#include "harvestnav/stalk_detection.hpp"
#include "support.hpp"

using namespace harvestnav;

namespace {

BinaryMask column(int w, int h, int col, int top, int bottom) {
    BinaryMask m(w, h);
    for (int r = top; r <= bottom; ++r) m.set(col, r);
    return m;
}

// A one-pixel-wide line leaning tilt degrees from vertical, drawn with exact
// real-valued geometry rather than the detector's own stepping.
BinaryMask leaning_line(int w, int h, int base_col, int base_row, int len, double tilt_deg) {
    BinaryMask m(w, h);
    const double slope = std::tan(tilt_deg * std::numbers::pi / 180.0);
    for (int i = 0; i < len; ++i) m.set(base_col + static_cast<int>(std::floor(i * slope + 0.5)), base_row - i);
    return m;
}

}  // namespace

TEST_CASE("single vertical column") {
    const auto segs = detect_vertical_segments(column(100, 100, 20, 10, 60), {});
    REQUIRE(segs.size() == 1);
    CHECK(segs[0] == StalkSegment{{20, 60}, 51, 0});
    CHECK(segs == hn_test::oracle_detect(column(100, 100, 20, 10, 60), 5.0));
}

TEST_CASE("empty mask") { CHECK(detect_vertical_segments(BinaryMask(30, 30), {}).empty()); }

TEST_CASE("45 degree diagonal is never covered") {
    BinaryMask m(60, 60);
    for (int i = 0; i < 50; ++i) m.set(5 + i, 55 - i);
    const auto segs = detect_vertical_segments(m, {5.0, 1});
    const auto oracle = hn_test::oracle_detect(m, 5.0);
    CHECK(segs == oracle);
    for (const auto& s : segs) CHECK(s.length_px <= 2);
}

TEST_CASE("filter_residual") {
    const std::vector<StalkSegment> in{{{1, 50}, 51, 0}, {{2, 9}, 5, 1}};
    const auto out = filter_residual(in, {5.0, 10});
    REQUIRE(out.size() == 1);
    CHECK(out[0].length_px == 51);
    CHECK(filter_residual(std::vector<StalkSegment>{}, {5.0, 3}).empty());
    const std::vector<StalkSegment> eq{{{1, 9}, 10, 0}, {{3, 9}, 10, 2}};
    CHECK(filter_residual(eq, {5.0, 10}) == eq);
}

TEST_CASE("stalk_mask") {
    const std::vector<StalkSegment> one{{{20, 60}, 51, 0}};
    CHECK(stalk_mask(one, 100, 100).count() == 51);
    CHECK(stalk_mask(one, 100, 100) == column(100, 100, 20, 10, 60));
    CHECK(stalk_mask(std::vector<StalkSegment>{}, 10, 10).count() == 0);
    const std::vector<StalkSegment> tall{{{20, 60}, 62, 0}};
    CHECK_THROWS_AS(stalk_mask(tall, 100, 100), Error);
    const std::vector<StalkSegment> wide{{{99, 60}, 30, 5}};
    CHECK_THROWS_AS(stalk_mask(wide, 100, 100), Error);
    const std::vector<StalkSegment> below{{{5, 100}, 3, 0}};
    CHECK_THROWS_AS(stalk_mask(below, 100, 100), Error);
}

TEST_CASE("stalk_mask round trip for vertical segments") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> col(0, 79), row(0, 79), len(1, 80);
    for (int k = 0; k < 100; ++k) {
        // Non-adjacent columns so runs stay separate.
        std::vector<StalkSegment> segs;
        std::vector<int> used;
        for (int j = 0; j < 6; ++j) {
            const int c = col(rng);
            if (std::any_of(used.begin(), used.end(), [&](int u) { return std::abs(u - c) < 2; })) continue;
            used.push_back(c);
            const int r = row(rng);
            segs.push_back({{c, r}, std::min(len(rng), r + 1), 0});
        }
        std::sort(segs.begin(), segs.end(), [](auto& a, auto& b) { return a.base < b.base; });
        CHECK(detect_vertical_segments(stalk_mask(segs, 80, 80), {5.0, 1}) == segs);
    }
}

TEST_CASE("scan directions and pixel geometry") {
    CHECK(scan_directions({5.0, 1}) == std::vector<int>{-5, -4, -3, -2, -1, 0, 1, 2, 3, 4, 5});
    CHECK(scan_directions({0.0, 1}) == std::vector<int>{0});
    CHECK(scan_directions({2.7, 1}) == std::vector<int>{-2, -1, 0, 1, 2});
    for (int t = -44; t <= 44; ++t) {
        for (int i = -3; i < 300; ++i) REQUIRE(tilt_offset(t, i) == hn_test::oracle_shift(t, i));
    }
    CHECK(segment_pixel({{10, 50}, 40, 5}, 12) == PixelCoord{11, 38});
}

TEST_CASE("detector matches the brute-force oracle on random masks") {
    std::mt19937_64 rng(32);
    for (int k = 0; k < 30; ++k) {
        const BinaryMask m = hn_test::random_stalk_mask(rng, 64, 64);
        const double tol = (k % 4 == 0) ? 2.5 : 5.0;
        REQUIRE(detect_vertical_segments(m, {tol, 1}) == hn_test::oracle_detect(m, tol));
    }
}

TEST_CASE("detect_stalks equals filtering after detection") {
    std::mt19937_64 rng(33);
    for (int k = 0; k < 30; ++k) {
        const BinaryMask m = hn_test::random_stalk_mask(rng, 64, 64);
        const DetectionParams p{5.0, 1 + k % 15};
        const auto all = detect_vertical_segments(m, p);
        CHECK(detect_stalks(m, p) == filter_residual(all, p));
    }
}

TEST_CASE("returned segments are all-true, maximal and within tolerance") {
    std::mt19937_64 rng(34);
    for (int k = 0; k < 20; ++k) {
        const BinaryMask m = hn_test::random_stalk_mask(rng, 64, 64);
        const DetectionParams p{5.0, 1};
        for (const StalkSegment& s : detect_vertical_segments(m, p)) {
            REQUIRE(std::abs(s.tilt_deg) <= 5);
            REQUIRE(m.in_bounds(s.base.col, s.base.row));
            for (int i = 0; i < s.length_px; ++i) {
                const PixelCoord q = segment_pixel(s, i);
                REQUIRE(m.at(q.col, q.row));
            }
            // Cannot grow upward, nor downward in its own direction.
            const PixelCoord up = segment_pixel(s, s.length_px);
            CHECK_FALSE((m.in_bounds(up.col, up.row) && m.at(up.col, up.row)));
            const PixelCoord down = segment_pixel(s, -1);
            CHECK_FALSE((m.in_bounds(down.col, down.row) && m.at(down.col, down.row)));
        }
    }
}

TEST_CASE("raw runs only grow with the tolerance") {
    std::mt19937_64 rng(35);
    for (int k = 0; k < 20; ++k) {
        const BinaryMask m = hn_test::random_stalk_mask(rng, 48, 48);
        std::vector<StalkSegment> prev;
        for (double tol : {0.0, 1.0, 3.0, 5.0, 8.0}) {
            auto runs = scan_runs(m, {tol, 1});
            std::sort(runs.begin(), runs.end(), [](auto& a, auto& b) {
                return std::tie(a.base, a.tilt_deg) < std::tie(b.base, b.tilt_deg);
            });
            CHECK(std::includes(runs.begin(), runs.end(), prev.begin(), prev.end(), [](auto& a, auto& b) {
                return std::tie(a.base, a.tilt_deg) < std::tie(b.base, b.tilt_deg);
            }));
            prev = runs;
        }
    }
}

TEST_CASE("horizontal runs are rejected") {
    for (double tol : {1.0, 5.0, 10.0, 30.0}) {
        BinaryMask m(200, 20);
        for (int c = 0; c < 200; ++c) m.set(c, 10);
        const int bound = static_cast<int>(std::ceil(1.0 / std::tan((90.0 - tol) * std::numbers::pi / 180.0))) + 1;
        for (const auto& s : detect_vertical_segments(m, {tol, 1})) CHECK(s.length_px <= bound);
    }
}

TEST_CASE("tilted synthetic stalks against the tolerance") {
    const auto three = detect_stalks(leaning_line(120, 120, 40, 110, 100, 3.0), {5.0, 20});
    REQUIRE(three.size() == 1);
    CHECK(three[0].length_px == 100);
    CHECK(three[0].tilt_deg == 3);
    const auto ten = detect_stalks(leaning_line(120, 120, 40, 110, 100, 10.0), {5.0, 20});
    CHECK(ten.empty());
}
