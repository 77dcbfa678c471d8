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

#include <random>

#include "doctest.h"
#include "harvestnav/segmentation.hpp"
#include "support.hpp"

using namespace harvestnav;

TEST_CASE("wedge_angle") {
    CHECK(wedge_angle({40, 80, 0.5, 0.8}) == 40.0);
    CHECK(wedge_angle({350, 10, 0.5, 0.8}) == 20.0);
    CHECK(wedge_angle({60, 60, 0.5, 0.8}) == 360.0);
    CHECK(wedge_angle({80, 40, 0.5, 0.8}) == 320.0);
    CHECK(wedge_angle({-10, 10, 0.5, 0.8}) == 20.0);
}

TEST_CASE("classify_pixel examples") {
    const SegmentationParams p{40, 80, 0.5, 0.8};
    CHECK(classify_pixel({60, 1.0, 1.0}, p));
    CHECK_FALSE(classify_pixel({200, 1.0, 1.0}, p));
    CHECK_FALSE(classify_pixel({60, 0.1, 0.2}, p));
    CHECK(hn_test::oracle_classify(60, 0.1, 0.2, p) == false);
    // Endpoints are inclusive.
    CHECK(classify_pixel({40, 1.0, 1.0}, p));
    CHECK(classify_pixel({80, 1.0, 1.0}, p));
    // Plane boundary is inclusive: 0.5 * 0.4 + 0.6 = 0.8.
    CHECK(classify_pixel({60, 0.5, 0.55}, {40, 80, 0.5, 0.8}));
}

TEST_CASE("wraparound and degenerate wedges") {
    const SegmentationParams wrap{350, 10, 0.0, 0.0};
    CHECK(classify_pixel({5, 1, 1}, wrap));
    CHECK(classify_pixel({355, 1, 1}, wrap));
    CHECK_FALSE(classify_pixel({180, 1, 1}, wrap));
    const SegmentationParams full{60, 60, 0.5, 0.7};
    for (int h = 0; h < 360; h += 15) CHECK(classify_pixel({double(h), 1, 1}, full));
    CHECK_FALSE(classify_pixel({100, 0.0, 0.5}, full));
}

TEST_CASE("uniform images under default params") {
    const SegmentationParams d;
    CHECK(segment_image(RgbImage(5, 4, {255, 255, 0}), d).count() == 20);
    CHECK(segment_image(RgbImage(5, 4, {0, 0, 255}), d).count() == 0);
}

TEST_CASE("segment_image equals the per-pixel oracle") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ang(-400, 400), a(0, 3), b(-0.5, 2);
    for (int k = 0; k < 40; ++k) {
        const SegmentationParams p{ang(rng), ang(rng), a(rng), b(rng)};
        const RgbImage img = hn_test::random_image(rng, 64, 48);
        const BinaryMask m = segment_image(img, p);
        REQUIRE(m.width() == 64);
        REQUIRE(m.height() == 48);
        CHECK(m.count() == hn_test::oracle_count_crop(img, p));
        for (int r = 0; r < 48; ++r) {
            for (int c = 0; c < 64; ++c) {
                REQUIRE(m.at(c, r) == classify_pixel(rgb_to_hsv(img.at(c, r)), p));
            }
        }
    }
}

TEST_CASE("monotonicity in wedge width and plane offset") {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 30; ++k) {
        const RgbImage img = hn_test::random_image(rng, 32, 32);
        const double phi1 = u(rng) * 360;
        const double a = u(rng) * 2;
        const double b = u(rng) * 1.5;
        std::size_t prev = 0;
        for (double width = 5; width <= 355; width += 25) {
            const std::size_t n = segment_image(img, {phi1, phi1 + width, a, b}).count();
            CHECK(n >= prev);
            prev = n;
        }
        prev = img.size();
        for (double bb = -0.5; bb <= 2.0; bb += 0.1) {
            const std::size_t n = segment_image(img, {phi1, phi1 + 40, a, bb}).count();
            CHECK(n <= prev);
            prev = n;
        }
    }
}
