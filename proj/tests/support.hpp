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

// Shared helpers for the test binaries: independent brute-force oracles and
// random input generators. The oracles deliberately avoid the library's own
// helpers beyond the public data types.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <unistd.h>

#include "harvestnav/image.hpp"
#include "harvestnav/perception.hpp"
#include "harvestnav/segmentation.hpp"
#include "harvestnav/stalk_detection.hpp"

namespace hn_test {

using namespace harvestnav;

// Hue membership written as plain inequalities on [0, 360).
inline bool oracle_in_wedge(double hue, double phi1, double phi2) {
    auto norm = [](double a) {
        double r = std::fmod(a, 360.0);
        if (r < 0) r += 360.0;
        return r;
    };
    const double lo = norm(phi1);
    const double hi = norm(phi2);
    if (lo == hi) return true;  // full circle
    if (lo < hi) return lo <= hue && hue <= hi;
    return hue >= lo || hue <= hi;
}

inline bool oracle_classify(double hue, double sat, double val, const SegmentationParams& p) {
    return oracle_in_wedge(hue, p.phi1_deg, p.phi2_deg) && p.plane_a * sat + val >= p.plane_b;
}

// Hexcone conversion written out from the textbook piecewise definition.
inline void oracle_hsv(Rgb px, double& h, double& s, double& v) {
    const double r = px.r / 255.0, g = px.g / 255.0, b = px.b / 255.0;
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double c = mx - mn;
    v = mx;
    s = mx > 0 ? c / mx : 0.0;
    if (c == 0) {
        h = 0;
        return;
    }
    if (mx == r) {
        h = 60.0 * std::fmod((g - b) / c + 6.0, 6.0);
    } else if (mx == g) {
        h = 60.0 * ((b - r) / c + 2.0);
    } else {
        h = 60.0 * ((r - g) / c + 4.0);
    }
    if (h >= 360.0) h -= 360.0;
}

inline std::size_t oracle_count_crop(const RgbImage& img, const SegmentationParams& p) {
    std::size_t n = 0;
    for (const Rgb& px : img.pixels()) {
        double h, s, v;
        oracle_hsv(px, h, s, v);
        if (oracle_classify(h, s, v, p)) ++n;
    }
    return n;
}

inline RgbImage random_image(std::mt19937_64& rng, int w, int h) {
    RgbImage img(w, h);
    std::uniform_int_distribution<int> ch(0, 255);
    for (Rgb& p : img.pixels()) {
        p = Rgb{static_cast<std::uint8_t>(ch(rng)), static_cast<std::uint8_t>(ch(rng)),
                static_cast<std::uint8_t>(ch(rng))};
    }
    return img;
}

// ---- stalk detection -------------------------------------------------------

inline int oracle_shift(int tilt, int i) {
    const double t = std::tan(tilt * std::numbers::pi / 180.0);
    return static_cast<int>(std::round(i * t));  // half away from zero
}

inline std::vector<std::pair<int, int>> oracle_pixels(const StalkSegment& s) {
    std::vector<std::pair<int, int>> px;
    for (int i = 0; i < s.length_px; ++i) {
        px.emplace_back(s.base.col + oracle_shift(s.tilt_deg, i), s.base.row - i);
    }
    return px;
}

// Every maximal run along every whole-degree direction. A run starts at a true
// pixel whose predecessor one row down along the direction is false or off
// the image, and walks upward until the first false or off-image pixel.
inline std::vector<StalkSegment> oracle_runs(const BinaryMask& m, double tolerance) {
    auto on = [&](int c, int r) { return m.in_bounds(c, r) && m.at(c, r); };
    std::vector<StalkSegment> out;
    const int lim = static_cast<int>(std::floor(tolerance));
    for (int t = -lim; t <= lim; ++t) {
        for (int r = 0; r < m.height(); ++r) {
            for (int c = 0; c < m.width(); ++c) {
                if (!on(c, r) || on(c + oracle_shift(t, -1), r + 1)) continue;
                int len = 0;
                while (on(c + oracle_shift(t, len), r - len)) ++len;
                out.push_back(StalkSegment{{c, r}, len, t});
            }
        }
    }
    return out;
}

// Greedy suppression by explicit pixel sets: visit longest first (ties |tilt|,
// base col, tilt, base row) and drop anything sharing >= half its pixels with
// a kept segment.
inline std::vector<StalkSegment> oracle_dedup(std::vector<StalkSegment> c) {
    std::sort(c.begin(), c.end(), [](const StalkSegment& a, const StalkSegment& b) {
        const auto ka = std::make_tuple(-a.length_px, std::abs(a.tilt_deg), a.base.col,
                                        a.tilt_deg, a.base.row);
        const auto kb = std::make_tuple(-b.length_px, std::abs(b.tilt_deg), b.base.col,
                                        b.tilt_deg, b.base.row);
        return ka < kb;
    });
    std::map<std::pair<int, int>, std::vector<int>> owners;
    std::vector<StalkSegment> kept;
    for (const StalkSegment& s : c) {
        const auto px = oracle_pixels(s);
        std::map<int, int> shared;
        for (const auto& p : px) {
            auto it = owners.find(p);
            if (it == owners.end()) continue;
            for (int id : it->second) ++shared[id];
        }
        bool drop = false;
        for (const auto& [id, n] : shared) {
            if (2 * n >= s.length_px) drop = true;
        }
        if (drop) continue;
        const int id = static_cast<int>(kept.size());
        kept.push_back(s);
        for (const auto& p : px) owners[p].push_back(id);
    }
    std::sort(kept.begin(), kept.end(), [](const StalkSegment& a, const StalkSegment& b) {
        return std::make_tuple(a.base.col, a.base.row, a.tilt_deg) <
               std::make_tuple(b.base.col, b.base.row, b.tilt_deg);
    });
    return kept;
}

inline std::vector<StalkSegment> oracle_detect(const BinaryMask& m, double tolerance) {
    return oracle_dedup(oracle_runs(m, tolerance));
}

// Random masks mixing noise with near-vertical streaks of assorted tilts, so
// that long overlapping runs from neighbouring directions actually occur.
inline BinaryMask random_stalk_mask(std::mt19937_64& rng, int w, int h) {
    BinaryMask m(w, h);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double density = 0.05 + 0.5 * u(rng);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (u(rng) < density) m.set(c, r);
        }
    }
    const int streaks = static_cast<int>(u(rng) * 40);
    for (int k = 0; k < streaks; ++k) {
        const double tilt = (u(rng) * 2 - 1) * 12.0;
        const double slope = std::tan(tilt * std::numbers::pi / 180.0);
        const int c0 = static_cast<int>(u(rng) * w);
        const int r0 = static_cast<int>(u(rng) * h);
        const int len = 5 + static_cast<int>(u(rng) * h);
        const int thick = 1 + static_cast<int>(u(rng) * 3);
        for (int i = 0; i < len && r0 - i >= 0; ++i) {
            for (int t = 0; t < thick; ++t) {
                const int c = c0 + t + static_cast<int>(std::lround(i * slope));
                if (c >= 0 && c < w) m.set(c, r0 - i);
            }
        }
    }
    return m;
}

// ---- end of field ------------------------------------------------------------

// Checks every column window [i, j] of width >= min width directly.
inline bool oracle_eof(const TopProfile& p, const EofParams& e) {
    std::vector<double> hs;
    for (const auto& t : p.top_rows) {
        if (t) hs.push_back(p.image_height - *t);
    }
    double median = 0;
    if (!hs.empty()) {
        std::vector<double> s = hs;
        std::sort(s.begin(), s.end());
        const std::size_t n = s.size();
        median = n % 2 == 1 ? s[n / 2] : (s[n / 2 - 1] + s[n / 2]) / 2.0;
    }
    const int n = static_cast<int>(p.top_rows.size());
    for (int i = 0; i < n; ++i) {
        for (int j = i + e.min_gap_width_cols - 1; j < n; ++j) {
            bool all = true;
            for (int k = i; k <= j && all; ++k) {
                const auto& t = p.top_rows[k];
                all = !t || median - (p.image_height - *t) >= e.drop_threshold_px;
            }
            if (all) return true;
        }
    }
    return false;
}

inline TopProfile random_profile(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> width(1, 160);
    std::uniform_int_distribution<int> height(1, 200);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    TopProfile p;
    p.image_height = height(rng);
    const int w = width(rng);
    const double absent = u(rng) * 0.5;
    // Piecewise-constant plateaus with occasional drops, like a field edge.
    int level = static_cast<int>(u(rng) * p.image_height);
    for (int c = 0; c < w; ++c) {
        if (u(rng) < 0.08) level = static_cast<int>(u(rng) * p.image_height);
        if (u(rng) < absent) {
            p.top_rows.push_back(std::nullopt);
        } else {
            const int jitter = static_cast<int>((u(rng) - 0.5) * 6);
            p.top_rows.push_back(std::clamp(level + jitter, 0, p.image_height - 1));
        }
    }
    return p;
}

inline EofParams random_eof_params(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> thr(1, 80);
    std::uniform_int_distribution<int> gap(1, 40);
    return EofParams{thr(rng), gap(rng)};
}

// ---- files -------------------------------------------------------------------

// Scratch directory removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("hn_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    out << bytes;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace hn_test
