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
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace harvestnav {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Cylindrical color: hue in degrees [0, 360), saturation and value in [0, 1].
struct HsvPixel {
    double hue = 0.0;
    double saturation = 0.0;
    double value = 0.0;
};

/// Overlay highlight color used for mask visualizations.
inline constexpr Rgb kHighlight{255, 0, 255};

class RgbImage {
public:
    RgbImage(int width, int height, Rgb fill = {});

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return pixels_.size(); }

    Rgb& at(int col, int row) { return pixels_[index(col, row)]; }
    const Rgb& at(int col, int row) const { return pixels_[index(col, row)]; }

    std::span<Rgb> pixels() noexcept { return pixels_; }
    std::span<const Rgb> pixels() const noexcept { return pixels_; }

    friend bool operator==(const RgbImage&, const RgbImage&) = default;

private:
    std::size_t index(int col, int row) const noexcept {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(col);
    }

    int width_;
    int height_;
    std::vector<Rgb> pixels_;
};

class BinaryMask {
public:
    BinaryMask(int width, int height, bool fill = false);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return bits_.size(); }

    bool at(int col, int row) const { return bits_[index(col, row)] != 0; }
    void set(int col, int row, bool on = true) { bits_[index(col, row)] = on ? 1 : 0; }
    bool in_bounds(int col, int row) const noexcept {
        return col >= 0 && row >= 0 && col < width_ && row < height_;
    }

    std::span<std::uint8_t> bits() noexcept { return bits_; }
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    std::size_t count() const noexcept;
    double fraction() const noexcept;

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    std::size_t index(int col, int row) const noexcept {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(col);
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> bits_;
};

/// Hexcone RGB to HSV. Achromatic inputs get hue 0.
HsvPixel rgb_to_hsv(Rgb p) noexcept;

/// Inverse of rgb_to_hsv, rounding each channel to nearest.
Rgb hsv_to_rgb(HsvPixel p) noexcept;

// File I/O. PPM (P3 read, P3/P6 read, P6 write) and PNG are recognized by
// content on load and by extension on save (".png" writes PNG, anything
// else writes binary PPM).
RgbImage load_image(const std::filesystem::path& path);
RgbImage decode_image(std::span<const std::uint8_t> bytes);
void save_image(const RgbImage& img, const std::filesystem::path& path);

std::vector<std::uint8_t> encode_ppm(const RgbImage& img);
std::vector<std::uint8_t> encode_png(const RgbImage& img);

/// Copy of img with mask-true pixels replaced by kHighlight.
RgbImage mask_overlay(const RgbImage& img, const BinaryMask& mask);
void save_mask_overlay(const RgbImage& img, const BinaryMask& mask,
                       const std::filesystem::path& path);

/// White-on-black rendering of a mask.
RgbImage mask_to_image(const BinaryMask& mask);

}  // namespace harvestnav
