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

#include "harvestnav/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "harvestnav/error.hpp"

namespace harvestnav {

namespace {

// Images above this many pixels are rejected as a dimension overflow.
constexpr std::uint64_t kMaxPixels = std::uint64_t{1} << 28;

void check_dimensions(int width, int height) {
    if (width < 1 || height < 1) {
        throw Error(ErrorCode::InvalidArgument, "image dimensions must be at least 1x1");
    }
}

class PnmReader {
public:
    explicit PnmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    // Next whitespace-delimited header token, skipping '#' comments.
    std::string token() {
        skip_space();
        std::string out;
        while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]) && bytes_[pos_] != '#') {
            out.push_back(static_cast<char>(bytes_[pos_++]));
        }
        if (out.empty()) throw Error(ErrorCode::MalformedHeader, "truncated PPM header");
        return out;
    }

    std::uint64_t number(const char* what) {
        const std::string t = token();
        std::uint64_t v = 0;
        for (char c : t) {
            if (!std::isdigit(static_cast<unsigned char>(c))) {
                throw Error(ErrorCode::MalformedHeader,
                            std::string("PPM ") + what + " is not a number: " + t);
            }
            if (v > (std::numeric_limits<std::uint64_t>::max() - 9) / 10) {
                throw Error(ErrorCode::DimensionOverflow, std::string("PPM ") + what + " overflows");
            }
            v = v * 10 + static_cast<std::uint64_t>(c - '0');
        }
        return v;
    }

    // Exactly one whitespace byte separates the header from P6 raster data.
    void skip_single_space() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
            throw Error(ErrorCode::MalformedHeader, "missing separator before PPM raster");
        }
        ++pos_;
    }

    std::span<const std::uint8_t> rest() const { return bytes_.subspan(pos_); }

private:
    void skip_space() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

RgbImage decode_ppm(std::span<const std::uint8_t> bytes) {
    PnmReader reader(bytes);
    const std::string magic = reader.token();
    if (magic != "P3" && magic != "P6") {
        throw Error(ErrorCode::MalformedHeader, "unrecognized image magic '" + magic + "'");
    }
    const std::uint64_t w = reader.number("width");
    const std::uint64_t h = reader.number("height");
    if (w == 0 || h == 0) throw Error(ErrorCode::MalformedHeader, "PPM dimensions must be positive");
    if (w > kMaxPixels || h > kMaxPixels || w * h > kMaxPixels) {
        throw Error(ErrorCode::DimensionOverflow,
                    "PPM dimensions " + std::to_string(w) + "x" + std::to_string(h) + " too large");
    }
    const std::uint64_t maxval = reader.number("maxval");
    if (maxval != 255) {
        throw Error(ErrorCode::UnsupportedFormat,
                    "only 8-bit PPM (maxval 255) is supported, got " + std::to_string(maxval));
    }

    RgbImage img(static_cast<int>(w), static_cast<int>(h));
    auto px = img.pixels();
    if (magic == "P3") {
        for (auto& p : px) {
            std::uint64_t c[3];
            for (auto& v : c) {
                v = reader.number("sample");
                if (v > 255) throw Error(ErrorCode::MalformedHeader, "PPM sample exceeds maxval");
            }
            p = Rgb{static_cast<std::uint8_t>(c[0]), static_cast<std::uint8_t>(c[1]),
                    static_cast<std::uint8_t>(c[2])};
        }
    } else {
        reader.skip_single_space();
        auto raster = reader.rest();
        if (raster.size() < px.size() * 3) {
            throw Error(ErrorCode::MalformedHeader, "PPM raster is truncated");
        }
        for (std::size_t i = 0; i < px.size(); ++i) {
            px[i] = Rgb{raster[3 * i], raster[3 * i + 1], raster[3 * i + 2]};
        }
    }
    return img;
}

bool is_png(std::span<const std::uint8_t> bytes) {
    return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

RgbImage decode_png(std::span<const std::uint8_t> bytes) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        throw Error(ErrorCode::MalformedHeader, std::string("PNG: ") + image.message);
    }
    if (image.format & PNG_FORMAT_FLAG_LINEAR) {
        png_image_free(&image);
        throw Error(ErrorCode::UnsupportedFormat, "only 8-bit PNG is supported");
    }
    if (std::uint64_t{image.width} * image.height > kMaxPixels) {
        png_image_free(&image);
        throw Error(ErrorCode::DimensionOverflow, "PNG dimensions too large");
    }
    image.format = PNG_FORMAT_RGB;
    RgbImage img(static_cast<int>(image.width), static_cast<int>(image.height));
    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
        throw Error(ErrorCode::MalformedHeader, std::string("PNG: ") + image.message);
    }
    auto px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        px[i] = Rgb{buf[3 * i], buf[3 * i + 1], buf[3 * i + 2]};
    }
    return img;
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

}  // namespace

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid argument";
        case ErrorCode::FileNotFound: return "file not found";
        case ErrorCode::MalformedHeader: return "malformed header";
        case ErrorCode::DimensionOverflow: return "dimension overflow";
        case ErrorCode::UnsupportedFormat: return "unsupported format";
        case ErrorCode::DimensionMismatch: return "dimension mismatch";
        case ErrorCode::Io: return "i/o error";
        case ErrorCode::Validation: return "validation error";
        case ErrorCode::OutOfBounds: return "out of bounds";
    }
    return "unknown error";
}

RgbImage::RgbImage(int width, int height, Rgb fill) : width_(width), height_(height) {
    check_dimensions(width, height);
    pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

BinaryMask::BinaryMask(int width, int height, bool fill) : width_(width), height_(height) {
    check_dimensions(width, height);
    bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill ? 1 : 0);
}

std::size_t BinaryMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

double BinaryMask::fraction() const noexcept {
    return static_cast<double>(count()) / static_cast<double>(bits_.size());
}

HsvPixel rgb_to_hsv(Rgb p) noexcept {
    const int mx = std::max({p.r, p.g, p.b});
    const int mn = std::min({p.r, p.g, p.b});
    const double delta = mx - mn;

    HsvPixel out;
    out.value = mx / 255.0;
    out.saturation = mx == 0 ? 0.0 : delta / mx;
    if (delta == 0.0) return out;

    double h;
    if (mx == p.r) {
        h = 60.0 * ((p.g - p.b) / delta);
    } else if (mx == p.g) {
        h = 60.0 * ((p.b - p.r) / delta + 2.0);
    } else {
        h = 60.0 * ((p.r - p.g) / delta + 4.0);
    }
    if (h < 0.0) h += 360.0;
    if (h >= 360.0) h -= 360.0;
    out.hue = h;
    return out;
}

Rgb hsv_to_rgb(HsvPixel p) noexcept {
    const double h = std::fmod(std::fmod(p.hue, 360.0) + 360.0, 360.0) / 60.0;
    const double s = std::clamp(p.saturation, 0.0, 1.0);
    const double v = std::clamp(p.value, 0.0, 1.0);
    const double c = v * s;
    const double x = c * (1.0 - std::fabs(std::fmod(h, 2.0) - 1.0));
    const double m = v - c;

    double r = 0, g = 0, b = 0;
    switch (static_cast<int>(h)) {
        case 0: r = c; g = x; break;
        case 1: r = x; g = c; break;
        case 2: g = c; b = x; break;
        case 3: g = x; b = c; break;
        case 4: r = x; b = c; break;
        default: r = c; b = x; break;
    }
    auto to8 = [m](double ch) {
        return static_cast<std::uint8_t>(std::clamp(std::lround((ch + m) * 255.0), 0L, 255L));
    };
    return Rgb{to8(r), to8(g), to8(b)};
}

RgbImage decode_image(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) throw Error(ErrorCode::MalformedHeader, "empty image data");
    if (is_png(bytes)) return decode_png(bytes);
    return decode_ppm(bytes);
}

RgbImage load_image(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        throw Error(ErrorCode::FileNotFound, "no such image file: '" + path.string() + "'");
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read '" + path.string() + "'");
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                          std::istreambuf_iterator<char>());
    try {
        return decode_image(bytes);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

std::vector<std::uint8_t> encode_ppm(const RgbImage& img) {
    const std::string header =
        "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + img.size() * 3);
    for (const Rgb& p : img.pixels()) {
        out.push_back(p.r);
        out.push_back(p.g);
        out.push_back(p.b);
    }
    return out;
}

std::vector<std::uint8_t> encode_png(const RgbImage& img) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    image.format = PNG_FORMAT_RGB;

    std::vector<std::uint8_t> raster;
    raster.reserve(img.size() * 3);
    for (const Rgb& p : img.pixels()) {
        raster.push_back(p.r);
        raster.push_back(p.g);
        raster.push_back(p.b);
    }
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, raster.data(), 0, nullptr)) {
        throw Error(ErrorCode::Io, std::string("PNG encode: ") + image.message);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, raster.data(), 0, nullptr)) {
        throw Error(ErrorCode::Io, std::string("PNG encode: ") + image.message);
    }
    out.resize(size);
    return out;
}

void save_image(const RgbImage& img, const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    write_bytes(path, ext == ".png" ? encode_png(img) : encode_ppm(img));
}

RgbImage mask_overlay(const RgbImage& img, const BinaryMask& mask) {
    if (img.width() != mask.width() || img.height() != mask.height()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "mask " + std::to_string(mask.width()) + "x" + std::to_string(mask.height()) +
                        " does not match image " + std::to_string(img.width()) + "x" +
                        std::to_string(img.height()));
    }
    RgbImage out = img;
    auto px = out.pixels();
    auto bits = mask.bits();
    for (std::size_t i = 0; i < px.size(); ++i) {
        if (bits[i]) px[i] = kHighlight;
    }
    return out;
}

void save_mask_overlay(const RgbImage& img, const BinaryMask& mask,
                       const std::filesystem::path& path) {
    save_image(mask_overlay(img, mask), path);
}

RgbImage mask_to_image(const BinaryMask& mask) {
    RgbImage out(mask.width(), mask.height());
    auto px = out.pixels();
    auto bits = mask.bits();
    for (std::size_t i = 0; i < px.size(); ++i) {
        if (bits[i]) px[i] = Rgb{255, 255, 255};
    }
    return out;
}

}  // namespace harvestnav
