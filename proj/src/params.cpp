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

#include "harvestnav/params.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "harvestnav/error.hpp"

namespace harvestnav {

namespace {

using Check = std::function<std::optional<std::string>(double)>;

struct KeySpec {
    const char* name;
    bool integer;
    std::function<double(const Params&)> get;
    std::function<void(Params&, double)> set;
    Check check;
};

Check at_least(double lo) {
    return [lo](double v) -> std::optional<std::string> {
        if (v >= lo) return std::nullopt;
        std::ostringstream os;
        os << "must be >= " << lo;
        return os.str();
    };
}

Check greater_than(double lo) {
    return [lo](double v) -> std::optional<std::string> {
        if (v > lo) return std::nullopt;
        std::ostringstream os;
        os << "must be > " << lo;
        return os.str();
    };
}

Check half_open(double lo, double hi) {  // [lo, hi)
    return [lo, hi](double v) -> std::optional<std::string> {
        if (v >= lo && v < hi) return std::nullopt;
        std::ostringstream os;
        os << "must lie in [" << lo << ", " << hi << ")";
        return os.str();
    };
}

Check open_closed(double lo, double hi) {  // (lo, hi]
    return [lo, hi](double v) -> std::optional<std::string> {
        if (v > lo && v <= hi) return std::nullopt;
        std::ostringstream os;
        os << "must lie in (" << lo << ", " << hi << "]";
        return os.str();
    };
}

Check open_open(double lo, double hi) {
    return [lo, hi](double v) -> std::optional<std::string> {
        if (v > lo && v < hi) return std::nullopt;
        std::ostringstream os;
        os << "must lie in (" << lo << ", " << hi << ")";
        return os.str();
    };
}

Check closed(double lo, double hi) {
    return [lo, hi](double v) -> std::optional<std::string> {
        if (v >= lo && v <= hi) return std::nullopt;
        std::ostringstream os;
        os << "must lie in [" << lo << ", " << hi << "]";
        return os.str();
    };
}

Check any_finite() {
    return [](double) -> std::optional<std::string> { return std::nullopt; };
}

#define HN_KEY_D(NAME, FIELD, CHECK)                                                   \
    KeySpec {                                                                          \
        NAME, false, [](const Params& p) { return static_cast<double>(p.FIELD); },     \
            [](Params& p, double v) { p.FIELD = v; }, CHECK                            \
    }
#define HN_KEY_I(NAME, FIELD, CHECK)                                                   \
    KeySpec {                                                                          \
        NAME, true, [](const Params& p) { return static_cast<double>(p.FIELD); },      \
            [](Params& p, double v) { p.FIELD = static_cast<int>(v); }, CHECK          \
    }

const std::vector<KeySpec>& specs() {
    static const std::vector<KeySpec> table = {
        HN_KEY_D("phi1_deg", segmentation.phi1_deg, any_finite()),
        HN_KEY_D("phi2_deg", segmentation.phi2_deg, any_finite()),
        HN_KEY_D("plane_a", segmentation.plane_a, at_least(0.0)),
        HN_KEY_D("plane_b", segmentation.plane_b, any_finite()),
        HN_KEY_D("tilt_tolerance_deg", detection.tilt_tolerance_deg, half_open(0.0, 45.0)),
        HN_KEY_I("min_stalk_length_px", detection.min_stalk_length_px, at_least(1)),
        HN_KEY_I("eof_drop_threshold_px", eof.drop_threshold_px, at_least(1)),
        HN_KEY_I("eof_min_gap_width_cols", eof.min_gap_width_cols, at_least(1)),
        HN_KEY_D("focal_px", focal_px, greater_than(0.0)),
        HN_KEY_D("steer_gain", nav.steer_gain, greater_than(0.0)),
        HN_KEY_D("cruise_drive", nav.cruise_drive, open_closed(0.0, 1.0)),
        HN_KEY_D("turn_drive", nav.turn_drive, open_closed(0.0, 1.0)),
        HN_KEY_I("eof_debounce_frames", nav.eof_debounce_frames, at_least(1)),
        HN_KEY_D("done_crop_fraction", nav.done_crop_fraction, closed(0.0, 1.0)),
        HN_KEY_D("heading_tolerance_deg", nav.heading_tolerance_deg, open_open(0.0, 90.0)),
        HN_KEY_D("gps_noise_sigma_m", gps_noise_sigma_m, closed(0.5, 1.0)),
        HN_KEY_I("gps_period_steps", gps_period_steps, at_least(1)),
        HN_KEY_I("image_width", image_width, closed(1, 4096)),
        HN_KEY_I("image_height", image_height, closed(1, 4096)),
        HN_KEY_D("mount_height_m", mount_height_m, greater_than(0.0)),
        HN_KEY_D("pitch_deg", pitch_deg, open_open(-90.0, 90.0)),
        HN_KEY_D("max_range_m", max_range_m, greater_than(0.0)),
        HN_KEY_D("near_clip_m", near_clip_m, at_least(0.0)),
        HN_KEY_D("wheelbase_m", wheelbase_m, greater_than(0.0)),
        HN_KEY_D("max_speed_mps", max_speed_mps, greater_than(0.0)),
        HN_KEY_D("max_steer_deg", max_steer_deg, open_open(0.0, 90.0)),
        HN_KEY_D("dt_s", dt_s, greater_than(0.0)),
        HN_KEY_D("cutter_width_m", cutter_width_m, greater_than(0.0)),
        HN_KEY_D("cutter_depth_m", cutter_depth_m, greater_than(0.0)),
        HN_KEY_D("cell_size_m", cell_size_m, greater_than(0.0)),
        HN_KEY_I("gap_width_cells", gap_width_cells, at_least(0)),
        HN_KEY_D("brightness", brightness, greater_than(0.0)),
        HN_KEY_I("max_steps", max_steps, at_least(1)),
    };
    return table;
}

#undef HN_KEY_D
#undef HN_KEY_I

constexpr const char* kFenceKey = "fence_corners";

const KeySpec* find_spec(std::string_view key) {
    for (const KeySpec& s : specs()) {
        if (key == s.name) return &s;
    }
    return nullptr;
}

std::optional<std::string> assign_number(Params& p, const KeySpec& spec, double v) {
    if (!std::isfinite(v)) return "must be a finite number";
    if (spec.integer) {
        if (v != std::floor(v) || std::fabs(v) > std::numeric_limits<int>::max()) {
            return "must be an integer";
        }
    }
    spec.set(p, v);
    return std::nullopt;
}

std::optional<double> parse_double(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
    return v;
}

std::optional<std::array<Point2, 4>> parse_fence_text(std::string_view text) {
    // "x,y; x,y; x,y; x,y"
    std::array<Point2, 4> out;
    std::size_t n = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find(';', start), text.size());
        const std::string_view part = text.substr(start, end - start);
        const std::size_t comma = part.find(',');
        if (comma == std::string_view::npos || n == 4) return std::nullopt;
        const auto x = parse_double(part.substr(0, comma));
        const auto y = parse_double(part.substr(comma + 1));
        if (!x || !y) return std::nullopt;
        out[n++] = Point2{*x, *y};
        start = end + 1;
    }
    if (n != 4) return std::nullopt;
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

// Line on which a JSON key first appears, for diagnostics.
int line_of_key(std::string_view text, const std::string& key) {
    const std::string needle = "\"" + key + "\"";
    const std::size_t pos = text.find(needle);
    if (pos == std::string_view::npos) return 1;
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

}  // namespace

const std::vector<std::string>& param_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const KeySpec& s : specs()) out.emplace_back(s.name);
        out.emplace_back(kFenceKey);
        return out;
    }();
    return keys;
}

std::vector<KeyError> validate(const Params& params) {
    std::vector<KeyError> errors;
    for (const KeySpec& s : specs()) {
        const double v = s.get(params);
        if (!std::isfinite(v)) {
            errors.push_back({s.name, "must be a finite number"});
        } else if (auto msg = s.check(v)) {
            errors.push_back({s.name, *msg});
        }
    }
    if (params.near_clip_m >= params.max_range_m) {
        errors.push_back({"near_clip_m", "must be below max_range_m"});
    }
    if (params.fence_corners) {
        try {
            validate(GeoFence{*params.fence_corners, params.gps_noise_sigma_m});
        } catch (const Error& e) {
            // sigma problems are already reported under their own key
            if (std::string(e.what()).find("gps_noise_sigma_m") == std::string::npos) {
                errors.push_back({kFenceKey, e.what()});
            }
        }
    }
    return errors;
}

nlohmann::json to_json(const Params& params) {
    nlohmann::json j = nlohmann::json::object();
    for (const KeySpec& s : specs()) {
        const double v = s.get(params);
        if (s.integer) {
            j[s.name] = static_cast<int>(v);
        } else {
            j[s.name] = v;
        }
    }
    if (params.fence_corners) {
        nlohmann::json corners = nlohmann::json::array();
        for (const Point2& c : *params.fence_corners) corners.push_back({c.x, c.y});
        j[kFenceKey] = corners;
    } else {
        j[kFenceKey] = nullptr;
    }
    return j;
}

Params apply_json(const Params& base, const nlohmann::json& patch, std::vector<KeyError>& errors) {
    Params out = base;
    if (!patch.is_object()) {
        errors.push_back({"", "parameter document must be a JSON object"});
        return out;
    }
    for (const auto& [key, value] : patch.items()) {
        if (key == kFenceKey) {
            if (value.is_null()) {
                out.fence_corners.reset();
                continue;
            }
            bool ok = value.is_array() && value.size() == 4;
            std::array<Point2, 4> corners;
            for (std::size_t i = 0; ok && i < 4; ++i) {
                const auto& c = value[i];
                ok = c.is_array() && c.size() == 2 && c[0].is_number() && c[1].is_number();
                if (ok) corners[i] = Point2{c[0].get<double>(), c[1].get<double>()};
            }
            if (!ok) {
                errors.push_back({key, "must be null or an array of four [x, y] pairs"});
            } else {
                out.fence_corners = corners;
            }
            continue;
        }
        const KeySpec* spec = find_spec(key);
        if (!spec) {
            errors.push_back({key, "unknown parameter"});
            continue;
        }
        if (!value.is_number()) {
            errors.push_back({key, "must be a number"});
            continue;
        }
        if (auto msg = assign_number(out, *spec, value.get<double>())) errors.push_back({key, *msg});
    }
    return out;
}

void set_param(Params& params, std::string_view key, std::string_view value) {
    const std::string k = trim(key);
    const std::string v = trim(value);
    if (k == kFenceKey) {
        if (v == "none" || v == "null") {
            params.fence_corners.reset();
            return;
        }
        auto corners = parse_fence_text(v);
        if (!corners) {
            throw Error(ErrorCode::Validation, k + ": expected 'x,y; x,y; x,y; x,y' or 'none'");
        }
        params.fence_corners = *corners;
        return;
    }
    const KeySpec* spec = find_spec(k);
    if (!spec) throw Error(ErrorCode::Validation, k + ": unknown parameter");
    const auto number = parse_double(v);
    if (!number) throw Error(ErrorCode::Validation, k + ": '" + v + "' is not a number");
    if (auto msg = assign_number(params, *spec, *number)) {
        throw Error(ErrorCode::Validation, k + ": " + *msg);
    }
}

Params parse_params(std::string_view text, const std::string& origin) {
    const std::size_t first = text.find_first_not_of(" \t\r\n");
    Params params;
    std::map<std::string, int> key_lines;  // key=value form only
    if (first != std::string_view::npos && text[first] == '{') {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            // The library message already carries "line N, column M".
            std::string msg = e.what();
            const std::size_t at = msg.find("parse error");
            throw Error(ErrorCode::Validation,
                        origin + ": " + (at == std::string::npos ? msg : msg.substr(at)));
        }
        std::vector<KeyError> errors;
        params = apply_json(params, doc, errors);
        if (!errors.empty()) {
            const KeyError& e = errors.front();
            throw Error(ErrorCode::Validation, origin + ":" +
                                                   std::to_string(line_of_key(text, e.key)) + ": " +
                                                   e.key + ": " + e.message);
        }
    } else {
        std::istringstream in{std::string(text)};
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::size_t hash = line.find('#');
            const std::string body = trim(std::string_view(line).substr(0, hash));
            if (body.empty()) continue;
            const std::size_t sep = body.find_first_of("=:");
            if (sep == std::string::npos) {
                throw Error(ErrorCode::Validation, origin + ":" + std::to_string(lineno) +
                                                       ": expected 'key = value'");
            }
            key_lines[trim(std::string_view(body).substr(0, sep))] = lineno;
            try {
                set_param(params, std::string_view(body).substr(0, sep),
                          std::string_view(body).substr(sep + 1));
            } catch (const Error& e) {
                throw Error(ErrorCode::Validation,
                            origin + ":" + std::to_string(lineno) + ": " + e.what());
            }
        }
    }
    const auto errors = validate(params);
    if (!errors.empty()) {
        const KeyError& e = errors.front();
        const auto it = key_lines.find(e.key);
        const int lineno = it != key_lines.end() ? it->second : line_of_key(text, e.key);
        throw Error(ErrorCode::Validation,
                    origin + ":" + std::to_string(lineno) + ": " + e.key + ": " + e.message);
    }
    return params;
}

Params load_params_file(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        throw Error(ErrorCode::FileNotFound, "no such params file: '" + path.string() + "'");
    }
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot read '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_params(buf.str(), path.string());
}

void save_params_file(const Params& params, const std::filesystem::path& path) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw Error(ErrorCode::Io, "cannot write '" + tmp.string() + "'");
        out << to_json(params).dump(2) << "\n";
        if (!out) throw Error(ErrorCode::Io, "failed writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot replace '" + path.string() + "': " + ec.message());
}

MissionConfig to_mission_config(const Params& p) {
    constexpr double deg = std::numbers::pi / 180.0;
    MissionConfig c;
    c.segmentation = p.segmentation;
    c.detection = p.detection;
    c.eof = p.eof;
    c.nav = p.nav;
    c.camera.focal_px = p.focal_px;
    c.camera.image_w = p.image_width;
    c.camera.image_h = p.image_height;
    c.camera.mount_height_m = p.mount_height_m;
    c.camera.pitch_rad = p.pitch_deg * deg;
    c.camera.max_range_m = p.max_range_m;
    c.camera.near_clip_m = p.near_clip_m;
    c.camera.forward_offset_m = p.wheelbase_m;
    c.vehicle.wheelbase_m = p.wheelbase_m;
    c.vehicle.max_speed_mps = p.max_speed_mps;
    c.vehicle.max_steer_rad = p.max_steer_deg * deg;
    c.vehicle.cutter_width_m = p.cutter_width_m;
    c.vehicle.cutter_depth_m = p.cutter_depth_m;
    c.render.brightness = p.brightness;
    c.dt_s = p.dt_s;
    c.gps_noise_sigma_m = p.gps_noise_sigma_m;
    c.gps_period_steps = p.gps_period_steps;
    if (p.fence_corners) c.fence = GeoFence{*p.fence_corners, p.gps_noise_sigma_m};
    return c;
}

WorldOptions to_world_options(const Params& p) {
    return WorldOptions{p.cell_size_m, p.gap_width_cells};
}

}  // namespace harvestnav
