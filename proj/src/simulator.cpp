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

#include "harvestnav/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "json.hpp"

#include "harvestnav/error.hpp"

namespace harvestnav {

namespace {

struct Palette {
    HsvPixel crop{60.0, 0.80, 0.85};
    HsvPixel residual{50.0, 0.75, 0.80};
    HsvPixel weed{115.0, 0.70, 0.60};
    // Low-saturation yellow-brown, close in hue to the crop.
    HsvPixel soil{40.0, 0.30, 0.45};
    HsvPixel sky{210.0, 0.40, 0.90};
};

Rgb shade(HsvPixel c, double brightness) {
    c.value = std::clamp(c.value * brightness, 0.0, 1.0);
    return hsv_to_rgb(c);
}

Rgb cell_color(const CropCell& cell, double brightness) {
    const Palette pal;
    HsvPixel c;
    switch (cell.state) {
        case CellState::Uncut: c = pal.crop; c.hue += cell.hue_jitter; break;
        case CellState::Residual:
        case CellState::Lying: c = pal.residual; c.hue += cell.hue_jitter; break;
        case CellState::Weed: c = pal.weed; c.hue += 3.0 * cell.hue_jitter; break;
        case CellState::Soil: c = pal.soil; break;
    }
    return shade(c, brightness);
}

Point2 forward(double heading) { return {std::cos(heading), std::sin(heading)}; }

}  // namespace

const char* to_string(CellState s) noexcept {
    switch (s) {
        case CellState::Uncut: return "UNCUT";
        case CellState::Residual: return "RESIDUAL";
        case CellState::Lying: return "LYING";
        case CellState::Soil: return "SOIL";
        case CellState::Weed: return "WEED";
    }
    return "UNKNOWN";
}

std::size_t FieldWorld::count(CellState s) const noexcept {
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(), [s](const CropCell& c) { return c.state == s; }));
}

std::optional<Preset> parse_preset(std::string_view name) noexcept {
    if (name == "single_field") return Preset::SingleField;
    if (name == "two_fields_with_gap") return Preset::TwoFieldsWithGap;
    if (name == "weedy_corner") return Preset::WeedyCorner;
    return std::nullopt;
}

const char* to_string(Preset p) noexcept {
    switch (p) {
        case Preset::SingleField: return "single_field";
        case Preset::TwoFieldsWithGap: return "two_fields_with_gap";
        case Preset::WeedyCorner: return "weedy_corner";
    }
    return "unknown";
}

FieldWorld make_world(Preset preset, int cols, int rows, std::uint64_t seed,
                      const WorldOptions& options) {
    if (cols < 1 || rows < 1) throw Error(ErrorCode::InvalidArgument, "world dimensions must be >= 1");
    if (!(options.cell_size_m > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "cell_size_m must be positive");
    }
    FieldWorld world;
    world.cols = cols;
    world.rows = rows;
    world.cell_size_m = options.cell_size_m;
    world.rng_seed = seed;
    world.cells.resize(static_cast<std::size_t>(cols) * rows);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-5.0, 5.0);
    std::uniform_real_distribution<double> height(-0.05, 0.05);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (CropCell& cell : world.cells) {
        cell.state = CellState::Uncut;
        cell.height_m = kUncutHeightM + height(rng);
        cell.hue_jitter = jitter(rng);
    }

    if (preset == Preset::TwoFieldsWithGap) {
        const int gap = std::clamp(options.gap_width_cells, 0, rows);
        const int first = (rows - gap) / 2;
        for (int r = first; r < first + gap; ++r) {
            for (int c = 0; c < cols; ++c) world.at(c, r) = CropCell{};
        }
    } else if (preset == Preset::WeedyCorner) {
        const int corner_cols = std::max(1, cols / 4);
        const int corner_rows = std::max(1, rows / 4);
        for (int r = rows - corner_rows; r < rows; ++r) {
            for (int c = 0; c < corner_cols; ++c) {
                const double u = unit(rng);
                CropCell& cell = world.at(c, r);
                if (u < 0.5) {
                    cell.state = CellState::Weed;
                    cell.height_m = kWeedHeightM;
                } else if (u < 0.6) {
                    cell.state = CellState::Lying;
                    cell.height_m = kLyingHeightM;
                }
            }
        }
    }
    return world;
}

Point2 camera_position(const FieldWorld& world, const RobotPose& pose, const CameraModel& cam) {
    const Point2 f = forward(pose.heading);
    return {std::clamp(pose.x + cam.forward_offset_m * f.x, 0.0, world.width_m()),
            std::clamp(pose.y + cam.forward_offset_m * f.y, 0.0, world.height_m())};
}

RgbImage render(const FieldWorld& world, const RobotPose& pose, const CameraModel& cam,
                const RenderOptions& options) {
    const int w = cam.image_w;
    const int h = cam.image_h;
    const double cx = w / 2.0;
    const double cy = h / 2.0;
    const double f = cam.focal_px;
    const double cp = std::cos(cam.pitch_rad);
    const double sp = std::sin(cam.pitch_rad);

    RgbImage img(w, h);
    const Palette pal;
    const Rgb sky = shade(pal.sky, options.brightness);
    const Rgb soil = shade(pal.soil, options.brightness);
    for (int row = 0; row < h; ++row) {
        // Elevation of the ray through this row, after pitching the camera.
        const double up = (cy - (row + 0.5)) / f;
        const bool above = up * cp + sp > 0.0;
        for (int col = 0; col < w; ++col) img.at(col, row) = above ? sky : soil;
    }

    const Point2 eye = camera_position(world, pose, cam);
    const Point2 fwd = forward(pose.heading);
    const Point2 right{fwd.y, -fwd.x};
    const double half = world.cell_size_m / 2.0;

    struct Stripe {
        double depth;
        std::size_t index;
        int c0, c1, r0, r1;
    };
    std::vector<Stripe> stripes;
    for (int r = 0; r < world.rows; ++r) {
        for (int c = 0; c < world.cols; ++c) {
            const CropCell& cell = world.at(c, r);
            if (cell.state == CellState::Soil) continue;
            const Point2 center = world.cell_center(c, r);
            const double dx = center.x - eye.x;
            const double dy = center.y - eye.y;
            const double d = dx * fwd.x + dy * fwd.y;
            if (d < cam.near_clip_m || d > cam.max_range_m) continue;
            const double lat = dx * right.x + dy * right.y;

            // Camera-frame depth and height for ground (z = 0) and top points.
            auto depth_at = [&](double z) { return d * cp + (z - cam.mount_height_m) * sp; };
            auto row_at = [&](double z) {
                const double zc = depth_at(z);
                const double yc = -d * sp + (z - cam.mount_height_m) * cp;
                return cy - f * yc / zc;
            };
            const double zc_base = depth_at(0.0);
            if (zc_base <= 0.0 || depth_at(cell.height_m) <= 0.0) continue;
            const double left_col = cx + f * (lat - half) / zc_base;
            const double right_col = cx + f * (lat + half) / zc_base;
            const double top_row = row_at(cell.height_m);
            const double bottom_row = row_at(0.0);

            // Pixel j is covered when its center j + 0.5 lies in [lo, hi).
            const int c0 = std::max(0, static_cast<int>(std::ceil(left_col - 0.5)));
            const int c1 = std::min(w, static_cast<int>(std::ceil(right_col - 0.5)));
            const int r0 = std::max(0, static_cast<int>(std::ceil(top_row - 0.5)));
            const int r1 = std::min(h, static_cast<int>(std::ceil(bottom_row - 0.5)));
            if (c0 >= c1 || r0 >= r1) continue;
            stripes.push_back({d, static_cast<std::size_t>(r) * world.cols + c, c0, c1, r0, r1});
        }
    }
    std::sort(stripes.begin(), stripes.end(), [](const Stripe& a, const Stripe& b) {
        if (a.depth != b.depth) return a.depth > b.depth;
        return a.index < b.index;
    });
    for (const Stripe& s : stripes) {
        const Rgb color = cell_color(world.cells[s.index], options.brightness);
        for (int row = s.r0; row < s.r1; ++row) {
            for (int col = s.c0; col < s.c1; ++col) img.at(col, row) = color;
        }
    }

    if (options.noise_amplitude > 0) {
        std::seed_seq seq{static_cast<std::uint64_t>(world.rng_seed),
                          std::bit_cast<std::uint64_t>(pose.x), std::bit_cast<std::uint64_t>(pose.y),
                          std::bit_cast<std::uint64_t>(pose.heading)};
        std::mt19937_64 rng(seq);
        const int span = 2 * options.noise_amplitude + 1;
        auto jitter = [&](std::uint8_t ch, std::uint64_t bits) {
            const int n = static_cast<int>(bits % static_cast<std::uint64_t>(span)) -
                          options.noise_amplitude;
            return static_cast<std::uint8_t>(std::clamp(ch + n, 0, 255));
        };
        for (Rgb& p : img.pixels()) {
            const std::uint64_t bits = rng();
            p.r = jitter(p.r, bits & 0xFFFF);
            p.g = jitter(p.g, (bits >> 16) & 0xFFFF);
            p.b = jitter(p.b, (bits >> 32) & 0xFFFF);
        }
    }
    return img;
}

RobotPose kinematics_step(const RobotPose& pose, const SteeringCommand& cmd, double dt_s,
                          const VehicleConfig& vehicle) {
    if (!(dt_s > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
    RobotPose next = pose;
    next.steer_angle = std::clamp(cmd.steer, -1.0, 1.0) * vehicle.max_steer_rad;
    const double speed = std::clamp(cmd.drive, 0.0, 1.0) * vehicle.max_speed_mps;
    next.x += speed * std::cos(pose.heading) * dt_s;
    next.y += speed * std::sin(pose.heading) * dt_s;
    // Positive steer is a right turn, which lowers the heading.
    next.heading -= speed / vehicle.wheelbase_m * std::tan(next.steer_angle) * dt_s;
    return next;
}

int harvest_in_place(FieldWorld& world, const RobotPose& pose, const Cutter& cutter) {
    if (!(cutter.width_m > 0.0)) throw Error(ErrorCode::InvalidArgument, "cutter width must be positive");
    const Point2 fwd = forward(pose.heading);
    const Point2 center{pose.x + cutter.forward_offset_m * fwd.x,
                        pose.y + cutter.forward_offset_m * fwd.y};
    const double half_w = cutter.width_m / 2.0;
    const double half_d = cutter.depth_m / 2.0;
    const double reach = std::hypot(half_w, half_d);
    const double s = world.cell_size_m;

    const int c_lo = std::max(0, static_cast<int>(std::floor((center.x - reach) / s)));
    const int c_hi = std::min(world.cols - 1, static_cast<int>(std::floor((center.x + reach) / s)));
    const int r_lo = std::max(0, static_cast<int>(std::floor((center.y - reach) / s)));
    const int r_hi = std::min(world.rows - 1, static_cast<int>(std::floor((center.y + reach) / s)));

    int changed = 0;
    for (int r = r_lo; r <= r_hi; ++r) {
        for (int c = c_lo; c <= c_hi; ++c) {
            CropCell& cell = world.at(c, r);
            if (cell.state != CellState::Uncut) continue;
            const Point2 p = world.cell_center(c, r);
            const double dx = p.x - center.x;
            const double dy = p.y - center.y;
            const double along = dx * fwd.x + dy * fwd.y;
            const double across = dx * fwd.y - dy * fwd.x;
            if (std::fabs(along) <= half_d && std::fabs(across) <= half_w) {
                cell.state = CellState::Residual;
                cell.height_m = kResidualHeightM;
                ++changed;
            }
        }
    }
    return changed;
}

FieldWorld harvest_step(const FieldWorld& world, const RobotPose& pose, const Cutter& cutter) {
    FieldWorld next = world;
    harvest_in_place(next, pose, cutter);
    return next;
}

std::string MissionReport::to_json() const {
    nlohmann::json j;
    j["coverage_fraction"] = coverage_fraction;
    j["steps_used"] = steps_used;
    j["fence_breaches"] = fence_breaches;
    j["reached_done"] = reached_done;
    j["passes_completed"] = passes_completed;
    j["trajectory"] = trajectory;
    return j.dump(2);
}

RobotPose default_start_pose(const FieldWorld& world, const VehicleConfig& vehicle) {
    // Cutter just inside the eastern edge, centered on the first swath.
    const double front_x = world.width_m() - 0.1 * world.cell_size_m;
    const double y = std::min(vehicle.cutter_width_m, world.height_m()) / 2.0;
    return RobotPose{front_x + vehicle.wheelbase_m, y, std::numbers::pi, 0.0};
}

Mission::Mission(FieldWorld world, RobotPose start, MissionConfig config)
    : world_(std::move(world)),
      pose_(start),
      config_(std::move(config)),
      fence_(config_.fence.value_or(GeoFence::rectangle(0.0, 0.0, world_.width_m(),
                                                        world_.height_m(),
                                                        config_.gps_noise_sigma_m))),
      gps_rng_(world_.rng_seed ^ 0x9e3779b97f4a7c15ULL),
      initial_uncut_(world_.count(CellState::Uncut)) {
    trajectory_.push_back({pose_.x, pose_.y, pose_.heading});
}

double Mission::coverage() const noexcept {
    if (initial_uncut_ == 0) return 1.0;
    const std::size_t left = world_.count(CellState::Uncut);
    return static_cast<double>(initial_uncut_ - left) / static_cast<double>(initial_uncut_);
}

void Mission::set_config(const MissionConfig& config) {
    config_ = config;
    if (config_.fence) fence_ = *config_.fence;
    fence_.gps_noise_sigma_m = config_.gps_noise_sigma_m;
    analysis_current_ = false;
}

void Mission::observe() {
    image_ = render(world_, pose_, config_.camera, config_.render);
    BinaryMask mask = segment_image(*image_, config_.segmentation);
    // Everything after segmentation depends on the mask alone, and while
    // driving through standing crop the mask rarely changes between frames.
    if (analysis_ && analysis_current_ && analysis_->segmentation == mask) return;
    analysis_ = analyze_mask(std::move(mask), config_.detection, config_.eof);
    analysis_current_ = true;
}

const RgbImage& Mission::last_image() {
    if (!image_) observe();
    return *image_;
}

const FrameAnalysis& Mission::last_analysis() {
    if (!analysis_) observe();
    return *analysis_;
}

void Mission::step() {
    if (done()) return;
    observe();

    std::optional<Point2> fix;
    if (steps_ % std::max(1, config_.gps_period_steps) == 0) {
        std::normal_distribution<double> noise(0.0, config_.gps_noise_sigma_m);
        const Point2 fwd = forward(pose_.heading);
        const Point2 antenna{pose_.x + config_.camera.forward_offset_m * fwd.x,
                             pose_.y + config_.camera.forward_offset_m * fwd.y};
        const double nx = noise(gps_rng_);
        const double ny = noise(gps_rng_);
        fix = Point2{antenna.x + nx, antenna.y + ny};
    }

    const NavStepResult r =
        nav_step(state_, analysis_->frame, pose_, fix, fence_, config_.nav);
    state_ = r.state;
    if (r.fence_breach) ++breaches_;

    pose_ = kinematics_step(pose_, r.command, config_.dt_s, config_.vehicle);
    const Cutter cutter{config_.vehicle.cutter_width_m, config_.vehicle.cutter_depth_m,
                        config_.vehicle.wheelbase_m};
    harvest_in_place(world_, pose_, cutter);
    ++steps_;
    trajectory_.push_back({pose_.x, pose_.y, pose_.heading});
}

MissionReport Mission::report() const {
    MissionReport rep;
    rep.coverage_fraction = coverage();
    rep.steps_used = steps_;
    rep.fence_breaches = breaches_;
    rep.reached_done = done();
    rep.passes_completed = state_.passes_completed;
    rep.trajectory = trajectory_;
    return rep;
}

MissionReport run_mission(const FieldWorld& world, const RobotPose& start,
                          const MissionConfig& config, int max_steps, const FrameSink& sink) {
    if (max_steps < 1) throw Error(ErrorCode::InvalidArgument, "max_steps must be >= 1");
    Mission mission(world, start, config);
    while (!mission.done() && mission.steps_used() < max_steps) {
        mission.step();
        if (sink) sink(mission.steps_used(), mission.last_image());
    }
    return mission.report();
}

}  // namespace harvestnav
