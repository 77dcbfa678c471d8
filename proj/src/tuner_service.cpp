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

#include "harvestnav/tuner_service.hpp"

#include <limits>

#include "httplib.h"
#include "json.hpp"

#include "harvestnav/base64.hpp"
#include "harvestnav/error.hpp"
#include "harvestnav/image.hpp"
#include "harvestnav/perception.hpp"

namespace harvestnav {

namespace {

using nlohmann::json;

HttpReply reply(int status, const json& body) { return HttpReply{status, body.dump()}; }

HttpReply error_reply(int status, const std::string& message,
                      const std::vector<std::string>& keys = {}) {
    json body{{"error", message}};
    if (!keys.empty()) body["keys"] = keys;
    return reply(status, body);
}

std::optional<json> parse_object(std::string_view body, HttpReply& failure) {
    if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) return json::object();
    try {
        json j = json::parse(body);
        if (!j.is_object()) {
            failure = error_reply(400, "request body must be a JSON object");
            return std::nullopt;
        }
        return j;
    } catch (const json::parse_error& e) {
        failure = error_reply(400, std::string("malformed JSON: ") + e.what());
        return std::nullopt;
    }
}

// Reads an optional integer field; false (with failure set) when present but
// not an integer within [lo, hi].
bool int_field(const json& obj, const char* key, long long lo, long long hi, long long& value,
               HttpReply& failure) {
    if (!obj.contains(key)) return true;
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < lo || v.get<long long>() > hi) {
        failure = error_reply(400,
                              std::string(key) + " must be an integer in [" + std::to_string(lo) +
                                  ", " + std::to_string(hi) + "]",
                              {key});
        return false;
    }
    value = v.get<long long>();
    return true;
}

json centroid_json(const PerceptionFrame& f) {
    if (!f.centroid) return nullptr;
    return json::array({f.centroid->col, f.centroid->row});
}

json perception_json(const FrameAnalysis& a) {
    return json{{"crop_fraction", a.frame.crop_fraction},
                {"segmented_fraction", a.segmentation.fraction()},
                {"segments_count", a.frame.segments_count},
                {"centroid", centroid_json(a.frame)},
                {"end_of_field", a.frame.end_of_field}};
}

}  // namespace

TunerSession::TunerSession(std::filesystem::path params_path)
    : TunerSession(params_path, std::filesystem::exists(params_path)
                                    ? load_params_file(params_path)
                                    : Params{}) {}

TunerSession::TunerSession(std::filesystem::path params_path, Params initial)
    : path_(std::move(params_path)), params_(std::move(initial)) {}

Params TunerSession::params() const {
    std::lock_guard lock(mu_);
    return params_;
}

HttpReply TunerSession::health() const { return reply(200, json{{"status", "ok"}}); }

HttpReply TunerSession::get_params() const { return reply(200, to_json(params())); }

HttpReply TunerSession::put_params(std::string_view body) {
    HttpReply failure;
    const auto patch = parse_object(body, failure);
    if (!patch) return failure;

    std::lock_guard lock(mu_);
    std::vector<KeyError> errors;
    Params next = apply_json(params_, *patch, errors);
    if (errors.empty()) errors = validate(next);
    if (!errors.empty()) {
        std::string message;
        std::vector<std::string> keys;
        for (const KeyError& e : errors) {
            if (!message.empty()) message += "; ";
            message += e.key + ": " + e.message;
            keys.push_back(e.key);
        }
        return error_reply(400, message, keys);
    }
    try {
        save_params_file(next, path_);
    } catch (const Error& e) {
        return error_reply(500, e.what());
    }
    params_ = std::move(next);
    ++params_version_;
    return reply(200, to_json(params_));
}

HttpReply TunerSession::segment(std::string_view body) const {
    if (body.size() > kMaxUploadBytes) return error_reply(413, "upload exceeds 16 MiB");
    std::vector<std::uint8_t> bytes;
    const std::size_t first = body.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos && body[first] == '{') {
        HttpReply failure;
        const auto obj = parse_object(body, failure);
        if (!obj) return failure;
        if (!obj->contains("image") || !obj->at("image").is_string()) {
            return error_reply(400, "expected {\"image\": <base64 PNG or PPM>}", {"image"});
        }
        auto decoded = base64_decode(obj->at("image").get_ref<const std::string&>());
        if (!decoded) return error_reply(400, "image is not valid base64", {"image"});
        bytes = std::move(*decoded);
    } else {
        bytes.assign(body.begin(), body.end());
    }

    const Params p = params();
    try {
        const RgbImage img = decode_image(bytes);
        const FrameAnalysis a = analyze_frame_detailed(img, p.segmentation, p.detection, p.eof);
        json out = perception_json(a);
        out["overlay"] = base64_encode(encode_png(mask_overlay(img, a.stalk_mask)));
        return reply(200, out);
    } catch (const Error& e) {
        return error_reply(400, std::string("undecodable image: ") + e.what());
    }
}

HttpReply TunerSession::sim_start(std::string_view body) {
    HttpReply failure;
    const auto obj = parse_object(body, failure);
    if (!obj) return failure;
    if (!obj->contains("preset") || !obj->at("preset").is_string()) {
        return error_reply(400, "preset is required", {"preset"});
    }
    const auto preset = parse_preset(obj->at("preset").get<std::string>());
    if (!preset) {
        return error_reply(400,
                           "unknown preset (expected single_field, two_fields_with_gap or "
                           "weedy_corner)",
                           {"preset"});
    }
    long long cols = 20, rows = 20, seed = 1;
    if (!int_field(*obj, "cols", 1, 1000, cols, failure) ||
        !int_field(*obj, "rows", 1, 1000, rows, failure) ||
        !int_field(*obj, "seed", 0, std::numeric_limits<long long>::max(), seed, failure)) {
        return failure;
    }

    std::lock_guard lock(mu_);
    FieldWorld world = make_world(*preset, static_cast<int>(cols), static_cast<int>(rows),
                                  static_cast<std::uint64_t>(seed), to_world_options(params_));
    const MissionConfig config = to_mission_config(params_);
    const RobotPose start = default_start_pose(world, config.vehicle);
    mission_.emplace(std::move(world), start, config);
    mission_params_version_ = params_version_;
    return reply(200, json{{"step", 0}, {"mode", to_string(mission_->nav_state().mode)}});
}

HttpReply TunerSession::sim_step(std::string_view body) {
    HttpReply failure;
    const auto obj = parse_object(body, failure);
    if (!obj) return failure;
    long long n = 1;
    if (!int_field(*obj, "n", 0, 1000000, n, failure)) return failure;

    // One step per lock so parameter edits and reads can interleave.
    for (long long i = 0; i < n; ++i) {
        std::lock_guard lock(mu_);
        if (!mission_) return error_reply(409, "no simulation started; POST /sim/start first");
        if (mission_->done()) break;
        if (mission_params_version_ != params_version_) {
            mission_->set_config(to_mission_config(params_));
            mission_params_version_ = params_version_;
        }
        mission_->step();
    }
    std::lock_guard lock(mu_);
    if (!mission_) return error_reply(409, "no simulation started; POST /sim/start first");
    return reply(200, json{{"step", mission_->steps_used()},
                           {"mode", to_string(mission_->nav_state().mode)},
                           {"done", mission_->done()},
                           {"coverage_fraction", mission_->coverage()}});
}

HttpReply TunerSession::sim_frame() {
    std::lock_guard lock(mu_);
    if (!mission_) return error_reply(409, "no simulation started; POST /sim/start first");
    if (mission_params_version_ != params_version_) {
        mission_->set_config(to_mission_config(params_));
        mission_params_version_ = params_version_;
    }
    const RgbImage& img = mission_->last_image();
    const FrameAnalysis& a = mission_->last_analysis();
    const RobotPose& pose = mission_->pose();
    const NavState& state = mission_->nav_state();
    json out{{"step", mission_->steps_used()},
             {"mode", to_string(state.mode)},
             {"done", mission_->done()},
             {"passes_completed", state.passes_completed},
             {"coverage_fraction", mission_->coverage()},
             {"fence_breaches", mission_->fence_breaches()},
             {"pose",
              {{"x", pose.x}, {"y", pose.y}, {"heading", pose.heading},
               {"steer_angle", pose.steer_angle}}},
             {"perception", perception_json(a)},
             {"frame", base64_encode(encode_png(img))}};
    return reply(200, out);
}

struct TunerService::Impl {
    std::shared_ptr<TunerSession> session;
    httplib::Server server;
    int port = -1;
};

TunerService::TunerService(std::shared_ptr<TunerSession> session) : impl_(new Impl) {
    impl_->session = std::move(session);
    auto& svr = impl_->server;
    svr.set_payload_max_length(kMaxUploadBytes);
    // The library default adds SO_REUSEPORT, which would let a second server
    // share a port that is already in use instead of failing to bind.
    svr.set_socket_options([](socket_t sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    auto send = [](httplib::Response& res, const HttpReply& r) {
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };
    TunerSession* s = impl_->session.get();
    svr.Get("/health", [=](const httplib::Request&, httplib::Response& res) { send(res, s->health()); });
    svr.Get("/params", [=](const httplib::Request&, httplib::Response& res) { send(res, s->get_params()); });
    svr.Put("/params", [=](const httplib::Request& req, httplib::Response& res) {
        send(res, s->put_params(req.body));
    });
    svr.Post("/segment", [=](const httplib::Request& req, httplib::Response& res) {
        send(res, s->segment(req.body));
    });
    svr.Post("/sim/start", [=](const httplib::Request& req, httplib::Response& res) {
        send(res, s->sim_start(req.body));
    });
    svr.Post("/sim/step", [=](const httplib::Request& req, httplib::Response& res) {
        send(res, s->sim_step(req.body));
    });
    svr.Get("/sim/frame", [=](const httplib::Request&, httplib::Response& res) { send(res, s->sim_frame()); });
    svr.set_exception_handler([=](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        send(res, error_reply(500, what));
    });
    svr.set_error_handler([=](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty()) return;
        const char* what = res.status == 413 ? "upload exceeds 16 MiB" : "not found";
        res.set_content(json{{"error", what}}.dump(), "application/json");
    });
}

TunerService::~TunerService() { stop(); }

bool TunerService::bind(const std::string& host, int port) {
    if (port == 0) {
        impl_->port = impl_->server.bind_to_any_port(host);
        return impl_->port > 0;
    }
    if (!impl_->server.bind_to_port(host, port)) return false;
    impl_->port = port;
    return true;
}

int TunerService::port() const noexcept { return impl_->port; }

bool TunerService::listen() { return impl_->server.listen_after_bind(); }

void TunerService::stop() {
    if (impl_->server.is_running()) impl_->server.stop();
}

}  // namespace harvestnav
