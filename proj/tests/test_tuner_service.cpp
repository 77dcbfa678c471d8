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

#include <atomic>
#include <memory>
#include <thread>

#include "doctest.h"
#include "harvestnav/base64.hpp"
#include "harvestnav/perception.hpp"
#include "harvestnav/tuner_service.hpp"
#include "httplib.h"
#include "json.hpp"
#include "support.hpp"

using namespace harvestnav;
using json = nlohmann::json;
using hn_test::TempDir;

namespace {

// A service on an ephemeral port, listening on a background thread.
class Running {
public:
    explicit Running(const std::filesystem::path& params_path)
        : session_(std::make_shared<TunerSession>(params_path)), service_(session_) {
        REQUIRE(service_.bind("127.0.0.1", 0));
        thread_ = std::thread([this] { service_.listen(); });
        client_ = std::make_unique<httplib::Client>("127.0.0.1", service_.port());
        client_->set_read_timeout(60, 0);
        for (int i = 0; i < 100 && !client_->Get("/health"); ++i) {
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
    }
    ~Running() {
        service_.stop();
        thread_.join();
    }
    httplib::Client& client() { return *client_; }

private:
    std::shared_ptr<TunerSession> session_;
    TunerService service_;
    std::thread thread_;
    std::unique_ptr<httplib::Client> client_;
};

std::string png_b64(const RgbImage& img) { return base64_encode(encode_png(img)); }

json post_json(httplib::Client& c, const std::string& path, const json& body, int expect = 200) {
    auto r = c.Post(path, body.dump(), "application/json");
    REQUIRE(r);
    CHECK(r->status == expect);
    return json::parse(r->body);
}

}  // namespace

TEST_CASE("health and params") {
    TempDir dir("svc_params");
    Running svc(dir / "p.json");
    auto& c = svc.client();
    auto h = c.Get("/health");
    REQUIRE(h);
    CHECK(h->status == 200);

    httplib::Headers accept{{"Accept", "text/html"}};
    auto g = c.Get("/params", accept);
    REQUIRE(g);
    CHECK(g->status == 200);
    CHECK(g->get_header_value("Content-Type").find("application/json") == 0);
    const json defaults = json::parse(g->body);
    CHECK(defaults == to_json(Params{}));

    auto put = c.Put("/params", R"({"phi1_deg": 30})", "application/json");
    REQUIRE(put);
    CHECK(put->status == 200);
    CHECK(json::parse(put->body)["phi1_deg"] == 30.0);
    CHECK(json::parse(c.Get("/params")->body)["phi1_deg"] == 30.0);
    CHECK(to_json(load_params_file(dir / "p.json"))["phi1_deg"] == 30.0);

    auto bad = c.Put("/params", R"({"plane_a": -1})", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    const json err = json::parse(bad->body);
    CHECK(err["keys"] == json::array({"plane_a"}));
    CHECK(err["error"].get<std::string>().find("plane_a") != std::string::npos);

    // All or nothing.
    auto mixed = c.Put("/params", R"({"phi1_deg": 20, "plane_a": -1})", "application/json");
    REQUIRE(mixed);
    CHECK(mixed->status == 400);
    CHECK(json::parse(c.Get("/params")->body)["phi1_deg"] == 30.0);
    CHECK(to_json(load_params_file(dir / "p.json"))["phi1_deg"] == 30.0);

    CHECK(c.Put("/params", "{not json", "application/json")->status == 400);
    CHECK(c.Put("/params", R"({"nope": 1})", "application/json")->status == 400);
    CHECK(c.Get("/nowhere")->status == 404);
}

TEST_CASE("parameters survive a restart") {
    TempDir dir("svc_restart");
    {
        Running svc(dir / "p.json");
        CHECK(svc.client().Put("/params", R"({"phi1_deg": 33.5})", "application/json")->status == 200);
    }
    Running again(dir / "p.json");
    CHECK(json::parse(again.client().Get("/params")->body)["phi1_deg"] == 33.5);
}

TEST_CASE("segment endpoint") {
    TempDir dir("svc_segment");
    Running svc(dir / "p.json");
    auto& c = svc.client();

    const json yellow = post_json(c, "/segment", {{"image", png_b64(RgbImage(40, 30, {255, 255, 0}))}});
    CHECK(yellow["crop_fraction"] == 1.0);
    CHECK(yellow["segmented_fraction"] == 1.0);
    CHECK(yellow["segments_count"] >= 40);  // every column, plus tilted runs
    CHECK(yellow["centroid"] == json::array({20, 15}));

    // Wider than the default minimum gap, so the empty view reads as end of field.
    const json blue = post_json(c, "/segment", {{"image", png_b64(RgbImage(100, 30, {0, 0, 255}))}});
    CHECK(blue["crop_fraction"] == 0.0);
    CHECK(blue["centroid"].is_null());
    CHECK(blue["end_of_field"] == true);
    const auto overlay = base64_decode(blue["overlay"].get<std::string>());
    REQUIRE(overlay.has_value());
    CHECK(decode_image(*overlay) == RgbImage(100, 30, {0, 0, 255}));

    // Raw image bytes work too and match the analysis pipeline.
    std::mt19937_64 rng(71);
    const RgbImage noisy = hn_test::random_image(rng, 50, 40);
    const auto ppm = encode_ppm(noisy);
    auto raw = c.Post("/segment", std::string(ppm.begin(), ppm.end()), "application/octet-stream");
    REQUIRE(raw);
    CHECK(raw->status == 200);
    const json rj = json::parse(raw->body);
    const Params p;
    const FrameAnalysis a = analyze_frame_detailed(noisy, p.segmentation, p.detection, p.eof);
    CHECK(rj["crop_fraction"] == a.frame.crop_fraction);
    CHECK(rj["segmented_fraction"] == a.segmentation.fraction());
    CHECK(rj["segments_count"] == a.frame.segments_count);
    CHECK(rj["end_of_field"] == a.frame.end_of_field);
    CHECK(decode_image(*base64_decode(rj["overlay"].get<std::string>())) == mask_overlay(noisy, a.stalk_mask));

    post_json(c, "/segment", {{"image", "!!!!"}}, 400);
    post_json(c, "/segment", {{"image", base64_encode(std::vector<std::uint8_t>{1, 2, 3})}}, 400);
    post_json(c, "/segment", {{"picture", "x"}}, 400);

    const std::string huge(kMaxUploadBytes + 10, 'x');
    auto big = c.Post("/segment", huge, "application/octet-stream");
    REQUIRE(big);
    CHECK(big->status == 413);
}

TEST_CASE("simulator endpoints") {
    TempDir dir("svc_sim");
    Running svc(dir / "p.json");
    auto& c = svc.client();

    CHECK(post_json(c, "/sim/step", {{"n", 1}}, 409).contains("error"));
    auto early = c.Get("/sim/frame");
    REQUIRE(early);
    CHECK(early->status == 409);
    post_json(c, "/sim/start", {{"preset", "volcano"}}, 400);

    post_json(c, "/sim/start", {{"preset", "single_field"}, {"cols", 10}, {"rows", 10}, {"seed", 3}});
    json f0 = json::parse(c.Get("/sim/frame")->body);
    CHECK(f0["mode"] == "TRACKING");
    CHECK(f0["step"] == 0);
    CHECK(f0.contains("perception"));
    CHECK(decode_image(*base64_decode(f0["frame"].get<std::string>())).width() == 320);

    post_json(c, "/sim/step", {{"n", 5}});
    const json five = post_json(c, "/sim/step", {{"n", 5}});
    CHECK(five["step"] == 10);
    const json a = json::parse(c.Get("/sim/frame")->body);

    post_json(c, "/sim/start", {{"preset", "single_field"}, {"cols", 10}, {"rows", 10}, {"seed", 3}});
    post_json(c, "/sim/step", {{"n", 10}});
    const json b = json::parse(c.Get("/sim/frame")->body);
    CHECK(a == b);

    // A parameter edit reaches the running mission on the next frame.
    CHECK(c.Put("/params", R"({"phi1_deg": 200, "phi2_deg": 210})", "application/json")->status == 200);
    post_json(c, "/sim/step", {{"n", 1}});
    const json after = json::parse(c.Get("/sim/frame")->body);
    CHECK(after["perception"]["crop_fraction"] == 0.0);

    post_json(c, "/sim/step", {{"n", -1}}, 400);
}

TEST_CASE("concurrent requests are serialized safely") {
    TempDir dir("svc_conc");
    Running svc(dir / "p.json");
    post_json(svc.client(), "/sim/start", {{"preset", "single_field"}, {"cols", 6}, {"rows", 6}});
    const auto port = svc.client().port();
    std::atomic<int> failures{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&, t] {
            httplib::Client c("127.0.0.1", port);
            for (int i = 0; i < 10; ++i) {
                httplib::Result r = t % 2 ? c.Post("/sim/step", R"({"n": 2})", "application/json")
                                          : c.Put("/params", R"({"plane_b": 0.7})", "application/json");
                if (!r || r->status != 200) ++failures;
                if (auto g = c.Get("/sim/frame"); !g || g->status != 200) ++failures;
            }
        });
    }
    for (auto& th : threads) th.join();
    CHECK(failures == 0);
    CHECK(json::parse(svc.client().Get("/sim/frame")->body)["step"] == 40);
}
