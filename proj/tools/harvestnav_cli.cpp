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

// harvestnav command-line front end. Talks to the library only through the C API.

#include <harvestnav/harvestnav.h>

#include <cctype>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <optional>
#include <pthread.h>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string params_path;
    std::vector<std::string> overrides;
    std::string input;
    std::string out;
    std::string overlay;
    std::string preset;
    std::string frames;
    std::string bind = "127.0.0.1:8080";
    std::uint64_t seed = 1;
    int max_steps = 0;
    int cols = 20;
    int rows = 20;
};

template <typename T, void (*Destroy)(T*)>
struct Deleter {
    void operator()(T* p) const { Destroy(p); }
};
using ParamsPtr = std::unique_ptr<hn_params, Deleter<hn_params, hn_params_destroy>>;
using ImagePtr = std::unique_ptr<hn_image, Deleter<hn_image, hn_image_destroy>>;
using MaskPtr = std::unique_ptr<hn_mask, Deleter<hn_mask, hn_mask_destroy>>;
using ServicePtr = std::unique_ptr<hn_service, Deleter<hn_service, hn_service_destroy>>;

int report(const std::string& context) {
    std::fprintf(stderr, "harvestnav: %s: %s\n", context.c_str(), hn_last_error());
    return 1;
}

// File (from --params or HARVESTNAV_PARAMS) plus --set overrides, validated.
ParamsPtr load_params(const Options& opt, bool missing_file_ok, int& status) {
    std::string path = opt.params_path;
    if (path.empty()) {
        if (const char* env = std::getenv("HARVESTNAV_PARAMS")) path = env;
    }
    hn_params* raw = nullptr;
    hn_status s;
    if (!path.empty() && !(missing_file_ok && !fs::exists(path))) {
        s = hn_params_load(path.c_str(), &raw);
    } else {
        s = hn_params_create_default(&raw);
    }
    if (s != HN_OK) {
        status = report(path.empty() ? "params" : path);
        return nullptr;
    }
    ParamsPtr params(raw);
    for (const std::string& kv : opt.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "harvestnav: --set expects key=value, got '%s'\n", kv.c_str());
            status = 2;
            return nullptr;
        }
        const std::string key = kv.substr(0, eq);
        if (hn_params_set(params.get(), key.c_str(), kv.c_str() + eq + 1) != HN_OK) {
            status = report("--set " + kv);
            return nullptr;
        }
    }
    if (hn_params_validate(params.get()) != HN_OK) {
        status = report("invalid parameters");
        return nullptr;
    }
    status = 0;
    return params;
}

ImagePtr load_image(const std::string& path, int& status) {
    hn_image* raw = nullptr;
    if (hn_image_load(path.c_str(), &raw) != HN_OK) {
        status = report(path);
        return nullptr;
    }
    return ImagePtr(raw);
}

// <dir>/<stem>_<suffix>.<png|ppm>, keeping PNG input as PNG.
std::string sibling_path(const std::string& input, const std::string& suffix) {
    const fs::path in(input);
    std::string ext = in.extension().string();
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext != ".png") ext = ".ppm";
    return (in.parent_path() / (in.stem().string() + "_" + suffix + ext)).string();
}

int cmd_segment(const Options& opt) {
    int status = 0;
    ParamsPtr params = load_params(opt, false, status);
    if (!params) return status;
    ImagePtr image = load_image(opt.input, status);
    if (!image) return status;

    hn_mask* raw = nullptr;
    if (hn_segment(image.get(), params.get(), &raw) != HN_OK) return report("segment");
    MaskPtr mask(raw);

    const std::string mask_path = opt.out.empty() ? sibling_path(opt.input, "mask") : opt.out;
    const std::string overlay_path =
        opt.overlay.empty() ? sibling_path(opt.input, "overlay") : opt.overlay;
    if (hn_mask_save(mask.get(), mask_path.c_str()) != HN_OK) return report(mask_path);
    if (hn_overlay_save(image.get(), mask.get(), overlay_path.c_str()) != HN_OK) {
        return report(overlay_path);
    }
    std::printf("%.6f\n", hn_mask_fraction(mask.get()));
    return 0;
}

int cmd_detect(const Options& opt) {
    int status = 0;
    ParamsPtr params = load_params(opt, false, status);
    if (!params) return status;
    ImagePtr image = load_image(opt.input, status);
    if (!image) return status;

    hn_frame_result result{};
    hn_mask* raw = nullptr;
    if (hn_analyze(image.get(), params.get(), &result, &raw) != HN_OK) return report("detect");
    MaskPtr stalks(raw);

    const std::string out = opt.out.empty() ? sibling_path(opt.input, "stalks") : opt.out;
    if (hn_overlay_save(image.get(), stalks.get(), out.c_str()) != HN_OK) return report(out);

    if (result.has_centroid) {
        std::printf("segments: %zu, centroid: (%d, %d)\n", result.segments_count,
                    result.centroid_col, result.centroid_row);
    } else {
        std::printf("segments: %zu, centroid: none\n", result.segments_count);
    }
    std::printf("crop_fraction: %.6f, end_of_field: %s\n", result.crop_fraction,
                result.end_of_field ? "true" : "false");
    return 0;
}

int cmd_simulate(const Options& opt) {
    int status = 0;
    ParamsPtr params = load_params(opt, false, status);
    if (!params) return status;
    if (opt.max_steps > 0) {
        const std::string steps = std::to_string(opt.max_steps);
        if (hn_params_set(params.get(), "max_steps", steps.c_str()) != HN_OK) {
            return report("--max-steps");
        }
    }

    char* json = nullptr;
    int done = 0;
    if (hn_simulate(opt.preset.c_str(), opt.cols, opt.rows, opt.seed, params.get(),
                    opt.frames.empty() ? nullptr : opt.frames.c_str(), &json, &done) != HN_OK) {
        return report("simulate");
    }
    std::unique_ptr<char, void (*)(char*)> owned(json, hn_string_free);

    if (opt.out.empty()) {
        std::printf("%s\n", json);
    } else {
        std::FILE* f = std::fopen(opt.out.c_str(), "wb");
        if (!f || std::fprintf(f, "%s\n", json) < 0 || std::fclose(f) != 0) {
            std::fprintf(stderr, "harvestnav: cannot write report %s\n", opt.out.c_str());
            return 1;
        }
    }
    if (!done) {
        std::fprintf(stderr, "harvestnav: mission did not finish within max_steps\n");
        return 3;
    }
    return 0;
}

bool split_bind(const std::string& bind, std::string& host, int& port) {
    const auto colon = bind.rfind(':');
    if (colon == std::string::npos) return false;
    host = bind.substr(0, colon);
    if (host.size() >= 2 && host.front() == '[' && host.back() == ']') {
        host = host.substr(1, host.size() - 2);
    }
    try {
        std::size_t used = 0;
        port = std::stoi(bind.substr(colon + 1), &used);
        return !host.empty() && used == bind.size() - colon - 1 && port >= 0 && port <= 65535;
    } catch (const std::exception&) {
        return false;
    }
}

int cmd_tune_serve(const Options& opt) {
    std::string path = opt.params_path;
    if (path.empty()) {
        const char* env = std::getenv("HARVESTNAV_PARAMS");
        path = env ? env : "harvestnav_params.json";
    }
    Options with_path = opt;
    with_path.params_path = path;

    int status = 0;
    ParamsPtr params = load_params(with_path, true, status);
    if (!params) return status;

    std::string host;
    int port = 0;
    if (!split_bind(opt.bind, host, port)) {
        std::fprintf(stderr, "harvestnav: --bind expects addr:port, got '%s'\n", opt.bind.c_str());
        return 2;
    }

    hn_service* raw = nullptr;
    if (hn_service_create(path.c_str(), params.get(), &raw) != HN_OK) return report("tune-serve");
    ServicePtr service(raw);
    int bound = 0;
    if (hn_service_bind(service.get(), host.c_str(), port, &bound) != HN_OK) {
        return report("tune-serve");
    }

    // Stop cleanly on SIGINT/SIGTERM: the signals are blocked here and
    // collected by a helper thread, which is safe to call into the service.
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
    std::thread([&set, svc = service.get()] {
        int sig = 0;
        sigwait(&set, &sig);
        hn_service_stop(svc);
    }).detach();

    std::fprintf(stderr, "harvestnav: serving on %s:%d (params %s)\n", host.c_str(), bound,
                 path.c_str());
    std::fflush(stderr);
    if (hn_service_listen(service.get()) != HN_OK) return report("tune-serve");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Crop-row perception, navigation and simulation toolkit"};
    app.require_subcommand(1);
    Options opt;

    auto common = [&opt](CLI::App* sub) {
        sub->add_option("--params", opt.params_path,
                        "Parameter file (JSON or key = value); default $HARVESTNAV_PARAMS");
        sub->add_option("--set", opt.overrides, "Override one parameter, key=value (repeatable)")
            ->allow_extra_args(false);
    };

    CLI::App* segment = app.add_subcommand("segment", "Colour-segment an image");
    common(segment);
    segment->add_option("input", opt.input, "Input PPM or PNG image")->required();
    segment->add_option("--out", opt.out, "Mask output path");
    segment->add_option("--overlay", opt.overlay, "Overlay output path");

    CLI::App* detect = app.add_subcommand("detect", "Detect stalks, centroid and end of field");
    common(detect);
    detect->add_option("input", opt.input, "Input PPM or PNG image")->required();
    detect->add_option("--out", opt.out, "Stalk overlay output path");

    CLI::App* simulate = app.add_subcommand("simulate", "Run a closed-loop mission");
    common(simulate);
    simulate->add_option("preset", opt.preset, "single_field, two_fields_with_gap or weedy_corner")
        ->required();
    simulate->add_option("--seed", opt.seed, "World seed");
    simulate->add_option("--out", opt.out, "Report path (default stdout)");
    simulate->add_option("--frames", opt.frames, "Directory for per-step frames");
    simulate->add_option("--max-steps", opt.max_steps, "Step budget (overrides max_steps)")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--cols", opt.cols, "World columns")->check(CLI::Range(1, 1000));
    simulate->add_option("--rows", opt.rows, "World rows")->check(CLI::Range(1, 1000));

    CLI::App* serve = app.add_subcommand("tune-serve", "Serve the tuning HTTP API");
    common(serve);
    serve->add_option("--bind", opt.bind, "addr:port to listen on (port 0 picks one)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors
    }

    if (segment->parsed()) return cmd_segment(opt);
    if (detect->parsed()) return cmd_detect(opt);
    if (simulate->parsed()) return cmd_simulate(opt);
    return cmd_tune_serve(opt);
}
