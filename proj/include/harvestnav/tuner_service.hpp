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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "harvestnav/params.hpp"
#include "harvestnav/simulator.hpp"

namespace harvestnav {

struct HttpReply {
    int status = 200;
    std::string body;  // JSON
};

/// Everything the tuning API can change: the parameter set, its backing file
/// and at most one simulator mission. All methods are safe to call from
/// concurrent handlers.
class TunerSession {
public:
    /// Reads params_path if it exists (throws Validation on a malformed file);
    /// otherwise starts from defaults and creates the file on the first update.
    explicit TunerSession(std::filesystem::path params_path);
    TunerSession(std::filesystem::path params_path, Params initial);

    Params params() const;

    HttpReply health() const;
    HttpReply get_params() const;
    HttpReply put_params(std::string_view body);
    HttpReply segment(std::string_view body) const;
    HttpReply sim_start(std::string_view body);
    HttpReply sim_step(std::string_view body);
    HttpReply sim_frame();

private:
    std::filesystem::path path_;
    mutable std::mutex mu_;
    Params params_;
    std::uint64_t params_version_ = 0;
    std::optional<Mission> mission_;
    std::uint64_t mission_params_version_ = 0;
};

inline constexpr std::size_t kMaxUploadBytes = 16u << 20;

/// HTTP front end for a TunerSession.
class TunerService {
public:
    explicit TunerService(std::shared_ptr<TunerSession> session);
    ~TunerService();
    TunerService(const TunerService&) = delete;
    TunerService& operator=(const TunerService&) = delete;

    /// Returns false when the address cannot be bound. Port 0 picks a free port.
    bool bind(const std::string& host, int port);
    int port() const noexcept;
    /// Blocks until stop().
    bool listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace harvestnav
