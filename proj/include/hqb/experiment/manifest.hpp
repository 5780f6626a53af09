// Copyright 2026 The hqb Authors
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
/**
 * @file
 * The run manifest written next to every set of outputs.
 */
#pragma once

#include "hqb/checksum.hpp"
#include "hqb/error.hpp"
#include "hqb/rng.hpp"
#include "hqb/version.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace hqb::experiment {

inline constexpr std::string_view kRunManifestFormat = "hqb-run";

inline std::string eigen_version() {
    return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
           std::to_string(EIGEN_MINOR_VERSION);
}

/// `outputs` are checksummed and recorded relative to `base` when possible.
inline nlohmann::json run_manifest(std::string_view command, const nlohmann::json &config,
                                   const std::vector<std::filesystem::path> &outputs,
                                   const std::filesystem::path &base = {}) {
    nlohmann::json files = nlohmann::json::array();
    for (const auto &p : outputs) {
        std::string name = p.string();
        if (!base.empty()) {
            const auto rel = p.lexically_relative(base);
            if (!rel.empty() && *rel.begin() != "..") {
                name = rel.generic_string();
            }
        }
        files.push_back({{"path", name}, {"sha256", sha256_file(p)}});
    }
    return {{"format", kRunManifestFormat},
            {"version", 1},
            {"hqb_version", kVersion},
            {"command", command},
            {"compiler", __VERSION__},
            {"eigen", eigen_version()},
            {"rng", kRngName},
            {"config", config},
            {"outputs", files}};
}

inline std::filesystem::path write_run_manifest(const std::filesystem::path &path,
                                                const nlohmann::json &manifest) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << manifest.dump(1) << '\n';
    return path;
}

} // namespace hqb::experiment
