// Copyright 2026 The rydqec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>

#include "rydqec/pulse.hpp"

namespace rydqec::testing {

// Canonical pulse: 64 segments, synthesis seed 1.
inline constexpr double kCanonicalT = 7.6129150390625;
inline constexpr double kCanonicalTheta = 2.1666177545514196;

inline std::filesystem::path source_path(const std::string &rel) {
    return std::filesystem::path(RYDQEC_SOURCE_DIR) / rel;
}

inline const PulseProfile &canonical_pulse() {
    static const PulseProfile p = read_pulse(source_path("data/pulse_cz.csv"));
    return p;
}

inline std::filesystem::path scratch_dir(const std::string &name) {
    auto dir = std::filesystem::temp_directory_path() / ("rydqec_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace rydqec::testing
