// Copyright 2026 The mmforge Authors
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

#include <filesystem>

#include "json.hpp"
#include "mmforge/domain_randomization.hpp"
#include "mmforge/em_synthesis.hpp"
#include "mmforge/radar_model.hpp"

namespace mmforge {

// nlohmann::json adapters. Missing keys keep their defaults; a radar config
// without "sweep_rate_hz_per_s" derives it from bandwidth and chirp time.
void to_json(nlohmann::json& j, const Vec3& v);
void from_json(const nlohmann::json& j, Vec3& v);
void to_json(nlohmann::json& j, const Interval& v);
void from_json(const nlohmann::json& j, Interval& v);
void to_json(nlohmann::json& j, const RadarConfig& c);
void from_json(const nlohmann::json& j, RadarConfig& c);
void to_json(nlohmann::json& j, const AntennaPattern& a);
void from_json(const nlohmann::json& j, AntennaPattern& a);
void to_json(nlohmann::json& j, const RadarPose& p);
void from_json(const nlohmann::json& j, RadarPose& p);
void to_json(nlohmann::json& j, const MaterialModel& m);
void from_json(const nlohmann::json& j, MaterialModel& m);
void to_json(nlohmann::json& j, const RandomizationConfig& c);
void from_json(const nlohmann::json& j, RandomizationConfig& c);
void to_json(nlohmann::json& j, const RandomizationPlan& p);
void from_json(const nlohmann::json& j, RandomizationPlan& p);

// Radar file: RadarConfig fields plus optional "antenna" and "material"
// objects.
struct RadarFile {
  RadarConfig config;
  AntennaPattern antenna;
  MaterialModel material;
};

nlohmann::json ReadJsonFile(const std::filesystem::path& path);
RadarFile ParseRadarFile(const nlohmann::json& j);
RadarFile LoadRadarFile(const std::filesystem::path& path);
RandomizationConfig LoadRandomizationConfig(const std::filesystem::path& path);

}  // namespace mmforge
