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
#include <span>
#include <vector>

#include "json.hpp"

namespace mmforge::internal {

// Little-endian float32 payloads with a JSON sidecar next to them
// ("x.f32" -> "x.json").
std::filesystem::path SidecarPath(const std::filesystem::path& payload);

void WriteFloat32(const std::filesystem::path& path, std::span<const float> values);
std::vector<float> ReadFloat32(const std::filesystem::path& path);

void WriteTextFile(const std::filesystem::path& path, const std::string& text);
nlohmann::json ReadSidecar(const std::filesystem::path& payload, const char* expected_format);

}  // namespace mmforge::internal
