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

#include "binary_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "mmforge/common.hpp"

namespace mmforge::internal {

std::filesystem::path SidecarPath(const std::filesystem::path& payload) {
  std::filesystem::path p = payload;
  return p.replace_extension(".json");
}

void WriteFloat32(const std::filesystem::path& path, std::span<const float> values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(float)));
  } else {
    for (float v : values) {
      const uint32_t bits = __builtin_bswap32(std::bit_cast<uint32_t>(v));
      out.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
    }
  }
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

std::vector<float> ReadFloat32(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  const auto bytes = static_cast<size_t>(in.tellg());
  if (bytes % sizeof(float) != 0) {
    throw Error(ErrorCode::kFormat, path.string() + ": payload of " + std::to_string(bytes) +
                                        " bytes is not a whole number of float32 values");
  }
  in.seekg(0);
  std::vector<float> values(bytes / sizeof(float));
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(bytes));
  if (!in) throw Error(ErrorCode::kIo, "short read from " + path.string());
  if constexpr (std::endian::native != std::endian::little) {
    for (float& v : values) v = std::bit_cast<float>(__builtin_bswap32(std::bit_cast<uint32_t>(v)));
  }
  return values;
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

nlohmann::json ReadSidecar(const std::filesystem::path& payload, const char* expected_format) {
  const auto side = SidecarPath(payload);
  std::ifstream in(side);
  if (!in) throw Error(ErrorCode::kIo, "missing sidecar " + side.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, side.string() + ": " + e.what());
  }
  const std::string format = j.value("format", "");
  if (format != expected_format) {
    throw Error(ErrorCode::kFormat, side.string() + ": expected format '" + expected_format +
                                        "', found '" + format + "'");
  }
  return j;
}

}  // namespace mmforge::internal
