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

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mmforge/mesh_motion.hpp"

namespace mmforge::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("mmforge_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void WriteText(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

inline std::string ReadBytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Square of side `size` centred at `center`, lying in a plane of constant z
// and facing +z (two triangles).
inline MeshFrame MakeQuad(const Vec3& center, double size, int segment = 0) {
  const double h = size / 2.0;
  MeshFrame f;
  f.vertices = {center + Vec3{-h, -h, 0.0}, center + Vec3{h, -h, 0.0}, center + Vec3{h, h, 0.0},
                center + Vec3{-h, h, 0.0}};
  f.facets = {{0, 1, 2}, {0, 2, 3}};
  f.segment_of_facet = {segment, segment};
  return f;
}

// Single small triangle facing +z with its centroid at `center`.
inline MeshFrame MakeTriangle(const Vec3& center, double size, int segment = 0) {
  const double h = size / 2.0;
  MeshFrame f;
  f.vertices = {Vec3{-h, -h, 0.0}, Vec3{h, -h, 0.0}, Vec3{0.0, h, 0.0}};
  const Vec3 c = (f.vertices[0] + f.vertices[1] + f.vertices[2]) * (1.0 / 3.0);
  for (Vec3& v : f.vertices) v = v + (center - c);
  f.facets = {{0, 1, 2}};
  f.segment_of_facet = {segment};
  return f;
}

// Outward-facing UV sphere; facet count is 2 * slices * (stacks - 1).
inline MeshFrame MakeSphere(const Vec3& center, double radius, int stacks, int slices,
                            int segment = 0) {
  MeshFrame f;
  const double pi = 3.14159265358979323846;
  f.vertices.push_back(center + Vec3{0.0, radius, 0.0});
  for (int i = 1; i < stacks; ++i) {
    const double phi = pi * i / stacks;
    for (int j = 0; j < slices; ++j) {
      const double th = 2.0 * pi * j / slices;
      f.vertices.push_back(center + Vec3{radius * std::sin(phi) * std::cos(th),
                                         radius * std::cos(phi),
                                         radius * std::sin(phi) * std::sin(th)});
    }
  }
  f.vertices.push_back(center + Vec3{0.0, -radius, 0.0});
  const uint32_t bottom = static_cast<uint32_t>(f.vertices.size() - 1);
  auto ring = [&](int i, int j) {
    return static_cast<uint32_t>(1 + (i - 1) * slices + ((j % slices) + slices) % slices);
  };
  for (int j = 0; j < slices; ++j) f.facets.push_back({0, ring(1, j + 1), ring(1, j)});
  for (int i = 1; i < stacks - 1; ++i) {
    for (int j = 0; j < slices; ++j) {
      f.facets.push_back({ring(i, j), ring(i, j + 1), ring(i + 1, j)});
      f.facets.push_back({ring(i, j + 1), ring(i + 1, j + 1), ring(i + 1, j)});
    }
  }
  for (int j = 0; j < slices; ++j) {
    f.facets.push_back({bottom, ring(stacks - 1, j), ring(stacks - 1, j + 1)});
  }
  f.segment_of_facet.assign(f.facets.size(), segment);
  return f;
}

// Keyframes of `base` displaced by offset(t) at the given rate.
inline MeshSequence Animate(const MeshFrame& base, double rate_hz, double duration_s,
                            const std::function<Vec3(double)>& offset) {
  MeshSequence seq;
  seq.keyframe_rate = rate_hz;
  const int n = static_cast<int>(std::llround(duration_s * rate_hz)) + 1;
  for (int i = 0; i < n; ++i) {
    MeshFrame f = base;
    f.timestamp = i / rate_hz;
    const Vec3 d = offset(f.timestamp);
    for (Vec3& v : f.vertices) v = v + d;
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

inline void WriteObj(const std::filesystem::path& p, const MeshFrame& f,
                     const std::vector<std::string>& group_names) {
  std::ofstream out(p);
  out.precision(17);
  for (const Vec3& v : f.vertices) out << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
  int current = -1;
  for (size_t i = 0; i < f.facets.size(); ++i) {
    const int seg = f.segment_of_facet[i];
    if (seg != current) {
      out << "g " << group_names.at(static_cast<size_t>(seg)) << '\n';
      current = seg;
    }
    out << "f " << f.facets[i][0] + 1 << ' ' << f.facets[i][1] + 1 << ' ' << f.facets[i][2] + 1
        << '\n';
  }
}

// Writes the sequence as OBJ keyframes plus a motion manifest; segment id i
// is named group_names[i]. Returns the manifest path.
inline std::filesystem::path WriteMotion(const std::filesystem::path& dir, const std::string& stem,
                                         const MeshSequence& seq,
                                         const std::vector<std::string>& group_names) {
  std::filesystem::create_directories(dir / stem);
  nlohmann::json manifest;
  manifest["keyframe_rate_hz"] = seq.keyframe_rate;
  manifest["frames"] = nlohmann::json::array();
  for (size_t i = 0; i < seq.frames.size(); ++i) {
    const std::string name = stem + "/f" + std::to_string(i) + ".obj";
    WriteObj(dir / name, seq.frames[i], group_names);
    manifest["frames"].push_back(name);
  }
  nlohmann::json segments = nlohmann::json::object();
  for (size_t i = 0; i < group_names.size(); ++i) segments[group_names[i]] = i;
  manifest["segments"] = segments;
  const std::filesystem::path out = dir / (stem + ".json");
  WriteText(out, manifest.dump(2));
  return out;
}

}  // namespace mmforge::testing
