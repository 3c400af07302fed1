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

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mmforge/common.hpp"

namespace mmforge {

using Facet = std::array<uint32_t, 3>;

struct MeshFrame {
  double timestamp = 0.0;
  std::vector<Vec3> vertices;
  std::vector<Facet> facets;
  std::vector<int> segment_of_facet;

  // Throws kInvalidArgument on out-of-range indices, label count mismatch or
  // a non-finite timestamp.
  void Validate() const;
};

struct MeshSequence {
  std::vector<MeshFrame> frames;
  double keyframe_rate = 0.0;

  void Validate() const;
  double start_time() const { return frames.front().timestamp; }
  double end_time() const { return frames.back().timestamp; }
  double duration() const { return end_time() - start_time(); }
  std::vector<int> SegmentIds() const;
};

struct FacetSample {
  uint32_t facet_id = 0;
  Vec3 centroid;
  Vec3 unit_normal;
  double area = 0.0;
  Vec3 velocity;
  int segment_id = 0;
};

// Centroid, unit normal (right-handed winding) and area of one triangle.
// Returns false for zero-area facets, leaving the outputs untouched.
bool FacetGeometry(const Vec3& a, const Vec3& b, const Vec3& c, Vec3* centroid, Vec3* normal,
                   double* area);

// Reads a motion manifest:
//   {"keyframe_rate_hz": 20, "frames": ["f000.obj", ...],
//    "segments": {"left_arm": 3, ...}, "timestamps": [...optional...]}
// Frame paths are relative to the manifest. OBJ faces must be triangles;
// "g"/"o" group names select the segment id through "segments".
MeshSequence LoadMeshSequence(const std::filesystem::path& path);

// Parses one OBJ file. Facets outside any group get segment 0.
MeshFrame LoadObjFrame(const std::filesystem::path& path,
                       const std::vector<std::pair<std::string, int>>& segments);

// Temporal Gaussian filter over frame index: kernel truncated at ceil(3 sigma),
// normalized, half-sample symmetric padding at both ends. sigma == 0 is the
// identity.
MeshSequence GaussianSmooth(const MeshSequence& seq, double sigma);

// Normalized discrete Gaussian kernel of radius ceil(3 sigma).
std::vector<double> GaussianKernel(double sigma);

// Linear interpolation of vertex positions. Keyframe timestamps return the
// keyframe itself.
MeshFrame InterpolateFrame(const MeshSequence& seq, double t);

// Same as InterpolateFrame but writes vertex positions only into `out`,
// which must hold vertex_count entries.
void InterpolateVertices(const MeshSequence& seq, double t, std::span<Vec3> out);

// Index k of the keyframe interval [t_k, t_{k+1}) containing t (the last
// keyframe maps to the last interval).
size_t KeyframeInterval(const MeshSequence& seq, double t);

std::vector<FacetSample> FacetKinematics(const MeshSequence& seq, double t, double dt);

enum class OcclusionMode {
  kBackfaceOnly,
  kDepthBuffer,
};

struct VisibilityOptions {
  OcclusionMode mode = OcclusionMode::kDepthBuffer;
  int resolution = 256;
};

// Facets that face `radar_position` and, in depth-buffer mode, are not hidden
// behind another facet. Returned ids are sorted ascending.
std::vector<uint32_t> VisibleFacets(const MeshFrame& frame, const Vec3& radar_position,
                                    const VisibilityOptions& options = {});

}  // namespace mmforge
