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

#include <cstdint>
#include <map>
#include <vector>

#include "mmforge/common.hpp"
#include "mmforge/radar_model.hpp"

namespace mmforge {

struct Spectrogram;

// Independent switches for the five randomization factors. A disabled factor
// takes the config's nominal value.
struct RandomizationFactors {
  bool view = true;
  bool segments = true;
  bool antenna = true;
  bool background = true;
  bool nonlinearity = true;
  friend bool operator==(const RandomizationFactors&, const RandomizationFactors&) = default;
};

struct RandomizationConfig {
  Interval view_azimuth_range_deg{-60.0, 60.0};
  Interval view_elevation_range_deg{-10.0, 10.0};
  Interval view_distance_range_m{1.0, 5.0};
  Interval segment_weight_range{0.5, 1.5};
  Interval beamwidth_az_range_deg{60.0, 120.0};
  Interval beamwidth_el_range_deg{20.0, 60.0};
  Interval noise_std_range{0.0, 1e-5};
  IntInterval static_scatterer_count_range{0, 8};
  Interval static_amplitude_range{0.0, 1e-3};
  Interval nonlinearity_exponent_range{0.7, 1.3};

  // Static scatterers are placed uniformly inside this box.
  Vec3 scene_box_min{-3.0, 0.0, -3.0};
  Vec3 scene_box_max{3.0, 2.5, 3.0};
  // The radar looks at this point from the sampled azimuth/elevation/distance.
  Vec3 look_at{0.0, 1.0, 0.0};
  bool sideways = false;

  // Values used when a factor is disabled.
  double nominal_azimuth_deg = 0.0;
  double nominal_elevation_deg = 0.0;
  double nominal_distance_m = 3.0;
  double nominal_segment_weight = 1.0;
  AntennaPattern nominal_antenna{};
  double nominal_exponent = 1.0;

  RandomizationFactors factors{};

  // Throws kInvalidArgument for inverted intervals or values outside physical
  // bounds (distance > 0, weights >= 0, beamwidths in (0, 180]).
  void Validate() const;

  // Every interval collapsed onto its nominal value, noise and scatterers off.
  static RandomizationConfig Degenerate(const RandomizationConfig& base);
};

struct StaticScatterer {
  Vec3 position;
  double amplitude = 0.0;
  friend bool operator==(const StaticScatterer&, const StaticScatterer&) = default;
};

struct RandomizationPlan {
  uint64_t seed = 0;
  RadarPose radar_pose{};
  std::map<int, double> segment_weights;
  AntennaPattern antenna{};
  double noise_std = 0.0;
  std::vector<StaticScatterer> static_scatterers;
  double nonlinearity_exponent = 1.0;

  friend bool operator==(const RandomizationPlan&, const RandomizationPlan&) = default;
};

// Radar pose at `distance_m` from `look_at`, azimuth measured from +z about +y.
RadarPose PoseFromView(const Vec3& look_at, double azimuth_deg, double elevation_deg,
                       double distance_m, bool sideways);

// Each field is drawn from a counter stream keyed by (seed, field tag), so
// fields never shift each other's randomness.
RandomizationPlan SamplePlan(const RandomizationConfig& config, uint64_t seed,
                             const std::vector<int>& segment_ids);

// Plan with every factor at its nominal value and no background.
RandomizationPlan NominalPlan(const RandomizationConfig& config,
                              const std::vector<int>& segment_ids);

// Max-normalized power law: v -> (v / max)^gamma * max. Works on linear
// magnitudes only.
Spectrogram ApplyNonlinearity(const Spectrogram& s, double gamma);

double SegmentWeight(const RandomizationPlan& plan, int segment_id);

}  // namespace mmforge
