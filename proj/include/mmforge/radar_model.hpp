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

#include <string>

#include "mmforge/common.hpp"

namespace mmforge {

// Single TX/RX FMCW configuration. Chirps are back-to-back: the chirp
// repetition interval is 1 / (chirps_per_frame * frame_rate_hz).
struct RadarConfig {
  double carrier_hz = 77e9;
  double bandwidth_hz = 4e9;
  double sweep_rate_hz_per_s = 4e9 / (256 / 5e6);
  int samples_per_chirp = 256;
  double adc_rate_hz = 5e6;
  int chirps_per_frame = 128;
  double frame_rate_hz = 50.0;
  double tx_power_scale = 1.0;

  double chirp_active_time() const { return samples_per_chirp / adc_rate_hz; }
  double chirp_interval() const { return 1.0 / (chirps_per_frame * frame_rate_hz); }
  // Largest delay whose beat frequency stays below the ADC rate.
  double max_delay() const { return adc_rate_hz / sweep_rate_hz_per_s; }

  // Throws kInvalidArgument when a field is non-positive, the sweep rate does
  // not match bandwidth / active time, or chirps cannot fit in a frame.
  void Validate() const;

  friend bool operator==(const RadarConfig&, const RadarConfig&) = default;
};

struct RadarPose {
  Vec3 position{0.0, 1.0, 3.0};
  Vec3 boresight{0.0, 0.0, -1.0};
  Vec3 up{0.0, 1.0, 0.0};

  void Validate() const;

  // Pose at `position` aimed at `target`, with `world_up` projected onto the
  // plane orthogonal to the boresight. `sideways` rolls the radar 90 degrees
  // about its boresight.
  static RadarPose LookAt(const Vec3& position, const Vec3& target,
                          const Vec3& world_up = {0.0, 1.0, 0.0}, bool sideways = false);

  friend bool operator==(const RadarPose&, const RadarPose&) = default;
};

struct AntennaPattern {
  double azimuth_beamwidth_deg = 80.0;
  double elevation_beamwidth_deg = 40.0;

  void Validate() const;
  friend bool operator==(const AntennaPattern&, const AntennaPattern&) = default;
};

struct DerivedParams {
  double wavelength_m = 0.0;
  double range_resolution_m = 0.0;
  double prf_hz = 0.0;
  double doppler_resolution_hz = 0.0;
  double max_unambiguous_speed_m_s = 0.0;
};

DerivedParams Derive(const RadarConfig& config);

// Off-boresight angles of `target` in radians: azimuth in the
// boresight/right plane, elevation towards `up`.
void OffAxisAngles(const RadarPose& pose, const Vec3& target, double* azimuth, double* elevation);

// Separable Gaussian beam with -3 dB full width equal to the beamwidths.
double AntennaGain(const AntennaPattern& pattern, const RadarPose& pose, const Vec3& target);

// Stable hex digest of the configuration, used for provenance in file sidecars.
std::string ConfigHash(const RadarConfig& config);

}  // namespace mmforge
