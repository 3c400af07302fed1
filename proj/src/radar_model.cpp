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

#include "mmforge/radar_model.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "mmforge/rng.hpp"

namespace mmforge {

namespace {

void Require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, "invalid radar configuration: " + what);
}

bool IsUnit(const Vec3& v) { return std::abs(Norm(v) - 1.0) <= 1e-9; }

}  // namespace

void RadarConfig::Validate() const {
  Require(carrier_hz > 0.0 && std::isfinite(carrier_hz), "carrier_hz must be positive");
  Require(bandwidth_hz > 0.0 && std::isfinite(bandwidth_hz), "bandwidth_hz must be positive");
  Require(sweep_rate_hz_per_s > 0.0, "sweep_rate_hz_per_s must be positive");
  Require(samples_per_chirp > 0, "samples_per_chirp must be positive");
  Require(adc_rate_hz > 0.0, "adc_rate_hz must be positive");
  Require(chirps_per_frame > 0, "chirps_per_frame must be positive");
  Require(frame_rate_hz > 0.0, "frame_rate_hz must be positive");
  Require(tx_power_scale > 0.0, "tx_power_scale must be positive");
  const double swept = sweep_rate_hz_per_s * chirp_active_time();
  Require(std::abs(swept - bandwidth_hz) <= 1e-9 * bandwidth_hz,
          "sweep_rate * samples_per_chirp / adc_rate must equal bandwidth_hz");
  Require(chirps_per_frame * frame_rate_hz * chirp_active_time() <= 1.0 + 1e-12,
          "chirps_per_frame * frame_rate_hz exceeds the chirp repetition capacity");
}

void RadarPose::Validate() const {
  if (!IsUnit(boresight) || !IsUnit(up)) {
    throw Error(ErrorCode::kInvalidArgument, "radar pose vectors must be unit length");
  }
  if (std::abs(Dot(boresight, up)) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "radar boresight and up must be orthogonal");
  }
}

RadarPose RadarPose::LookAt(const Vec3& position, const Vec3& target, const Vec3& world_up,
                            bool sideways) {
  RadarPose pose;
  pose.position = position;
  pose.boresight = Normalized(target - position);
  Vec3 up = world_up - pose.boresight * Dot(world_up, pose.boresight);
  if (Norm(up) < 1e-9) up = Cross(pose.boresight, Vec3{1.0, 0.0, 0.0});
  if (Norm(up) < 1e-9) up = Cross(pose.boresight, Vec3{0.0, 0.0, 1.0});
  pose.up = Normalized(up);
  if (sideways) pose.up = Normalized(Cross(pose.boresight, pose.up));
  return pose;
}

void AntennaPattern::Validate() const {
  auto ok = [](double bw) { return bw > 0.0 && bw <= 180.0; };
  if (!ok(azimuth_beamwidth_deg) || !ok(elevation_beamwidth_deg)) {
    throw Error(ErrorCode::kInvalidArgument, "antenna beamwidths must lie in (0, 180] degrees");
  }
}

DerivedParams Derive(const RadarConfig& config) {
  config.Validate();
  DerivedParams d;
  d.wavelength_m = kSpeedOfLight / config.carrier_hz;
  d.range_resolution_m = kSpeedOfLight / (2.0 * config.bandwidth_hz);
  d.prf_hz = config.chirps_per_frame * config.frame_rate_hz;
  d.doppler_resolution_hz = d.prf_hz / config.chirps_per_frame;
  d.max_unambiguous_speed_m_s = d.wavelength_m * d.prf_hz / 4.0;
  return d;
}

void OffAxisAngles(const RadarPose& pose, const Vec3& target, double* azimuth,
                   double* elevation) {
  const Vec3 d = target - pose.position;
  const double r = Norm(d);
  if (r == 0.0) throw Error(ErrorCode::kInvalidArgument, "target coincides with radar position");
  const Vec3 right = Cross(pose.boresight, pose.up);
  const double fwd = Dot(d, pose.boresight);
  const double lateral = Dot(d, right);
  const double vertical = Dot(d, pose.up);
  *azimuth = std::atan2(lateral, fwd);
  *elevation = std::atan2(vertical, std::hypot(fwd, lateral));
}

double AntennaGain(const AntennaPattern& pattern, const RadarPose& pose, const Vec3& target) {
  double az = 0.0, el = 0.0;
  OffAxisAngles(pose, target, &az, &el);
  constexpr double kDeg = kPi / 180.0;
  const double ua = az / (pattern.azimuth_beamwidth_deg * kDeg);
  const double ue = el / (pattern.elevation_beamwidth_deg * kDeg);
  const double k = 4.0 * std::log(2.0);
  return std::exp(-k * ua * ua) * std::exp(-k * ue * ue);
}

std::string ConfigHash(const RadarConfig& c) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%.17g|%.17g|%.17g|%d|%.17g|%d|%.17g|%.17g", c.carrier_hz,
                c.bandwidth_hz, c.sweep_rate_hz_per_s, c.samples_per_chirp, c.adc_rate_hz,
                c.chirps_per_frame, c.frame_rate_hz, c.tx_power_scale);
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(Fnv1a64(buf)));
  return out;
}

}  // namespace mmforge
