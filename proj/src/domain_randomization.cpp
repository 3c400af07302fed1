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

#include "mmforge/domain_randomization.hpp"

#include <algorithm>
#include <cmath>
#include <string_view>

#include "mmforge/rng.hpp"
#include "mmforge/signal_processing.hpp"

namespace mmforge {

namespace {

void RequireInterval(const Interval& i, std::string_view name) {
  if (!(std::isfinite(i.lo) && std::isfinite(i.hi)) || i.lo > i.hi) {
    throw Error(ErrorCode::kInvalidArgument,
                "randomization interval '" + std::string(name) + "' must satisfy lo <= hi");
  }
}

double Draw(uint64_t seed, std::string_view tag, const Interval& range,
            std::initializer_list<uint64_t> indices = {}) {
  if (range.lo == range.hi) return range.lo;
  CounterRng rng(seed, tag, indices);
  return range.lo + rng.Uniform() * (range.hi - range.lo);
}

}  // namespace

void RandomizationConfig::Validate() const {
  RequireInterval(view_azimuth_range_deg, "view_azimuth_range_deg");
  RequireInterval(view_elevation_range_deg, "view_elevation_range_deg");
  RequireInterval(view_distance_range_m, "view_distance_range_m");
  RequireInterval(segment_weight_range, "segment_weight_range");
  RequireInterval(beamwidth_az_range_deg, "beamwidth_az_range_deg");
  RequireInterval(beamwidth_el_range_deg, "beamwidth_el_range_deg");
  RequireInterval(noise_std_range, "noise_std_range");
  RequireInterval(static_amplitude_range, "static_amplitude_range");
  RequireInterval(nonlinearity_exponent_range, "nonlinearity_exponent_range");
  if (static_scatterer_count_range.lo > static_scatterer_count_range.hi ||
      static_scatterer_count_range.lo < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "static_scatterer_count_range must satisfy 0 <= lo <= hi");
  }
  auto fail = [](const char* what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (!(view_distance_range_m.lo > 0.0) || !(nominal_distance_m > 0.0)) {
    fail("view distances must be positive");
  }
  if (segment_weight_range.lo < 0.0 || nominal_segment_weight < 0.0) {
    fail("segment weights must be non-negative");
  }
  auto beam_ok = [](const Interval& i) { return i.lo > 0.0 && i.hi <= 180.0; };
  if (!beam_ok(beamwidth_az_range_deg) || !beam_ok(beamwidth_el_range_deg)) {
    fail("beamwidth intervals must lie in (0, 180]");
  }
  nominal_antenna.Validate();
  if (noise_std_range.lo < 0.0) fail("noise_std_range must be non-negative");
  if (static_amplitude_range.lo < 0.0) fail("static_amplitude_range must be non-negative");
  if (!(nonlinearity_exponent_range.lo > 0.0) || !(nominal_exponent > 0.0)) {
    fail("nonlinearity exponents must be positive");
  }
  if (scene_box_min.x > scene_box_max.x || scene_box_min.y > scene_box_max.y ||
      scene_box_min.z > scene_box_max.z) {
    fail("scene box min must not exceed max");
  }
}

RandomizationConfig RandomizationConfig::Degenerate(const RandomizationConfig& base) {
  RandomizationConfig c = base;
  c.view_azimuth_range_deg = {base.nominal_azimuth_deg, base.nominal_azimuth_deg};
  c.view_elevation_range_deg = {base.nominal_elevation_deg, base.nominal_elevation_deg};
  c.view_distance_range_m = {base.nominal_distance_m, base.nominal_distance_m};
  c.segment_weight_range = {base.nominal_segment_weight, base.nominal_segment_weight};
  c.beamwidth_az_range_deg = {base.nominal_antenna.azimuth_beamwidth_deg,
                              base.nominal_antenna.azimuth_beamwidth_deg};
  c.beamwidth_el_range_deg = {base.nominal_antenna.elevation_beamwidth_deg,
                              base.nominal_antenna.elevation_beamwidth_deg};
  c.noise_std_range = {0.0, 0.0};
  c.static_scatterer_count_range = {0, 0};
  c.nonlinearity_exponent_range = {base.nominal_exponent, base.nominal_exponent};
  return c;
}

RadarPose PoseFromView(const Vec3& look_at, double azimuth_deg, double elevation_deg,
                       double distance_m, bool sideways) {
  constexpr double kDeg = kPi / 180.0;
  const double az = azimuth_deg * kDeg;
  const double el = elevation_deg * kDeg;
  const Vec3 dir{std::cos(el) * std::sin(az), std::sin(el), std::cos(el) * std::cos(az)};
  return RadarPose::LookAt(look_at + dir * distance_m, look_at, {0.0, 1.0, 0.0}, sideways);
}

RandomizationPlan SamplePlan(const RandomizationConfig& config, uint64_t seed,
                             const std::vector<int>& segment_ids) {
  config.Validate();
  if (segment_ids.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot sample a plan for an empty segment set");
  }
  const RandomizationFactors& on = config.factors;
  RandomizationPlan plan;
  plan.seed = seed;

  const double az = on.view ? Draw(seed, "view_azimuth", config.view_azimuth_range_deg)
                            : config.nominal_azimuth_deg;
  const double el = on.view ? Draw(seed, "view_elevation", config.view_elevation_range_deg)
                            : config.nominal_elevation_deg;
  const double dist = on.view ? Draw(seed, "view_distance", config.view_distance_range_m)
                              : config.nominal_distance_m;
  plan.radar_pose = PoseFromView(config.look_at, az, el, dist, config.sideways);

  for (int id : segment_ids) {
    plan.segment_weights[id] =
        on.segments ? Draw(seed, "segment_weight", config.segment_weight_range,
                           {static_cast<uint64_t>(static_cast<int64_t>(id))})
                    : config.nominal_segment_weight;
  }

  if (on.antenna) {
    plan.antenna.azimuth_beamwidth_deg = Draw(seed, "beamwidth_az", config.beamwidth_az_range_deg);
    plan.antenna.elevation_beamwidth_deg =
        Draw(seed, "beamwidth_el", config.beamwidth_el_range_deg);
  } else {
    plan.antenna = config.nominal_antenna;
  }

  if (on.background) {
    plan.noise_std = Draw(seed, "noise_std", config.noise_std_range);
    const IntInterval& cr = config.static_scatterer_count_range;
    int64_t count = cr.lo;
    if (cr.hi > cr.lo) {
      CounterRng rng(seed, "static_count");
      const auto span = static_cast<uint64_t>(cr.hi - cr.lo + 1);
      count = cr.lo + static_cast<int64_t>(std::min<uint64_t>(
                          static_cast<uint64_t>(rng.Uniform() * static_cast<double>(span)),
                          span - 1));
    }
    const Vec3& lo = config.scene_box_min;
    const Vec3& hi = config.scene_box_max;
    for (int64_t k = 0; k < count; ++k) {
      const uint64_t idx = static_cast<uint64_t>(k);
      StaticScatterer s;
      s.position = {Draw(seed, "static_x", {lo.x, hi.x}, {idx}),
                    Draw(seed, "static_y", {lo.y, hi.y}, {idx}),
                    Draw(seed, "static_z", {lo.z, hi.z}, {idx})};
      s.amplitude = Draw(seed, "static_amplitude", config.static_amplitude_range, {idx});
      plan.static_scatterers.push_back(s);
    }
  }

  plan.nonlinearity_exponent =
      on.nonlinearity ? Draw(seed, "nonlinearity_exponent", config.nonlinearity_exponent_range)
                      : config.nominal_exponent;
  return plan;
}

RandomizationPlan NominalPlan(const RandomizationConfig& config,
                              const std::vector<int>& segment_ids) {
  RandomizationConfig c = config;
  c.factors = {false, false, false, false, false};
  return SamplePlan(c, 0, segment_ids);
}

Spectrogram ApplyNonlinearity(const Spectrogram& s, double gamma) {
  if (s.is_db) throw Error(ErrorCode::kInvalidArgument, "nonlinearity scaling expects linear values");
  if (!(gamma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "gamma must be positive");
  Spectrogram out = s;
  if (gamma == 1.0 || s.values.empty()) return out;
  const double peak = *std::max_element(s.values.begin(), s.values.end());
  if (!(peak > 0.0)) return out;
  for (double& v : out.values) {
    if (v == peak) continue;
    v = std::pow(std::max(v, 0.0) / peak, gamma) * peak;
  }
  return out;
}

double SegmentWeight(const RandomizationPlan& plan, int segment_id) {
  auto it = plan.segment_weights.find(segment_id);
  if (it == plan.segment_weights.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "segment id " + std::to_string(segment_id) + " not present in plan");
  }
  return it->second;
}

}  // namespace mmforge
