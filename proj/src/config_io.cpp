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

#include "mmforge/config_io.hpp"

#include <fstream>

namespace mmforge {

using Json = nlohmann::json;

namespace {

template <typename T>
void Get(const Json& j, const char* key, T& dst) {
  if (j.contains(key)) j.at(key).get_to(dst);
}

}  // namespace

void to_json(Json& j, const Vec3& v) { j = Json::array({v.x, v.y, v.z}); }

void from_json(const Json& j, Vec3& v) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::kFormat, "expected [x, y, z]");
  v = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void to_json(Json& j, const Interval& v) { j = Json::array({v.lo, v.hi}); }

void from_json(const Json& j, Interval& v) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::kFormat, "expected [lo, hi]");
  v = {j[0].get<double>(), j[1].get<double>()};
}

void to_json(Json& j, const RadarConfig& c) {
  j = Json{{"carrier_hz", c.carrier_hz},
           {"bandwidth_hz", c.bandwidth_hz},
           {"sweep_rate_hz_per_s", c.sweep_rate_hz_per_s},
           {"samples_per_chirp", c.samples_per_chirp},
           {"adc_rate_hz", c.adc_rate_hz},
           {"chirps_per_frame", c.chirps_per_frame},
           {"frame_rate_hz", c.frame_rate_hz},
           {"tx_power_scale", c.tx_power_scale}};
}

void from_json(const Json& j, RadarConfig& c) {
  Get(j, "carrier_hz", c.carrier_hz);
  Get(j, "bandwidth_hz", c.bandwidth_hz);
  Get(j, "samples_per_chirp", c.samples_per_chirp);
  Get(j, "adc_rate_hz", c.adc_rate_hz);
  Get(j, "chirps_per_frame", c.chirps_per_frame);
  Get(j, "frame_rate_hz", c.frame_rate_hz);
  Get(j, "tx_power_scale", c.tx_power_scale);
  if (j.contains("sweep_rate_hz_per_s")) {
    j.at("sweep_rate_hz_per_s").get_to(c.sweep_rate_hz_per_s);
  } else {
    c.sweep_rate_hz_per_s = c.bandwidth_hz / c.chirp_active_time();
  }
}

void to_json(Json& j, const AntennaPattern& a) {
  j = Json{{"azimuth_beamwidth_deg", a.azimuth_beamwidth_deg},
           {"elevation_beamwidth_deg", a.elevation_beamwidth_deg}};
}

void from_json(const Json& j, AntennaPattern& a) {
  Get(j, "azimuth_beamwidth_deg", a.azimuth_beamwidth_deg);
  Get(j, "elevation_beamwidth_deg", a.elevation_beamwidth_deg);
}

void to_json(Json& j, const RadarPose& p) {
  j = Json{{"position", p.position}, {"boresight", p.boresight}, {"up", p.up}};
}

void from_json(const Json& j, RadarPose& p) {
  Get(j, "position", p.position);
  Get(j, "boresight", p.boresight);
  Get(j, "up", p.up);
}

void to_json(Json& j, const MaterialModel& m) {
  j = Json{{"base_scatter_coeff", m.base_scatter_coeff},
           {"scatter_exponent", m.scatter_exponent}};
}

void from_json(const Json& j, MaterialModel& m) {
  Get(j, "base_scatter_coeff", m.base_scatter_coeff);
  Get(j, "scatter_exponent", m.scatter_exponent);
}

void to_json(Json& j, const RandomizationConfig& c) {
  j = Json{
      {"view_azimuth_range_deg", c.view_azimuth_range_deg},
      {"view_elevation_range_deg", c.view_elevation_range_deg},
      {"view_distance_range_m", c.view_distance_range_m},
      {"segment_weight_range", c.segment_weight_range},
      {"beamwidth_az_range_deg", c.beamwidth_az_range_deg},
      {"beamwidth_el_range_deg", c.beamwidth_el_range_deg},
      {"noise_std_range", c.noise_std_range},
      {"static_scatterer_count_range",
       Json::array({c.static_scatterer_count_range.lo, c.static_scatterer_count_range.hi})},
      {"static_amplitude_range", c.static_amplitude_range},
      {"nonlinearity_exponent_range", c.nonlinearity_exponent_range},
      {"scene_box_min", c.scene_box_min},
      {"scene_box_max", c.scene_box_max},
      {"look_at", c.look_at},
      {"sideways", c.sideways},
      {"nominal",
       {{"azimuth_deg", c.nominal_azimuth_deg},
        {"elevation_deg", c.nominal_elevation_deg},
        {"distance_m", c.nominal_distance_m},
        {"segment_weight", c.nominal_segment_weight},
        {"antenna", c.nominal_antenna},
        {"exponent", c.nominal_exponent}}},
      {"factors",
       {{"view", c.factors.view},
        {"segments", c.factors.segments},
        {"antenna", c.factors.antenna},
        {"background", c.factors.background},
        {"nonlinearity", c.factors.nonlinearity}}},
  };
}

void from_json(const Json& j, RandomizationConfig& c) {
  Get(j, "view_azimuth_range_deg", c.view_azimuth_range_deg);
  Get(j, "view_elevation_range_deg", c.view_elevation_range_deg);
  Get(j, "view_distance_range_m", c.view_distance_range_m);
  Get(j, "segment_weight_range", c.segment_weight_range);
  Get(j, "beamwidth_az_range_deg", c.beamwidth_az_range_deg);
  Get(j, "beamwidth_el_range_deg", c.beamwidth_el_range_deg);
  Get(j, "noise_std_range", c.noise_std_range);
  if (j.contains("static_scatterer_count_range")) {
    const Json& r = j.at("static_scatterer_count_range");
    if (!r.is_array() || r.size() != 2) throw Error(ErrorCode::kFormat, "expected [lo, hi]");
    c.static_scatterer_count_range = {r[0].get<int64_t>(), r[1].get<int64_t>()};
  }
  Get(j, "static_amplitude_range", c.static_amplitude_range);
  Get(j, "nonlinearity_exponent_range", c.nonlinearity_exponent_range);
  Get(j, "scene_box_min", c.scene_box_min);
  Get(j, "scene_box_max", c.scene_box_max);
  Get(j, "look_at", c.look_at);
  Get(j, "sideways", c.sideways);
  if (j.contains("nominal")) {
    const Json& n = j.at("nominal");
    Get(n, "azimuth_deg", c.nominal_azimuth_deg);
    Get(n, "elevation_deg", c.nominal_elevation_deg);
    Get(n, "distance_m", c.nominal_distance_m);
    Get(n, "segment_weight", c.nominal_segment_weight);
    Get(n, "antenna", c.nominal_antenna);
    Get(n, "exponent", c.nominal_exponent);
  }
  if (j.contains("factors")) {
    const Json& f = j.at("factors");
    Get(f, "view", c.factors.view);
    Get(f, "segments", c.factors.segments);
    Get(f, "antenna", c.factors.antenna);
    Get(f, "background", c.factors.background);
    Get(f, "nonlinearity", c.factors.nonlinearity);
  }
}

void to_json(Json& j, const RandomizationPlan& p) {
  Json weights = Json::object();
  for (const auto& [id, w] : p.segment_weights) weights[std::to_string(id)] = w;
  Json statics = Json::array();
  for (const StaticScatterer& s : p.static_scatterers) {
    statics.push_back({{"position", s.position}, {"amplitude", s.amplitude}});
  }
  j = Json{{"seed", p.seed},
           {"radar_pose", p.radar_pose},
           {"segment_weights", weights},
           {"antenna", p.antenna},
           {"noise_std", p.noise_std},
           {"static_scatterers", statics},
           {"nonlinearity_exponent", p.nonlinearity_exponent}};
}

void from_json(const Json& j, RandomizationPlan& p) {
  Get(j, "seed", p.seed);
  Get(j, "radar_pose", p.radar_pose);
  p.segment_weights.clear();
  if (j.contains("segment_weights")) {
    for (const auto& [id, w] : j.at("segment_weights").items()) {
      p.segment_weights[std::stoi(id)] = w.get<double>();
    }
  }
  Get(j, "antenna", p.antenna);
  Get(j, "noise_std", p.noise_std);
  p.static_scatterers.clear();
  if (j.contains("static_scatterers")) {
    for (const Json& s : j.at("static_scatterers")) {
      p.static_scatterers.push_back({s.at("position").get<Vec3>(), s.at("amplitude").get<double>()});
    }
  }
  Get(j, "nonlinearity_exponent", p.nonlinearity_exponent);
}

Json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
}

RadarFile ParseRadarFile(const Json& j) {
  RadarFile f;
  try {
    j.get_to(f.config);
    if (j.contains("antenna")) j.at("antenna").get_to(f.antenna);
    if (j.contains("material")) j.at("material").get_to(f.material);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("radar configuration: ") + e.what());
  }
  f.config.Validate();
  f.antenna.Validate();
  f.material.Validate();
  return f;
}

RadarFile LoadRadarFile(const std::filesystem::path& path) {
  return ParseRadarFile(ReadJsonFile(path));
}

RandomizationConfig LoadRandomizationConfig(const std::filesystem::path& path) {
  RandomizationConfig c;
  try {
    ReadJsonFile(path).get_to(c);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
  c.Validate();
  return c;
}

}  // namespace mmforge
