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

#include <cmath>

#include "doctest.h"
#include "mmforge/domain_randomization.hpp"
#include "mmforge/signal_processing.hpp"

using namespace mmforge;

TEST_CASE("plans are reproducible and seed-sensitive") {
  const RandomizationConfig cfg;
  const std::vector<int> ids{0, 1, 2};
  const RandomizationPlan a = SamplePlan(cfg, 42, ids);
  CHECK(a == SamplePlan(cfg, 42, ids));
  CHECK_FALSE(a == SamplePlan(cfg, 43, ids));
  CHECK(a.seed == 42);
}

TEST_CASE("sampled values stay inside their intervals") {
  const RandomizationConfig cfg;
  for (uint64_t seed = 0; seed < 200; ++seed) {
    const RandomizationPlan p = SamplePlan(cfg, seed, {0, 5});
    const double dist = Norm(p.radar_pose.position - cfg.look_at);
    CHECK(dist >= cfg.view_distance_range_m.lo - 1e-9);
    CHECK(dist <= cfg.view_distance_range_m.hi + 1e-9);
    CHECK(cfg.beamwidth_az_range_deg.Contains(p.antenna.azimuth_beamwidth_deg));
    CHECK(cfg.beamwidth_el_range_deg.Contains(p.antenna.elevation_beamwidth_deg));
    CHECK(cfg.noise_std_range.Contains(p.noise_std));
    CHECK(cfg.nonlinearity_exponent_range.Contains(p.nonlinearity_exponent));
    CHECK(p.static_scatterers.size() <= 8);
    for (const auto& [id, w] : p.segment_weights) CHECK(cfg.segment_weight_range.Contains(w));
    for (const auto& s : p.static_scatterers) {
      CHECK(s.position.x >= cfg.scene_box_min.x);
      CHECK(s.position.y <= cfg.scene_box_max.y);
      CHECK(cfg.static_amplitude_range.Contains(s.amplitude));
    }
  }
}

TEST_CASE("fields draw from independent streams") {
  const RandomizationConfig cfg;
  const RandomizationPlan a = SamplePlan(cfg, 9, {0});
  const RandomizationPlan b = SamplePlan(cfg, 9, {0, 1, 2, 3});
  CHECK(a.radar_pose == b.radar_pose);
  CHECK(a.antenna == b.antenna);
  CHECK(a.segment_weights.at(0) == b.segment_weights.at(0));
  RandomizationConfig no_view = cfg;
  no_view.factors.view = false;
  CHECK(SamplePlan(no_view, 9, {0}).antenna == a.antenna);
}

TEST_CASE("degenerate intervals reproduce the nominal plan") {
  const RandomizationConfig cfg;
  const RandomizationConfig deg = RandomizationConfig::Degenerate(cfg);
  CHECK_NOTHROW(deg.Validate());
  RandomizationPlan p = SamplePlan(deg, 1234, {0, 1});
  const RandomizationPlan nominal = NominalPlan(cfg, {0, 1});
  p.seed = nominal.seed;
  CHECK(p == nominal);
  CHECK(nominal.noise_std == 0.0);
  CHECK(nominal.static_scatterers.empty());
  CHECK(nominal.nonlinearity_exponent == 1.0);
  CHECK(nominal.radar_pose.position.z == doctest::Approx(3.0));
}

TEST_CASE("view geometry") {
  const RadarPose p = PoseFromView({0, 1, 0}, 90.0, 0.0, 2.0, false);
  CHECK(p.position.x == doctest::Approx(2.0));
  CHECK(p.position.y == doctest::Approx(1.0));
  CHECK(p.boresight.x == doctest::Approx(-1.0));
  const RadarPose up = PoseFromView({0, 1, 0}, 0.0, 30.0, 2.0, false);
  CHECK(up.position.y == doctest::Approx(1.0 + 2.0 * std::sin(30.0 * 3.14159265358979 / 180.0)));
}

TEST_CASE("invalid configurations") {
  RandomizationConfig c;
  c.view_distance_range_m = {2.0, 1.0};
  CHECK_THROWS_AS(c.Validate(), Error);
  RandomizationConfig d;
  d.view_distance_range_m = {0.0, 1.0};
  CHECK_THROWS_AS(d.Validate(), Error);
  RandomizationConfig e;
  e.beamwidth_az_range_deg = {10.0, 200.0};
  CHECK_THROWS_AS(e.Validate(), Error);
  CHECK_THROWS_AS(SamplePlan(RandomizationConfig{}, 1, {}), Error);
}

TEST_CASE("nonlinearity scaling") {
  Spectrogram s;
  s.rows = 1;
  s.cols = 4;
  s.values = {0.0, 0.25, 1.0, 4.0};
  const Spectrogram same = ApplyNonlinearity(s, 1.0);
  CHECK(same.values == s.values);
  const Spectrogram sq = ApplyNonlinearity(s, 2.0);
  CHECK(sq.values[3] == 4.0);
  CHECK(sq.values[2] == doctest::Approx(0.25));
  CHECK(sq.values[1] == doctest::Approx(0.015625));
  CHECK(sq.values[0] == 0.0);
  CHECK_THROWS_AS(ApplyNonlinearity(s, 0.0), Error);
  Spectrogram db = s;
  db.is_db = true;
  CHECK_THROWS_AS(ApplyNonlinearity(db, 1.2), Error);
}

TEST_CASE("segment weights lookup") {
  RandomizationPlan p;
  p.segment_weights[2] = 0.8;
  CHECK(SegmentWeight(p, 2) == 0.8);
  CHECK_THROWS_AS(SegmentWeight(p, 3), Error);
}
