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
#include <complex>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "mmforge/em_synthesis.hpp"

using namespace mmforge;

namespace {

constexpr double kC = 299792458.0;
constexpr double kPiD = 3.14159265358979323846;

FacetSample FacingSample(const Vec3& centroid, const Vec3& normal, double area) {
  FacetSample s;
  s.centroid = centroid;
  s.unit_normal = normal;
  s.area = area;
  return s;
}

}  // namespace

TEST_CASE("boresight facet amplitude matches the closed form") {
  const RadarPose pose;  // at (0, 1, 3) looking down -z
  const double lambda = kC / 77e9;
  const double area = 0.01, range = 2.0;
  const FacetEcho e = ComputeFacetEcho(FacingSample({0, 1, 3 - range}, {0, 0, 1}, area), pose,
                                       AntennaPattern{}, MaterialModel{}, 1.0, lambda);
  const double expect = lambda / (4.0 * kPiD) / (range * range) * std::sqrt(area);
  CHECK(std::abs(e.amplitude - expect) <= 1e-12 * expect);
  CHECK(e.delay_s == doctest::Approx(2.0 * range / kC).epsilon(1e-15));
}

TEST_CASE("amplitude scales with weight, coefficient and incidence") {
  const RadarPose pose;
  const double lambda = kC / 77e9;
  const double theta = 0.4;
  const Vec3 n{std::sin(theta), 0.0, std::cos(theta)};
  MaterialModel m;
  m.base_scatter_coeff = 0.7;
  m.scatter_exponent = 2.0;
  const FacetEcho e =
      ComputeFacetEcho(FacingSample({0, 1, 1}, n, 0.02), pose, AntennaPattern{}, m, 1.3, lambda);
  const double expect = lambda / (4.0 * kPiD) / 4.0 * 0.7 * 1.3 *
                        std::sqrt(0.02 * std::cos(theta) * std::pow(std::cos(theta), 2.0));
  CHECK(e.amplitude == doctest::Approx(expect).epsilon(1e-12));
  // Facing away: zero amplitude, not an error.
  const FacetEcho back = ComputeFacetEcho(FacingSample({0, 1, 1}, {0, 0, -1}, 0.02), pose,
                                          AntennaPattern{}, MaterialModel{}, 1.0, lambda);
  CHECK(back.amplitude == 0.0);
}

TEST_CASE("inverse-square range law at fixed angles") {
  const RadarPose pose;
  const double lambda = kC / 77e9;
  const Vec3 dir = Normalized(Vec3{0.3, -0.2, -1.0});
  for (double r : {0.5, 1.0, 1.7}) {
    const FacetSample near = FacingSample(pose.position + dir * r, -dir, 0.01);
    const FacetSample far = FacingSample(pose.position + dir * (2 * r), -dir, 0.01);
    const double a1 =
        ComputeFacetEcho(near, pose, AntennaPattern{}, MaterialModel{}, 1.0, lambda).amplitude;
    const double a2 =
        ComputeFacetEcho(far, pose, AntennaPattern{}, MaterialModel{}, 1.0, lambda).amplitude;
    CHECK(std::abs(a2 * 4 * r * r - a1 * r * r) <= 1e-9 * a1 * r * r);
  }
}

TEST_CASE("facet echo errors") {
  const RadarPose pose;
  CHECK_THROWS_AS(ComputeFacetEcho(FacingSample(pose.position, {0, 0, 1}, 0.01), pose,
                                   AntennaPattern{}, MaterialModel{}, 1.0, 0.004),
                  Error);
  CHECK_THROWS_AS(ComputeFacetEcho(FacingSample({0, 1, 4}, {0, 0, 1}, 0.01), pose,
                                   AntennaPattern{}, MaterialModel{}, 1.0, 0.004),
                  Error);
}

TEST_CASE("chirp synthesis matches direct evaluation of the IF model") {
  const RadarConfig cfg;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ur(0.5, 6.0), ua(0.1, 1.0);
  std::vector<FacetEcho> echoes(13);
  for (auto& e : echoes) {
    e.delay_s = 2.0 * ur(rng) / kC;
    e.amplitude = ua(rng);
  }
  const auto x = SynthesizeChirp(echoes, cfg);
  REQUIRE(x.size() == 256);
  double worst = 0.0, scale = 0.0;
  for (size_t n = 0; n < x.size(); ++n) {
    std::complex<double> ref;
    for (const auto& e : echoes) {
      const double f = cfg.carrier_hz + cfg.sweep_rate_hz_per_s * n / cfg.adc_rate_hz;
      ref += e.amplitude * std::exp(std::complex<double>(0.0, 2.0 * kPiD * e.delay_s * f));
    }
    worst = std::max(worst, std::abs(x[n] - ref));
    scale = std::max(scale, std::abs(ref));
  }
  CHECK(worst <= 1e-9 * scale);
}

TEST_CASE("beat frequency lands in the expected range bin") {
  const RadarConfig cfg;
  const double range = 2.0;
  const FacetEcho e{1.0, 2.0 * range / kC, 0};
  const auto x = SynthesizeChirp(std::span(&e, 1), cfg);
  // Brute-force DFT magnitude peak.
  size_t best = 0;
  double best_mag = 0.0;
  for (size_t k = 0; k < x.size() / 2; ++k) {
    std::complex<double> acc;
    for (size_t n = 0; n < x.size(); ++n) {
      acc += x[n] * std::exp(std::complex<double>(0.0, -2.0 * kPiD * k * n / x.size()));
    }
    if (std::abs(acc) > best_mag) best_mag = std::abs(acc), best = k;
  }
  const double fb = 2.0 * range * cfg.sweep_rate_hz_per_s / kC;
  CHECK(best == static_cast<size_t>(std::lround(fb / cfg.adc_rate_hz * 256)));
}

TEST_CASE("delay policy") {
  const RadarConfig cfg;
  const FacetEcho far{1.0, cfg.max_delay() * 1.01, 0};
  CHECK_THROWS_AS(SynthesizeChirp(std::span(&far, 1), cfg, DelayPolicy::kError), Error);
  const auto x = SynthesizeChirp(std::span(&far, 1), cfg, DelayPolicy::kDiscard);
  for (const auto& v : x) CHECK(v == std::complex<double>{});
}

TEST_CASE("sequence synthesis shape and determinism") {
  const MeshSequence seq = mmforge::testing::Animate(
      mmforge::testing::MakeQuad({0, 1, 0.5}, 0.3), 20.0, 0.1,
      [](double t) { return Vec3{0.0, 0.0, -t}; });
  const RadarConfig cfg;
  RandomizationPlan plan;
  plan.segment_weights[0] = 1.0;
  const IFCube a = SynthesizeSequence(seq, cfg, plan.radar_pose, plan.antenna, MaterialModel{}, plan);
  CHECK(a.frames == 5);
  CHECK(a.chirps == 128);
  CHECK(a.samples == 256);
  SynthesisOptions opt;
  opt.threads = 3;
  const IFCube b =
      SynthesizeSequence(seq, cfg, plan.radar_pose, plan.antenna, MaterialModel{}, plan, opt);
  CHECK(a.data == b.data);
  double energy = 0.0;
  for (const auto& v : a.data) energy += std::norm(v);
  CHECK(energy > 0.0);
}

TEST_CASE("receding facet advances the chirp phase") {
  // Receding at v: delay grows, so the carrier phase increases by 4 pi v PRI / lambda per chirp.
  const double v = 0.5;
  const MeshSequence seq = mmforge::testing::Animate(
      mmforge::testing::MakeTriangle({0, 1, 1}, 0.05), 50.0, 0.04,
      [&](double t) { return Vec3{0.0, 0.0, -v * t}; });
  const RadarConfig cfg;
  RandomizationPlan plan;
  plan.segment_weights[0] = 1.0;
  const IFCube cube =
      SynthesizeSequence(seq, cfg, plan.radar_pose, plan.antenna, MaterialModel{}, plan);
  const double expect = 4.0 * kPiD * v * cfg.chirp_interval() / (kC / cfg.carrier_hz);
  const std::complex<double> a(cube.Chirp(0, 10)[0]);
  const std::complex<double> b(cube.Chirp(0, 11)[0]);
  CHECK(std::arg(b / a) == doctest::Approx(expect).epsilon(1e-3));
}

TEST_CASE("background noise and static scatterers") {
  const RadarConfig cfg;
  IFCube zero(cfg, 2);
  RandomizationPlan plan;
  plan.seed = 99;
  CHECK(AddBackground(zero, plan).data == zero.data);

  plan.noise_std = 1e-3;
  const IFCube noisy = AddBackground(zero, plan);
  double power = 0.0;
  for (const auto& v : noisy.data) power += std::norm(std::complex<double>(v));
  CHECK(std::sqrt(power / noisy.data.size()) == doctest::Approx(1e-3).epsilon(0.02));
  CHECK(AddBackground(zero, plan).data == noisy.data);
  plan.seed = 100;
  CHECK(AddBackground(zero, plan).data != noisy.data);

  RandomizationPlan statics;
  statics.static_scatterers = {{{0, 1, 1}, 0.5}};
  const IFCube s = AddBackground(zero, statics);
  const FacetEcho e{0.5, 2.0 * 2.0 / kC, 0};
  const auto ref = SynthesizeChirp(std::span(&e, 1), cfg);
  CHECK(std::abs(std::complex<double>(s.Chirp(1, 77)[5]) - ref[5]) < 1e-6);
}
