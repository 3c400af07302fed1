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

#include "mmforge/em_synthesis.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "mmforge/parallel.hpp"
#include "mmforge/rng.hpp"

namespace mmforge {

namespace {

constexpr size_t kLanes = 8;

double FracPart(double x) { return x - std::floor(x); }

enum class EchoStatus { kOk, kZeroRange, kBehindRadar };

// Non-throwing core shared by ComputeFacetEcho and the sequence loop.
EchoStatus EvaluateEcho(const Vec3& centroid, const Vec3& normal, double area,
                        const RadarPose& pose, const AntennaPattern& pattern,
                        const MaterialModel& material, double segment_weight,
                        double wavelength_m, FacetEcho* out) {
  const Vec3 to_radar = pose.position - centroid;
  const double range = Norm(to_radar);
  if (range == 0.0) return EchoStatus::kZeroRange;
  if (Dot(centroid - pose.position, pose.boresight) <= 0.0) return EchoStatus::kBehindRadar;
  const double cos_inc = std::max(0.0, Dot(normal, to_radar) / range);
  const double gain = AntennaGain(pattern, pose, centroid);
  const double projected_area = area * cos_inc;
  const double pattern_fs = material.scatter_exponent == 0.0
                                ? 1.0
                                : std::pow(cos_inc, material.scatter_exponent);
  const double gamma_eff = material.base_scatter_coeff * segment_weight;
  out->amplitude = wavelength_m / (4.0 * kPi) / (range * range) * gain * gamma_eff *
                   std::sqrt(projected_area * pattern_fs);
  out->delay_s = 2.0 * range / kSpeedOfLight;
  return EchoStatus::kOk;
}

void CheckDelay(const FacetEcho& e, const RadarConfig& config) {
  if (!(e.delay_s > 0.0) || e.delay_s >= config.max_delay()) {
    std::ostringstream os;
    os << "echo delay " << e.delay_s << " s outside the unambiguous window (0, "
       << config.max_delay() << ") s";
    throw Error(ErrorCode::kOutOfRange, os.str());
  }
}

}  // namespace

void MaterialModel::Validate() const {
  if (!(base_scatter_coeff >= 0.0) || !(scatter_exponent >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "material coefficients must be non-negative");
  }
}

IFCube::IFCube(const RadarConfig& cfg, size_t n_frames)
    : config(cfg),
      frames(n_frames),
      chirps(static_cast<size_t>(cfg.chirps_per_frame)),
      samples(static_cast<size_t>(cfg.samples_per_chirp)),
      data(frames * chirps * samples) {}

FacetEcho ComputeFacetEcho(const FacetSample& facet, const RadarPose& pose,
                           const AntennaPattern& pattern, const MaterialModel& material,
                           double segment_weight, double wavelength_m) {
  FacetEcho echo;
  echo.segment_id = facet.segment_id;
  switch (EvaluateEcho(facet.centroid, facet.unit_normal, facet.area, pose, pattern, material,
                       segment_weight, wavelength_m, &echo)) {
    case EchoStatus::kZeroRange:
      throw Error(ErrorCode::kInvalidArgument, "facet coincides with the radar position");
    case EchoStatus::kBehindRadar:
      throw Error(ErrorCode::kInvalidArgument, "facet lies behind the radar");
    case EchoStatus::kOk:
      break;
  }
  return echo;
}

void AccumulateChirp(std::span<const FacetEcho> echoes, const RadarConfig& config,
                     std::span<std::complex<double>> out) {
  const size_t n = out.size();
  // Per-lane accumulators keep the phasor recurrence vectorizable without
  // reassociating the final sum.
  std::vector<double> acc_re(n * kLanes, 0.0), acc_im(n * kLanes, 0.0);
  const double step_scale = config.sweep_rate_hz_per_s / config.adc_rate_hz;
  for (size_t base = 0; base < echoes.size(); base += kLanes) {
    std::array<double, kLanes> pr{}, pi{}, rr{}, ri{};
    for (size_t j = 0; j < kLanes; ++j) {
      rr[j] = 1.0;
      if (base + j >= echoes.size()) continue;
      const FacetEcho& e = echoes[base + j];
      const double phase0 = 2.0 * kPi * FracPart(e.delay_s * config.carrier_hz);
      const double step = 2.0 * kPi * FracPart(e.delay_s * step_scale);
      pr[j] = e.amplitude * std::cos(phase0);
      pi[j] = e.amplitude * std::sin(phase0);
      rr[j] = std::cos(step);
      ri[j] = std::sin(step);
    }
    for (size_t s = 0; s < n; ++s) {
      double* are = acc_re.data() + s * kLanes;
      double* aim = acc_im.data() + s * kLanes;
      for (size_t j = 0; j < kLanes; ++j) {
        are[j] += pr[j];
        aim[j] += pi[j];
        const double nr = pr[j] * rr[j] - pi[j] * ri[j];
        const double ni = pr[j] * ri[j] + pi[j] * rr[j];
        pr[j] = nr;
        pi[j] = ni;
      }
    }
  }
  for (size_t s = 0; s < n; ++s) {
    double re = 0.0, im = 0.0;
    for (size_t j = 0; j < kLanes; ++j) {
      re += acc_re[s * kLanes + j];
      im += acc_im[s * kLanes + j];
    }
    out[s] += std::complex<double>(re, im);
  }
}

std::vector<std::complex<double>> SynthesizeChirp(std::span<const FacetEcho> echoes,
                                                  const RadarConfig& config,
                                                  DelayPolicy policy) {
  config.Validate();
  std::vector<std::complex<double>> out(static_cast<size_t>(config.samples_per_chirp));
  if (policy == DelayPolicy::kError) {
    for (const FacetEcho& e : echoes) CheckDelay(e, config);
    AccumulateChirp(echoes, config, out);
    return out;
  }
  std::vector<FacetEcho> kept;
  kept.reserve(echoes.size());
  for (const FacetEcho& e : echoes) {
    if (e.delay_s > 0.0 && e.delay_s < config.max_delay()) kept.push_back(e);
  }
  AccumulateChirp(kept, config, out);
  return out;
}

size_t FrameCount(const MeshSequence& seq, const RadarConfig& config) {
  return static_cast<size_t>(std::floor(seq.duration() * config.frame_rate_hz + 1e-9));
}

IFCube SynthesizeSequence(const MeshSequence& seq, const RadarConfig& config,
                          const RadarPose& pose, const AntennaPattern& pattern,
                          const MaterialModel& material, const RandomizationPlan& plan,
                          const SynthesisOptions& options) {
  config.Validate();
  pose.Validate();
  pattern.Validate();
  material.Validate();
  seq.Validate();
  const size_t n_frames = FrameCount(seq, config);
  if (n_frames == 0) {
    throw Error(ErrorCode::kInvalidArgument, "motion sequence is shorter than one radar frame");
  }
  const DerivedParams derived = Derive(config);
  const MeshFrame& topo = seq.frames.front();
  std::vector<double> facet_weight(topo.facets.size());
  for (size_t i = 0; i < facet_weight.size(); ++i) {
    facet_weight[i] = SegmentWeight(plan, topo.segment_of_facet[i]);
  }

  // Visibility is resolved at mesh keyframes only.
  std::vector<std::vector<uint32_t>> visible(seq.frames.size());
  ParallelFor(seq.frames.size(), options.threads, [&](size_t k) {
    visible[k] = VisibleFacets(seq.frames[k], pose.position, options.visibility);
  });

  IFCube cube(config, n_frames);
  cube.plan_seed = plan.seed;
  const size_t chirps = cube.chirps;
  const double pri = config.chirp_interval();
  const double t0 = seq.start_time();
  const double max_delay = config.max_delay();

  ParallelFor(n_frames, options.threads, [&](size_t f) {
    std::vector<Vec3> verts(topo.vertices.size());
    std::vector<FacetEcho> echoes;
    std::vector<std::complex<double>> chirp(cube.samples);
    for (size_t c = 0; c < chirps; ++c) {
      const double t = std::min(t0 + static_cast<double>(f * chirps + c) * pri, seq.end_time());
      InterpolateVertices(seq, t, verts);
      const size_t k = KeyframeInterval(seq, t);
      echoes.clear();
      for (uint32_t id : visible[k]) {
        const Facet& tri = topo.facets[id];
        Vec3 centroid, normal;
        double area = 0.0;
        if (!FacetGeometry(verts[tri[0]], verts[tri[1]], verts[tri[2]], &centroid, &normal,
                           &area)) {
          continue;
        }
        FacetEcho echo;
        echo.segment_id = topo.segment_of_facet[id];
        if (EvaluateEcho(centroid, normal, area, pose, pattern, material, facet_weight[id],
                         derived.wavelength_m, &echo) != EchoStatus::kOk) {
          continue;
        }
        if (echo.amplitude == 0.0) continue;
        if (echo.delay_s >= max_delay) {
          if (options.delay_policy == DelayPolicy::kError) CheckDelay(echo, config);
          continue;
        }
        echo.amplitude *= config.tx_power_scale;
        echoes.push_back(echo);
      }
      std::fill(chirp.begin(), chirp.end(), std::complex<double>{});
      AccumulateChirp(echoes, config, chirp);
      auto dst = cube.Chirp(f, c);
      for (size_t s = 0; s < cube.samples; ++s) dst[s] = std::complex<float>(chirp[s]);
    }
  });
  return cube;
}

IFCube AddBackground(const IFCube& cube, const RandomizationPlan& plan) {
  IFCube out = cube;
  out.plan_seed = plan.seed;
  const bool has_noise = plan.noise_std > 0.0;
  if (!has_noise && plan.static_scatterers.empty()) return out;

  std::vector<FacetEcho> statics;
  for (const StaticScatterer& s : plan.static_scatterers) {
    const double range = Norm(s.position - plan.radar_pose.position);
    FacetEcho e;
    e.amplitude = s.amplitude;
    e.delay_s = 2.0 * range / kSpeedOfLight;
    if (e.delay_s > 0.0 && e.delay_s < cube.config.max_delay()) statics.push_back(e);
  }
  std::vector<std::complex<double>> background(cube.samples);
  AccumulateChirp(statics, cube.config, background);

  const double sigma = plan.noise_std / std::sqrt(2.0);
  for (size_t f = 0; f < cube.frames; ++f) {
    for (size_t c = 0; c < cube.chirps; ++c) {
      auto dst = out.Chirp(f, c);
      CounterRng rng(plan.seed, "thermal_noise", {f, c});
      for (size_t s = 0; s < cube.samples; ++s) {
        std::complex<double> v(dst[s]);
        v += background[s];
        if (has_noise) {
          const double re = rng.Gaussian();
          const double im = rng.Gaussian();
          v += std::complex<double>(sigma * re, sigma * im);
        }
        dst[s] = std::complex<float>(v);
      }
    }
  }
  return out;
}

}  // namespace mmforge
