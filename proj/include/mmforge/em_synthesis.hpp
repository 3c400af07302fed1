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

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "mmforge/domain_randomization.hpp"
#include "mmforge/mesh_motion.hpp"
#include "mmforge/radar_model.hpp"

namespace mmforge {

// Scattering coefficient and Lambertian-family exponent k of the pattern
// function f_s = cos^k(incidence).
struct MaterialModel {
  double base_scatter_coeff = 1.0;
  double scatter_exponent = 1.0;
  void Validate() const;
};

struct FacetEcho {
  double amplitude = 0.0;
  double delay_s = 0.0;
  int segment_id = 0;
};

// Complex IF samples stored [frame][chirp][sample], row-major.
struct IFCube {
  RadarConfig config;
  size_t frames = 0;
  size_t chirps = 0;
  size_t samples = 0;
  std::vector<std::complex<float>> data;
  uint64_t plan_seed = 0;

  IFCube() = default;
  IFCube(const RadarConfig& cfg, size_t n_frames);

  std::span<std::complex<float>> Chirp(size_t frame, size_t chirp) {
    return {data.data() + (frame * chirps + chirp) * samples, samples};
  }
  std::span<const std::complex<float>> Chirp(size_t frame, size_t chirp) const {
    return {data.data() + (frame * chirps + chirp) * samples, samples};
  }
  std::span<const std::complex<float>> Frame(size_t frame) const {
    return {data.data() + frame * chirps * samples, chirps * samples};
  }
};

// Single-path echo amplitude:
//   a = lambda/(4 pi) * 1/R^2 * sqrt(Ctx Crx) * Gamma_eff * sqrt(dA' f_s)
// with Ctx = Crx = antenna gain, Gamma_eff = Gamma * segment_weight,
// dA' = area cos(theta), f_s = cos^k(theta). Delay is 2R/c.
// Throws when R == 0 or the facet lies behind the radar aperture plane.
FacetEcho ComputeFacetEcho(const FacetSample& facet, const RadarPose& pose,
                           const AntennaPattern& pattern, const MaterialModel& material,
                           double segment_weight, double wavelength_m);

enum class DelayPolicy {
  kError,    // throw when an echo exceeds the unambiguous delay
  kDiscard,  // silently drop such echoes
};

// x[n] = sum_i a_i exp(j 2 pi tau_i (f_c + S n / f_adc)).
std::vector<std::complex<double>> SynthesizeChirp(std::span<const FacetEcho> echoes,
                                                  const RadarConfig& config,
                                                  DelayPolicy policy = DelayPolicy::kError);

// Accumulates the chirp into `out` (length samples_per_chirp). Echoes must
// already satisfy the delay policy.
void AccumulateChirp(std::span<const FacetEcho> echoes, const RadarConfig& config,
                     std::span<std::complex<double>> out);

struct SynthesisOptions {
  VisibilityOptions visibility{};
  DelayPolicy delay_policy = DelayPolicy::kDiscard;
  unsigned threads = 1;
};

// Number of whole radar frames that fit in the sequence.
size_t FrameCount(const MeshSequence& seq, const RadarConfig& config);

IFCube SynthesizeSequence(const MeshSequence& seq, const RadarConfig& config,
                          const RadarPose& pose, const AntennaPattern& pattern,
                          const MaterialModel& material, const RandomizationPlan& plan,
                          const SynthesisOptions& options = {});

// Adds complex white noise (std plan.noise_std, split evenly over I and Q)
// and the plan's static point scatterers to every chirp. Noise for chirp
// (f, c) comes from the stream keyed by (plan.seed, f, c).
IFCube AddBackground(const IFCube& cube, const RandomizationPlan& plan);

}  // namespace mmforge
