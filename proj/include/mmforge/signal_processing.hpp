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
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mmforge/em_synthesis.hpp"
#include "mmforge/radar_model.hpp"

namespace mmforge {

enum class Window {
  kRectangular,
  kHann,  // periodic
};

Window ParseWindow(const std::string& name);
std::vector<double> WindowCoefficients(Window window, size_t n);

struct RangeDopplerMap {
  size_t range_bins = 0;
  size_t doppler_bins = 0;
  std::vector<double> magnitude;  // [range_bin][doppler_bin]
  double range_resolution_m = 0.0;
  double doppler_resolution_hz = 0.0;
  size_t frame_index = 0;

  double at(size_t r, size_t d) const { return magnitude[r * doppler_bins + d]; }
  double& at(size_t r, size_t d) { return magnitude[r * doppler_bins + d]; }
};

// H x W time-Doppler matrix, one row per radar frame, Doppler bin W/2 is
// zero velocity and higher bins are approaching targets.
struct Spectrogram {
  size_t rows = 0;  // H
  size_t cols = 0;  // W
  std::vector<double> values;
  double frame_rate_hz = 0.0;
  double doppler_resolution_hz = 0.0;
  bool is_db = false;
  uint64_t plan_seed = 0;
  std::string config_hash;

  double at(size_t r, size_t c) const { return values[r * cols + c]; }
  double& at(size_t r, size_t c) { return values[r * cols + c]; }
};

// Unnormalized forward DFT of the windowed chirp; bin k maps to range k * dR.
std::vector<std::complex<double>> RangeFft(std::span<const std::complex<double>> chirp,
                                           Window window);

// Range FFT per chirp, then a slow-time FFT per range bin with the sign
// chosen so approaching targets land above W/2, then fftshift.
RangeDopplerMap DopplerMap(std::span<const std::complex<float>> frame, const RadarConfig& config,
                           Window range_window = Window::kHann,
                           Window doppler_window = Window::kHann, size_t frame_index = 0);

RangeDopplerMap RangeGate(const RangeDopplerMap& map, double r_min,
                          double r_max = std::numeric_limits<double>::infinity());

// Zeroes Doppler bins W/2 - width .. W/2 + width.
RangeDopplerMap ClutterNotch(const RangeDopplerMap& map, size_t notch_width_bins);

enum class RangeSum {
  kMagnitude,
  kPower,
};

struct MicroDopplerOptions {
  double gate_min_m = 0.0;
  double gate_max_m = std::numeric_limits<double>::infinity();
  size_t notch_width_bins = 0;
  Window range_window = Window::kHann;
  Window doppler_window = Window::kHann;
  RangeSum range_sum = RangeSum::kMagnitude;
  unsigned threads = 1;
};

Spectrogram MicroDoppler(const IFCube& cube, const MicroDopplerOptions& options = {});

inline constexpr double kDbEpsilon = 1e-12;

// v -> max(20 log10(v + 1e-12), floor_db).
Spectrogram ToDb(const Spectrogram& s, double floor_db);

}  // namespace mmforge
