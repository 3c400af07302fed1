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

#include "mmforge/signal_processing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fft.hpp"
#include "mmforge/parallel.hpp"

namespace mmforge {

Window ParseWindow(const std::string& name) {
  if (name == "hann") return Window::kHann;
  if (name == "rect" || name == "rectangular") return Window::kRectangular;
  throw Error(ErrorCode::kInvalidArgument, "unknown window '" + name + "'");
}

std::vector<double> WindowCoefficients(Window window, size_t n) {
  std::vector<double> w(n, 1.0);
  if (window == Window::kHann) {
    for (size_t i = 0; i < n; ++i) {
      w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n));
    }
  }
  return w;
}

std::vector<std::complex<double>> RangeFft(std::span<const std::complex<double>> chirp,
                                           Window window) {
  if (chirp.empty()) throw Error(ErrorCode::kInvalidArgument, "empty chirp");
  const std::vector<double> w = WindowCoefficients(window, chirp.size());
  std::vector<std::complex<double>> in(chirp.size()), out(chirp.size());
  for (size_t i = 0; i < chirp.size(); ++i) in[i] = chirp[i] * w[i];
  internal::Dft(in, out, -1);
  return out;
}

RangeDopplerMap DopplerMap(std::span<const std::complex<float>> frame, const RadarConfig& config,
                           Window range_window, Window doppler_window, size_t frame_index) {
  const size_t chirps = static_cast<size_t>(config.chirps_per_frame);
  const size_t samples = static_cast<size_t>(config.samples_per_chirp);
  if (frame.size() != chirps * samples) {
    throw Error(ErrorCode::kInvalidArgument,
                "frame holds " + std::to_string(frame.size()) + " samples, expected " +
                    std::to_string(chirps * samples));
  }
  const DerivedParams derived = Derive(config);
  const std::vector<double> wr = WindowCoefficients(range_window, samples);
  const std::vector<double> wd = WindowCoefficients(doppler_window, chirps);

  // Range spectra [chirp][range_bin].
  std::vector<std::complex<double>> spectra(chirps * samples);
  std::vector<std::complex<double>> in(samples);
  for (size_t c = 0; c < chirps; ++c) {
    for (size_t s = 0; s < samples; ++s) {
      in[s] = std::complex<double>(frame[c * samples + s]) * wr[s];
    }
    internal::Dft(in, std::span(spectra.data() + c * samples, samples), -1);
  }

  RangeDopplerMap map;
  map.range_bins = samples;
  map.doppler_bins = chirps;
  map.magnitude.assign(samples * chirps, 0.0);
  map.range_resolution_m = derived.range_resolution_m;
  map.doppler_resolution_hz = derived.doppler_resolution_hz;
  map.frame_index = frame_index;
  std::vector<std::complex<double>> slow(chirps), doppler(chirps);
  const size_t half = chirps / 2;
  for (size_t k = 0; k < samples; ++k) {
    for (size_t c = 0; c < chirps; ++c) slow[c] = spectra[c * samples + k] * wd[c];
    // Approaching targets shorten the delay, i.e. a negative phase slope across
    // chirps; the +1 transform maps them to positive bins.
    internal::Dft(slow, doppler, +1);
    for (size_t d = 0; d < chirps; ++d) map.at(k, (d + half) % chirps) = std::abs(doppler[d]);
  }
  return map;
}

RangeDopplerMap RangeGate(const RangeDopplerMap& map, double r_min, double r_max) {
  if (!(r_min >= 0.0) || !(r_min < r_max)) {
    std::ostringstream os;
    os << "invalid range gate [" << r_min << ", " << r_max << "]";
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
  RangeDopplerMap out = map;
  for (size_t k = 0; k < map.range_bins; ++k) {
    const double r = static_cast<double>(k) * map.range_resolution_m;
    if (r >= r_min && r <= r_max) continue;
    std::fill_n(out.magnitude.begin() + static_cast<std::ptrdiff_t>(k * map.doppler_bins),
                map.doppler_bins, 0.0);
  }
  return out;
}

RangeDopplerMap ClutterNotch(const RangeDopplerMap& map, size_t notch_width_bins) {
  RangeDopplerMap out = map;
  if (map.doppler_bins == 0) return out;
  const long long zero = static_cast<long long>(map.doppler_bins / 2);
  const long long w = static_cast<long long>(notch_width_bins);
  const long long lo = std::max(0LL, zero - w);
  const long long hi = std::min(static_cast<long long>(map.doppler_bins) - 1, zero + w);
  for (size_t k = 0; k < map.range_bins; ++k) {
    for (long long d = lo; d <= hi; ++d) out.at(k, static_cast<size_t>(d)) = 0.0;
  }
  return out;
}

Spectrogram MicroDoppler(const IFCube& cube, const MicroDopplerOptions& options) {
  const DerivedParams derived = Derive(cube.config);
  if (cube.data.size() != cube.frames * cube.chirps * cube.samples ||
      cube.chirps != static_cast<size_t>(cube.config.chirps_per_frame) ||
      cube.samples != static_cast<size_t>(cube.config.samples_per_chirp)) {
    throw Error(ErrorCode::kInvalidArgument, "IF cube dimensions do not match its configuration");
  }
  Spectrogram s;
  s.rows = cube.frames;
  s.cols = cube.chirps;
  s.values.assign(s.rows * s.cols, 0.0);
  s.frame_rate_hz = cube.config.frame_rate_hz;
  s.doppler_resolution_hz = derived.doppler_resolution_hz;
  s.plan_seed = cube.plan_seed;
  s.config_hash = ConfigHash(cube.config);
  ParallelFor(cube.frames, options.threads, [&](size_t f) {
    RangeDopplerMap map = DopplerMap(cube.Frame(f), cube.config, options.range_window,
                                     options.doppler_window, f);
    map = ClutterNotch(RangeGate(map, options.gate_min_m, options.gate_max_m),
                       options.notch_width_bins);
    for (size_t k = 0; k < map.range_bins; ++k) {
      for (size_t d = 0; d < map.doppler_bins; ++d) {
        const double v = map.at(k, d);
        s.at(f, d) += options.range_sum == RangeSum::kPower ? v * v : v;
      }
    }
  });
  return s;
}

Spectrogram ToDb(const Spectrogram& s, double floor_db) {
  if (s.is_db) throw Error(ErrorCode::kInvalidArgument, "spectrogram is already in dB");
  Spectrogram out = s;
  for (double& v : out.values) v = std::max(20.0 * std::log10(v + kDbEpsilon), floor_db);
  out.is_db = true;
  return out;
}

}  // namespace mmforge
