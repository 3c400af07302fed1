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
#include "mmforge/em_synthesis.hpp"
#include "mmforge/signal_processing.hpp"

using namespace mmforge;

namespace {

constexpr double kPiD = 3.14159265358979323846;
constexpr double kC = 299792458.0;

std::vector<std::complex<double>> NaiveDft(const std::vector<std::complex<double>>& x) {
  const size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (size_t k = 0; k < n; ++k) {
    for (size_t i = 0; i < n; ++i) {
      out[k] += x[i] * std::exp(std::complex<double>(0.0, -2.0 * kPiD * k * i / n));
    }
  }
  return out;
}

// One frame of a point target with constant range rate (positive = receding).
IFCube PointTargetCube(const RadarConfig& cfg, double range, double range_rate, double amp,
                       size_t frames = 1) {
  IFCube cube(cfg, frames);
  for (size_t f = 0; f < frames; ++f) {
    for (size_t c = 0; c < cube.chirps; ++c) {
      const double t = (f * cube.chirps + c) * cfg.chirp_interval();
      const FacetEcho e{amp, 2.0 * (range + range_rate * t) / kC, 0};
      const auto x = SynthesizeChirp(std::span(&e, 1), cfg);
      auto dst = cube.Chirp(f, c);
      for (size_t s = 0; s < cube.samples; ++s) dst[s] = std::complex<float>(x[s]);
    }
  }
  return cube;
}

}  // namespace

TEST_CASE("periodic Hann window") {
  const auto w = WindowCoefficients(Window::kHann, 8);
  CHECK(w[0] == 0.0);
  CHECK(w[4] == doctest::Approx(1.0));
  CHECK(w[2] == doctest::Approx(0.5));
  CHECK(w[6] == doctest::Approx(0.5));
  const auto r = WindowCoefficients(Window::kRectangular, 5);
  for (double v : r) CHECK(v == 1.0);
  CHECK(ParseWindow("rect") == Window::kRectangular);
  CHECK_THROWS_AS(ParseWindow("kaiser"), Error);
}

TEST_CASE("range FFT matches a naive DFT and satisfies Parseval") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  std::vector<std::complex<double>> x(64);
  for (auto& v : x) v = {nd(rng), nd(rng)};
  const auto fast = RangeFft(x, Window::kRectangular);
  const auto slow = NaiveDft(x);
  double e_time = 0.0, e_freq = 0.0;
  for (size_t k = 0; k < x.size(); ++k) {
    CHECK(std::abs(fast[k] - slow[k]) < 1e-10);
    e_time += std::norm(x[k]);
    e_freq += std::norm(fast[k]);
  }
  CHECK(e_freq / x.size() == doctest::Approx(e_time).epsilon(1e-12));
}

TEST_CASE("range-Doppler map places a moving point target") {
  const RadarConfig cfg;
  const double range = 2.5, v = -1.0;  // approaching at 1 m/s
  const IFCube cube = PointTargetCube(cfg, range, v, 1.0);
  const RangeDopplerMap map =
      DopplerMap(cube.Frame(0), cfg, Window::kHann, Window::kHann, 0);
  size_t br = 0, bd = 0;
  double best = -1.0;
  for (size_t k = 0; k < map.range_bins; ++k) {
    for (size_t dd = 0; dd < map.doppler_bins; ++dd) {
      if (map.at(k, dd) > best) best = map.at(k, dd), br = k, bd = dd;
    }
  }
  const DerivedParams dp = Derive(cfg);
  // The target drifts ~0.5 range bins over the frame; that migration also
  // rotates the range-bin phase, so both peaks may move by one bin.
  CHECK(std::abs(static_cast<double>(br) - range / dp.range_resolution_m) <= 1.0);
  const double fd = 2.0 * 1.0 / dp.wavelength_m;
  const long offset = static_cast<long>(bd) - 64;
  CHECK(offset > 0);
  CHECK(std::abs(static_cast<double>(offset) - fd / dp.doppler_resolution_hz) <= 1.0);
}

TEST_CASE("range gate and clutter notch") {
  RangeDopplerMap map;
  map.range_bins = 10;
  map.doppler_bins = 8;
  map.range_resolution_m = 0.5;
  map.magnitude.assign(80, 1.0);
  const auto gated = RangeGate(map, 1.0, 2.0);
  for (size_t k = 0; k < 10; ++k) {
    const bool keep = k >= 2 && k <= 4;
    CHECK(gated.at(k, 3) == (keep ? 1.0 : 0.0));
  }
  CHECK_THROWS_AS(RangeGate(map, 2.0, 1.0), Error);
  CHECK_THROWS_AS(RangeGate(map, -1.0, 1.0), Error);
  const auto notched = ClutterNotch(map, 1);
  CHECK(notched.at(5, 3) == 0.0);
  CHECK(notched.at(5, 4) == 0.0);
  CHECK(notched.at(5, 5) == 0.0);
  CHECK(notched.at(5, 2) == 1.0);
  CHECK(notched.at(5, 6) == 1.0);
  const auto only_zero = ClutterNotch(map, 0);
  CHECK(only_zero.at(0, 4) == 0.0);
  CHECK(only_zero.at(0, 3) == 1.0);
}

TEST_CASE("micro-Doppler rows and dB conversion") {
  const RadarConfig cfg;
  const IFCube cube = PointTargetCube(cfg, 2.0, 1.0, 1e-3, 3);
  MicroDopplerOptions opt;
  opt.gate_min_m = 1.0;
  opt.gate_max_m = 5.0;
  opt.notch_width_bins = 1;
  const Spectrogram s = MicroDoppler(cube, opt);
  CHECK(s.rows == 3);
  CHECK(s.cols == 128);
  CHECK(s.frame_rate_hz == 50.0);
  CHECK(s.doppler_resolution_hz == doctest::Approx(50.0));
  size_t best = 0;
  for (size_t c = 0; c < s.cols; ++c) {
    if (s.at(1, c) > s.at(1, best)) best = c;
  }
  CHECK(std::abs(static_cast<long>(best) - 64 + 10) <= 1);
  opt.threads = 2;
  CHECK(MicroDoppler(cube, opt).values == s.values);

  const Spectrogram db = ToDb(s, -150.0);
  CHECK(db.is_db);
  CHECK(db.at(1, best) == doctest::Approx(20.0 * std::log10(s.at(1, best) + 1e-12)));
  CHECK(db.at(1, 64) == -150.0);
  CHECK_THROWS_AS(ToDb(db, -150.0), Error);
}
