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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mmforge/config_io.hpp"
#include "mmforge/domain_randomization.hpp"
#include "mmforge/em_synthesis.hpp"
#include "mmforge/mesh_motion.hpp"
#include "mmforge/signal_processing.hpp"

namespace mmforge {

// Spectrogram payload "x.f32" (float32 LE, row-major H x W) with sidecar
// "x.json".
void WriteSpectrogram(const Spectrogram& s, const std::filesystem::path& path);
Spectrogram ReadSpectrogram(const std::filesystem::path& path);

// IF cube payload: interleaved complex float32 LE [frame][chirp][sample]
// with sidecar {frames, chirps, samples, config_hash, plan_seed, config}.
void WriteIfCube(const IFCube& cube, const std::filesystem::path& path);
IFCube ReadIfCube(const std::filesystem::path& path);

enum class Colormap { kGray, kHot, kJet, kViridis };
Colormap ParseColormap(const std::string& name);

// W-wide, H-tall RGB PNG; min maps to the colormap's low end.
void RenderPng(const Spectrogram& s, const std::filesystem::path& path,
               Colormap colormap = Colormap::kViridis);

// Returns the sidecar describing a payload (or the JSON file itself).
nlohmann::json InspectFile(const std::filesystem::path& path);

struct PipelineSettings {
  RadarFile radar;
  RandomizationConfig randomization;
  double smoothing_sigma = 1.0;
  MicroDopplerOptions micro_doppler{1.0, 5.0, 1};
  double floor_db = -200.0;
  SynthesisOptions synthesis{};
};

// Radar file (with optional "pipeline" block) plus randomization config.
// The radar file's antenna becomes the nominal antenna unless the
// randomization config names one.
PipelineSettings LoadPipelineSettings(const nlohmann::json& radar,
                                      const nlohmann::json& randomization);

// Reads the optional "pipeline" block:
//   {"smoothing_sigma", "gate_m": [lo, hi], "notch_width_bins", "floor_db",
//    "range_sum": "magnitude"|"power", "window": "hann"|"rect",
//    "occlusion": "depth_buffer"|"backface"}
void ApplyPipelineJson(const nlohmann::json& j, PipelineSettings* settings);

struct PipelineOutput {
  Spectrogram linear;  // after nonlinearity scaling, before dB
  Spectrogram db;
};

// smooth -> synthesize -> background -> micro-Doppler -> nonlinearity -> dB.
PipelineOutput RunPipeline(const MeshSequence& seq, const PipelineSettings& settings,
                           const RandomizationPlan& plan);

struct ManifestEntry {
  std::string id;
  std::string prompt_text;
  std::string motion_path;
  uint64_t plan_seed = 0;
  std::string spectrogram_path;
  std::string sidecar_path;
  std::string plan_path;
  std::optional<std::string> label;
  double duration_s = 0.0;
  bool duration_warning = false;
};

struct ManifestError {
  std::string id;
  std::string code;
  std::string message;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::vector<ManifestError> errors;
  std::string tool_version;
  uint64_t global_seed = 0;
  std::string radar_config_hash;
};

inline constexpr const char* kManifestName = "manifest.jsonl";

struct BuildOptions {
  bool fail_fast = false;
  unsigned threads = 1;
};

// Per-entry seeds come from (global seed, entry id), so adding entries never
// changes the others. Outputs carry a ".tmp" suffix until the manifest is
// committed.
DatasetManifest BuildDataset(const std::filesystem::path& spec_path,
                             const std::filesystem::path& out_dir, uint64_t seed,
                             const BuildOptions& options = {});

uint64_t EntrySeed(uint64_t global_seed, const std::string& entry_id);

std::string ManifestToJsonl(const DatasetManifest& m);
DatasetManifest ReadManifest(const std::filesystem::path& path);

}  // namespace mmforge
