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

#include "mmforge/dataset_pipeline.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>

#include "binary_io.hpp"
#include "mmforge/parallel.hpp"
#include "mmforge/rng.hpp"
#include "mmforge/scenario_text.hpp"

namespace mmforge {

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

struct Rgb {
  uint8_t r, g, b;
};

uint8_t ToByte(double v) {
  return static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

Rgb MapColor(Colormap map, double t) {
  t = std::clamp(t, 0.0, 1.0);
  switch (map) {
    case Colormap::kGray:
      return {ToByte(t), ToByte(t), ToByte(t)};
    case Colormap::kHot:
      return {ToByte(3.0 * t), ToByte(3.0 * t - 1.0), ToByte(3.0 * t - 2.0)};
    case Colormap::kJet:
      return {ToByte(1.5 - std::abs(4.0 * t - 3.0)), ToByte(1.5 - std::abs(4.0 * t - 2.0)),
              ToByte(1.5 - std::abs(4.0 * t - 1.0))};
    case Colormap::kViridis: {
      static constexpr std::array<std::array<double, 3>, 9> kStops = {{
          {0.267, 0.005, 0.329},
          {0.283, 0.141, 0.458},
          {0.254, 0.265, 0.530},
          {0.207, 0.372, 0.553},
          {0.164, 0.471, 0.558},
          {0.128, 0.567, 0.551},
          {0.135, 0.659, 0.518},
          {0.267, 0.749, 0.441},
          {0.993, 0.906, 0.144},
      }};
      const double x = t * (kStops.size() - 1);
      const size_t i = std::min(static_cast<size_t>(x), kStops.size() - 2);
      const double f = x - static_cast<double>(i);
      auto lerp = [&](int c) { return kStops[i][c] + f * (kStops[i + 1][c] - kStops[i][c]); };
      return {ToByte(lerp(0)), ToByte(lerp(1)), ToByte(lerp(2))};
    }
  }
  return {0, 0, 0};
}

bool SafeId(const std::string& id) {
  if (id.empty() || id == "." || id == "..") return false;
  return std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

fs::path Resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

Json LoadJsonOrInline(const Json& node, const fs::path& base) {
  if (node.is_string()) return ReadJsonFile(Resolve(base, node.get<std::string>()));
  return node;
}

fs::path Tmp(const fs::path& p) { return fs::path(p.string() + ".tmp"); }

Json EntryToJson(const ManifestEntry& e) {
  Json j = {{"kind", "entry"},
            {"id", e.id},
            {"prompt_text", e.prompt_text},
            {"motion_path", e.motion_path},
            {"plan_seed", e.plan_seed},
            {"spectrogram_path", e.spectrogram_path},
            {"sidecar_path", e.sidecar_path},
            {"plan_path", e.plan_path},
            {"duration_s", e.duration_s},
            {"duration_warning", e.duration_warning}};
  if (e.label) j["label"] = *e.label;
  return j;
}

}  // namespace

void WriteSpectrogram(const Spectrogram& s, const fs::path& path) {
  if (s.values.size() != s.rows * s.cols) {
    throw Error(ErrorCode::kInvalidArgument, "spectrogram holds " +
                                                 std::to_string(s.values.size()) +
                                                 " values, expected H*W = " +
                                                 std::to_string(s.rows * s.cols));
  }
  std::vector<float> payload(s.values.begin(), s.values.end());
  internal::WriteFloat32(path, payload);
  Json side = {{"format", "mmforge.spectrogram"},
               {"version", kFormatVersion},
               {"H", s.rows},
               {"W", s.cols},
               {"frame_rate_hz", s.frame_rate_hz},
               {"doppler_resolution_hz", s.doppler_resolution_hz},
               {"is_db", s.is_db},
               {"provenance", {{"plan_seed", s.plan_seed}, {"config_hash", s.config_hash}}}};
  internal::WriteTextFile(internal::SidecarPath(path), side.dump(2) + "\n");
}

Spectrogram ReadSpectrogram(const fs::path& path) {
  const Json side = internal::ReadSidecar(path, "mmforge.spectrogram");
  const int version = side.value("version", 0);
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kFormat, "spectrogram version " + std::to_string(version) +
                                        " is not supported (expected " +
                                        std::to_string(kFormatVersion) + ")");
  }
  Spectrogram s;
  try {
    s.rows = side.at("H").get<size_t>();
    s.cols = side.at("W").get<size_t>();
    s.frame_rate_hz = side.at("frame_rate_hz").get<double>();
    s.doppler_resolution_hz = side.at("doppler_resolution_hz").get<double>();
    s.is_db = side.at("is_db").get<bool>();
    if (side.contains("provenance")) {
      s.plan_seed = side["provenance"].value("plan_seed", uint64_t{0});
      s.config_hash = side["provenance"].value("config_hash", std::string());
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("spectrogram sidecar: ") + e.what());
  }
  const std::vector<float> payload = internal::ReadFloat32(path);
  if (payload.size() != s.rows * s.cols) {
    throw Error(ErrorCode::kFormat, "payload holds " + std::to_string(payload.size()) +
                                        " values but sidecar H*W = " +
                                        std::to_string(s.rows * s.cols));
  }
  s.values.assign(payload.begin(), payload.end());
  return s;
}

void WriteIfCube(const IFCube& cube, const fs::path& path) {
  std::vector<float> payload;
  payload.reserve(cube.data.size() * 2);
  for (const auto& v : cube.data) {
    payload.push_back(v.real());
    payload.push_back(v.imag());
  }
  internal::WriteFloat32(path, payload);
  Json side = {{"format", "mmforge.ifcube"},
               {"version", kFormatVersion},
               {"frames", cube.frames},
               {"chirps", cube.chirps},
               {"samples", cube.samples},
               {"config_hash", ConfigHash(cube.config)},
               {"plan_seed", cube.plan_seed},
               {"config", cube.config}};
  internal::WriteTextFile(internal::SidecarPath(path), side.dump(2) + "\n");
}

IFCube ReadIfCube(const fs::path& path) {
  const Json side = internal::ReadSidecar(path, "mmforge.ifcube");
  if (side.value("version", 0) != kFormatVersion) {
    throw Error(ErrorCode::kFormat, "unsupported IF cube version");
  }
  RadarConfig config;
  size_t frames = 0;
  uint64_t seed = 0;
  try {
    side.at("config").get_to(config);
    frames = side.at("frames").get<size_t>();
    seed = side.value("plan_seed", uint64_t{0});
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("IF cube sidecar: ") + e.what());
  }
  IFCube cube(config, frames);
  cube.plan_seed = seed;
  if (side.value("chirps", size_t{0}) != cube.chirps ||
      side.value("samples", size_t{0}) != cube.samples) {
    throw Error(ErrorCode::kFormat, "IF cube sidecar dimensions disagree with its config");
  }
  const std::vector<float> payload = internal::ReadFloat32(path);
  if (payload.size() != cube.data.size() * 2) {
    throw Error(ErrorCode::kFormat, "IF cube payload holds " + std::to_string(payload.size()) +
                                        " floats, expected " +
                                        std::to_string(cube.data.size() * 2));
  }
  for (size_t i = 0; i < cube.data.size(); ++i) cube.data[i] = {payload[2 * i], payload[2 * i + 1]};
  return cube;
}

Colormap ParseColormap(const std::string& name) {
  if (name == "gray" || name == "grey") return Colormap::kGray;
  if (name == "hot") return Colormap::kHot;
  if (name == "jet") return Colormap::kJet;
  if (name == "viridis") return Colormap::kViridis;
  throw Error(ErrorCode::kInvalidArgument, "unknown colormap '" + name + "'");
}

void RenderPng(const Spectrogram& s, const fs::path& path, Colormap colormap) {
  if (s.rows == 0 || s.cols == 0 || s.values.size() != s.rows * s.cols) {
    throw Error(ErrorCode::kInvalidArgument, "cannot render an empty spectrogram");
  }
  for (double v : s.values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "spectrogram has non-finite values");
  }
  const auto [lo_it, hi_it] = std::minmax_element(s.values.begin(), s.values.end());
  const double lo = *lo_it, span = *hi_it - *lo_it;

  std::vector<uint8_t> pixels(s.rows * s.cols * 3);
  for (size_t r = 0; r < s.rows; ++r) {
    for (size_t c = 0; c < s.cols; ++c) {
      const double t = span > 0.0 ? (s.at(r, c) - lo) / span : 0.0;
      const Rgb rgb = MapColor(colormap, t);
      uint8_t* px = &pixels[(r * s.cols + c) * 3];
      px[0] = rgb.r;
      px[1] = rgb.g;
      px[2] = rgb.b;
    }
  }

  FILE* fp = std::fopen(path.string().c_str(), "wb");
  if (fp == nullptr) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw Error(ErrorCode::kIo, "libpng failed writing " + path.string());
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(s.cols), static_cast<png_uint_32>(s.rows), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  for (size_t r = 0; r < s.rows; ++r) png_write_row(png, &pixels[r * s.cols * 3]);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fclose(fp) != 0) throw Error(ErrorCode::kIo, "cannot close " + path.string());
}

Json InspectFile(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::kIo, "no such file: " + path.string());
  if (path.extension() == ".json" || path.extension() == ".jsonl") {
    if (path.extension() == ".jsonl") {
      std::ifstream in(path);
      std::string first;
      std::getline(in, first);
      try {
        return Json::parse(first);
      } catch (const Json::exception& e) {
        throw Error(ErrorCode::kFormat, path.string() + ": " + e.what());
      }
    }
    return ReadJsonFile(path);
  }
  const fs::path side = internal::SidecarPath(path);
  if (!fs::exists(side)) throw Error(ErrorCode::kFormat, "no sidecar found for " + path.string());
  return ReadJsonFile(side);
}

void ApplyPipelineJson(const Json& j, PipelineSettings* s) {
  try {
    s->smoothing_sigma = j.value("smoothing_sigma", s->smoothing_sigma);
    if (j.contains("gate_m")) {
      const Json& g = j.at("gate_m");
      s->micro_doppler.gate_min_m = g.at(0).get<double>();
      s->micro_doppler.gate_max_m = g.at(1).is_null() ? std::numeric_limits<double>::infinity()
                                                      : g.at(1).get<double>();
    }
    s->micro_doppler.notch_width_bins =
        j.value("notch_width_bins", s->micro_doppler.notch_width_bins);
    s->floor_db = j.value("floor_db", s->floor_db);
    if (j.contains("range_sum")) {
      const std::string m = j.at("range_sum").get<std::string>();
      if (m == "magnitude") {
        s->micro_doppler.range_sum = RangeSum::kMagnitude;
      } else if (m == "power") {
        s->micro_doppler.range_sum = RangeSum::kPower;
      } else {
        throw Error(ErrorCode::kInvalidArgument, "unknown range_sum '" + m + "'");
      }
    }
    if (j.contains("window")) {
      const Window w = ParseWindow(j.at("window").get<std::string>());
      s->micro_doppler.range_window = w;
      s->micro_doppler.doppler_window = w;
    }
    if (j.contains("occlusion")) {
      const std::string m = j.at("occlusion").get<std::string>();
      if (m == "depth_buffer") {
        s->synthesis.visibility.mode = OcclusionMode::kDepthBuffer;
      } else if (m == "backface") {
        s->synthesis.visibility.mode = OcclusionMode::kBackfaceOnly;
      } else {
        throw Error(ErrorCode::kInvalidArgument, "unknown occlusion mode '" + m + "'");
      }
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("pipeline settings: ") + e.what());
  }
}

PipelineSettings LoadPipelineSettings(const Json& radar, const Json& randomization) {
  PipelineSettings s;
  s.radar = ParseRadarFile(radar);
  s.randomization.nominal_antenna = s.radar.antenna;
  try {
    randomization.get_to(s.randomization);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("randomization configuration: ") + e.what());
  }
  s.randomization.Validate();
  if (radar.contains("pipeline")) ApplyPipelineJson(radar["pipeline"], &s);
  return s;
}

PipelineOutput RunPipeline(const MeshSequence& seq, const PipelineSettings& settings,
                           const RandomizationPlan& plan) {
  const MeshSequence smoothed = GaussianSmooth(seq, settings.smoothing_sigma);
  IFCube cube = SynthesizeSequence(smoothed, settings.radar.config, plan.radar_pose, plan.antenna,
                                   settings.radar.material, plan, settings.synthesis);
  cube = AddBackground(cube, plan);
  MicroDopplerOptions md = settings.micro_doppler;
  md.threads = settings.synthesis.threads;
  PipelineOutput out;
  out.linear = ApplyNonlinearity(MicroDoppler(cube, md), plan.nonlinearity_exponent);
  out.db = ToDb(out.linear, settings.floor_db);
  return out;
}

uint64_t EntrySeed(uint64_t global_seed, const std::string& entry_id) {
  return StreamKey(global_seed, "dataset_entry:" + entry_id);
}

std::string ManifestToJsonl(const DatasetManifest& m) {
  std::string out;
  Json header = {{"kind", "header"},
                 {"tool_version", m.tool_version},
                 {"global_seed", m.global_seed},
                 {"radar_config_hash", m.radar_config_hash},
                 {"entry_count", m.entries.size()},
                 {"error_count", m.errors.size()}};
  out += header.dump() + "\n";
  for (const ManifestEntry& e : m.entries) out += EntryToJson(e).dump() + "\n";
  for (const ManifestError& e : m.errors) {
    out += Json{{"kind", "error"}, {"id", e.id}, {"code", e.code}, {"message", e.message}}.dump() +
           "\n";
  }
  return out;
}

DatasetManifest ReadManifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open manifest " + path.string());
  DatasetManifest m;
  std::string line;
  try {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const Json j = Json::parse(line);
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "header") {
        m.tool_version = j.at("tool_version").get<std::string>();
        m.global_seed = j.at("global_seed").get<uint64_t>();
        m.radar_config_hash = j.at("radar_config_hash").get<std::string>();
      } else if (kind == "entry") {
        ManifestEntry e;
        e.id = j.at("id").get<std::string>();
        e.prompt_text = j.at("prompt_text").get<std::string>();
        e.motion_path = j.at("motion_path").get<std::string>();
        e.plan_seed = j.at("plan_seed").get<uint64_t>();
        e.spectrogram_path = j.at("spectrogram_path").get<std::string>();
        e.sidecar_path = j.at("sidecar_path").get<std::string>();
        e.plan_path = j.at("plan_path").get<std::string>();
        if (j.contains("label")) e.label = j.at("label").get<std::string>();
        e.duration_s = j.at("duration_s").get<double>();
        e.duration_warning = j.value("duration_warning", false);
        m.entries.push_back(std::move(e));
      } else if (kind == "error") {
        m.errors.push_back({j.at("id").get<std::string>(), j.at("code").get<std::string>(),
                            j.at("message").get<std::string>()});
      }
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
  return m;
}

DatasetManifest BuildDataset(const fs::path& spec_path, const fs::path& out_dir, uint64_t seed,
                             const BuildOptions& options) {
  const Json spec = ReadJsonFile(spec_path);
  const fs::path base = spec_path.parent_path();

  PipelineSettings settings = LoadPipelineSettings(
      spec.contains("radar") ? LoadJsonOrInline(spec["radar"], base) : Json::object(),
      spec.contains("randomization") ? LoadJsonOrInline(spec["randomization"], base)
                                     : Json::object());
  if (spec.contains("pipeline")) ApplyPipelineJson(spec["pipeline"], &settings);
  const SynonymLexicon lexicon = spec.contains("lexicon")
                                     ? SynonymLexicon::Load(Resolve(base, spec["lexicon"]))
                                     : SynonymLexicon::Default();

  if (!spec.contains("entries") || !spec["entries"].is_array()) {
    throw Error(ErrorCode::kFormat, spec_path.string() + ": missing \"entries\" array");
  }
  const Json& entries = spec["entries"];
  std::set<std::string> ids;
  for (const Json& e : entries) {
    const std::string id = e.value("id", "");
    if (!SafeId(id)) throw Error(ErrorCode::kFormat, "invalid entry id '" + id + "'");
    if (!ids.insert(id).second) throw Error(ErrorCode::kFormat, "duplicate entry id '" + id + "'");
  }

  fs::create_directories(out_dir);
  const size_t n = entries.size();
  const unsigned workers = std::max(1u, options.threads);
  std::vector<std::optional<ManifestEntry>> results(n);
  std::vector<std::optional<ManifestError>> failures(n);
  std::mutex log_mu;

  auto build_one = [&](size_t i) {
    const Json& spec_entry = entries[i];
    const std::string id = spec_entry.at("id").get<std::string>();
    const fs::path spec_file = out_dir / (id + ".f32");
    const fs::path side_file = internal::SidecarPath(spec_file);
    const fs::path plan_file = out_dir / (id + ".plan.json");
    try {
      ManifestEntry entry;
      entry.id = id;
      entry.plan_seed = EntrySeed(seed, id);
      if (spec_entry.contains("label")) entry.label = spec_entry["label"].get<std::string>();
      if (spec_entry.contains("prompt")) {
        entry.prompt_text = spec_entry["prompt"].get<std::string>();
      } else if (spec_entry.contains("prompt_request")) {
        const Json& pr = spec_entry["prompt_request"];
        ScenarioRequest req;
        req.scenario = pr.at("scenario").get<std::string>();
        req.style = ParsePromptStyle(pr.value("style", "diverse"));
        req.count = 1;
        if (pr.contains("actions")) req.actions = pr["actions"].get<std::vector<std::string>>();
        entry.prompt_text = ExpandGrammar(req, lexicon, entry.plan_seed).front().text;
      } else {
        throw Error(ErrorCode::kFormat, "entry needs \"prompt\" or \"prompt_request\"");
      }
      entry.motion_path = spec_entry.at("motion").get<std::string>();
      const MeshSequence seq = LoadMeshSequence(Resolve(base, entry.motion_path));
      entry.duration_s = seq.duration();
      entry.duration_warning = entry.duration_s < 6.0 || entry.duration_s > 12.0;
      if (entry.duration_warning) {
        std::lock_guard<std::mutex> lock(log_mu);
        std::cerr << "warning: entry '" << id << "' lasts " << entry.duration_s
                  << " s, outside the 6-12 s band\n";
      }
      const RandomizationPlan plan =
          SamplePlan(settings.randomization, entry.plan_seed, seq.SegmentIds());
      PipelineSettings local = settings;
      local.synthesis.threads = workers > 1 ? 1 : options.threads;
      const PipelineOutput out = RunPipeline(seq, local, plan);

      WriteSpectrogram(out.db, Tmp(spec_file));
      // WriteSpectrogram derives the sidecar name from the payload name.
      fs::rename(internal::SidecarPath(Tmp(spec_file)), Tmp(side_file));
      internal::WriteTextFile(Tmp(plan_file), Json(plan).dump(2) + "\n");
      entry.spectrogram_path = spec_file.filename().string();
      entry.sidecar_path = side_file.filename().string();
      entry.plan_path = plan_file.filename().string();
      results[i] = std::move(entry);
    } catch (const std::exception& e) {
      std::error_code ec;
      for (const fs::path& p : {spec_file, side_file, plan_file}) fs::remove(Tmp(p), ec);
      fs::remove(internal::SidecarPath(Tmp(spec_file)), ec);
      ManifestError err;
      err.id = id;
      const auto* mm = dynamic_cast<const Error*>(&e);
      err.code = mm ? ErrorCodeName(mm->code()) : "internal";
      err.message = e.what();
      failures[i] = std::move(err);
      if (options.fail_fast) throw;
    }
  };

  try {
    ParallelFor(n, workers, build_one);
  } catch (...) {
    std::error_code ec;
    for (size_t i = 0; i < n; ++i) {
      if (!results[i]) continue;
      for (const std::string& p : {results[i]->spectrogram_path, results[i]->sidecar_path,
                                   results[i]->plan_path}) {
        fs::remove(Tmp(out_dir / p), ec);
      }
    }
    throw;
  }

  DatasetManifest manifest;
  manifest.tool_version = Version();
  manifest.global_seed = seed;
  manifest.radar_config_hash = ConfigHash(settings.radar.config);
  for (size_t i = 0; i < n; ++i) {
    if (results[i]) manifest.entries.push_back(*results[i]);
    if (failures[i]) manifest.errors.push_back(*failures[i]);
  }
  const fs::path manifest_path = out_dir / kManifestName;
  internal::WriteTextFile(Tmp(manifest_path), ManifestToJsonl(manifest));
  for (const ManifestEntry& e : manifest.entries) {
    for (const std::string& p : {e.spectrogram_path, e.sidecar_path, e.plan_path}) {
      fs::rename(Tmp(out_dir / p), out_dir / p);
    }
  }
  fs::rename(Tmp(manifest_path), manifest_path);
  return manifest;
}

}  // namespace mmforge
