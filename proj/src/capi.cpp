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

#include "mmforge/mmforge.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include "mmforge/alignment_math.hpp"
#include "mmforge/dataset_pipeline.hpp"
#include "mmforge/scenario_text.hpp"

struct mmf_spectrogram {
  mmforge::Spectrogram value;
};

namespace {

namespace fs = std::filesystem;
using mmforge::Error;
using mmforge::ErrorCode;
using Json = nlohmann::json;

thread_local std::string g_last_error;

mmf_status Fail(mmf_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
mmf_status Guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return MMF_OK;
  } catch (const Error& e) {
    return Fail(static_cast<mmf_status>(e.code()), e.what());
  } catch (const Json::exception& e) {
    return Fail(MMF_ERR_FORMAT, e.what());
  } catch (const fs::filesystem_error& e) {
    return Fail(MMF_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return Fail(MMF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(MMF_ERR_INTERNAL, e.what());
  } catch (...) {
    return Fail(MMF_ERR_INTERNAL, "unknown exception");
  }
}

void Require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

mmforge::Matrix ToMatrix(const double* data, size_t rows, size_t cols) {
  mmforge::Matrix m(rows, cols);
  if (rows * cols > 0) std::memcpy(m.data.data(), data, rows * cols * sizeof(double));
  return m;
}

}  // namespace

extern "C" {

const char* mmf_version(void) { return mmforge::Version(); }

const char* mmf_last_error(void) { return g_last_error.c_str(); }

const char* mmf_status_name(mmf_status status) {
  if (status == MMF_OK) return "ok";
  return mmforge::ErrorCodeName(static_cast<ErrorCode>(status));
}

void mmf_string_free(char* s) { std::free(s); }

mmf_status mmf_spectrogram_create(size_t rows, size_t cols, const double* values,
                                  double frame_rate_hz, double doppler_resolution_hz, int is_db,
                                  mmf_spectrogram** out) {
  return Guard([&] {
    Require(out != nullptr, "out is null");
    Require(values != nullptr || rows * cols == 0, "values is null");
    auto s = std::make_unique<mmf_spectrogram>();
    s->value.rows = rows;
    s->value.cols = cols;
    s->value.values.assign(values, values + rows * cols);
    s->value.frame_rate_hz = frame_rate_hz;
    s->value.doppler_resolution_hz = doppler_resolution_hz;
    s->value.is_db = is_db != 0;
    *out = s.release();
  });
}

mmf_status mmf_spectrogram_read(const char* path, mmf_spectrogram** out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "null argument");
    auto s = std::make_unique<mmf_spectrogram>();
    s->value = mmforge::ReadSpectrogram(path);
    *out = s.release();
  });
}

mmf_status mmf_spectrogram_write(const mmf_spectrogram* s, const char* path) {
  return Guard([&] {
    Require(s != nullptr && path != nullptr, "null argument");
    mmforge::WriteSpectrogram(s->value, path);
  });
}

mmf_status mmf_spectrogram_shape(const mmf_spectrogram* s, size_t* rows, size_t* cols) {
  return Guard([&] {
    Require(s != nullptr && rows != nullptr && cols != nullptr, "null argument");
    *rows = s->value.rows;
    *cols = s->value.cols;
  });
}

mmf_status mmf_spectrogram_copy_values(const mmf_spectrogram* s, double* out, size_t capacity) {
  return Guard([&] {
    Require(s != nullptr && out != nullptr, "null argument");
    if (capacity < s->value.values.size()) {
      throw Error(ErrorCode::kOutOfRange,
                  "buffer holds " + std::to_string(capacity) + " values, need " +
                      std::to_string(s->value.values.size()));
    }
    std::copy(s->value.values.begin(), s->value.values.end(), out);
  });
}

mmf_status mmf_spectrogram_render_png(const mmf_spectrogram* s, const char* path,
                                      const char* colormap) {
  return Guard([&] {
    Require(s != nullptr && path != nullptr, "null argument");
    const auto map =
        colormap ? mmforge::ParseColormap(colormap) : mmforge::Colormap::kViridis;
    mmforge::RenderPng(s->value, path, map);
  });
}

void mmf_spectrogram_free(mmf_spectrogram* s) { delete s; }

mmf_status mmf_synth_to_dir(const char* motion_path, const char* radar_path,
                            const char* rand_path, uint64_t seed, const char* out_dir,
                            unsigned threads, int write_if_cube, char** summary_json) {
  return Guard([&] {
    Require(motion_path != nullptr && out_dir != nullptr, "null argument");
    mmforge::PipelineSettings settings = mmforge::LoadPipelineSettings(
        radar_path ? mmforge::ReadJsonFile(radar_path) : Json::object(),
        rand_path ? mmforge::ReadJsonFile(rand_path) : Json::object());
    settings.synthesis.threads = threads == 0 ? 1 : threads;

    const mmforge::MeshSequence seq = mmforge::LoadMeshSequence(motion_path);
    const mmforge::RandomizationPlan plan =
        mmforge::SamplePlan(settings.randomization, seed, seq.SegmentIds());

    const fs::path dir(out_dir);
    fs::create_directories(dir);
    Json summary = {{"spectrogram", (dir / "spectrogram.f32").string()},
                    {"plan", (dir / "plan.json").string()},
                    {"duration_s", seq.duration()}};
    if (write_if_cube != 0) {
      // Same stages as RunPipeline, with the IF cube kept for export.
      const mmforge::MeshSequence smoothed = mmforge::GaussianSmooth(seq, settings.smoothing_sigma);
      mmforge::IFCube cube = mmforge::SynthesizeSequence(
          smoothed, settings.radar.config, plan.radar_pose, plan.antenna, settings.radar.material,
          plan, settings.synthesis);
      cube = mmforge::AddBackground(cube, plan);
      mmforge::WriteIfCube(cube, dir / "if_cube.f32");
      summary["if_cube"] = (dir / "if_cube.f32").string();
    }
    const mmforge::PipelineOutput out = mmforge::RunPipeline(seq, settings, plan);
    mmforge::WriteSpectrogram(out.db, dir / "spectrogram.f32");
    std::ofstream(dir / "plan.json") << Json(plan).dump(2) << "\n";
    summary["H"] = out.db.rows;
    summary["W"] = out.db.cols;
    if (summary_json != nullptr) *summary_json = Dup(summary.dump());
  });
}

mmf_status mmf_dataset_build(const char* spec_path, const char* out_dir, uint64_t seed,
                             int fail_fast, unsigned threads, char** manifest_jsonl) {
  return Guard([&] {
    Require(spec_path != nullptr && out_dir != nullptr, "null argument");
    mmforge::BuildOptions options;
    options.fail_fast = fail_fast != 0;
    options.threads = threads == 0 ? 1 : threads;
    const mmforge::DatasetManifest m = mmforge::BuildDataset(spec_path, out_dir, seed, options);
    if (manifest_jsonl != nullptr) *manifest_jsonl = Dup(mmforge::ManifestToJsonl(m));
  });
}

mmf_status mmf_prompts_generate(const char* request_json, char** prompts_jsonl) {
  return Guard([&] {
    Require(request_json != nullptr && prompts_jsonl != nullptr, "null argument");
    const Json j = Json::parse(request_json);
    mmforge::ScenarioRequest req;
    req.scenario = j.at("scenario").get<std::string>();
    req.count = j.value("count", 1);
    req.style = mmforge::ParsePromptStyle(j.value("style", "diverse"));
    if (j.contains("actions")) req.actions = j["actions"].get<std::vector<std::string>>();
    const uint64_t seed = j.value("seed", uint64_t{0});
    const mmforge::SynonymLexicon lexicon =
        j.contains("lexicon") ? mmforge::SynonymLexicon::Load(j["lexicon"].get<std::string>())
                              : mmforge::SynonymLexicon::Default();

    std::vector<mmforge::MotionPrompt> prompts;
    if (j.contains("llm_endpoint") && !j["llm_endpoint"].get<std::string>().empty()) {
      mmforge::LlmEndpoint ep;
      ep.base_url = j["llm_endpoint"].get<std::string>();
      ep.model = j.value("llm_model", ep.model);
      ep.fallback_to_grammar = j.value("fallback", true);
      prompts = mmforge::LlmGeneratePrompts(req, ep, lexicon, seed);
    } else {
      prompts = mmforge::ExpandGrammar(req, lexicon, seed);
    }
    std::string out;
    for (const auto& p : prompts) out += mmforge::PromptToJson(p).dump() + "\n";
    *prompts_jsonl = Dup(out);
  });
}

mmf_status mmf_inspect(const char* path, char** json) {
  return Guard([&] {
    Require(path != nullptr && json != nullptr, "null argument");
    *json = Dup(mmforge::InspectFile(path).dump(2));
  });
}

mmf_status mmf_cosine_similarity(const double* u, const double* v, size_t n, double* out) {
  return Guard([&] {
    Require(u != nullptr && v != nullptr && out != nullptr, "null argument");
    *out = mmforge::CosineSimilarity({u, n}, {v, n});
  });
}

mmf_status mmf_infonce_loss(const double* signal, const double* text, size_t n, size_t d,
                            double temperature, mmf_infonce_variant variant, double* loss) {
  return Guard([&] {
    Require(signal != nullptr && text != nullptr && loss != nullptr, "null argument");
    mmforge::EmbeddingBatch batch{ToMatrix(signal, n, d), ToMatrix(text, n, d), temperature};
    *loss = mmforge::InfoNceLoss(batch, static_cast<mmforge::InfoNceVariant>(variant));
  });
}

mmf_status mmf_infonce_grad(const double* signal, const double* text, size_t n, size_t d,
                            double temperature, mmf_infonce_variant variant, double* grad_signal,
                            double* grad_text) {
  return Guard([&] {
    Require(signal != nullptr && text != nullptr && grad_signal != nullptr &&
                grad_text != nullptr,
            "null argument");
    mmforge::EmbeddingBatch batch{ToMatrix(signal, n, d), ToMatrix(text, n, d), temperature};
    const auto g = mmforge::InfoNceGrad(batch, static_cast<mmforge::InfoNceVariant>(variant));
    std::copy(g.signal.data.begin(), g.signal.data.end(), grad_signal);
    std::copy(g.text.data.begin(), g.text.data.end(), grad_text);
  });
}

mmf_status mmf_lora_forward(const double* w0, const double* a, const double* b, size_t d,
                            size_t k, size_t r, const double* x, double* h) {
  return Guard([&] {
    Require(w0 != nullptr && x != nullptr && h != nullptr, "null argument");
    Require(r == 0 || (a != nullptr && b != nullptr), "null LoRA factor");
    mmforge::LoraLinear layer{ToMatrix(w0, d, k), ToMatrix(a, r, k), ToMatrix(b, d, r)};
    const std::vector<double> out = mmforge::LoraForward(layer, {x, k});
    std::copy(out.begin(), out.end(), h);
  });
}

mmf_status mmf_zero_shot(const double* signal, const double* labels, size_t n_labels, size_t d,
                         size_t* index, double* similarity) {
  return Guard([&] {
    Require(signal != nullptr && labels != nullptr && index != nullptr, "null argument");
    std::vector<mmforge::LabelEmbedding> set(n_labels);
    for (size_t i = 0; i < n_labels; ++i) {
      set[i].label = std::to_string(i);
      set[i].embedding.assign(labels + i * d, labels + (i + 1) * d);
    }
    const auto result = mmforge::ZeroShotClassify({signal, d}, set);
    *index = result.index;
    if (similarity != nullptr) *similarity = result.similarity;
  });
}

}  // extern "C"
