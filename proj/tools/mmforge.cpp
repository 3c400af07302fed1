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

// Command-line front end. Talks to the library only through the C API.
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mmforge/mmforge.h"

namespace {

using Json = nlohmann::json;

// Prints the machine-readable error line and returns the process exit code.
int Report(mmf_status status) {
  if (status == MMF_OK) return 0;
  Json line = {{"error", mmf_status_name(status)},
               {"code", static_cast<int>(status)},
               {"message", mmf_last_error()}};
  std::cerr << line.dump() << std::endl;
  return static_cast<int>(status);
}

void PrintOwned(char* s) {
  if (s == nullptr) return;
  std::cout << s;
  if (*s != '\0' && s[std::char_traits<char>::length(s) - 1] != '\n') std::cout << '\n';
  mmf_string_free(s);
}

const char* OrNull(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mmforge: synthetic mmWave radar spectrograms from animated meshes"};
  app.set_version_flag("--version", std::string(mmf_version()));
  app.require_subcommand(1);

  // synth
  std::string motion, radar, rand, out_dir;
  uint64_t seed = 0;
  unsigned threads = 1;
  bool save_if = false;
  auto* synth = app.add_subcommand("synth", "Synthesize one spectrogram from a motion sequence");
  synth->add_option("--motion", motion, "Motion manifest (JSON)")->required();
  synth->add_option("--radar", radar, "Radar configuration JSON");
  synth->add_option("--rand", rand, "Randomization configuration JSON");
  synth->add_option("--seed", seed, "Plan seed");
  synth->add_option("--out", out_dir, "Output directory")->required();
  synth->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  synth->add_flag("--save-if", save_if, "Also write the raw IF cube");

  // dataset build
  std::string spec;
  bool fail_fast = false;
  auto* dataset = app.add_subcommand("dataset", "Dataset operations");
  dataset->require_subcommand(1);
  auto* build = dataset->add_subcommand("build", "Build a dataset from a spec file");
  build->add_option("spec", spec, "Dataset spec JSON")->required();
  build->add_option("--out", out_dir, "Output directory")->required();
  build->add_option("--seed", seed, "Global seed");
  build->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  build->add_flag("--fail-fast", fail_fast, "Abort on the first failing entry");

  // prompts
  std::string scenario, style = "diverse", endpoint, model, lexicon;
  int count = 1;
  std::vector<std::string> actions;
  auto* prompts = app.add_subcommand("prompts", "Generate motion-description prompts");
  prompts->add_option("--scenario", scenario, "Scenario description")->required();
  prompts->add_option("--style", style, "template|diverse|complex")
      ->check(CLI::IsMember({"template", "diverse", "complex"}));
  prompts->add_option("--count", count, "Number of prompts")->check(CLI::PositiveNumber);
  prompts->add_option("--seed", seed, "Seed");
  prompts->add_option("--action", actions, "Action lemma to cover (repeatable)");
  prompts->add_option("--lexicon", lexicon, "Synonym lexicon JSON");
  prompts->add_option("--llm-endpoint", endpoint,
                      "OpenAI-compatible base URL; token read from MMFORGE_LLM_TOKEN");
  prompts->add_option("--llm-model", model, "Model name sent to the endpoint");

  // plot
  std::string payload, png, colormap = "viridis";
  auto* plot = app.add_subcommand("plot", "Render a spectrogram to PNG");
  plot->add_option("spectrogram", payload, "Spectrogram payload (.f32)")->required();
  plot->add_option("--png", png, "Output PNG")->required();
  plot->add_option("--colormap", colormap, "gray|hot|jet|viridis");

  // inspect
  std::string file;
  auto* inspect = app.add_subcommand("inspect", "Print the sidecar of a file");
  inspect->add_option("file", file, "File to inspect")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() != 0) {
      Json line = {{"error", "usage"}, {"code", e.get_exit_code()}, {"message", e.what()}};
      std::cerr << line.dump() << std::endl;
      return e.get_exit_code();
    }
    return app.exit(e);
  }

  if (*synth) {
    char* summary = nullptr;
    const mmf_status st = mmf_synth_to_dir(motion.c_str(), OrNull(radar), OrNull(rand), seed,
                                           out_dir.c_str(), threads, save_if ? 1 : 0, &summary);
    if (st != MMF_OK) return Report(st);
    PrintOwned(summary);
    return 0;
  }
  if (*build) {
    char* manifest = nullptr;
    const mmf_status st = mmf_dataset_build(spec.c_str(), out_dir.c_str(), seed,
                                            fail_fast ? 1 : 0, threads, &manifest);
    if (st != MMF_OK) return Report(st);
    // Header line only; the full manifest is on disk.
    const std::string text(manifest);
    mmf_string_free(manifest);
    std::cout << text.substr(0, text.find('\n')) << '\n';
    return 0;
  }
  if (*prompts) {
    Json req = {{"scenario", scenario}, {"style", style}, {"count", count}, {"seed", seed}};
    if (!actions.empty()) req["actions"] = actions;
    if (!lexicon.empty()) req["lexicon"] = lexicon;
    if (!endpoint.empty()) req["llm_endpoint"] = endpoint;
    if (!model.empty()) req["llm_model"] = model;
    char* out = nullptr;
    const mmf_status st = mmf_prompts_generate(req.dump().c_str(), &out);
    if (st != MMF_OK) return Report(st);
    PrintOwned(out);
    return 0;
  }
  if (*plot) {
    mmf_spectrogram* s = nullptr;
    mmf_status st = mmf_spectrogram_read(payload.c_str(), &s);
    if (st == MMF_OK) st = mmf_spectrogram_render_png(s, png.c_str(), colormap.c_str());
    mmf_spectrogram_free(s);
    return Report(st);
  }
  if (*inspect) {
    char* out = nullptr;
    const mmf_status st = mmf_inspect(file.c_str(), &out);
    if (st != MMF_OK) return Report(st);
    PrintOwned(out);
    return 0;
  }
  return 0;
}
