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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace mmforge {

enum class PromptStyle {
  kTemplate,  // one fixed sentence frame
  kDiverse,   // synonym x syntactic-frame substitution
  kComplex,   // temporal compositions of atomic actions
};

PromptStyle ParsePromptStyle(const std::string& name);
const char* PromptStyleName(PromptStyle style);

struct ScenarioRequest {
  std::string scenario;
  int count = 1;
  PromptStyle style = PromptStyle::kDiverse;
  // Action lemmas to cover. When empty they are read off the scenario text.
  std::vector<std::string> actions;

  void Validate() const;
};

enum class PromptProvenance { kLlm, kGrammar };

struct MotionPrompt {
  std::string text;
  std::vector<std::string> atomic_actions;
  // Parallel to atomic_actions; 1 unless a repetition connective applies.
  std::vector<int> repetitions;
  PromptProvenance provenance = PromptProvenance::kGrammar;
  uint64_t seed = 0;
};

nlohmann::json PromptToJson(const MotionPrompt& p);

// Frames are sentence templates. Single-action frames contain "{action}";
// temporal frames contain "{action1}", "{action2}", ... in order.
struct SynonymLexicon {
  std::map<std::string, std::vector<std::string>> synonyms;
  std::map<std::string, std::string> frames;

  void Validate() const;
  static SynonymLexicon FromJson(const nlohmann::json& j);
  static SynonymLexicon Load(const std::filesystem::path& path);
  // Small built-in lexicon of everyday activities.
  static const SynonymLexicon& Default();
};

// Action lemmas of `lex` mentioned in free text (matching the lemma or its
// "-s"/"-ing"/"-ed" forms), in order of first appearance.
std::vector<std::string> ExtractLemmas(const std::string& text, const SynonymLexicon& lex);

std::vector<MotionPrompt> ExpandGrammar(const ScenarioRequest& req, const SynonymLexicon& lex,
                                        uint64_t seed);

// Joins the prompts' atomic actions with sampled temporal connectives,
// preserving order. A single prompt gets a repetition connective.
MotionPrompt ComposeTemporal(const std::vector<MotionPrompt>& prompts, uint64_t seed);

struct LlmEndpoint {
  std::string base_url;  // e.g. "http://localhost:8080/v1"
  std::string model = "gpt-4o-mini";
  std::string path = "/chat/completions";
  std::string token_env = "MMFORGE_LLM_TOKEN";
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds timeout{30000};
  int max_in_flight = 4;
  bool fallback_to_grammar = true;
};

// System prompt sent with every request; carries the scenario plus the
// diversity and temporal-composition rules.
std::string BuildSystemPrompt(const ScenarioRequest& req);

// Splits a completion into one prompt per non-empty line, stripping list
// markers. Throws kMalformedResponse (with the raw payload) when nothing
// usable is found.
std::vector<std::string> ParseCompletionLines(const std::string& raw_body);

class LlmClient {
 public:
  explicit LlmClient(LlmEndpoint endpoint);
  ~LlmClient();

  // On network failure after all retries: falls back to the grammar when the
  // endpoint allows it, otherwise throws kNetwork.
  std::vector<MotionPrompt> GeneratePrompts(const ScenarioRequest& req,
                                            const SynonymLexicon& fallback_lexicon,
                                            uint64_t seed);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<MotionPrompt> LlmGeneratePrompts(const ScenarioRequest& req,
                                             const LlmEndpoint& endpoint,
                                             const SynonymLexicon& fallback_lexicon,
                                             uint64_t seed);

}  // namespace mmforge
