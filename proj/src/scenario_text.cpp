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

#include "mmforge/scenario_text.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <semaphore>
#include <set>
#include <sstream>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "mmforge/common.hpp"
#include "mmforge/rng.hpp"

namespace mmforge {

namespace {

using Json = nlohmann::json;

size_t CountOccurrences(const std::string& s, const std::string& needle) {
  size_t n = 0;
  for (size_t pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

std::string Fill(const std::string& frame, const std::string& slot, const std::string& value) {
  std::string out = frame;
  const size_t pos = out.find(slot);
  if (pos != std::string::npos) out.replace(pos, slot.size(), value);
  return out;
}

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string RepetitionWords(int n) {
  switch (n) {
    case 2:
      return "twice";
    case 3:
      return "three times";
    case 4:
      return "four times";
    default:
      return std::to_string(n) + " times";
  }
}

template <typename T>
void Shuffle(std::vector<T>& v, CounterRng& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.Uniform() * static_cast<double>(i));
    std::swap(v[i - 1], v[std::min(j, i - 1)]);
  }
}

std::string Trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

struct AtomicChoice {
  std::string lemma;
  size_t synonym = 0;
  std::string frame_id;
};

std::vector<std::string> ResolveLemmas(const ScenarioRequest& req, const SynonymLexicon& lex) {
  std::vector<std::string> lemmas = req.actions.empty() ? ExtractLemmas(req.scenario, lex)
                                                        : req.actions;
  if (lemmas.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "scenario mentions no action covered by the lexicon: '" + req.scenario + "'");
  }
  for (const std::string& l : lemmas) {
    if (!lex.synonyms.count(l)) {
      throw Error(ErrorCode::kInvalidArgument, "lexicon does not cover action lemma '" + l + "'");
    }
  }
  return lemmas;
}

}  // namespace

PromptStyle ParsePromptStyle(const std::string& name) {
  if (name == "template") return PromptStyle::kTemplate;
  if (name == "diverse") return PromptStyle::kDiverse;
  if (name == "complex") return PromptStyle::kComplex;
  throw Error(ErrorCode::kInvalidArgument, "unknown prompt style '" + name + "'");
}

const char* PromptStyleName(PromptStyle style) {
  switch (style) {
    case PromptStyle::kTemplate:
      return "template";
    case PromptStyle::kDiverse:
      return "diverse";
    case PromptStyle::kComplex:
      return "complex";
  }
  return "unknown";
}

void ScenarioRequest::Validate() const {
  if (count < 1) throw Error(ErrorCode::kInvalidArgument, "prompt count must be at least 1");
  if (Trim(scenario).empty()) throw Error(ErrorCode::kInvalidArgument, "scenario must not be empty");
}

Json PromptToJson(const MotionPrompt& p) {
  return Json{{"text", p.text},
              {"atomic_actions", p.atomic_actions},
              {"repetitions", p.repetitions},
              {"provenance", p.provenance == PromptProvenance::kLlm ? "llm" : "grammar"},
              {"seed", p.seed}};
}

void SynonymLexicon::Validate() const {
  if (synonyms.empty() || frames.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "lexicon needs at least one lemma and one frame");
  }
  for (const auto& [lemma, phrasings] : synonyms) {
    if (phrasings.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "lemma '" + lemma + "' has no phrasing");
    }
  }
  for (const auto& [id, frame] : frames) {
    const size_t single = CountOccurrences(frame, "{action}");
    const bool temporal = CountOccurrences(frame, "{action1}") == 1;
    if (single == 1 && !temporal) continue;
    if (single == 0 && temporal) {
      for (int k = 2;; ++k) {
        const size_t n = CountOccurrences(frame, "{action" + std::to_string(k) + "}");
        if (n == 0) break;
        if (n > 1 || frame.find("{action" + std::to_string(k - 1) + "}") >
                         frame.find("{action" + std::to_string(k) + "}")) {
          throw Error(ErrorCode::kInvalidArgument, "frame '" + id + "' has unordered slots");
        }
      }
      continue;
    }
    throw Error(ErrorCode::kInvalidArgument, "frame '" + id + "' must contain one action slot");
  }
}

SynonymLexicon SynonymLexicon::FromJson(const Json& j) {
  SynonymLexicon lex;
  try {
    lex.synonyms = j.at("synonyms").get<std::map<std::string, std::vector<std::string>>>();
    lex.frames = j.at("frames").get<std::map<std::string, std::string>>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("lexicon: ") + e.what());
  }
  lex.Validate();
  return lex;
}

SynonymLexicon SynonymLexicon::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open lexicon " + path.string());
  try {
    return FromJson(Json::parse(in));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
}

const SynonymLexicon& SynonymLexicon::Default() {
  static const SynonymLexicon lex = [] {
    SynonymLexicon l;
    l.synonyms = {
        {"walk", {"walks forward", "strolls ahead", "takes a few steps forward"}},
        {"run", {"runs in place", "jogs forward", "sprints ahead"}},
        {"jump", {"jumps up", "hops on the spot", "leaps upward"}},
        {"sit", {"sits down", "takes a seat", "lowers into a chair"}},
        {"stand", {"stands up", "rises to standing", "gets up"}},
        {"bend", {"bends over", "leans forward at the waist", "stoops down"}},
        {"wave", {"waves a hand", "waves with the right arm", "gives a wave"}},
        {"squat", {"squats down", "drops into a squat", "does a squat"}},
        {"turn", {"turns around", "spins around", "pivots in place"}},
        {"kick", {"kicks forward", "kicks with the right leg", "throws a kick"}},
        {"clap", {"claps hands", "applauds", "claps"}},
        {"fall", {"falls down", "collapses to the floor", "stumbles and falls"}},
    };
    l.frames = {
        {"template", "A person {action}."},
        {"someone", "Someone {action}."},
        {"scene", "In the room, a person {action}."},
        {"manner", "Calmly, a person {action}."},
        {"observer", "The radar sees a person who {action}."},
    };
    l.Validate();
    return l;
  }();
  return lex;
}

std::vector<std::string> ExtractLemmas(const std::string& text, const SynonymLexicon& lex) {
  std::vector<std::string> words;
  std::string cur;
  for (char ch : text) {
    if (std::isalpha(static_cast<unsigned char>(ch))) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    } else if (!cur.empty()) {
      words.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(cur);
  std::vector<std::string> out;
  for (const std::string& w : words) {
    for (const auto& [lemma, unused] : lex.synonyms) {
      const std::string l = Lower(lemma);
      const bool match = w == l || w == l + "s" || w == l + "es" || w == l + "ing" ||
                         w == l + "ed" || w == l + l.back() + "ing" ||
                         (l.back() == 'e' && w == l.substr(0, l.size() - 1) + "ing");
      if (match && std::find(out.begin(), out.end(), lemma) == out.end()) out.push_back(lemma);
    }
  }
  return out;
}

std::vector<MotionPrompt> ExpandGrammar(const ScenarioRequest& req, const SynonymLexicon& lex,
                                        uint64_t seed) {
  req.Validate();
  lex.Validate();
  const std::vector<std::string> lemmas = ResolveLemmas(req, lex);

  std::vector<std::string> frame_ids;
  for (const auto& [id, frame] : lex.frames) {
    if (CountOccurrences(frame, "{action}") == 1) frame_ids.push_back(id);
  }
  if (frame_ids.empty()) throw Error(ErrorCode::kInvalidArgument, "lexicon has no single-action frame");
  if (req.style == PromptStyle::kTemplate) {
    const auto it = std::find(frame_ids.begin(), frame_ids.end(), "template");
    frame_ids = {it != frame_ids.end() ? *it : frame_ids.front()};
  }

  std::vector<AtomicChoice> choices;
  for (const std::string& lemma : lemmas) {
    for (size_t s = 0; s < lex.synonyms.at(lemma).size(); ++s) {
      for (const std::string& f : frame_ids) choices.push_back({lemma, s, f});
    }
  }
  CounterRng rng(seed, "grammar_shuffle");
  Shuffle(choices, rng);

  std::vector<MotionPrompt> out;
  std::set<std::string> seen;
  auto shortfall = [&](size_t available) {
    throw Error(ErrorCode::kInvalidArgument,
                "requested " + std::to_string(req.count) + " distinct prompts but only " +
                    std::to_string(available) + " combinations are available (shortfall " +
                    std::to_string(static_cast<size_t>(req.count) - available) + ")");
  };

  if (req.style != PromptStyle::kComplex) {
    for (const AtomicChoice& c : choices) {
      const std::string& phrase = lex.synonyms.at(c.lemma)[c.synonym];
      MotionPrompt p;
      p.text = Fill(lex.frames.at(c.frame_id), "{action}", phrase);
      if (!seen.insert(p.text).second) continue;
      p.atomic_actions = {phrase};
      p.repetitions = {1};
      p.seed = seed;
      out.push_back(std::move(p));
      if (out.size() == static_cast<size_t>(req.count)) return out;
    }
    shortfall(out.size());
  }

  // Complex prompts: ordered pairs of distinct atomic phrasings.
  std::vector<std::pair<std::string, std::string>> phrasings;
  for (const std::string& lemma : lemmas) {
    for (const std::string& s : lex.synonyms.at(lemma)) phrasings.emplace_back(lemma, s);
  }
  std::vector<std::pair<size_t, size_t>> pairs;
  for (size_t a = 0; a < phrasings.size(); ++a) {
    for (size_t b = 0; b < phrasings.size(); ++b) {
      if (a != b && (phrasings[a].first != phrasings[b].first || lemmas.size() == 1)) {
        pairs.emplace_back(a, b);
      }
    }
  }
  CounterRng pair_rng(seed, "complex_pairs");
  Shuffle(pairs, pair_rng);
  for (size_t i = 0; i < pairs.size(); ++i) {
    MotionPrompt first, second;
    first.atomic_actions = {phrasings[pairs[i].first].second};
    first.repetitions = {1};
    second.atomic_actions = {phrasings[pairs[i].second].second};
    second.repetitions = {1};
    MotionPrompt p = ComposeTemporal({first, second}, StreamKey(seed, "complex", {i}));
    if (!seen.insert(p.text).second) continue;
    p.seed = seed;
    out.push_back(std::move(p));
    if (out.size() == static_cast<size_t>(req.count)) return out;
  }
  shortfall(out.size());
  return out;
}

MotionPrompt ComposeTemporal(const std::vector<MotionPrompt>& prompts, uint64_t seed) {
  if (prompts.empty()) throw Error(ErrorCode::kInvalidArgument, "nothing to compose");
  MotionPrompt out;
  out.seed = seed;
  out.provenance = PromptProvenance::kGrammar;
  for (const MotionPrompt& p : prompts) {
    if (p.atomic_actions.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "prompt without atomic actions");
    }
    for (size_t i = 0; i < p.atomic_actions.size(); ++i) {
      out.atomic_actions.push_back(p.atomic_actions[i]);
      out.repetitions.push_back(i < p.repetitions.size() ? std::max(1, p.repetitions[i]) : 1);
    }
  }
  CounterRng rng(seed, "compose_temporal");
  if (out.atomic_actions.size() == 1) {
    out.repetitions[0] = 2 + static_cast<int>(rng.Uniform() * 3.0);
  } else {
    for (int& r : out.repetitions) {
      if (r == 1 && rng.Uniform() < 0.25) r = 2 + static_cast<int>(rng.Uniform() * 2.0);
    }
  }
  static const char* const kConnectives[] = {", then ", " and then ", ", after that ",
                                             " while "};
  std::string text = "A person ";
  for (size_t i = 0; i < out.atomic_actions.size(); ++i) {
    if (i > 0) text += kConnectives[static_cast<size_t>(rng.Uniform() * 4.0) % 4];
    text += out.atomic_actions[i];
    if (out.repetitions[i] > 1) text += " " + RepetitionWords(out.repetitions[i]);
  }
  out.text = text + ".";
  return out;
}

std::string BuildSystemPrompt(const ScenarioRequest& req) {
  std::ostringstream os;
  os << "You write short descriptions of human motion for a motion generator.\n"
     << "Scenario: " << req.scenario << "\n"
     << "Rules:\n"
     << "1. Each line describes one person performing physically plausible actions.\n"
     << "2. Vary sentence structure and use synonyms; do not repeat a description.\n"
     << "3. Break complex activities into simple atomic actions.\n"
     << "4. Keep temporal order explicit (then, while, N times) for sequences and "
        "repetitions.\n"
     << "5. Do not name activity categories or labels.\n"
     << "Style: " << PromptStyleName(req.style) << ".\n"
     << "Output exactly one description per line, with no numbering or extra text.";
  return os.str();
}

std::vector<std::string> ParseCompletionLines(const std::string& raw_body) {
  auto malformed = [&](const std::string& why) -> Error {
    return Error(ErrorCode::kMalformedResponse,
                 "malformed completion response (" + why + "): " + raw_body.substr(0, 2000));
  };
  if (Trim(raw_body).empty()) throw malformed("empty body");
  std::string content;
  try {
    const Json j = Json::parse(raw_body);
    content = j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const Json::exception& e) {
    throw malformed(e.what());
  }
  std::vector<std::string> lines;
  std::istringstream in(content);
  for (std::string line; std::getline(in, line);) {
    std::string t = Trim(line);
    // List markers: "-", "*", "1.", "2)".
    if (!t.empty() && (t[0] == '-' || t[0] == '*')) {
      t = Trim(t.substr(1));
    } else {
      size_t i = 0;
      while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
      if (i > 0 && i < t.size() && (t[i] == '.' || t[i] == ')')) t = Trim(t.substr(i + 1));
    }
    if (!t.empty()) lines.push_back(t);
  }
  if (lines.empty()) throw malformed("no prompt lines");
  return lines;
}

struct LlmClient::Impl {
  explicit Impl(LlmEndpoint e)
      : endpoint(std::move(e)), in_flight(std::clamp(endpoint.max_in_flight, 1, 64)) {}
  LlmEndpoint endpoint;
  std::counting_semaphore<64> in_flight;
};

LlmClient::LlmClient(LlmEndpoint endpoint) : impl_(std::make_unique<Impl>(std::move(endpoint))) {}
LlmClient::~LlmClient() = default;

std::vector<MotionPrompt> LlmClient::GeneratePrompts(const ScenarioRequest& req,
                                                     const SynonymLexicon& fallback_lexicon,
                                                     uint64_t seed) {
  req.Validate();
  const LlmEndpoint& ep = impl_->endpoint;
  // Split "scheme://host:port/prefix" into the client origin and path prefix.
  const size_t scheme_end = ep.base_url.find("://");
  const size_t path_start =
      ep.base_url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  const std::string origin = ep.base_url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : ep.base_url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  Json body = {{"model", ep.model},
               {"messages",
                {{{"role", "system"}, {"content", BuildSystemPrompt(req)}},
                 {{"role", "user"},
                  {"content", "Write " + std::to_string(req.count) + " descriptions."}}}}};
  httplib::Headers headers;
  if (const char* token = std::getenv(ep.token_env.c_str()); token != nullptr && *token) {
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  std::string failure;
  std::string payload;
  bool ok = false;
  bool rejected = false;  // the server answered with a non-retryable status
  {
    impl_->in_flight.acquire();
    struct Release {
      std::counting_semaphore<64>& s;
      ~Release() { s.release(); }
    } release{impl_->in_flight};
    auto backoff = ep.initial_backoff;
    for (int attempt = 0; attempt < std::max(1, ep.max_attempts); ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
      }
      try {
        httplib::Client client(origin);
        client.set_connection_timeout(ep.timeout);
        client.set_read_timeout(ep.timeout);
        auto res = client.Post(prefix + ep.path, headers, body.dump(), "application/json");
        if (!res) {
          failure = "request failed: " + httplib::to_string(res.error());
          continue;
        }
        if (res->status == 200) {
          payload = res->body;
          ok = true;
          break;
        }
        failure = "HTTP status " + std::to_string(res->status);
        if (res->status < 500 && res->status != 429) {
          rejected = true;
          break;
        }
      } catch (const std::exception& e) {
        failure = e.what();
      }
    }
  }
  if (!ok) {
    if (ep.fallback_to_grammar && !rejected) return ExpandGrammar(req, fallback_lexicon, seed);
    throw Error(ErrorCode::kNetwork, "LLM endpoint " + ep.base_url + " unavailable: " + failure);
  }
  std::vector<MotionPrompt> out;
  for (std::string& line : ParseCompletionLines(payload)) {
    MotionPrompt p;
    p.atomic_actions = {line};
    p.repetitions = {1};
    p.text = std::move(line);
    p.provenance = PromptProvenance::kLlm;
    p.seed = seed;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<MotionPrompt> LlmGeneratePrompts(const ScenarioRequest& req,
                                             const LlmEndpoint& endpoint,
                                             const SynonymLexicon& fallback_lexicon,
                                             uint64_t seed) {
  LlmClient client(endpoint);
  return client.GeneratePrompts(req, fallback_lexicon, seed);
}

}  // namespace mmforge
