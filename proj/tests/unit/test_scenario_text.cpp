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

#include <atomic>
#include <set>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "mmforge/common.hpp"
#include "mmforge/scenario_text.hpp"

using namespace mmforge;
using Json = nlohmann::json;

namespace {

SynonymLexicon WalkLexicon() {
  return SynonymLexicon::FromJson(Json{
      {"synonyms", {{"walk", {"walks forward", "strolls ahead"}}}},
      {"frames", {{"a", "A person {action}."}, {"b", "Someone {action}."}}}});
}

// Chat-completion stub on an ephemeral port.
class MockLlm {
 public:
  explicit MockLlm(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    server_.Post("/v1/chat/completions", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockLlm() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::string Completion(const std::string& content) {
  return Json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

LlmEndpoint FastEndpoint(const std::string& url) {
  LlmEndpoint ep;
  ep.base_url = url;
  ep.initial_backoff = std::chrono::milliseconds(5);
  ep.timeout = std::chrono::milliseconds(2000);
  return ep;
}

}  // namespace

TEST_CASE("grammar covers the full cross product") {
  ScenarioRequest req{"someone walks", 4, PromptStyle::kDiverse, {}};
  const auto prompts = ExpandGrammar(req, WalkLexicon(), 7);
  REQUIRE(prompts.size() == 4);
  std::set<std::string> texts;
  for (const auto& p : prompts) {
    texts.insert(p.text);
    CHECK(p.provenance == PromptProvenance::kGrammar);
    CHECK(p.seed == 7);
    CHECK(p.atomic_actions.size() == 1);
  }
  CHECK(texts.size() == 4);
}

TEST_CASE("grammar is deterministic per seed") {
  ScenarioRequest req{"a person walks, then sits and waves", 6, PromptStyle::kDiverse, {}};
  const auto a = ExpandGrammar(req, SynonymLexicon::Default(), 3);
  const auto b = ExpandGrammar(req, SynonymLexicon::Default(), 3);
  const auto c = ExpandGrammar(req, SynonymLexicon::Default(), 4);
  REQUIRE(a.size() == 6);
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].text == b[i].text);
  bool differs = false;
  for (size_t i = 0; i < a.size(); ++i) differs |= a[i].text != c[i].text;
  CHECK(differs);
}

TEST_CASE("grammar shortfall names the numbers") {
  ScenarioRequest req{"walk", 5, PromptStyle::kDiverse, {}};
  try {
    ExpandGrammar(req, WalkLexicon(), 1);
    FAIL("expected shortfall");
  } catch (const mmforge::Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("5") != std::string::npos);
    CHECK(msg.find("4") != std::string::npos);
    CHECK(msg.find("shortfall 1") != std::string::npos);
  }
  ScenarioRequest uncovered{"someone juggles", 1, PromptStyle::kDiverse, {}};
  CHECK_THROWS_AS(ExpandGrammar(uncovered, WalkLexicon(), 1), mmforge::Error);
  ScenarioRequest named{"x", 1, PromptStyle::kDiverse, {"swim"}};
  CHECK_THROWS_AS(ExpandGrammar(named, WalkLexicon(), 1), mmforge::Error);
}

TEST_CASE("template style uses a single frame") {
  ScenarioRequest req{"walking", 2, PromptStyle::kTemplate, {}};
  const auto prompts = ExpandGrammar(req, WalkLexicon(), 1);
  for (const auto& p : prompts) CHECK(p.text.rfind("A person", 0) == 0);
  req.count = 3;
  CHECK_THROWS_AS(ExpandGrammar(req, WalkLexicon(), 1), mmforge::Error);
}

TEST_CASE("complex style composes ordered actions") {
  ScenarioRequest req{"walk then bend", 5, PromptStyle::kComplex, {}};
  const auto prompts = ExpandGrammar(req, SynonymLexicon::Default(), 2);
  REQUIRE(prompts.size() == 5);
  for (const auto& p : prompts) {
    REQUIRE(p.atomic_actions.size() == 2);
    CHECK(p.text.find(p.atomic_actions[0]) < p.text.find(p.atomic_actions[1]));
  }
}

TEST_CASE("temporal composition") {
  MotionPrompt walk{"", {"walks forward"}, {1}, PromptProvenance::kGrammar, 0};
  MotionPrompt bend{"", {"bends over"}, {1}, PromptProvenance::kGrammar, 0};
  const MotionPrompt c = ComposeTemporal({walk, bend}, 11);
  CHECK(c.atomic_actions == std::vector<std::string>{"walks forward", "bends over"});
  CHECK(c.text.find("walks forward") < c.text.find("bends over"));
  CHECK(ComposeTemporal({walk, bend}, 11).text == c.text);

  bool saw_three = false;
  for (uint64_t seed = 0; seed < 50; ++seed) {
    const MotionPrompt r = ComposeTemporal({walk}, seed);
    REQUIRE(r.atomic_actions.size() == 1);
    CHECK(r.repetitions[0] >= 2);
    CHECK(r.repetitions[0] <= 4);
    if (r.repetitions[0] == 3) {
      saw_three = true;
      CHECK(r.text.find("three times") != std::string::npos);
    }
  }
  CHECK(saw_three);
  CHECK_THROWS_AS(ComposeTemporal({}, 1), mmforge::Error);
}

TEST_CASE("lemma extraction") {
  const auto lemmas = ExtractLemmas("She walked in, sat? no: sits, then jumping", SynonymLexicon::Default());
  CHECK(lemmas == std::vector<std::string>{"walk", "sit", "jump"});
}

TEST_CASE("lexicon validation") {
  CHECK_THROWS_AS(SynonymLexicon::FromJson(Json{{"synonyms", {{"walk", Json::array()}}},
                                                {"frames", {{"a", "A {action}."}}}}),
                  mmforge::Error);
  CHECK_THROWS_AS(SynonymLexicon::FromJson(Json{{"synonyms", {{"walk", {"walks"}}}},
                                                {"frames", {{"a", "no slot"}}}}),
                  mmforge::Error);
  CHECK_NOTHROW(SynonymLexicon::FromJson(
      Json{{"synonyms", {{"walk", {"walks"}}}},
           {"frames", {{"a", "A {action}."}, {"t", "First {action1}, then {action2}."}}}}));
}

TEST_CASE("completion parsing") {
  const auto lines =
      ParseCompletionLines(Completion("1. A person walks.\n- Someone sits.\n\n* A man waves.\n"));
  CHECK(lines == std::vector<std::string>{"A person walks.", "Someone sits.", "A man waves."});
  CHECK(ParseCompletionLines(Completion("3 people walk."))[0] == "3 people walk.");
  try {
    ParseCompletionLines("{\"oops\": 1}");
    FAIL("expected malformed");
  } catch (const mmforge::Error& e) {
    CHECK(e.code() == ErrorCode::kMalformedResponse);
    CHECK(std::string(e.what()).find("oops") != std::string::npos);
  }
  CHECK_THROWS_AS(ParseCompletionLines(""), mmforge::Error);
  CHECK_THROWS_AS(ParseCompletionLines(Completion("\n  \n")), mmforge::Error);
}

TEST_CASE("system prompt carries the scenario and rules") {
  const std::string p = BuildSystemPrompt({"elderly care at home", 3, PromptStyle::kComplex, {}});
  CHECK(p.find("elderly care at home") != std::string::npos);
  CHECK(p.find("atomic") != std::string::npos);
  CHECK(p.find("complex") != std::string::npos);
}

TEST_CASE("LLM client parses a mocked endpoint") {
  std::string auth;
  Json seen;
  MockLlm mock([&](const httplib::Request& req, httplib::Response& res) {
    auth = req.get_header_value("Authorization");
    seen = Json::parse(req.body);
    res.set_content(Completion("A person walks.\nA person sits.\nA person waves."),
                    "application/json");
  });
  setenv("MMFORGE_LLM_TOKEN", "secret", 1);
  const auto prompts = LlmGeneratePrompts({"home", 3, PromptStyle::kDiverse, {}},
                                          FastEndpoint(mock.url()), SynonymLexicon::Default(), 1);
  unsetenv("MMFORGE_LLM_TOKEN");
  REQUIRE(prompts.size() == 3);
  for (const auto& p : prompts) CHECK(p.provenance == PromptProvenance::kLlm);
  CHECK(prompts[1].text == "A person sits.");
  CHECK(auth == "Bearer secret");
  CHECK(seen["messages"][0]["role"] == "system");
  CHECK(seen["model"] == "gpt-4o-mini");
}

TEST_CASE("LLM client retries server errors") {
  std::atomic<int> calls{0};
  MockLlm mock([&](const httplib::Request&, httplib::Response& res) {
    if (++calls < 3) {
      res.status = 503;
      return;
    }
    res.set_content(Completion("A person jumps."), "application/json");
  });
  const auto prompts = LlmGeneratePrompts({"jump", 1, PromptStyle::kDiverse, {}},
                                          FastEndpoint(mock.url()), SynonymLexicon::Default(), 1);
  CHECK(calls == 3);
  REQUIRE(prompts.size() == 1);
  CHECK(prompts[0].provenance == PromptProvenance::kLlm);
}

TEST_CASE("LLM client reports malformed and empty responses") {
  MockLlm mock([&](const httplib::Request&, httplib::Response& res) {
    res.set_content("", "application/json");
  });
  try {
    LlmGeneratePrompts({"walk", 1, PromptStyle::kDiverse, {}}, FastEndpoint(mock.url()),
                       SynonymLexicon::Default(), 1);
    FAIL("expected malformed");
  } catch (const mmforge::Error& e) {
    CHECK(e.code() == ErrorCode::kMalformedResponse);
  }
}

TEST_CASE("unreachable endpoint falls back or fails") {
  // Grab a free port, then close the listener so connections are refused.
  int port = 0;
  {
    httplib::Server s;
    port = s.bind_to_any_port("127.0.0.1");
  }
  LlmEndpoint ep = FastEndpoint("http://127.0.0.1:" + std::to_string(port) + "/v1");
  ScenarioRequest req{"walk", 2, PromptStyle::kDiverse, {}};
  const auto prompts = LlmGeneratePrompts(req, ep, SynonymLexicon::Default(), 5);
  REQUIRE(prompts.size() == 2);
  CHECK(prompts[0].provenance == PromptProvenance::kGrammar);
  ep.fallback_to_grammar = false;
  try {
    LlmGeneratePrompts(req, ep, SynonymLexicon::Default(), 5);
    FAIL("expected network error");
  } catch (const mmforge::Error& e) {
    CHECK(e.code() == ErrorCode::kNetwork);
  }
}

TEST_CASE("client rejections are not masked by the fallback") {
  MockLlm mock([&](const httplib::Request&, httplib::Response& res) { res.status = 401; });
  CHECK_THROWS_AS(LlmGeneratePrompts({"walk", 1, PromptStyle::kDiverse, {}},
                                     FastEndpoint(mock.url()), SynonymLexicon::Default(), 1),
                  mmforge::Error);
}
