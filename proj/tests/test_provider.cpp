#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "llm/config.hpp"
#include "llm/http_client.hpp"
#include "llm/provider.hpp"
#include "support/error.hpp"
#include "testutil.hpp"

using namespace deckhand;
using namespace deckhand::llm;
namespace tu = testutil;

TEST_CASE("mock returns scripted replies in order and then exhausts") {
  auto mock = mock_provider({tu::reply("A", 3, 1), tu::reply("B", 4, 2)});
  ChatRequest request;
  request.model_id = "mock";
  CHECK(mock->complete(request, Stage::planner).text == "A");
  ChatResponse second = mock->complete(request, Stage::editor);
  CHECK(second.text == "B");
  CHECK(second.usage == Usage{4, 2});
  try {
    mock->complete(request, Stage::codegen);
    FAIL("expected BadResponse");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::bad_response);
    CHECK(std::string(e.what()).find("script exhausted") != std::string::npos);
  }
}

TEST_CASE("empty mock scripts exhaust immediately") {
  auto mock = mock_provider({});
  ChatRequest request;
  CHECK_THROWS_AS(mock->complete(request, Stage::planner), Error);
}

TEST_CASE("stage and match constraints select replies") {
  auto mock = mock_provider({
      tu::staged_reply(Stage::editor, "", "editor reply"),
      tu::staged_reply(Stage::planner, "slide 3", "planner reply"),
  });
  ChatRequest request;
  request.user_text = "please fix slide 3";
  CHECK(mock->complete(request, Stage::planner).text == "planner reply");
  CHECK(mock->complete(request, Stage::editor).text == "editor reply");
}

TEST_CASE("compute_cost reproduces the pricing table exactly") {
  Config cfg = default_config();

  Money gemini = compute_cost(Usage{1'000'000, 1'000'000},
                              cfg.pricing.lookup("gemini-2.5-flash"));
  CHECK(gemini.to_string() == "0.75");
  CHECK(gemini.picodollars() == 750'000'000'000);

  Money deepseek = compute_cost(Usage{100'000, 10'000},
                                cfg.pricing.lookup("deepseek-v3"));
  CHECK(deepseek.to_string() == "0.038");
  CHECK(deepseek.picodollars() == 38'000'000'000);

  CHECK(compute_cost(Usage{0, 0}, cfg.pricing.lookup("gpt-4o")).picodollars() ==
        0);

  // the thinking output tier swaps only the output price
  Money thinking = compute_cost(Usage{0, 1'000'000},
                                cfg.pricing.lookup("gemini-2.5-flash"),
                                /*thinking_output=*/true);
  CHECK(thinking.to_string() == "3.5");
}

TEST_CASE("compute_cost is linear") {
  Config cfg = default_config();
  tu::Rng rng(31337);
  ModelPricing pricing = cfg.pricing.lookup("gpt-4.1-mini");
  for (int i = 0; i < 200; ++i) {
    Usage a{rng.below(2'000'000), rng.below(500'000)};
    Usage b{rng.below(2'000'000), rng.below(500'000)};
    Usage sum{a.input_tokens + b.input_tokens,
              a.output_tokens + b.output_tokens};
    CHECK(compute_cost(sum, pricing).picodollars() ==
          compute_cost(a, pricing).picodollars() +
              compute_cost(b, pricing).picodollars());
  }
}

TEST_CASE("provider sessions ledger every call with its cost") {
  Config cfg = default_config();
  auto mock = mock_provider(
      {tu::reply("one", 10, 5), tu::reply("two", 20, 7), tu::reply("x", 1, 1)});
  Provider provider(*mock, cfg.pricing);

  ChatRequest request;
  request.model_id = "deepseek-v3";
  provider.complete(request, Stage::planner);
  provider.complete(request, Stage::codegen);
  request.model_id = "gpt-4o";
  provider.complete(request, Stage::judge);

  UsageLedger ledger = provider.ledger_snapshot();
  REQUIRE(ledger.entries().size() == 3);

  // conservation: total equals the per-entry recomputation
  Money expected;
  for (const LedgerEntry& e : ledger.entries())
    expected += compute_cost(e.usage, cfg.pricing.lookup(e.model_id));
  CHECK(ledger.total_cost(/*include_judge=*/true).picodollars() ==
        expected.picodollars());

  // judge tokens are excluded from headline totals by default
  Usage headline = ledger.total_usage(false);
  CHECK(headline.input_tokens == 30);
  CHECK(headline.output_tokens == 12);
  Usage with_judge = ledger.total_usage(true);
  CHECK(with_judge.input_tokens == 31);

  // scripted usage flows into the cost exactly
  CHECK(ledger.entries()[0].cost_usd.picodollars() ==
        compute_cost(Usage{10, 5}, cfg.pricing.lookup("deepseek-v3"))
            .picodollars());
}

TEST_CASE("money parses and prints decimals exactly") {
  CHECK(Money::from_decimal_string("0.15").picodollars() == 150'000'000'000);
  CHECK(Money::from_decimal_string("12").to_string() == "12");
  CHECK(Money::from_decimal_string("0.038").to_string() == "0.038");
  CHECK_THROWS_AS(Money::from_decimal_string("abc"), Error);
  CHECK_THROWS_AS(Money::from_decimal_string("1.2.3"), Error);
}

TEST_CASE("http client speaks the chat-completions protocol") {
  httplib::Server server;
  std::string captured_auth, captured_body;
  int hits_429 = 0;

  server.Post("/v1/chat/completions",
              [&](const httplib::Request& req, httplib::Response& res) {
                captured_auth = req.get_header_value("Authorization");
                captured_body = req.body;
                res.set_content(
                    R"({"choices":[{"message":{"content":"pong"}}],)"
                    R"("usage":{"prompt_tokens":12,"completion_tokens":3}})",
                    "application/json");
              });
  server.Post("/limited", [&](const httplib::Request&, httplib::Response& res) {
    ++hits_429;
    res.status = 429;
  });
  server.Post("/denied", [&](const httplib::Request&, httplib::Response& res) {
    res.status = 401;
  });

  int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  std::string base = "http://127.0.0.1:" + std::to_string(port);
  setenv("DECKHAND_TEST_KEY", "sk-test-123", 1);

  SUBCASE("success path with usage accounting") {
    std::map<std::string, EndpointCfg> endpoints;
    endpoints["test-model"] = {base + "/v1/chat/completions",
                               "DECKHAND_TEST_KEY", "remote-name"};
    HttpChatClient client(endpoints);
    ChatRequest request;
    request.model_id = "test-model";
    request.system_text = "be terse";
    request.user_text = "ping";
    ChatResponse response = client.complete(request, Stage::codegen);
    CHECK(response.text == "pong");
    CHECK(response.usage == Usage{12, 3});
    CHECK(captured_auth == "Bearer sk-test-123");
    CHECK(captured_body.find("\"remote-name\"") != std::string::npos);
    CHECK(captured_body.find("\"system\"") != std::string::npos);
  }

  SUBCASE("missing credential is AuthError before any request") {
    std::map<std::string, EndpointCfg> endpoints;
    endpoints["m"] = {base + "/v1/chat/completions", "DECKHAND_UNSET_KEY", ""};
    HttpChatClient client(endpoints);
    ChatRequest request;
    request.model_id = "m";
    try {
      client.complete(request, Stage::codegen);
      FAIL("expected AuthError");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::auth);
    }
  }

  SUBCASE("401 maps to AuthError") {
    std::map<std::string, EndpointCfg> endpoints;
    endpoints["m"] = {base + "/denied", "DECKHAND_TEST_KEY", ""};
    HttpChatClient client(endpoints);
    ChatRequest request;
    request.model_id = "m";
    try {
      client.complete(request, Stage::codegen);
      FAIL("expected AuthError");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::auth);
    }
  }

  SUBCASE("429 retries with backoff then raises RateLimited") {
    std::map<std::string, EndpointCfg> endpoints;
    endpoints["m"] = {base + "/limited", "DECKHAND_TEST_KEY", ""};
    HttpChatClient client(endpoints);
    ChatRequest request;
    request.model_id = "m";
    try {
      client.complete(request, Stage::codegen);
      FAIL("expected RateLimited");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::rate_limited);
    }
    CHECK(hits_429 == 3);
  }

  SUBCASE("unconfigured model is a ConfigError") {
    HttpChatClient client({});
    ChatRequest request;
    request.model_id = "mystery";
    try {
      client.complete(request, Stage::codegen);
      FAIL("expected ConfigError");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::config_error);
    }
  }

  server.stop();
  thread.join();
}

TEST_CASE("config files overlay the defaults") {
  tu::TempDir tmp;
  auto config_path = tmp.file("deckhand.json");
  std::ofstream(config_path) << R"({
    "stages": {"planner": {"model": "deepseek-v3", "max_tokens": 1024}},
    "max_attempts": 2,
    "pricing": {"local-llm": {"input": 0, "output": 0}},
    "endpoints": {"deepseek-v3": {"url": "https://example.invalid/v1/chat/completions",
                                   "env_credential": "DEEPSEEK_KEY"}},
    "workers": 4
  })";
  Config cfg = load_config(config_path);
  CHECK(cfg.stage(Stage::planner).model_id == "deepseek-v3");
  CHECK(cfg.stage(Stage::planner).max_tokens == 1024);
  CHECK(cfg.stage(Stage::editor).model_id == "gemini-2.5-flash");  // default
  CHECK(cfg.max_attempts == 2);
  CHECK(cfg.workers == 4);
  CHECK(cfg.endpoints.at("deepseek-v3").env_credential == "DEEPSEEK_KEY");
  // defaults keep the shipped pricing
  CHECK(cfg.pricing.lookup("gemini-2.5-flash").input_per_million.to_string() ==
        "0.15");

  std::ofstream(tmp.file("bad.json")) << R"({"mode": "sideways"})";
  CHECK_THROWS_AS(load_config(tmp.file("bad.json")), Error);
}

TEST_CASE("mock scripts load from JSONL") {
  tu::TempDir tmp;
  auto script_path = tmp.file("replies.jsonl");
  std::ofstream(script_path)
      << R"({"stage":"planner","match":"title","text":"{}","input_tokens":7,"output_tokens":2})"
      << "\n"
      << R"({"text":"anything"})" << "\n";
  auto replies = load_mock_script(script_path);
  REQUIRE(replies.size() == 2);
  CHECK(replies[0].stage == Stage::planner);
  CHECK(replies[0].match == "title");
  CHECK(replies[0].usage == Usage{7, 2});
  CHECK(!replies[1].stage.has_value());
}
