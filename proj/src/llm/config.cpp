#include "llm/config.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "llm/http_client.hpp"
#include "support/error.hpp"

namespace deckhand::llm {
namespace {

using Json = nlohmann::ordered_json;

Money money_from_json(const Json& j, const std::string& where) {
  if (j.is_string()) return Money::from_decimal_string(j.get<std::string>());
  if (j.is_number())
    return Money::from_picodollars(
        std::llround(j.get<double>() * 1e12));
  raise(Errc::config_error, where + " must be a decimal number");
}

std::optional<Stage> stage_from_name(const std::string& name) {
  if (name == "planner") return Stage::planner;
  if (name == "editor") return Stage::editor;
  if (name == "codegen") return Stage::codegen;
  if (name == "judge") return Stage::judge;
  return std::nullopt;
}

}  // namespace

StageModelCfg Config::stage(Stage stage) const {
  auto it = stages.find(stage_name(stage));
  if (it != stages.end()) return it->second;
  return StageModelCfg{};
}

Config default_config() {
  Config cfg;
  cfg.stages["planner"] = {"gemini-1.5-flash", 2048, 0.05, 1.0};
  cfg.stages["editor"] = {"gemini-2.5-flash", 65536, 0.05, 1.0};
  cfg.stages["codegen"] = {"gemini-2.5-flash", 65536, 0.05, 1.0};
  cfg.stages["judge"] = {"gpt-4o", 512, 0.2, 1.0};
  cfg.max_attempts = 3;

  auto price = [](const char* in, const char* out, const char* out_thinking) {
    ModelPricing p;
    p.input_per_million = Money::from_decimal_string(in);
    p.output_per_million = Money::from_decimal_string(out);
    p.output_thinking_per_million = Money::from_decimal_string(out_thinking);
    return p;
  };
  cfg.pricing.set("gemini-2.5-flash", price("0.15", "0.60", "3.50"));
  cfg.pricing.set("gemini-1.5-flash", price("0.075", "0.30", "0.30"));
  cfg.pricing.set("gpt-4.1-mini", price("0.40", "1.60", "1.60"));
  cfg.pricing.set("gpt-4o", price("2.50", "10.00", "10.00"));
  cfg.pricing.set("claude-3-haiku", price("0.25", "1.25", "1.25"));
  cfg.pricing.set("deepseek-v3", price("0.27", "1.10", "1.10"));
  return cfg;
}

Config parse_config(const std::string& json_text) {
  Json doc = Json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object())
    raise(Errc::config_error, "config is not a JSON object");

  Config cfg = default_config();

  if (doc.contains("stages")) {
    if (!doc.at("stages").is_object())
      raise(Errc::config_error, "'stages' must be an object");
    for (auto it = doc.at("stages").begin(); it != doc.at("stages").end(); ++it) {
      if (!stage_from_name(it.key()))
        raise(Errc::config_error, "unknown stage '" + it.key() + "'");
      const Json& s = it.value();
      StageModelCfg stage = cfg.stages[it.key()];
      if (s.contains("model")) stage.model_id = s.at("model").get<std::string>();
      if (s.contains("max_tokens")) stage.max_tokens = s.at("max_tokens").get<int>();
      if (s.contains("temperature"))
        stage.temperature = s.at("temperature").get<double>();
      if (s.contains("top_p")) stage.top_p = s.at("top_p").get<double>();
      cfg.stages[it.key()] = stage;
    }
  }
  if (doc.contains("max_attempts")) {
    cfg.max_attempts = doc.at("max_attempts").get<int>();
    if (cfg.max_attempts < 1)
      raise(Errc::config_error, "'max_attempts' must be >= 1");
  }
  if (doc.contains("pricing")) {
    if (!doc.at("pricing").is_object())
      raise(Errc::config_error, "'pricing' must be an object");
    for (auto it = doc.at("pricing").begin(); it != doc.at("pricing").end();
         ++it) {
      const Json& p = it.value();
      ModelPricing pricing;
      pricing.input_per_million =
          money_from_json(p.at("input"), "pricing input for " + it.key());
      pricing.output_per_million =
          money_from_json(p.at("output"), "pricing output for " + it.key());
      pricing.output_thinking_per_million =
          p.contains("output_thinking")
              ? money_from_json(p.at("output_thinking"),
                                "pricing output_thinking for " + it.key())
              : pricing.output_per_million;
      cfg.pricing.set(it.key(), pricing);
    }
  }
  if (doc.contains("endpoints")) {
    if (!doc.at("endpoints").is_object())
      raise(Errc::config_error, "'endpoints' must be an object");
    for (auto it = doc.at("endpoints").begin(); it != doc.at("endpoints").end();
         ++it) {
      const Json& e = it.value();
      EndpointCfg endpoint;
      endpoint.url = e.value("url", std::string());
      endpoint.env_credential = e.value("env_credential", std::string());
      endpoint.remote_model = e.value("remote_model", std::string());
      cfg.endpoints[it.key()] = endpoint;
    }
  }
  if (doc.contains("render_command"))
    cfg.render_command = doc.at("render_command").get<std::string>();
  if (doc.contains("thinking_output"))
    cfg.thinking_output = doc.at("thinking_output").get<bool>();
  if (doc.contains("mode")) {
    cfg.mode = doc.at("mode").get<std::string>();
    if (cfg.mode != "pipeline" && cfg.mode != "direct")
      raise(Errc::config_error, "'mode' must be 'pipeline' or 'direct'");
  }
  if (doc.contains("workers")) {
    cfg.workers = doc.at("workers").get<int>();
    if (cfg.workers < 1) raise(Errc::config_error, "'workers' must be >= 1");
  }
  if (doc.contains("mock_script"))
    cfg.mock_script = doc.at("mock_script").get<std::string>();
  if (doc.contains("csv_report"))
    cfg.csv_report = doc.at("csv_report").get<std::string>();
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io, "cannot open config " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  Config cfg = parse_config(text);
  // mock script paths resolve relative to the config file
  if (cfg.mock_script && cfg.mock_script->is_relative())
    cfg.mock_script = path.parent_path() / *cfg.mock_script;
  return cfg;
}

std::vector<MockReply> load_mock_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io, "cannot open mock script " + path.string());
  std::vector<MockReply> replies;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json doc = Json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("text"))
      raise(Errc::config_error, "mock script line " + std::to_string(line_no) +
                                    " is not a reply object");
    MockReply reply;
    reply.text = doc.at("text").is_string() ? doc.at("text").get<std::string>()
                                            : doc.at("text").dump();
    reply.usage.input_tokens = doc.value("input_tokens", 0);
    reply.usage.output_tokens = doc.value("output_tokens", 0);
    if (doc.contains("stage")) {
      auto stage = stage_from_name(doc.at("stage").get<std::string>());
      if (!stage)
        raise(Errc::config_error, "mock script line " +
                                      std::to_string(line_no) +
                                      ": unknown stage");
      reply.stage = stage;
    }
    reply.match = doc.value("match", std::string());
    replies.push_back(std::move(reply));
  }
  return replies;
}

std::unique_ptr<ChatClient> make_chat_client(const Config& config) {
  if (config.mock_script)
    return std::make_unique<MockChatClient>(load_mock_script(*config.mock_script));
  return std::make_unique<HttpChatClient>(config.endpoints);
}

}  // namespace deckhand::llm
