#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "llm/http_client.hpp"
#include "llm/provider.hpp"

namespace deckhand::llm {

struct StageModelCfg {
  std::string model_id;
  int max_tokens = 4096;
  double temperature = 0.05;
  double top_p = 1.0;
};

struct Config {
  std::map<std::string, StageModelCfg> stages;  // planner/editor/codegen/judge
  int max_attempts = 3;
  PricingTable pricing;
  std::map<std::string, EndpointCfg> endpoints;
  std::optional<std::string> render_command;  // "{pptx} {outdir}" placeholders
  bool thinking_output = false;
  std::string mode = "pipeline";  // pipeline | direct
  int workers = 1;
  std::optional<std::filesystem::path> mock_script;  // JSONL of scripted replies
  std::optional<std::filesystem::path> csv_report;

  StageModelCfg stage(Stage stage) const;
};

// Built-in stage models, sampling settings, and pricing table.
Config default_config();

// Reads a JSON config file over the defaults. Throws ConfigError / IoError.
Config load_config(const std::filesystem::path& path);
Config parse_config(const std::string& json_text);

// Builds the chat transport the config describes: a scripted mock when
// mock_script is set, the HTTP client otherwise.
std::unique_ptr<ChatClient> make_chat_client(const Config& config);

// Loads mock replies from a JSON-lines file:
// {"stage"?: str, "match"?: str, "text": str, "input_tokens"?: int,
//  "output_tokens"?: int}
std::vector<MockReply> load_mock_script(const std::filesystem::path& path);

}  // namespace deckhand::llm
