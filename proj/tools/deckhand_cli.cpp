// deckhand command-line tool. Machine-readable JSON goes to stdout, all
// human-readable logging to stderr, so scripts can consume the output
// directly. Exit codes: 0 success, 1 partial, 2 failed, 3 refused,
// 4 usage/config error, 5 I/O error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "deckhand/deckhand.h"

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitPartial = 1;
constexpr int kExitFailed = 2;
constexpr int kExitRefused = 3;
constexpr int kExitUsage = 4;
constexpr int kExitIo = 5;

struct StringGuard {
  char* value = nullptr;
  ~StringGuard() { dh_string_free(value); }
};

struct ConfigGuard {
  dh_config* value = nullptr;
  ~ConfigGuard() { dh_config_free(value); }
};

struct DeckGuard {
  dh_deck* value = nullptr;
  ~DeckGuard() { dh_deck_free(value); }
};

int exit_code_for(dh_status status, const char* err) {
  if (err) std::cerr << "deckhand: " << err << "\n";
  switch (status) {
    case DH_OK: return kExitSuccess;
    case DH_E_USAGE: return kExitUsage;
    case DH_E_IO: return kExitIo;
    case DH_E_FORMAT: return kExitIo;
    case DH_E_RANGE: return kExitUsage;
    default: return kExitFailed;
  }
}

// Missing explicit --config is an error; a missing default config file just
// means built-in defaults.
int load_config(const std::string& config_path, bool explicit_path,
                ConfigGuard& config) {
  StringGuard err;
  if (!explicit_path && !std::filesystem::exists(config_path)) {
    dh_status status = dh_config_default(&config.value, &err.value);
    return status == DH_OK ? kExitSuccess : exit_code_for(status, err.value);
  }
  dh_status status = dh_config_load(config_path.c_str(), &config.value,
                                    &err.value);
  return status == DH_OK ? kExitSuccess : exit_code_for(status, err.value);
}

int status_to_exit(const std::string& status) {
  if (status == "success") return kExitSuccess;
  if (status == "partial") return kExitPartial;
  if (status == "refused") return kExitRefused;
  return kExitFailed;
}

int run_edit(const std::string& file, const std::string& instruction,
             const std::string& out, const std::string& mode,
             const std::string& config_path, bool explicit_config,
             int max_attempts, bool no_timing, bool overwrite) {
  if (!std::filesystem::exists(file)) {
    std::cerr << "deckhand: no such file: " << file << "\n";
    return kExitIo;
  }
  ConfigGuard config;
  if (int rc = load_config(config_path, explicit_config, config); rc != 0)
    return rc;

  dh_edit_options options{};
  options.out_path = out.empty() ? nullptr : out.c_str();
  options.direct_mode = mode == "direct" ? 1 : 0;
  options.max_attempts = max_attempts;
  options.no_timing = no_timing ? 1 : 0;
  options.allow_overwrite = overwrite ? 1 : 0;

  StringGuard report, err;
  dh_status status = dh_edit(config.value, file.c_str(), instruction.c_str(),
                             &options, &report.value, &err.value);
  if (status != DH_OK) return exit_code_for(status, err.value);

  std::cout << report.value << "\n";
  auto doc = nlohmann::json::parse(report.value, nullptr, false);
  if (doc.is_discarded() || !doc.contains("status")) return kExitFailed;
  return status_to_exit(doc.at("status").get<std::string>());
}

int run_parse(const std::string& file, int slide) {
  if (slide < 0) {
    std::cerr << "deckhand: slide numbers are 1-based\n";
    return kExitUsage;
  }
  DeckGuard deck;
  StringGuard err;
  dh_status status = dh_deck_load(file.c_str(), &deck.value, &err.value);
  if (status != DH_OK) return exit_code_for(status, err.value);
  StringGuard json;
  StringGuard err2;
  status = dh_deck_slide_json(deck.value, slide, &json.value, &err2.value);
  if (status == DH_E_RANGE) return exit_code_for(status, err2.value);
  if (status != DH_OK) return exit_code_for(status, err2.value);
  std::cout << json.value << "\n";
  return kExitSuccess;
}

int run_bench(const std::string& manifest, const std::string& config_path,
              bool explicit_config, int workers, const std::string& judge,
              const std::string& report_path, bool no_timing) {
  if (!std::filesystem::exists(manifest)) {
    std::cerr << "deckhand: no such manifest: " << manifest << "\n";
    return kExitIo;
  }
  ConfigGuard config;
  if (int rc = load_config(config_path, explicit_config, config); rc != 0)
    return rc;

  dh_bench_options options{};
  options.workers = workers;
  options.judge_mode = judge == "image"  ? DH_JUDGE_IMAGE
                       : judge == "text" ? DH_JUDGE_TEXT
                                         : DH_JUDGE_OFF;
  options.report_path = report_path.empty() ? nullptr : report_path.c_str();
  options.no_timing = no_timing ? 1 : 0;

  StringGuard report, err;
  dh_status status = dh_bench(config.value, manifest.c_str(), &options,
                              &report.value, &err.value);
  if (status == DH_E_FORMAT || status == DH_E_USAGE)
    return exit_code_for(status, err.value);
  if (status != DH_OK) {
    exit_code_for(status, err.value);
    return kExitFailed;  // the harness itself errored
  }
  std::cout << report.value << "\n";
  return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deckhand - natural-language slide editing and benchmarking"};
  app.require_subcommand(1);

  std::string config_path = "./deckhand.json";

  // edit
  auto* edit = app.add_subcommand("edit", "Apply an instruction to a deck");
  std::string edit_file, edit_instruction, edit_out, edit_mode = "pipeline";
  int edit_max_attempts = 0;
  bool edit_no_timing = false, edit_overwrite = false;
  edit->add_option("--file", edit_file, "Input .pptx file")->required();
  edit->add_option("--instruction", edit_instruction,
                   "Natural-language edit instruction")
      ->required();
  edit->add_option("--out", edit_out,
                   "Output path (default: <file>.edited.pptx)");
  edit->add_option("--mode", edit_mode, "pipeline|direct")
      ->check(CLI::IsMember({"pipeline", "direct"}));
  edit->add_option("--config", config_path, "Config file (JSON)");
  edit->add_option("--max-attempts", edit_max_attempts,
                   "Generation attempts per task (default from config)");
  edit->add_flag("--no-timing", edit_no_timing,
                 "Omit wall-clock fields from the report");
  edit->add_flag("--overwrite", edit_overwrite,
                 "Allow --out to equal the input file");

  // parse
  auto* parse = app.add_subcommand("parse", "Print a deck's structured JSON");
  std::string parse_file;
  int parse_slide = 0;
  parse->add_option("--file", parse_file, "Input .pptx file")->required();
  parse->add_option("--slide", parse_slide,
                    "1-based slide number (omit for all slides)");

  // bench
  auto* bench = app.add_subcommand("bench", "Run a benchmark manifest");
  std::string bench_manifest, bench_judge = "off", bench_report;
  int bench_workers = 0;
  bool bench_no_timing = false;
  bench->add_option("--manifest", bench_manifest, "JSON-lines manifest")
      ->required();
  bench->add_option("--config", config_path, "Config file (JSON)");
  bench->add_option("--workers", bench_workers, "Concurrent cases");
  bench->add_option("--judge", bench_judge, "image|text|off")
      ->check(CLI::IsMember({"image", "text", "off"}));
  bench->add_option("--report", bench_report, "Also write the report here");
  bench->add_flag("--no-timing", bench_no_timing,
                  "Omit wall-clock fields (byte-stable reports)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // CLI11 prints --help to stdout itself; route errors to stderr
    if (e.get_exit_code() == 0) return app.exit(e);
    std::ostringstream message;
    app.exit(e, message, message);
    std::cerr << message.str();
    return kExitUsage;
  }

  bool explicit_config = edit->count("--config") > 0 ||
                         bench->count("--config") > 0;

  if (edit->parsed())
    return run_edit(edit_file, edit_instruction, edit_out, edit_mode,
                    config_path, explicit_config, edit_max_attempts,
                    edit_no_timing, edit_overwrite);
  if (parse->parsed()) {
    if (parse->count("--slide") > 0 && parse_slide < 1) {
      std::cerr << "deckhand: slide numbers are 1-based\n";
      return kExitUsage;
    }
    return run_parse(parse_file, parse->count("--slide") > 0 ? parse_slide : 0);
  }
  if (bench->parsed())
    return run_bench(bench_manifest, config_path, explicit_config,
                     bench_workers, bench_judge, bench_report, bench_no_timing);
  return kExitUsage;
}
