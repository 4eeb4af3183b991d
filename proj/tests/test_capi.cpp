#include <doctest.h>

#include <fstream>
#include <string>

#include <json.hpp>

#include "deckhand/deckhand.h"
#include "pptx/pptx_io.hpp"
#include "pptx/slide_json.hpp"
#include "testutil.hpp"

using Json = nlohmann::ordered_json;
namespace tu = deckhand::testutil;

namespace {

struct Str {
  char* value = nullptr;
  ~Str() { dh_string_free(value); }
};

void write_mock_setup(const tu::TempDir& tmp, const std::string& edited_title) {
  using deckhand::pptx::slide_to_json;
  deckhand::Deck deck = tu::basic_deck();
  deckhand::pptx::save_deck(deck, tmp.file("deck.pptx"));

  Json before = slide_to_json(deck, 1);
  Json after = before;
  after["objects"][0]["paragraphs"][0]["runs"][0]["text"] = edited_title;

  Json plan_task;
  plan_task["page number"] = 1;
  plan_task["description"] = "rename the title";
  plan_task["target"] = "Title";
  plan_task["action"] = "Replace text";
  plan_task["contents"] = Json::object();
  Json plan;
  plan["understanding"] = "rename";
  plan["tasks"] = Json::array({plan_task});

  Json script;
  script["ops"] = Json::array(
      {Json{{"set_run_text", Json{{"slide", 1},
                                  {"shape_selector", "Title 1"},
                                  {"paragraph_index", 0},
                                  {"run_index", 0},
                                  {"text", edited_title}}}}});

  std::ofstream replies(tmp.file("replies.jsonl"));
  auto line = [&replies](const std::string& stage, const Json& payload) {
    Json entry;
    entry["stage"] = stage;
    entry["text"] = payload.dump();
    entry["input_tokens"] = 100;
    entry["output_tokens"] = 20;
    replies << entry.dump() << "\n";
  };
  line("planner", plan);
  line("editor", after);
  line("codegen", script);

  std::ofstream config(tmp.file("deckhand.json"));
  config << R"({"mock_script": "replies.jsonl"})";
}

}  // namespace

TEST_CASE("deck handles load, inspect, and save") {
  tu::TempDir tmp;
  deckhand::pptx::save_deck(tu::basic_deck(), tmp.file("deck.pptx"));

  dh_deck* deck = nullptr;
  Str err;
  REQUIRE(dh_deck_load(tmp.file("deck.pptx").c_str(), &deck, &err.value) ==
          DH_OK);
  CHECK(dh_deck_slide_count(deck) == 1);

  Str slide_json;
  REQUIRE(dh_deck_slide_json(deck, 1, &slide_json.value, nullptr) == DH_OK);
  Json parsed = Json::parse(slide_json.value);
  CHECK(parsed["objects"][0]["paragraphs"][0]["runs"][0]["text"] == "Hello");

  Str all_json;
  REQUIRE(dh_deck_slide_json(deck, 0, &all_json.value, nullptr) == DH_OK);
  CHECK(Json::parse(all_json.value).is_array());

  Str summary;
  REQUIRE(dh_deck_summary_json(deck, &summary.value, nullptr) == DH_OK);
  CHECK(Json::parse(summary.value)["slide_count"] == 1);

  Str range_err;
  CHECK(dh_deck_slide_json(deck, 5, &slide_json.value, &range_err.value) ==
        DH_E_RANGE);
  CHECK(range_err.value != nullptr);

  REQUIRE(dh_deck_save(deck, tmp.file("copy.pptx").c_str(), nullptr) == DH_OK);
  dh_deck_free(deck);

  dh_deck* copy = nullptr;
  REQUIRE(dh_deck_load(tmp.file("copy.pptx").c_str(), &copy, nullptr) == DH_OK);
  CHECK(dh_deck_slide_count(copy) == 1);
  dh_deck_free(copy);
}

TEST_CASE("load failures map to status codes with messages") {
  tu::TempDir tmp;
  std::ofstream(tmp.file("text.pptx")) << "not a zip";
  dh_deck* deck = nullptr;
  Str err;
  CHECK(dh_deck_load(tmp.file("text.pptx").c_str(), &deck, &err.value) ==
        DH_E_FORMAT);
  CHECK(deck == nullptr);
  REQUIRE(err.value != nullptr);
  CHECK(std::string(err.value).find("NotAZip") != std::string::npos);

  CHECK(dh_deck_load(tmp.file("missing.pptx").c_str(), &deck, nullptr) ==
        DH_E_IO);
  CHECK(dh_deck_load(nullptr, &deck, nullptr) == DH_E_USAGE);
}

TEST_CASE("dh_edit runs the staged pipeline from a config file") {
  tu::TempDir tmp;
  write_mock_setup(tmp, "Via C API");

  dh_config* config = nullptr;
  REQUIRE(dh_config_load(tmp.file("deckhand.json").c_str(), &config, nullptr) ==
          DH_OK);

  dh_edit_options options{};
  std::string out_path = tmp.file("edited.pptx");
  options.out_path = out_path.c_str();
  options.no_timing = 1;

  Str report, err;
  dh_status status =
      dh_edit(config, tmp.file("deck.pptx").c_str(), "rename the title",
              &options, &report.value, &err.value);
  REQUIRE(status == DH_OK);
  Json doc = Json::parse(report.value);
  CHECK(doc["status"] == "success");
  CHECK(doc["tasks"][0]["status"] == "success");
  CHECK(!doc.contains("wall_time_seconds"));

  deckhand::Deck edited = deckhand::pptx::load_deck(out_path);
  CHECK(deckhand::paragraph_text(
            edited.slides[0].shapes[0].text_frame->paragraphs[0]) ==
        "Via C API");
  dh_config_free(config);
}

TEST_CASE("dh_edit rejects empty instructions as usage errors") {
  tu::TempDir tmp;
  write_mock_setup(tmp, "x");
  dh_config* config = nullptr;
  REQUIRE(dh_config_load(tmp.file("deckhand.json").c_str(), &config, nullptr) ==
          DH_OK);
  Str report, err;
  CHECK(dh_edit(config, tmp.file("deck.pptx").c_str(), "  ", nullptr,
                &report.value, &err.value) == DH_E_USAGE);
  dh_config_free(config);
}

TEST_CASE("dh_bench runs a manifest against the mock") {
  tu::TempDir tmp;
  write_mock_setup(tmp, "Benchmarked");
  std::ofstream(tmp.file("manifest.jsonl"))
      << R"({"instruction_key":"0","instruction":"rename the title",)"
      << R"("category":"TextEditing","pptx_file":"deck.pptx"})" << "\n";

  dh_config* config = nullptr;
  REQUIRE(dh_config_load(tmp.file("deckhand.json").c_str(), &config, nullptr) ==
          DH_OK);

  dh_bench_options options{};
  options.no_timing = 1;
  std::string report_path = tmp.file("report.json");
  options.report_path = report_path.c_str();

  Str report, err;
  REQUIRE(dh_bench(config, tmp.file("manifest.jsonl").c_str(), &options,
                   &report.value, &err.value) == DH_OK);
  Json doc = Json::parse(report.value);
  CHECK(doc["suite"]["overall"]["sr_percent"] == 100.0);
  CHECK(doc["records"][0]["sr"] == true);
  CHECK(std::filesystem::exists(report_path));

  dh_config_free(config);
}

TEST_CASE("dh_config_default exposes the shipped pricing") {
  dh_config* config = nullptr;
  REQUIRE(dh_config_default(&config, nullptr) == DH_OK);
  CHECK(config != nullptr);
  dh_config_free(config);
  CHECK(std::string(dh_version()).find('.') != std::string::npos);
}
