#include <doctest.h>

#include "agent/planner.hpp"
#include "pptx/slide_json.hpp"
#include "support/error.hpp"
#include "support/jsontext.hpp"
#include "testutil.hpp"

using namespace deckhand;
using namespace deckhand::agent;
namespace tu = testutil;

namespace {

// The worked example reply shown in the planning prompt itself, including
// its trailing comma.
const char* kWorkedExampleReply = R"PLAN({
    "understanding": "English translation of slide titles on slides 3 and 5",
    "tasks": [
        {
            "page number": 3,
            "description": "Translate the title text of slide 3",
            "target": "Title section of slide 3",
            "action": "Translate to English",
            "contents": {
                "source_language": "auto-detect",
                "preserve_formatting": true
            }
        },
        {
            "page number": 5,
            "description": "Translate the title text of slide 5",
            "target": "Title section of slide 5",
            "action": "Translate to English",
            "contents": {
                "source_language": "auto-detect",
                "preserve_formatting": true
            }
        }
    ],
})PLAN";

}  // namespace

TEST_CASE("planner prompt carries the template, summary, and instruction") {
  Json summary = pptx::deck_summary(tu::fixture_corpus()[4]);
  std::string prompt = build_planner_prompt("Make every title bold", summary);

  CHECK(prompt.find("planning assistant for PowerPoint modifications") !=
        std::string::npos);
  CHECK(prompt.find("Please write one task for one slide page.") !=
        std::string::npos);
  CHECK(prompt.find("Response in JSON format.") != std::string::npos);
  CHECK(prompt.find("Make every title bold") != std::string::npos);

  // the serialized summary appears exactly once
  std::string summary_text = pptx::json_text(summary);
  auto first = prompt.find(summary_text);
  REQUIRE(first != std::string::npos);
  CHECK(prompt.find(summary_text, first + 1) == std::string::npos);

  CHECK(prompt == build_planner_prompt("Make every title bold", summary));
}

TEST_CASE("parse_plan reads the worked example output") {
  Plan plan = parse_plan(kWorkedExampleReply);
  CHECK(plan.understanding ==
        "English translation of slide titles on slides 3 and 5");
  REQUIRE(plan.tasks.size() == 2);
  CHECK(plan.tasks[0].page_number == 3);
  CHECK(plan.tasks[1].page_number == 5);
  CHECK(plan.tasks[0].action == "Translate to English");
  CHECK(plan.tasks[1].action == "Translate to English");
  CHECK(plan.tasks[0].contents.at("source_language") == "auto-detect");
}

TEST_CASE("fenced and unfenced plans parse identically") {
  Plan bare = parse_plan(kWorkedExampleReply);
  Plan fenced = parse_plan("```json\n" + std::string(kWorkedExampleReply) +
                           "\n```");
  CHECK(plan_to_json(bare) == plan_to_json(fenced));

  Plan prose = parse_plan("Here is the plan you asked for:\n```\n" +
                          std::string(kWorkedExampleReply) + "\n```\nDone!");
  CHECK(plan_to_json(bare) == plan_to_json(prose));
}

TEST_CASE("parse_plan failures carry the raw reply") {
  try {
    parse_plan("not json");
    FAIL("expected PlanParseError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::plan_parse);
    CHECK(std::string(e.what()).find("not json") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_plan(R"({"understanding": "x"})"), Error);  // no tasks
  CHECK_THROWS_AS(parse_plan(R"({"tasks": [{"description": "no page"}]})"),
                  Error);
  CHECK_THROWS_AS(
      parse_plan(R"({"tasks": [{"page number": "three"}]})"), Error);
}

TEST_CASE("parse_plan round-trips serialized plans") {
  Plan plan = parse_plan(kWorkedExampleReply);
  Plan again = parse_plan(plan_to_json(plan).dump());
  CHECK(plan_to_json(again) == plan_to_json(plan));
}

TEST_CASE("validate_plan checks page ranges without mutating") {
  Deck deck = tu::fixture_corpus()[4];  // 5 slides
  Plan plan = parse_plan(kWorkedExampleReply);
  const Plan& validated = validate_plan(plan, deck);
  CHECK(&validated == &plan);
  CHECK(plan_to_json(validated) == plan_to_json(parse_plan(kWorkedExampleReply)));

  Plan out_of_range = plan;
  out_of_range.tasks[1].page_number = 7;
  try {
    validate_plan(out_of_range, deck);
    FAIL("expected PageOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::page_out_of_range);
    CHECK(std::string(e.what()).find("7") != std::string::npos);
  }

  Plan empty;
  try {
    validate_plan(empty, deck);
    FAIL("expected EmptyPlan");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::empty_plan);
  }
}

TEST_CASE("refuse-only plans skip the page range check") {
  Deck deck = tu::basic_deck();
  Plan plan;
  Task task;
  task.page_number = 99;  // irrelevant for refusals
  task.action = "refuse";
  task.description = "cannot inspect audio";
  plan.tasks.push_back(task);
  CHECK_NOTHROW(validate_plan(plan, deck));
  CHECK(is_refusal_task(plan.tasks[0]));

  Task normal;
  normal.action = "Translate to English";
  CHECK(!is_refusal_task(normal));
}

TEST_CASE("json cleanup helpers") {
  CHECK(strip_code_fences("```json\n{\"a\":1}\n```") == "{\"a\":1}");
  CHECK(strip_code_fences("{\"a\":1}") == "{\"a\":1}");
  CHECK(strip_trailing_commas("{\"a\": [1,2,],}") == "{\"a\": [1,2]}");
  // commas inside strings survive
  CHECK(strip_trailing_commas("{\"s\": \"a,}\"}") == "{\"s\": \"a,}\"}");
}
