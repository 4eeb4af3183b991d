#include <doctest.h>

#include "pptx/pptx_io.hpp"
#include "pptx/slide_json.hpp"
#include "support/error.hpp"
#include "testutil.hpp"

using namespace deckhand;
namespace tu = testutil;
using pptx::Json;

TEST_CASE("slide_to_json emits the schema in order") {
  Deck deck = tu::fixture_corpus()[1];  // mixed formats
  Json j = pptx::slide_to_json(deck, 1);

  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"slide_index", "layout_name",
                                         "background", "transition", "notes",
                                         "objects"});
  CHECK(j["slide_index"] == 1);
  CHECK(j["transition"].is_null());
  REQUIRE(j["objects"].size() == deck.slides[0].shapes.size());

  const Json& run0 = j["objects"][0]["paragraphs"][0]["runs"][0];
  CHECK(run0["text"] == "alpha ");
  CHECK(run0["bold"] == true);
  CHECK(run0["color_rgb"] == "FF0000");
  CHECK(run0["size_points"] == 24.0);
}

TEST_CASE("slide_to_json rejects out-of-range indices") {
  Deck deck = tu::basic_deck();
  try {
    pptx::slide_to_json(deck, 0);
    FAIL("expected SlideOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::slide_out_of_range);
  }
  CHECK_THROWS_AS(pptx::slide_to_json(deck, 2), Error);
}

TEST_CASE("slide_to_json text is byte-deterministic") {
  Deck a = tu::fixture_corpus()[5];
  Deck b = tu::fixture_corpus()[5];
  CHECK(pptx::json_text(pptx::slide_to_json(a, 1)) ==
        pptx::json_text(pptx::slide_to_json(b, 1)));
}

TEST_CASE("json -> slide -> json is the identity on modeled fields") {
  tu::Rng rng(424242);
  for (int i = 0; i < 50; ++i) {
    CAPTURE(i);
    Deck deck = tu::random_deck(rng);
    for (const Slide& slide : deck.slides) {
      Json j = pptx::slide_to_json(slide);
      REQUIRE(pptx::validate_slide_json(j).empty());
      Slide rebuilt = pptx::slide_from_json(j);
      CHECK(pptx::slide_to_json(rebuilt) == j);
      CHECK(pptx::json_text(pptx::slide_to_json(rebuilt)) == pptx::json_text(j));
    }
  }
}

TEST_CASE("picture fixtures expose image_ref and fills serialize as hex") {
  Deck deck = tu::fixture_corpus()[2];
  Json j = pptx::slide_to_json(deck, 1);
  CHECK(j["objects"][1]["type"] == "picture");
  CHECK(j["objects"][1]["image_ref"] == "ppt/media/image1.png");

  Deck bg = tu::fixture_corpus()[6];
  Json k = pptx::slide_to_json(bg, 1);
  CHECK(k["background"]["kind"] == "solid");
  CHECK(k["background"]["color_rgb"] == "1A2B3C");
  CHECK(k["objects"][0]["fill"]["color_rgb"] == "00FF00");
}

TEST_CASE("validate_slide_json pinpoints schema violations") {
  Json good = pptx::slide_to_json(tu::basic_deck(), 1);
  CHECK(pptx::validate_slide_json(good).empty());

  Json missing_objects = good;
  missing_objects.erase("objects");
  auto problems = pptx::validate_slide_json(missing_objects);
  REQUIRE(!problems.empty());
  CHECK(problems[0].find("objects") != std::string::npos);

  Json bad_color = good;
  bad_color["objects"][0]["paragraphs"][0]["runs"][0]["color_rgb"] = "red";
  CHECK(!pptx::validate_slide_json(bad_color).empty());

  Json negative = good;
  negative["objects"][0]["position"]["width_emu"] = -5;
  CHECK(!pptx::validate_slide_json(negative).empty());

  Json extra_key = good;
  extra_key["surprise"] = 1;
  CHECK(!pptx::validate_slide_json(extra_key).empty());

  Json solid_no_color = good;
  solid_no_color["background"] = Json{{"kind", "solid"}};
  CHECK(!pptx::validate_slide_json(solid_no_color).empty());
}

TEST_CASE("deck_summary reports counts, titles, and kind histograms") {
  auto corpus = tu::fixture_corpus();
  Json five = pptx::deck_summary(corpus[4]);
  CHECK(five["slide_count"] == 5);
  REQUIRE(five["slides"].size() == 5);
  CHECK(five["slides"][0]["title_text"] == "Slide 1");
  CHECK(five["slides"][4]["index"] == 5);

  Json with_picture = pptx::deck_summary(corpus[2]);
  CHECK(with_picture["slides"][0]["shape_count"] == 2);
  CHECK(with_picture["slides"][0]["shape_kinds"]["picture"] == 1);
  CHECK(with_picture["slides"][0]["shape_kinds"]["textbox"] == 1);

  // a slide with no text shapes has an empty title
  Deck no_text = tu::basic_deck();
  no_text.slides[0].shapes.clear();
  Json summary = pptx::deck_summary(no_text);
  CHECK(summary["slides"][0]["title_text"] == "");
}

TEST_CASE("title comes from the first placeholder or textbox") {
  Deck deck = tu::basic_deck();
  deck.slides[0].shapes[0].text_frame->paragraphs = {
      Paragraph{{tu::run("Intro")}, std::nullopt, std::nullopt}};
  Json summary = pptx::deck_summary(deck);
  CHECK(summary["slides"][0]["title_text"] == "Intro");
}
