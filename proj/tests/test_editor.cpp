#include <doctest.h>

#include <map>

#include "agent/editor.hpp"
#include "pptx/slide_json.hpp"
#include "support/error.hpp"
#include "testutil.hpp"

using namespace deckhand;
using namespace deckhand::agent;
namespace tu = testutil;

namespace {

Task task_for(int page) {
  Task t;
  t.page_number = page;
  t.description = "Recolor the title";
  t.target = "Title section of slide " + std::to_string(page);
  t.action = "Set color to red";
  return t;
}

// Independent leaf-by-leaf comparison: flatten both documents and diff the
// maps. Only valid when the documents share their array shapes.
void flatten(const Json& v, const std::string& path,
             std::map<std::string, Json>& out) {
  if (v.is_object()) {
    if (v.empty()) out[path] = v;
    for (auto it = v.begin(); it != v.end(); ++it)
      flatten(it.value(), path + "/" + it.key(), out);
  } else if (v.is_array()) {
    if (v.empty()) out[path] = v;
    for (std::size_t i = 0; i < v.size(); ++i)
      flatten(v[i], path + "/" + std::to_string(i), out);
  } else {
    out[path] = v;
  }
}

std::vector<std::string> oracle_diff(const Json& a, const Json& b) {
  std::map<std::string, Json> fa, fb;
  flatten(a, "", fa);
  flatten(b, "", fb);
  std::vector<std::string> paths;
  for (const auto& [path, value] : fa) {
    auto it = fb.find(path);
    if (it == fb.end() || it->second != value) paths.push_back(path);
  }
  for (const auto& [path, value] : fb)
    if (!fa.count(path)) paths.push_back(path);
  return paths;
}

}  // namespace

TEST_CASE("editor prompt embeds the rules, task, and slide") {
  Json before = pptx::slide_to_json(tu::basic_deck(), 1);
  std::string prompt = build_editor_prompt(task_for(1), before);
  CHECK(prompt.find("Only modify the elements specified in 'target'") !=
        std::string::npos);
  CHECK(prompt.find("You must maintain the exact input JSON structure") !=
        std::string::npos);
  CHECK(prompt.find("Give only the JSON.") != std::string::npos);
  CHECK(prompt.find("Recolor the title") != std::string::npos);
  CHECK(prompt.find(pptx::json_text(before)) != std::string::npos);
  CHECK(prompt == build_editor_prompt(task_for(1), before));
}

TEST_CASE("editor prompt rejects mismatched page numbers") {
  Json before = pptx::slide_to_json(tu::basic_deck(), 1);
  try {
    build_editor_prompt(task_for(3), before);
    FAIL("expected InternalError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::internal);
  }
}

TEST_CASE("parse_edited_slide accepts valid and fenced replies") {
  Json before = pptx::slide_to_json(tu::basic_deck(), 1);
  Json parsed = parse_edited_slide(before.dump());
  CHECK(parsed == before);
  CHECK(parse_edited_slide("```json\n" + before.dump(2) + "\n```") == before);
}

TEST_CASE("parse_edited_slide rejects schema violations") {
  Json before = pptx::slide_to_json(tu::basic_deck(), 1);
  Json broken = before;
  broken.erase("objects");
  try {
    parse_edited_slide(broken.dump());
    FAIL("expected EditParseError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::edit_parse);
    CHECK(std::string(e.what()).find("objects") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_edited_slide("not json at all"), Error);
}

TEST_CASE("identical documents validate with an empty diff") {
  Json before = pptx::slide_to_json(tu::fixture_corpus()[1], 1);
  EditDiff diff = validate_edited_slide(before, before, task_for(1));
  CHECK(diff.empty());
}

TEST_CASE("a single text change yields exactly that path") {
  Json before = pptx::slide_to_json(tu::fixture_corpus()[1], 1);
  Json after = before;
  after["objects"][0]["paragraphs"][0]["runs"][1]["text"] = "Bonjour";
  EditDiff diff = validate_edited_slide(before, after, task_for(1));
  REQUIRE(diff.changed_paths.size() == 1);
  CHECK(diff.changed_paths[0] == "/objects/0/paragraphs/0/runs/1/text");
}

TEST_CASE("structure mismatches are rejected") {
  Json before = pptx::slide_to_json(tu::fixture_corpus()[2], 1);

  Json missing = before;
  missing["objects"].erase(1);
  try {
    validate_edited_slide(before, missing, task_for(1));
    FAIL("expected StructureMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::structure_mismatch);
  }

  Json extra_run = before;
  extra_run["objects"][0]["paragraphs"][0]["runs"].push_back(
      Json{{"text", "sneaky"}});
  CHECK_THROWS_AS(validate_edited_slide(before, extra_run, task_for(1)), Error);

  Json renamed_id = before;
  renamed_id["objects"][0]["id"] = "999";
  CHECK_THROWS_AS(validate_edited_slide(before, renamed_id, task_for(1)), Error);

  Json dropped_paragraphs = before;
  dropped_paragraphs["objects"][0].erase("paragraphs");
  CHECK_THROWS_AS(
      validate_edited_slide(before, dropped_paragraphs, task_for(1)), Error);
}

TEST_CASE("value rewrites of any kind are accepted") {
  Json before = pptx::slide_to_json(tu::fixture_corpus()[6], 1);
  Json after = before;
  after["objects"][0]["fill"]["color_rgb"] = "0000FF";
  after["objects"][0]["position"]["left_emu"] = 42;
  after["notes"] = "now with notes";
  EditDiff diff = validate_edited_slide(before, after, task_for(1));
  CHECK(diff.changed_paths.size() == 3);
}

TEST_CASE("diff soundness against the flatten oracle") {
  tu::Rng rng(777);
  for (int i = 0; i < 200; ++i) {
    CAPTURE(i);
    Deck deck = tu::random_deck(rng, 2);
    Json before = pptx::slide_to_json(deck, 1);
    Json after = before;

    // random value-only mutations
    for (Json& object : after["objects"]) {
      if (rng.chance(0.3))
        object["position"]["top_emu"] = rng.below(100000);
      if (object.contains("paragraphs")) {
        for (Json& para : object["paragraphs"]) {
          for (Json& run : para["runs"]) {
            if (rng.chance(0.3)) run["text"] = "mut" + std::to_string(rng.below(10));
            if (rng.chance(0.2)) run["bold"] = rng.chance(0.5);
          }
        }
      }
    }
    if (rng.chance(0.3)) after["notes"] = "oracle notes";

    std::vector<std::string> got = json_leaf_diff(before, after);
    std::vector<std::string> want = oracle_diff(before, after);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    CHECK(got == want);
  }
}
